import math

import numpy as np
import pytest

from fraxion.errors import DomainError, ShapeError
from fraxion.field import (
    GridSpec,
    SpaceTimeField,
    SpaceTimeTestFunction,
    convolve,
    gaussian,
    grid_norm,
)
from fraxion.heatsg import (
    apply_pt,
    apply_pth,
    heat_kernel,
    newtonian_constant,
    sample_heat_kernel,
    subordination_newtonian,
    tau_horizon,
    time_support_radius,
)

ONE_OVER_4PI = 0.07957747154594767
ONE_OVER_8PI = 0.039788735772973836
ONE_OVER_4PI2 = 0.025330295910584444


class TestKernel:
    def test_unit_peak_anchor(self):
        assert heat_kernel([0.0], 1.0 / (4.0 * math.pi), 1) == pytest.approx(1.0)

    def test_positive_and_domain(self):
        assert heat_kernel([1.0, 2.0], 0.3, 2) > 0
        with pytest.raises(DomainError):
            heat_kernel([0.0], 0.0, 1)

    def test_grid_mass(self, grid1d):
        k = sample_heat_kernel(grid1d, 1.0)
        assert abs(np.real(np.sum(k.samples)) * grid1d.spacing - 1.0) < 1e-10

    def test_chapman_kolmogorov(self, grid1d):
        k_half = sample_heat_kernel(grid1d, 0.5)
        k_one = sample_heat_kernel(grid1d, 1.0)
        ck = convolve(k_half, k_half)
        assert np.max(np.abs(ck.samples - k_one.samples)) < 1e-8

    def test_heat_equation_residual(self):
        h = 1e-2
        for (x, t) in ((0.4, 0.5), (1.0, 0.8)):
            lap = (
                heat_kernel([x + h], t, 1)
                - 2 * heat_kernel([x], t, 1)
                + heat_kernel([x - h], t, 1)
            ) / (h * h)
            dt = (heat_kernel([x], t + h, 1) - heat_kernel([x], t - h, 1)) / (2 * h)
            assert abs(dt - lap) <= 50.0 * h * h * abs(lap)


class TestSemigroup:
    def test_gaussian_closed_form(self, grid1d):
        tf = gaussian(0.25)  # e^{-|x|^2/4}, i.e. unit-width
        f = tf.sample(grid1d)
        t = 0.7
        out = apply_pt(f, t)
        exact = tf.heat_evolution(grid1d.axis()[:, None], t, 1)
        assert np.max(np.abs(out.samples - exact)) < 1e-9

    def test_route_agreement(self, gauss1d):
        a = apply_pt(gauss1d, 0.5, method="spectral")
        b = apply_pt(gauss1d, 0.5, method="convolution")
        assert np.max(np.abs(a.samples - b.samples)) < 1e-8

    def test_strong_continuity(self, gauss1d):
        out = apply_pt(gauss1d, 1e-6)
        assert grid_norm(gauss1d.with_samples(out.samples - gauss1d.samples), "inf") < 1e-4

    def test_contraction(self, gauss1d):
        for t in (0.1, 1.0, 10.0):
            out = apply_pt(gauss1d, t)
            for p in (1, 2, "inf"):
                assert grid_norm(out, p) <= grid_norm(gauss1d, p) * (1 + 1e-12)

    def test_ultracontractivity_constant(self, grid1d):
        # |P_t f| <= (4 pi t)^{-n/2} ||f||_1, approached by peaked inputs
        f = gaussian(1024.0).sample(grid1d)
        n1 = grid_norm(f, 1)
        for t in (0.5, 2.0):
            peak = grid_norm(apply_pt(f, t), "inf")
            bound = (4.0 * math.pi * t) ** -0.5 * n1
            assert peak <= bound * (1 + 1e-10)
            assert peak >= 0.95 * bound

    def test_rate_bound(self, grid1d):
        from fraxion.fracops import fraclap_spectral

        tf = gaussian(math.pi)
        f = tf.sample(grid1d)
        lap = fraclap_spectral(f, 1.0)
        for t in (0.05, 0.5, 1.0):
            diff = apply_pt(f, t).samples - f.samples
            for p in (1, 2, "inf"):
                assert grid_norm(f.with_samples(diff), p) <= t * grid_norm(lap, p)


class TestSubordination:
    def test_newtonian_anchors(self):
        assert subordination_newtonian([1.0, 0, 0], 3) == pytest.approx(
            ONE_OVER_4PI, rel=1e-8
        )
        assert subordination_newtonian([2.0, 0, 0], 3) == pytest.approx(
            ONE_OVER_8PI, rel=1e-8
        )
        assert subordination_newtonian([1.0, 0, 0, 0], 4) == pytest.approx(
            ONE_OVER_4PI2, rel=1e-8
        )

    def test_matches_constant_formula(self):
        x = [1.3, -0.4, 0.2]
        r = math.sqrt(sum(v * v for v in x))
        assert subordination_newtonian(x, 3) == pytest.approx(
            newtonian_constant(3) * r ** -1.0, rel=1e-8
        )

    def test_low_dimension_rejected(self):
        with pytest.raises(DomainError):
            subordination_newtonian([1.0, 0.0], 2)


class TestEvolutive:
    def test_time_constant_reduces_to_heat(self, st_grid):
        g_spatial = GridSpec(1, st_grid.points_per_axis, st_grid.half_width)
        u = gaussian(math.pi).sample(g_spatial)
        const = SpaceTimeField(
            st_grid,
            np.repeat(u.samples[:, None], st_grid.time_points, axis=1),
            "physical",
        )
        out = apply_pth(const, 0.4)
        slicewise = apply_pt(u, 0.4)
        assert np.max(np.abs(out.samples - slicewise.samples[:, None])) < 1e-10

    def test_semigroup_law(self, st_gauss):
        twice = apply_pth(apply_pth(st_gauss, 0.3), 0.3)
        direct = apply_pth(st_gauss, 0.6)
        assert np.max(np.abs(twice.samples - direct.samples)) < 1e-9

    def test_closed_form(self, st_grid, st_gauss):
        tf = SpaceTimeTestFunction(gaussian(math.pi), ct=math.pi)
        mesh = np.stack([m.ravel() for m in st_grid.meshes()], axis=1)
        exact = tf.evolutive_closed_form(mesh, 0.3, 1).reshape(st_grid.shape)
        got = apply_pth(st_gauss, 0.3)
        assert np.max(np.abs(got.samples - exact)) < 1e-10

    def test_methods_agree(self, st_gauss):
        a = apply_pth(st_gauss, 0.3, method="spectral")
        b = apply_pth(st_gauss, 0.3, method="physical")
        assert np.max(np.abs(a.samples - b.samples)) < 1e-8

    def test_parabolic_dilation(self):
        # P^H_tau(f(lam x, lam^2 t)) = (P^H_{lam^2 tau} f)(lam x, lam^2 t)
        lam = 2.0
        g = GridSpec(1, 128, 12.0, time_points=1024, time_half_width=32.0)
        tf = SpaceTimeTestFunction(gaussian(math.pi / 4.0), ct=0.25)
        f = tf.sample(g)
        dil_vals = tf(
            np.stack(
                [lam * g.meshes()[0].ravel(), lam * lam * g.meshes()[1].ravel()],
                axis=1,
            )
        ).reshape(g.shape)
        dil = SpaceTimeField(g, dil_vals, "physical")
        tau = 0.25
        lhs = apply_pth(dil, tau)
        rhs = apply_pth(f, lam * lam * tau)
        npts, ntim = g.points_per_axis, g.time_points
        jx = np.arange(npts // 4, 3 * npts // 4)
        jt = np.arange(3 * ntim // 8, 5 * ntim // 8)
        mx = 2 * jx - npts // 2
        mt = 4 * jt - 3 * (ntim // 2)
        ok = (mt >= 0) & (mt < ntim)
        sel_l = np.ix_(jx, jt[ok])
        sel_r = np.ix_(mx, mt[ok])
        assert np.max(np.abs(lhs.samples[sel_l] - rhs.samples[sel_r])) < 1e-9

    def test_weak_ultracontractivity(self, st_gauss, st_grid):
        h = st_grid.spacing
        norm = float(
            np.max(np.sqrt(np.sum(np.abs(st_gauss.samples) ** 2, axis=0) * h))
        )
        c = (8.0 * math.pi) ** -0.25
        for tau in (0.5, 2.0):
            peak = grid_norm(apply_pth(st_gauss, tau), "inf")
            assert peak <= c * tau ** -0.25 * norm * (1 + 1e-10)

    def test_rate_bound(self, st_gauss, st_grid):
        from fraxion.field import FREQUENCY, fourier, inverse_fourier

        fh = fourier(st_gauss)
        meshes = st_grid.freq_meshes()
        lam = 4 * math.pi ** 2 * meshes[0] ** 2 + 2j * math.pi * meshes[1]
        hf = inverse_fourier(fh.with_samples(fh.samples * (-lam), FREQUENCY))
        for tau in (0.05, 0.5, 1.0):
            diff = apply_pth(st_gauss, tau).samples - st_gauss.samples
            for p in (1, 2, "inf"):
                assert grid_norm(st_gauss.with_samples(diff), p) <= tau * grid_norm(
                    hf, p
                ) * (1 + 1e-10)

    def test_horizon_bookkeeping(self, st_gauss):
        assert time_support_radius(st_gauss) < 4.0
        tau_safe, tau_wrap = tau_horizon(st_gauss)
        assert 0 < tau_safe < tau_wrap

    def test_horizon_rejects_small_boxes(self):
        g = GridSpec(1, 64, 12.0, time_points=32, time_half_width=2.0)
        f = SpaceTimeTestFunction(gaussian(math.pi), ct=0.5).sample(g)
        with pytest.raises(ShapeError):
            tau_horizon(f)
