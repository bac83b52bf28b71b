import math
from fractions import Fraction

import numpy as np
import pytest

from fraxion.errors import DomainError, LadderError, StencilError
from fraxion.field import GridSpec, SpaceTimeTestFunction, gaussian
from fraxion import extension as ex
from fraxion import fracops as fo


@pytest.fixture(scope="module")
def fine_grid():
    return GridSpec(1, 1024, 12.0)


@pytest.fixture(scope="module")
def fine_gauss(fine_grid):
    return gaussian(math.pi).sample(fine_grid)


@pytest.fixture(scope="module")
def st_field():
    g = GridSpec(1, 128, 12.0, time_points=256, time_half_width=16.0)
    return SpaceTimeTestFunction(gaussian(math.pi), ct=math.pi).sample(g)


class TestKernels:
    def test_classical_poisson_kernel_at_half(self):
        # s = 1/2 gives the standard half-space Poisson kernel
        kern = ex.PoissonKernel("elliptic", 1, fo.FracOrder(0.5))
        x, y = 0.3, 0.7
        classical = y / (math.pi * (x * x + y * y))
        assert float(kern([[x]], y)[0]) == pytest.approx(classical, rel=1e-12)

    def test_unit_masses(self):
        for var, n, s in (
            ("elliptic", 1, 0.5),
            ("elliptic", 2, 0.25),
            ("elliptic", 1, 0.75),
            ("parabolic", 1, 0.5),
            ("higher", 1, 1.5),
            ("higher", 2, 2.5),
        ):
            for y in (0.1, 0.4):
                assert abs(ex.kernel_mass(var, n, s, y) - 1.0) < 1e-6

    def test_variant_guards(self):
        with pytest.raises(DomainError):
            ex.PoissonKernel("elliptic", 1, fo.FracOrder(1.5))
        with pytest.raises(DomainError):
            ex.PoissonKernel("spherical", 1, fo.FracOrder(0.5))

    def test_kernel_matches_fundamental_solution_route(self):
        # the elliptic kernel equals the fractional Laplacian of the
        # regularized fundamental solution (checked in closed form)
        n, s, y = 2, 0.5, 1.0
        kern = ex.PoissonKernel("elliptic", n, fo.FracOrder(s))
        x = np.array([[0.8, -0.3]])
        expected = (
            y ** (2 * s)
            * math.gamma(0.5 * n + s)
            / (math.pi ** (0.5 * n) * math.gamma(s))
            * (y * y + float(x @ x.T)) ** (-(0.5 * n + s))
        )
        assert float(kern(x, y)[0]) == pytest.approx(expected, rel=1e-12)


class TestElliptic:
    def test_trace_convergence(self, fine_gauss):
        sol = ex.solve_elliptic(fine_gauss, 0.5)
        errs = [
            float(np.max(np.abs(r.samples - fine_gauss.samples))) for r in sol.rungs
        ]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 0.02

    def test_rungs_match_bessel_multiplier(self, fine_gauss, fine_grid):
        from fraxion.field import FREQUENCY, fourier, inverse_fourier
        from fraxion.specfun import bessel, gamma

        s = 0.5
        sol = ex.solve_elliptic(fine_gauss, s, y_ladder=(0.4, 0.2))
        uhat = fourier(fine_gauss)
        xi = fine_grid.freq_axis()
        interior = np.abs(fine_grid.axis()) <= 6.0
        for y, rung in zip(sol.y_ladder, sol.rungs):
            z = 2.0 * math.pi * np.abs(xi) * y
            mult = np.ones_like(z)
            nz = z > 0
            ks = np.array([bessel("K", s, zz).value.real for zz in z[nz]])
            mult[nz] = z[nz] ** s * ks / (2.0 ** (s - 1.0) * gamma(s).value.real)
            exact = inverse_fourier(uhat.with_samples(uhat.samples * mult, FREQUENCY))
            # the multiplier reference is periodized and carries its own
            # image tails ~ sum_m P(x + 2Lm) ~ 9e-4 at the top rung, so the
            # two routes can only be expected to agree at that level
            assert np.max(np.abs(rung.samples - exact.samples)[interior]) < 1.5e-3

    def test_dtn_matches_spectral(self, fine_gauss, fine_grid):
        for s in (0.25, 0.5, 0.75):
            sol = ex.solve_elliptic(fine_gauss, s)
            trace = ex.dtn_elliptic(sol, fine_gauss, s)
            ref = fo.fraclap_spectral(fine_gauss, s)
            mask = np.abs(fine_grid.axis()) <= 6.0
            sup = np.max(np.abs(np.real(ref.samples[mask])))
            err = np.max(
                np.abs(np.real(trace.samples[mask]) - np.real(ref.samples[mask]))
            )
            assert err / sup <= 1e-2

    def test_dtn_zero_input(self, fine_grid):
        from fraxion.field import ScalarField

        z = ScalarField(fine_grid, np.zeros(fine_grid.shape, dtype=complex))
        sol = ex.solve_elliptic(z, 0.5)
        trace = ex.dtn_elliptic(sol, z, 0.5)
        assert np.max(np.abs(trace.samples)) < 1e-12

    def test_ladder_validation(self, fine_gauss):
        with pytest.raises(LadderError):
            ex.solve_elliptic(fine_gauss, 0.5, y_ladder=(0.1, 0.2))
        sol = ex.solve_elliptic(fine_gauss, 0.5, y_ladder=(0.4, 0.2, 0.1))
        with pytest.raises(LadderError):
            ex.dtn_elliptic(sol, fine_gauss, 0.5)

    def test_higher_order_rejected(self, fine_gauss):
        with pytest.raises(DomainError):
            ex.solve_elliptic(fine_gauss, 1.5)


class TestSubordinated:
    def test_trace_convergence_and_masses(self, st_field):
        sol = ex.solve_parabolic(st_field, 0.5)
        t = st_field.grid.time_axis()
        tmask = np.abs(t) <= 4.0
        errs = [
            float(
                np.sqrt(
                    np.mean(np.abs(r.samples[:, tmask] - st_field.samples[:, tmask]) ** 2)
                )
            )
            for r in sol.rungs
        ]
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_parabolic_dtn(self, st_field):
        sol = ex.solve_parabolic(st_field, 0.5)
        trace = ex.dtn_parabolic(sol, st_field, 0.5)
        oracle = fo.fracheat_multiplier_oracle(st_field, 0.5)
        g = st_field.grid
        sel = np.ix_(
            np.where(np.abs(g.axis()) <= 6.0)[0],
            np.where(np.abs(g.time_axis()) <= 4.0)[0],
        )
        sup = np.max(np.abs(oracle.samples[sel]))
        assert np.max(np.abs(trace.samples[sel] - oracle.samples[sel])) / sup < 2e-2

    def test_higher_dtn_s15(self, st_field):
        sol = ex.solve_higher(st_field, 1.5)
        trace = ex.dtn_higher(sol, st_field, 1.5)
        oracle = fo.fracheat_multiplier_oracle(st_field, 1.5)
        g = st_field.grid
        sel = np.ix_(
            np.where(np.abs(g.axis()) <= 6.0)[0],
            np.where(np.abs(g.time_axis()) <= 4.0)[0],
        )
        sup = np.max(np.abs(oracle.samples[sel]))
        assert np.max(np.abs(trace.samples[sel] - oracle.samples[sel])) / sup < 2e-2

    def test_higher_equals_parabolic_below_one(self, st_field):
        a = ex.solve_parabolic(st_field, 0.5)
        b = ex.solve_higher(st_field, 0.5)
        worst = max(
            float(np.max(np.abs(x.samples - y.samples)))
            for x, y in zip(a.rungs, b.rungs)
        )
        assert worst < 1e-10

    def test_trace_quadratic_rate(self, st_field):
        # ||U(., y, .) - f|| = O(y^2) for s > 1
        sol = ex.solve_higher(st_field, 1.5)
        t = st_field.grid.time_axis()
        tmask = np.abs(t) <= 4.0
        errs = [
            float(
                np.sqrt(
                    np.mean(np.abs(r.samples[:, tmask] - st_field.samples[:, tmask]) ** 2)
                )
            )
            for r in sol.rungs
        ]
        slope = np.polyfit(np.log(sol.y_ladder[2:]), np.log(errs[2:]), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.2)

    def test_odd_derivative_vanishes(self, st_field):
        # with k = 1 and a = 0 the plain y-derivative itself tends to zero
        s = 1.5
        ys = (0.4, 0.2, 0.1, 0.05, 0.025)
        stencil = []
        for y in ys:
            stencil.extend([y * 1.05, y, y * 0.95])
        sol = ex.solve_higher(st_field, s, y_ladder=tuple(sorted(set(stencil), reverse=True)))
        ladder = sorted(set(stencil), reverse=True)
        t = st_field.grid.time_axis()
        tmask = np.abs(t) <= 4.0
        vals = []
        for y in ys:
            up = sol.rungs[ladder.index(y * 1.05)].samples
            dn = sol.rungs[ladder.index(y * 0.95)].samples
            der = (up - dn) / (0.1 * y)
            vals.append(float(np.max(np.abs(der[:, tmask]))))
        assert all(b < a for a, b in zip(vals, vals[1:]))
        slope = np.polyfit(np.log(ys[2:]), np.log(vals[2:]), 1)[0]
        assert slope > 0.5

    def test_pde_residual_shrinks(self, st_field):
        rel, _, _ = ex.extension_pde_residual(st_field, 1.5, y0=0.8, delta_y=0.02)
        rel_fine, _, _ = ex.extension_pde_residual(st_field, 1.5, y0=0.8, delta_y=0.01)
        assert rel < 1e-3
        assert rel / rel_fine > 3.0


class TestKernelAlgebra:
    def test_identity_suite_higher_order(self):
        probes = [(0.3, 0.8, 0.5), (-0.4, 0.9, 0.7), (0.1, 0.6, 0.4)]
        reports = ex.kernel_identity_suite(1.5, probes)
        assert all(r.status == "pass" for r in reports)

    def test_identity_suite_low_order(self):
        # for s in (0, 1) the full operator annihilates the kernel outright
        reports = ex.kernel_identity_suite(0.5, [(0.3, 0.8, 0.5)])
        assert all(r.status == "pass" for r in reports)

    def test_annihilation_refines_at_stencil_order(self):
        coarse = ex.annihilation_residual(1.5, (0.3, 0.8, 0.5), delta=1e-2)
        fine = ex.annihilation_residual(1.5, (0.3, 0.8, 0.5), delta=5e-3)
        assert fine < 1e-4
        assert coarse / fine >= 4.0

    def test_intertwining(self):
        for a in (-0.5, 0.0, 0.5):
            res, _ = ex.intertwining_residual(a)
            assert res < 1e-6

    def test_la_harmonicity(self):
        reports = ex.la_harmonicity_check(3, 0.5, [((1.0, 0.0, 0.0), 1.0)])
        reports += ex.la_harmonicity_check(2, 0.25, [((0.8, 0.3), 0.7)])
        assert all(r.status == "pass" for r in reports)

    def test_stencil_guard(self):
        with pytest.raises(StencilError):
            ex.kernel_identity_suite(1.5, [(0.3, 1e-4, 0.5)])


class TestSymbolic:
    def test_identity_and_first_derivative(self):
        kc = ex.KernelCombination.identity()
        assert ex.symbolic_y_derivative(kc, 0) is kc
        d1 = ex.symbolic_y_derivative(kc, 1)
        # coefficient of y * (1/(s-1)) H kernel(s-1) is 1/2
        assert d1.coefficient(1, 1, 1) == Fraction(1, 2)

    def test_printed_odd_derivatives(self):
        kc = ex.KernelCombination.identity()
        d3 = ex.symbolic_y_derivative(kc, 3)
        assert d3.coefficient(1, 2, 2) == Fraction(3, 4)  # 3 y/2^2 pattern
        assert d3.coefficient(3, 3, 3) == Fraction(1, 8)  # (y/2)^3 pattern
        d5 = ex.symbolic_y_derivative(kc, 5)
        assert d5.coefficient(1, 3, 3) == Fraction(15, 8)
        assert d5.coefficient(3, 4, 4) == Fraction(5, 8)
        assert d5.coefficient(5, 5, 5) == Fraction(1, 32)

    def test_numeric_agreement_with_finite_differences(self):
        s, n, x, y, t = 2.5, 1, [0.3], 0.8, 0.5
        kc = ex.symbolic_y_derivative(ex.KernelCombination.identity(), 1)
        from fraxion.extension import _subordination_kernel

        h = 1e-5
        fd = (
            float(_subordination_kernel(n, s, x, y + h, t)[0])
            - float(_subordination_kernel(n, s, x, y - h, t)[0])
        ) / (2 * h)
        assert kc.evaluate(s, n, x, y, t) == pytest.approx(fd, rel=1e-7)

    def test_third_derivative_numeric(self):
        s, n, x, y, t = 3.5, 1, [0.2], 0.9, 0.6
        kc = ex.symbolic_y_derivative(ex.KernelCombination.identity(), 3)
        from fraxion.extension import _subordination_kernel

        h = 2e-3
        vals = [
            float(_subordination_kernel(n, s, x, y + j * h, t)[0]) for j in range(-2, 3)
        ]
        fd3 = (-0.5 * vals[0] + vals[1] - vals[3] + 0.5 * vals[4]) / h ** 3
        assert kc.evaluate(s, n, x, y, t) == pytest.approx(fd3, rel=1e-5)


class TestEdgeCases:
    def test_parabolic_dtn_zero_input(self, st_field):
        from fraxion.field import SpaceTimeField

        zero = SpaceTimeField(
            st_field.grid,
            np.zeros(st_field.grid.shape, dtype=complex),
            "physical",
        )
        # a zero datum has no time support; hand the solver the horizon of
        # a generic datum and expect identically zero rungs and trace
        sol = ex.solve_parabolic(zero, 0.5, t_eval=4.0)
        assert all(float(np.max(np.abs(r.samples))) == 0.0 for r in sol.rungs)
        trace = ex.dtn_parabolic(sol, zero, 0.5)
        assert float(np.max(np.abs(trace.samples))) < 1e-12

    def test_half_order_parabolic_constant_is_one(self):
        # at s = 1/2 (a = 0) the trace is -lim dU/dy with unit constant
        assert fo.dtn_constant(0.5) == pytest.approx(1.0, rel=1e-14)
        assert fo.k_constant(0.5) == pytest.approx(-1.0, rel=1e-14)

    def test_solver_notes_flag_heavy_tails(self, fine_gauss):
        sol = ex.solve_elliptic(fine_gauss, 0.25)
        assert any("boundary" in note for note in sol.notes)


class TestEllipticTwoDim:
    def test_dtn_two_dimensional(self):
        # the headline 1e-2 contract is pinned in one dimension above; in
        # two dimensions the near-ring second-moment coupling leaves the
        # trace at about the 1e-2 level for the largest orders
        g = GridSpec(2, 256, 12.0)
        u = gaussian(math.pi).sample(g)
        for s, tol in ((0.25, 1e-2), (0.5, 1e-2), (0.75, 1.5e-2)):
            sol = ex.solve_elliptic(u, s)
            trace = ex.dtn_elliptic(sol, u, s)
            ref = fo.fraclap_spectral(u, s)
            mask = g.space_radius2() <= 36.0
            sup = float(np.max(np.abs(np.real(ref.samples[mask]))))
            err = float(
                np.max(np.abs(np.real(trace.samples[mask]) - np.real(ref.samples[mask])))
            )
            assert err / sup <= tol
