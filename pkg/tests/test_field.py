import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraxion.errors import AliasWarning, DomainError, ShapeError
from fraxion.field import (
    FREQUENCY,
    GridSpec,
    ScalarField,
    SpaceTimeField,
    SpaceTimeTestFunction,
    boundary_max,
    convolve,
    fourier,
    gaussian,
    grid_norm,
    interpolate,
    inverse_fourier,
    modulated_gaussian,
    polynomial_gaussian,
    radial_fourier,
    to_csv,
)


class TestGridSpec:
    def test_power_of_two_required(self):
        with pytest.raises(ShapeError):
            GridSpec(1, 100, 10.0)
        with pytest.raises(ShapeError):
            GridSpec(1, 16, 10.0)

    def test_spacing_divides_box(self):
        g = GridSpec(2, 64, 8.0)
        assert g.spacing * g.points_per_axis == pytest.approx(2 * g.half_width)
        assert len(g.axis()) == 64
        assert g.axis()[32] == 0.0

    def test_time_axis_pairing(self):
        with pytest.raises(ShapeError):
            GridSpec(1, 64, 8.0, time_points=64)


class TestFourier:
    def test_gaussian_closed_form(self, grid1d):
        f = gaussian(math.pi).sample(grid1d)
        xi = grid1d.freq_axis()
        err = np.max(np.abs(fourier(f).samples - np.exp(-math.pi * xi ** 2)))
        assert err < 1e-12

    def test_scaled_gaussian(self):
        # e^{-2x^2} -> (pi/2)^(1/2) e^{-pi^2 xi^2/2}
        g = GridSpec(1, 512, 10.0)
        f = gaussian(2.0).sample(g)
        xi = g.freq_axis()
        exact = math.sqrt(math.pi / 2.0) * np.exp(-math.pi ** 2 * xi ** 2 / 2.0)
        assert np.max(np.abs(fourier(f).samples - exact)) <= 1e-8

    def test_zero_field(self, grid1d):
        z = ScalarField(grid1d, np.zeros(grid1d.shape, dtype=complex))
        assert np.all(fourier(z).samples == 0)

    def test_roundtrip(self, grid1d):
        f = polynomial_gaussian(2, 1.0).sample(grid1d)
        back = inverse_fourier(fourier(f))
        assert np.max(np.abs(back.samples - f.samples)) < 1e-12 * np.max(
            np.abs(f.samples)
        )

    def test_translation_law(self, grid1d):
        f = gaussian(math.pi).sample(grid1d)
        shift = 5
        y = shift * grid1d.spacing
        fh = fourier(f)
        phased = fh.with_samples(
            fh.samples * np.exp(2j * math.pi * grid1d.freq_axis() * y), FREQUENCY
        )
        rolled = np.roll(f.samples, -shift)  # u(x + y) on the lattice
        assert np.max(np.abs(inverse_fourier(phased).samples - rolled)) < 1e-10

    def test_plancherel(self, grid1d):
        f = modulated_gaussian(1.5, [0.7]).sample(grid1d)
        assert grid_norm(f, 2) == pytest.approx(grid_norm(fourier(f), 2), rel=1e-10)

    def test_space_tag_enforced(self, grid1d):
        f = gaussian(1.0).sample(grid1d)
        with pytest.raises(ShapeError):
            inverse_fourier(f)
        with pytest.raises(ShapeError):
            fourier(fourier(f))


class TestConvolve:
    def test_delta_identity(self, grid1d):
        f = gaussian(math.pi).sample(grid1d)
        delta = np.zeros(grid1d.shape, dtype=complex)
        delta[grid1d.points_per_axis // 2] = 1.0 / grid1d.spacing
        d = ScalarField(grid1d, delta)
        out = convolve(f, d)
        assert np.max(np.abs(out.samples - f.samples)) < 1e-12

    def test_gaussian_variance_addition(self, grid1d):
        a, b = 1.0, 2.0
        conv = convolve(gaussian(a).sample(grid1d), gaussian(b).sample(grid1d))
        x = grid1d.axis()
        exact = math.sqrt(math.pi / (a + b)) * np.exp(-a * b / (a + b) * x ** 2)
        assert np.max(np.abs(conv.samples - exact)) < 1e-12

    def test_alias_warning(self):
        g = GridSpec(1, 32, 2.0)  # box too small for the gaussian
        f = gaussian(0.25).sample(g)
        with pytest.warns(AliasWarning):
            convolve(f, f)

    def test_grid_mismatch(self, grid1d):
        f = gaussian(1.0).sample(grid1d)
        g2 = gaussian(1.0).sample(GridSpec(1, 128, 12.0))
        with pytest.raises(ShapeError):
            convolve(f, g2)


class TestRadialFourier:
    def test_gaussian_2d(self):
        out = radial_fourier(lambda r: math.exp(-math.pi * r * r), 2, 1.0)
        assert out.value.real == pytest.approx(math.exp(-math.pi), abs=1e-10)

    def test_zero_profile(self):
        out = radial_fourier(lambda r: 0.0, 2, 0.7)
        assert out.value == 0.0

    def test_exponential_3d_vs_closed_form(self):
        # FT of e^{-|x|} in 3-D is 8 pi / (1 + 4 pi^2 |xi|^2)^2
        xi = 0.5
        exact = 8.0 * math.pi / (1.0 + 4.0 * math.pi ** 2 * xi ** 2) ** 2
        out = radial_fourier(lambda r: math.exp(-r), 3, xi)
        assert out.value.real == pytest.approx(exact, rel=1e-8)

    def test_grid_oracle_agreement(self, grid2d):
        f = gaussian(math.pi).sample(grid2d)
        fh = fourier(f)
        k = grid2d.points_per_axis // 2 + 6
        xi = grid2d.freq_axis()[k]
        got = radial_fourier(lambda r: math.exp(-math.pi * r * r), 2, abs(xi))
        assert got.value.real == pytest.approx(
            float(np.real(fh.samples[k, grid2d.points_per_axis // 2])), abs=1e-8
        )


class TestCatalog:
    @given(st.floats(min_value=0.3, max_value=4.0), st.floats(min_value=0.05, max_value=2.0))
    @settings(max_examples=30, deadline=None)
    def test_heat_evolution_matches_spectral(self, c, t):
        g = GridSpec(1, 128, 14.0)
        f = gaussian(c).sample(g)
        fh = fourier(f)
        evolved = inverse_fourier(
            fh.with_samples(
                fh.samples * np.exp(-4 * math.pi ** 2 * g.freq_axis() ** 2 * t),
                FREQUENCY,
            )
        )
        exact = gaussian(c).heat_evolution(g.axis()[:, None], t, 1)
        # wide inputs evolved for long times reach ~3e-9 at the box edge,
        # which is honest truncation rather than a transform error
        assert np.max(np.abs(evolved.samples - exact)) < 2e-8

    def test_fourier_closed_forms(self, grid1d):
        for tf in (
            gaussian(1.3),
            modulated_gaussian(1.0, [0.5]),
            polynomial_gaussian(1, 1.0),
            polynomial_gaussian(2, 0.8),
        ):
            f = tf.sample(grid1d)
            exact = tf.fourier_transform(grid1d.freq_axis()[:, None], 1)
            assert np.max(np.abs(fourier(f).samples - exact)) < 1e-10

    def test_catalog_rejects_unknown(self):
        from fraxion.field import TestFunction

        with pytest.raises(DomainError):
            TestFunction("bump", 1.0)
        with pytest.raises(DomainError):
            gaussian(-1.0)

    def test_spacetime_sampling(self, st_grid, st_gauss):
        assert st_gauss.samples.shape == st_grid.shape
        mid = st_grid.points_per_axis // 2
        tmid = st_grid.time_points // 2
        assert st_gauss.samples[mid, tmid] == pytest.approx(1.0)


class TestInterpolate:
    def test_evaluator_path_is_exact(self, gauss1d):
        pts = np.array([[0.123], [2.71], [-3.33]])
        got = interpolate(gauss1d, pts)
        assert np.max(np.abs(got - np.exp(-math.pi * pts[:, 0] ** 2))) < 1e-15

    def test_lagrange_fallback(self, grid1d):
        f = dataclasses.replace(gaussian(math.pi).sample(grid1d), evaluator=None)
        pts = np.array([[0.123], [1.7777], [-3.21]])
        got = interpolate(f, pts)
        assert np.max(np.abs(got - np.exp(-math.pi * pts[:, 0] ** 2))) < 1e-6


class TestCsv:
    def test_schema_and_roundtrip(self, tmp_path, gauss1d):
        path = tmp_path / "field.csv"
        to_csv(gauss1d, str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "x0,value_re,value_im"
        assert len(lines) == 1 + gauss1d.grid.points_per_axis
        first = [float(v) for v in lines[1].split(",")]
        assert first[0] == -gauss1d.grid.half_width

    def test_spacetime_header(self, tmp_path, st_gauss):
        path = tmp_path / "st.csv"
        to_csv(st_gauss, str(path))
        header = path.read_text().splitlines()[0]
        assert header == "x0,t,value_re,value_im"

    def test_determinism(self, tmp_path, gauss1d):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        to_csv(gauss1d, str(p1))
        to_csv(gauss1d, str(p2))
        assert p1.read_bytes() == p2.read_bytes()


class TestBoundary:
    def test_boundary_max(self, grid1d):
        f = gaussian(0.05).sample(grid1d)
        # the grid covers [-L, L); the largest edge sample sits at L - h
        edge = grid1d.half_width - grid1d.spacing
        assert boundary_max(f) == pytest.approx(math.exp(-0.05 * edge ** 2), rel=1e-10)
