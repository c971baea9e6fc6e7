import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from merchmath import InvalidParameterError, integrate, make_gaussian, make_tabulated, make_uniform, reflect
from merchmath.distributions import LOWER, UPPER, load_tabulated_csv

# 1/sqrt(2 pi) by mpmath, 30 digits
PHI0 = 0.398942280401432677939946059934


class TestGaussian:
    def test_cdf_at_mean(self):
        assert make_gaussian(0, 1).cdf(0) == 0.5
        assert make_gaussian(0, 2).cdf(0) == 0.5

    def test_density_at_mean(self):
        assert make_gaussian(0, 1).density(0) == pytest.approx(PHI0, rel=1e-15)

    @pytest.mark.parametrize("sigma", [0, -1, math.nan, math.inf])
    def test_bad_sigma(self, sigma):
        with pytest.raises(InvalidParameterError):
            make_gaussian(0, sigma)

    def test_closed_form_cdf_matches_quadrature(self):
        d = make_gaussian(0.4, 1.3)
        for x in np.linspace(0.4 - 6 * 1.3, 0.4 + 6 * 1.3, 100):
            quad = integrate(d.density, -math.inf, x, tol=1e-12)
            assert d.cdf(x) == pytest.approx(quad, abs=1e-9)

    def test_partial_moments_match_quadrature(self):
        d = make_gaussian(-0.2, 0.8)
        for b in (-1.5, 0.0, 0.9):
            lower = integrate(lambda p: p * d.density(p), -math.inf, b, tol=1e-12)
            assert d.partial_first_moment(b, LOWER) == pytest.approx(lower, abs=1e-10)

    def test_far_tail_against_mpmath(self):
        # 1 - Phi(10) from mpmath
        assert make_gaussian(0, 1).sf(10) == pytest.approx(7.61985301648650306839632061258e-24, rel=1e-12)


class TestTabulated:
    def test_uniform_cdf(self):
        assert make_tabulated([0, 1], [1]).cdf(0.5) == 0.5

    def test_piecewise_quantile(self):
        assert make_tabulated([0, 1, 2], [0.5, 0.5]).quantile(0.75) == pytest.approx(1.5)

    def test_partial_moment_by_hand(self):
        # int_1^2 p / 2 dp = 3/4
        assert make_tabulated([0, 2], [1]).partial_first_moment(1, UPPER) == pytest.approx(0.75, abs=1e-15)

    def test_masses_are_normalised(self):
        d = make_tabulated([0, 1, 3], [2, 6])
        assert d.masses.tolist() == [0.25, 0.75]
        assert abs(d.masses.sum() - 1) <= 1e-12

    def test_right_continuous_density(self):
        d = make_tabulated([0, 1, 2], [0.2, 0.8])
        assert d.density(1.0) == pytest.approx(0.8)
        assert d.density(0.0) == pytest.approx(0.2)
        assert d.density(2.0) == 0.0
        assert d.density(-1e-9) == 0.0

    def test_empty_bin_quantile(self):
        d = make_tabulated([0, 1, 2, 3], [0.5, 0.0, 0.5])
        assert d.quantile(0.5) == pytest.approx(2.0)
        assert d.quantile(0.75) == pytest.approx(2.5)

    @pytest.mark.parametrize(
        "edges, masses",
        [
            ([0], []),
            ([0, 0, 1], [0.5, 0.5]),
            ([1, 0], [1]),
            ([0, 1, 2], [1.5, -0.5]),
            ([0, 1], [0]),
            ([0, 1, 2], [1]),
        ],
    )
    def test_invalid(self, edges, masses):
        with pytest.raises(InvalidParameterError):
            make_tabulated(edges, masses)


class TestCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("edge,mass\n-1,0.25\n0,0.75\n1,\n")
        d = load_tabulated_csv(path)
        assert d.edges.tolist() == [-1, 0, 1]
        assert d.masses.tolist() == [0.25, 0.75]

    def test_missing_mass_column_on_last_row(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("edge,mass\n0,1\n2\n")
        assert load_tabulated_csv(path).support == (0.0, 2.0)

    @pytest.mark.parametrize(
        "text",
        ["lo,hi\n0,1\n1,\n", "edge,mass\n0,1\n1,1\n", "edge,mass\n0,x\n1,\n", "edge,mass\n"],
    )
    def test_rejects_malformed(self, tmp_path, text):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(InvalidParameterError):
            load_tabulated_csv(path)

    def test_missing_file_is_os_error(self, tmp_path):
        with pytest.raises(OSError):
            load_tabulated_csv(tmp_path / "absent.csv")


# Invariants shared by every family


def test_normalisation(any_dist):
    lo, hi = any_dist.support
    assert integrate(any_dist.density, lo, hi, points=any_dist.kinks) == pytest.approx(1.0, abs=1e-9)


def test_cdf_monotone(any_dist):
    x = np.linspace(float(any_dist.quantile(1e-6)) - 1, float(any_dist.quantile(1 - 1e-6)) + 1, 1000)
    assert np.all(np.diff(any_dist.cdf(x)) >= 0)


def test_cdf_support_ends(any_dist):
    lo, hi = any_dist.support
    lo = lo if math.isfinite(lo) else -50.0
    hi = hi if math.isfinite(hi) else 500.0
    assert any_dist.cdf(lo) == pytest.approx(0.0, abs=1e-12)
    assert any_dist.cdf(hi) == pytest.approx(1.0, abs=1e-12)


def test_moment_split(any_dist):
    for u in (0.1, 0.4, 0.9):
        b = float(any_dist.quantile(u))
        total = any_dist.partial_first_moment(b, LOWER) + any_dist.partial_first_moment(b, UPPER)
        assert total == pytest.approx(any_dist.mean(), abs=1e-9)


def test_quantile_round_trip(any_dist):
    u = np.linspace(1e-6, 1 - 1e-6, 501)
    assert np.max(np.abs(any_dist.cdf(any_dist.quantile(u)) - u)) <= 1e-8


def test_closed_form_moment_matches_base_quadrature(any_dist):
    from merchmath.distributions import PriceDistribution

    for u in (0.2, 0.7):
        b = float(any_dist.quantile(u))
        quad = PriceDistribution.partial_first_moment(any_dist, b, UPPER)
        assert any_dist.partial_first_moment(b, UPPER) == pytest.approx(quad, abs=1e-9)


def test_scalar_and_array_agree(any_dist):
    x = np.array([0.1, 0.7, 1.9])
    assert np.allclose(any_dist.cdf(x), [any_dist.cdf(float(v)) for v in x], rtol=0, atol=0)
    assert isinstance(any_dist.cdf(0.5), float)


@settings(max_examples=60, deadline=None)
@given(
    mean=st.floats(-5, 5),
    sigma=st.floats(0.05, 10),
    u=st.floats(1e-6, 1 - 1e-6),
)
def test_gaussian_quantile_inverts_cdf(mean, sigma, u):
    d = make_gaussian(mean, sigma)
    p = d.quantile(u)
    assert d.cdf(p) == pytest.approx(u, abs=1e-12)
    inner = mean + sigma * np.clip((p - mean) / sigma, -5, 5)
    assert d.quantile(d.cdf(inner)) == pytest.approx(inner, abs=1e-8 * max(1.0, sigma))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.01, 5), min_size=1, max_size=8), st.floats(-3, 3))
def test_tabulated_moment_split(masses, b):
    edges = np.cumsum([0.0] + [0.5] * len(masses)) - 1.0
    d = make_tabulated(edges, masses)
    assert d.partial_first_moment(b, LOWER) + d.partial_first_moment(b, UPPER) == pytest.approx(d.mean(), abs=1e-12)


def test_reflection(any_dist):
    r = reflect(any_dist)
    for x in (-1.0, 0.2, 1.5):
        assert r.density(x) == any_dist.density(-x)
        assert r.cdf(x) == pytest.approx(1.0 - any_dist.cdf(-x), abs=1e-15)
    assert r.mean() == pytest.approx(-any_dist.mean(), abs=1e-12)
    lo, hi = r.support
    assert integrate(r.density, lo, hi, points=r.kinks) == pytest.approx(1.0, abs=1e-9)


def test_uniform_sugar():
    d = make_uniform(0, 4)
    assert d.cdf(1) == 0.25
    assert d.quantile(0.5) == 2.0
