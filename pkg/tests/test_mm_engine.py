import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from merchmath import (
    DegenerateStrategyError,
    InvalidParameterError,
    MMConfig,
    NoFixedPointError,
    accumulate_profit,
    cycle_profit,
    expected_cycle_length,
    log_return,
    make_gaussian,
    make_tabulated,
    make_uniform,
    non_transaction_prob,
    profit_intensity,
    reflect,
    solve_fixed_point,
)
from merchmath.distributions import GaussianDist
from merchmath.maxent import GOLDEN, MaxEntModel
from merchmath.mm_engine import SELLER, expected_return

# Frozen with mpmath (30 digits), independent of the package code.
PHI0 = 0.398942280401432677939946059934
CDF_NEG_A = 0.391262512171279021342563575947  # Phi(-0.27603)
A_MAX_NORMAL = 0.276029804798143296966860944076  # root of phi(a)/(1+Phi(-a)) = a
RHO_AT_QUOTED_A = 0.276029804798138038079378258760


def normal_cfg(a=0.0, theta=1.0, sigma=1.0):
    return MMConfig(make_gaussian(0, sigma), a, theta)


class TestNonTransaction:
    def test_symmetric(self):
        assert non_transaction_prob(normal_cfg(0)) == 0.5

    def test_rational_buy_almost_sure(self):
        # a = -10: accept p <= 10, so rejection is 1 - Phi(10)
        assert non_transaction_prob(normal_cfg(-10)) == pytest.approx(0.0, abs=1e-20)

    def test_uniform_seller(self):
        cfg = MMConfig(make_uniform(0, 1), 0.25, orientation=SELLER)
        assert non_transaction_prob(cfg) == pytest.approx(0.25)


class TestCycleLength:
    def test_half_acceptance(self):
        assert expected_cycle_length(normal_cfg(0)) == 3.0
        assert expected_cycle_length(normal_cfg(0, theta=2)) == 6.0

    def test_at_quoted_optimum(self):
        assert expected_cycle_length(normal_cfg(0.27603)) == pytest.approx(1 + 1 / CDF_NEG_A, rel=1e-12)
        # 1 + 1/0.391262512... = 3.5558288..., the commonly quoted 3.5556 is a rounding slip
        assert expected_cycle_length(normal_cfg(0.27603)) == pytest.approx(3.55582880775002575, abs=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateStrategyError):
            expected_cycle_length(normal_cfg(40))

    def test_geometric_series(self):
        # theta * (1 + sum_k k x^{k-1} (1-x)) truncated far out
        cfg = normal_cfg(0.8)
        x = non_transaction_prob(cfg)
        k = np.arange(1, 2000)
        series = 1 + np.sum(k * x ** (k - 1) * (1 - x))
        assert expected_cycle_length(cfg) == pytest.approx(series, rel=1e-12)


class TestCycleProfit:
    def test_at_zero(self):
        assert cycle_profit(normal_cfg(0)) == pytest.approx(PHI0 / 1.5, rel=1e-14)
        assert cycle_profit(normal_cfg(0)) == pytest.approx(0.2659615, abs=1e-7)

    def test_quoted_value(self):
        assert cycle_profit(normal_cfg(0.27603)) == pytest.approx(0.27603, abs=1e-4)
        assert cycle_profit(normal_cfg(0.27603)) == pytest.approx(RHO_AT_QUOTED_A, abs=1e-13)

    def test_maxent_golden_seller(self):
        m = MaxEntModel(1.0, 1 / GOLDEN)
        assert cycle_profit(MMConfig(m, 1.0, orientation=SELLER)) == pytest.approx(1.0, abs=1e-14)

    def test_quadrature_oracle(self):
        from merchmath import integrate

        d = make_tabulated([-2, -0.5, 0, 1, 3], [0.2, 0.3, 0.4, 0.1])
        for a in (-0.3, 0.2, 0.7):
            num = -integrate(lambda p: p * d.density(p), -2, -a, points=d.kinks)
            den = 1 + integrate(d.density, -2, -a, points=d.kinks)
            assert cycle_profit(MMConfig(d, a)) == pytest.approx(num / den, abs=1e-12)


class TestIntensity:
    def test_values(self):
        assert profit_intensity(normal_cfg(0)) == pytest.approx(0.2659615, abs=1e-7)
        assert profit_intensity(normal_cfg(0, theta=2)) == pytest.approx(0.1329808, abs=1e-7)
        assert profit_intensity(normal_cfg(0.27603)) == pytest.approx(0.27603, abs=1e-4)

    @pytest.mark.parametrize(
        "dist",
        [make_gaussian(0, 1), make_gaussian(0, 0.3), make_uniform(-1, 1),
         make_tabulated([-2, -1, 0, 1, 2], [0.1, 0.4, 0.4, 0.1])],
        ids=["n01", "n0.3", "uniform", "tab"],
    )
    @pytest.mark.parametrize("theta", [0.5, 1.0, 3.0])
    def test_wald_ratio_identity(self, dist, theta):
        # centred laws: E(r) / E(tau) = rho / theta
        for a in np.linspace(-0.5, 0.9, 8):
            cfg = MMConfig(dist, a, theta)
            assert expected_return(cfg) / expected_cycle_length(cfg) == pytest.approx(
                profit_intensity(cfg), abs=1e-10
            )


class TestAccumulate:
    def test_values(self):
        assert accumulate_profit(0.25, 4) == 1.0
        assert accumulate_profit(0.27603, 0) == 0
        assert accumulate_profit(0.2659615, 10) == pytest.approx(2.659615)

    def test_negative_horizon(self):
        with pytest.raises(InvalidParameterError):
            accumulate_profit(0.1, -1)


class TestLogReturn:
    def test_values(self):
        assert log_return(0.1, 0.5) == pytest.approx(0.4)
        assert log_return(0.37, 0.37) == 0
        assert log_return(-0.27603, 0) == 0.27603


class TestConfig:
    @pytest.mark.parametrize("theta", [0, -1, math.inf])
    def test_theta(self, theta):
        with pytest.raises(InvalidParameterError):
            MMConfig(make_gaussian(0, 1), 0.0, theta)

    def test_orientation(self):
        with pytest.raises(InvalidParameterError):
            MMConfig(make_gaussian(0, 1), orientation="broker")


class TestFixedPoint:
    def test_standard_normal(self):
        res = solve_fixed_point(normal_cfg())
        assert res.converged
        assert res.a_max == pytest.approx(0.27603, abs=1e-4)
        assert res.a_max == pytest.approx(A_MAX_NORMAL, abs=1e-9)
        assert abs(res.rho_at_max - res.a_max) <= 1e-10
        assert res.residual == abs(res.rho_at_max - res.a_max)

    def test_sigma_two(self):
        assert solve_fixed_point(normal_cfg(sigma=2)).a_max == pytest.approx(0.55206, abs=2e-4)

    def test_trace_recorded(self):
        res = solve_fixed_point(normal_cfg())
        assert len(res.trace) == res.iterations
        assert res.trace[-1] == (res.a_max, res.rho_at_max)

    def test_maxent_seller_golden_point(self):
        res = solve_fixed_point(MMConfig(MaxEntModel(1.0, 1 / GOLDEN), orientation=SELLER))
        assert res.a_max == pytest.approx(1.0, abs=1e-9)

    def test_bisection_fallback(self):
        res = solve_fixed_point(normal_cfg(), max_iter=2)
        assert res.method == "bisection"
        assert res.converged
        assert res.a_max == pytest.approx(A_MAX_NORMAL, abs=1e-9)

    def test_overdamped_still_converges(self):
        res = solve_fixed_point(normal_cfg(), damping=1.9)
        assert res.converged and res.a_max == pytest.approx(A_MAX_NORMAL, abs=1e-9)

    def test_no_fixed_point(self):
        class Runaway(GaussianDist):
            def partial_first_moment(self, bound, side="lower"):
                # rho(a) >= |a| + 1 > a everywhere
                return -2.0 * (abs(bound) + 1.0)

        with pytest.raises(NoFixedPointError):
            solve_fixed_point(MMConfig(Runaway(0, 1)))

    def test_bad_args(self):
        with pytest.raises(InvalidParameterError):
            solve_fixed_point(normal_cfg(), tol=0)
        with pytest.raises(InvalidParameterError):
            solve_fixed_point(normal_cfg(), damping=2.5)


CENTRED = [
    make_gaussian(0, 1),
    make_gaussian(0, 0.25),
    make_uniform(-1, 1),
    make_tabulated([-2, -1, 0, 1, 2], [0.1, 0.4, 0.4, 0.1]),
    make_tabulated([-5, -0.01, 0.01, 5], [0.05, 0.9, 0.05]),
]


@pytest.mark.parametrize("dist", CENTRED, ids=repr)
def test_fixed_point_consistency_and_positivity(dist):
    res = solve_fixed_point(MMConfig(dist))
    assert res.converged
    assert res.a_max > 0
    assert abs(cycle_profit(MMConfig(dist, res.a_max)) - res.a_max) <= 1e-10


@pytest.mark.parametrize("dist", CENTRED, ids=repr)
def test_maximality(dist):
    cfg = MMConfig(dist)
    res = solve_fixed_point(cfg)
    grid = np.linspace(res.a_max - 1, res.a_max + 1, 201)
    assert max(cycle_profit(cfg.at(a)) for a in grid) <= cycle_profit(cfg.at(res.a_max)) + 1e-8


@pytest.mark.parametrize("sigma", [0.1, 0.5, 2.0, 7.5])
def test_scaling(sigma):
    base = solve_fixed_point(normal_cfg()).a_max
    assert solve_fixed_point(normal_cfg(sigma=sigma)).a_max == pytest.approx(sigma * base, abs=1e-6 * max(1, sigma))
    for a in np.linspace(-2, 2, 21):
        assert cycle_profit(normal_cfg(sigma * a, sigma=sigma)) == pytest.approx(
            sigma * cycle_profit(normal_cfg(a)), abs=1e-9
        )


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-3, 3), mean=st.floats(-1, 1), sigma=st.floats(0.2, 3))
def test_buyer_seller_mirror(a, mean, sigma):
    d = make_gaussian(mean, sigma)
    seller = MMConfig(d, a, orientation=SELLER)
    buyer = MMConfig(reflect(d), a)
    assert cycle_profit(seller) == cycle_profit(buyer)
    assert non_transaction_prob(seller) == non_transaction_prob(buyer)


def test_mirror_tabulated():
    d = make_tabulated([-1, 0, 0.5, 2], [0.2, 0.5, 0.3])
    for a in (-0.7, 0.0, 0.3, 1.1):
        assert cycle_profit(MMConfig(d, a, orientation=SELLER)) == cycle_profit(MMConfig(reflect(d), a))
