"""Trading-cycle profit intensity, optimal withdrawal prices and max-entropy demand."""

from .distributions import (
    GaussianDist,
    PriceDistribution,
    ReflectedDist,
    TabulatedDist,
    load_tabulated_csv,
    make_gaussian,
    make_tabulated,
    make_uniform,
    reflect,
)
from .errors import (
    DegenerateLineError,
    DegenerateStrategyError,
    InvalidParameterError,
    MerchMathError,
    NoEquilibriumError,
    NoFixedPointError,
    QuadratureError,
    SolverError,
)
from .info_measures import (
    InfoReport,
    audit_red_curves,
    figure_curves,
    fisher_information,
    h_entropy,
    info_report,
    shannon_entropy,
)
from .market_curves import (
    MarketPair,
    PortfolioPoint,
    demand_curve,
    equilibrium_price,
    log_cross_ratio,
    supply_curve,
)
from .maxent import (
    GOLDEN,
    MaxEntModel,
    golden_optimum,
    golden_optimum_numeric,
    make_maxent,
    mean_price,
    perceived_demand,
    temperature_from_probability,
)
from .mc_sim import CycleStats, SimConfig, check_wald, simulate
from .mm_engine import (
    FixedPointResult,
    MMConfig,
    accumulate_profit,
    cycle_profit,
    expected_cycle_length,
    log_return,
    non_transaction_prob,
    profit_intensity,
    solve_fixed_point,
)
from .quadrature import integrate

__version__ = "0.1.0"
