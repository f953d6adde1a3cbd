"""championlab: prime gap statistics and the primorial champion model."""

from .averages import AverageReport, WindowSum, average, window_sum
from .census import (
    ExclusionChain,
    GapCensus,
    TupleCount,
    census,
    exclusion_chain,
    li,
    pair_count,
    quad_count,
    triple_count,
)
from .errors import CapacityError, ChampionLabError, DomainError, ReportIOError
from .model import (
    LogInterval,
    ModelScan,
    PrimorialLadder,
    ChampionWindows,
    TransitionInterval,
    default_ladder,
    model_scan,
    model_value,
    predicted_gap_count,
    predicted_gap_count_log10,
    scientific,
    champion_windows,
    transition_interval,
)
from .primes import PrimeStream, chebyshev_theta, nth_prime, primes_up_to
from .report import Report, emit, emit_plot_series, render_figure
from .singular import (
    OffsetSet,
    SingularValue,
    nu,
    phi_tuple,
    sigma,
    sigma_pair,
    sigma_truncated,
    twin_prime_constant,
)

__version__ = "0.1.0"
