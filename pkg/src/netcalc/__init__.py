"""netcalc: exact worst-case analysis of envelope-regulated traffic.

Piecewise-linear envelope algebra over exact rationals, effective bandwidth
and equivalent capacity with their buffer/delay duality, effective-bandwidth
based admission control, and a fluid trace simulator that validates the
analytic bounds.
"""

from .admission import (
    AdmissionDecision,
    AdmissionRegion,
    LinkConfig,
    admission_region,
    decide,
    region_tradeoff_table,
)
from .bandwidth import (
    AggregateEbProfile,
    FlowClass,
    FlowMix,
    aggregate_buffer,
    aggregate_eb,
    buffer_for_delay,
    delay_for_buffer,
    eb_subadditivity_gap,
    effective_bandwidth,
    equivalent_capacity,
    sum_individual_eb,
)
from .curves import (
    UNBOUNDED,
    AffinePiece,
    PiecewiseCurve,
    Q,
    Shape,
    TSpec,
    as_fraction,
    constant_rate,
    horizontal_deviation,
    is_unbounded,
    min_plus_convolve,
    min_plus_deconvolve_at,
    rate_latency,
    token_bucket,
    vertical_deviation,
)
from .errors import (
    DegenerateTSpecError,
    DomainError,
    NetcalcError,
    ScenarioError,
    TSpecError,
    UnboundedRegionError,
    UnsupportedCurveOperation,
)
from .scenario import Scenario, bundled_scenario_path, parse_scenario, scenario_to_document
from .simulate import (
    SimReport,
    Trace,
    conformance_check,
    fifo_server,
    greedy_source,
    run_mix,
    validate_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissionDecision",
    "AdmissionRegion",
    "AffinePiece",
    "AggregateEbProfile",
    "DegenerateTSpecError",
    "DomainError",
    "FlowClass",
    "FlowMix",
    "LinkConfig",
    "NetcalcError",
    "PiecewiseCurve",
    "Q",
    "Scenario",
    "ScenarioError",
    "Shape",
    "SimReport",
    "TSpec",
    "TSpecError",
    "Trace",
    "UNBOUNDED",
    "UnboundedRegionError",
    "UnsupportedCurveOperation",
    "admission_region",
    "aggregate_buffer",
    "aggregate_eb",
    "as_fraction",
    "buffer_for_delay",
    "bundled_scenario_path",
    "conformance_check",
    "constant_rate",
    "decide",
    "delay_for_buffer",
    "eb_subadditivity_gap",
    "effective_bandwidth",
    "equivalent_capacity",
    "fifo_server",
    "greedy_source",
    "horizontal_deviation",
    "is_unbounded",
    "min_plus_convolve",
    "min_plus_deconvolve_at",
    "parse_scenario",
    "rate_latency",
    "region_tradeoff_table",
    "run_mix",
    "scenario_to_document",
    "sum_individual_eb",
    "token_bucket",
    "validate_scenario",
    "vertical_deviation",
]
