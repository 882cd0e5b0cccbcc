from .herald import (
    HeraldedPattern,
    HeraldOutcome,
    apply_memory_errors,
    herald_classify,
    herald_effect,
    heralded_state,
    ideal_ion_photon_state,
    target_ion_state,
)
from .params import (
    ALICE,
    BOB,
    DEFAULT_HERALD_MAP,
    DETECTORS,
    INVALID,
    AnalyserParams,
    HeraldPattern,
    LinkConfig,
    NodeParams,
    ProtocolTiming,
    format_config,
    parse_config,
)
from .rates import (
    AttemptHistogram,
    attempt_histogram,
    effective_attempt_rate,
    entanglement_rate,
    sample_attempts_until_success,
    success_probability,
)
from .simulate import SchedulePlan, SimulationResult, simulate_experiment
