"""Protocol, node and analyser parameters plus the flat key-value config format.

Config files hold ``key = value`` lines; ``#`` starts a comment. Node keys
take an ``alice.`` or ``bob.`` prefix, or no prefix to set both nodes.
Durations are in seconds, rates in s^-1. Herald map entries are written as
``herald_map.APD0+APD2 = psi_minus``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from types import MappingProxyType

from ..errors import ParseError, ValidationError

DETECTORS = ("APD0", "APD1", "APD2", "APD3")
BELL_LABELS = ("psi_plus", "psi_minus")
INVALID = "invalid"

# Which beamsplitter output and polarisation each detector sees.
DETECTOR_PORTS = {
    "APD0": (0, "H"),
    "APD1": (0, "V"),
    "APD2": (1, "V"),
    "APD3": (1, "H"),
}


def _pair(a: str, b: str) -> frozenset:
    return frozenset((a, b))


DEFAULT_HERALD_MAP = MappingProxyType({
    _pair("APD0", "APD2"): "psi_minus",
    _pair("APD1", "APD3"): "psi_minus",
    _pair("APD0", "APD1"): "psi_plus",
    _pair("APD2", "APD3"): "psi_plus",
})


@dataclass(frozen=True)
class ProtocolTiming:
    cooling_duration: float = 100e-6
    attempt_period: float = 1e-6
    attempts_per_loop: int = 500
    state_prep: float = 350e-9
    prep_to_pulse_delay: float = 100e-9
    detection_window: float = 30e-9
    window_latency: float = 30e-9
    branch_decision: float = 100e-9

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "cooling_duration":
                if v < 0:
                    raise ValidationError("cooling_duration must be non-negative")
            elif v <= 0:
                raise ValidationError(f"{f.name} must be positive")
        if self.internal_duration > self.attempt_period + 1e-15:
            raise ValidationError(
                f"attempt internals ({self.internal_duration:.3e} s) exceed attempt_period"
            )

    @property
    def internal_duration(self) -> float:
        return (self.state_prep + self.prep_to_pulse_delay + self.window_latency
                + self.detection_window + self.branch_decision)


@dataclass(frozen=True)
class NodeParams:
    p_down: float = 0.99
    p_excite: float = 0.97
    p_s_decay: float = 0.95
    p_click: float = 0.023
    dark_rate_per_detector: float = 60.0
    dephasing_error: float = 0.014
    rotation_error_per_pulse: float = 0.003
    pulses_per_analysis: int = 2

    def __post_init__(self):
        for name in ("p_down", "p_excite", "p_s_decay", "p_click",
                     "dephasing_error", "rotation_error_per_pulse"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} = {v} outside [0, 1]")
        if self.dark_rate_per_detector < 0:
            raise ValidationError("dark_rate_per_detector must be non-negative")
        if self.pulses_per_analysis < 0:
            raise ValidationError("pulses_per_analysis must be non-negative")

    @property
    def photon_detection_probability(self) -> float:
        """Probability that one attempt yields a detected photon from this node."""
        return self.p_down * self.p_excite * self.p_s_decay * self.p_click


ALICE = NodeParams(p_click=0.021)
BOB = NodeParams(p_click=0.024)


@dataclass(frozen=True)
class HeraldPattern:
    detectors: frozenset
    bell_label: str

    def __post_init__(self):
        dets = frozenset(self.detectors)
        object.__setattr__(self, "detectors", dets)
        if len(dets) != 2 or not dets <= set(DETECTORS):
            raise ValidationError(f"herald pattern needs two distinct detectors, got {sorted(dets)}")
        if self.bell_label not in BELL_LABELS:
            raise ValidationError(f"unknown Bell label {self.bell_label!r}")

    @property
    def name(self) -> str:
        return "+".join(sorted(self.detectors))


@dataclass(frozen=True)
class AnalyserParams:
    mode_overlap: float = 0.987
    herald_map: object = DEFAULT_HERALD_MAP
    bell_phase: float = 0.0
    detector_efficiency: tuple = (1.0, 1.0, 1.0, 1.0)

    def __post_init__(self):
        if not 0.0 <= self.mode_overlap <= 1.0:
            raise ValidationError("mode_overlap must lie in [0, 1]")
        hm = {frozenset(k): v for k, v in dict(self.herald_map).items()}
        if set(hm) != set(DEFAULT_HERALD_MAP):
            raise ValidationError(
                "herald_map must cover exactly the pairs APD0+APD2, APD1+APD3, APD0+APD1, APD2+APD3"
            )
        for k, v in hm.items():
            if v not in BELL_LABELS:
                raise ValidationError(f"herald_map value {v!r} is not a Bell label")
        object.__setattr__(self, "herald_map", MappingProxyType(hm))
        eff = tuple(float(e) for e in self.detector_efficiency)
        if len(eff) != 4 or any(not 0 < e <= 1 for e in eff):
            raise ValidationError("detector_efficiency needs four values in (0, 1]")
        object.__setattr__(self, "detector_efficiency", eff)

    def patterns(self) -> tuple:
        """Herald patterns in the fixed table order (a)-(d)."""
        order = (("APD0", "APD2"), ("APD1", "APD3"), ("APD0", "APD1"), ("APD2", "APD3"))
        return tuple(HeraldPattern(_pair(*p), self.herald_map[_pair(*p)]) for p in order)

    def efficiency(self, detector: str) -> float:
        return self.detector_efficiency[DETECTORS.index(detector)]


@dataclass(frozen=True)
class LinkConfig:
    timing: ProtocolTiming = field(default_factory=ProtocolTiming)
    alice: NodeParams = ALICE
    bob: NodeParams = BOB
    analyser: AnalyserParams = field(default_factory=AnalyserParams)


_NODE_KEYS = {f.name: f.type for f in fields(NodeParams)}
_TIMING_KEYS = {f.name for f in fields(ProtocolTiming)}


def _number(key: str, raw: str, lineno: int, integer: bool = False):
    try:
        return int(raw) if integer else float(raw)
    except ValueError:
        raise ParseError(f"line {lineno}: {key} expects a number, got {raw!r}") from None


def parse_config(text: str) -> LinkConfig:
    timing, alice, bob, analyser = {}, {}, {}, {}
    herald = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in _TIMING_KEYS:
            timing[key] = _number(key, raw, lineno, key == "attempts_per_loop")
        elif key.startswith("herald_map."):
            dets = key[len("herald_map."):].split("+")
            if len(dets) != 2:
                raise ParseError(f"line {lineno}: herald_map key needs two detectors")
            herald[_pair(*dets)] = raw
        elif key in ("mode_overlap", "bell_phase"):
            analyser[key] = _number(key, raw, lineno)
        elif key == "detector_efficiency":
            analyser[key] = tuple(_number(key, v, lineno) for v in raw.split(","))
        else:
            prefix, _, name = key.rpartition(".")
            if name not in _NODE_KEYS or prefix not in ("", "alice", "bob"):
                raise ParseError(f"line {lineno}: unknown key {key!r}")
            value = _number(key, raw, lineno, name == "pulses_per_analysis")
            if prefix in ("", "alice"):
                alice[name] = value
            if prefix in ("", "bob"):
                bob[name] = value
    if herald:
        merged = dict(DEFAULT_HERALD_MAP)
        merged.update(herald)
        analyser["herald_map"] = merged
    return LinkConfig(
        ProtocolTiming(**timing),
        replace(ALICE, **alice),
        replace(BOB, **bob),
        AnalyserParams(**analyser),
    )


def format_config(cfg: LinkConfig) -> str:
    lines = ["# protocol timing (s)"]
    lines += [f"{f.name} = {getattr(cfg.timing, f.name)!r}" for f in fields(ProtocolTiming)]
    for prefix, node in (("alice", cfg.alice), ("bob", cfg.bob)):
        lines.append(f"# node {prefix}")
        lines += [f"{prefix}.{f.name} = {getattr(node, f.name)!r}" for f in fields(NodeParams)]
    a = cfg.analyser
    lines += ["# analyser", f"mode_overlap = {a.mode_overlap!r}", f"bell_phase = {a.bell_phase!r}",
              "detector_efficiency = " + ",".join(repr(e) for e in a.detector_efficiency)]
    for p in a.patterns():
        lines.append(f"herald_map.{p.name} = {p.bell_label}")
    return "\n".join(lines) + "\n"
