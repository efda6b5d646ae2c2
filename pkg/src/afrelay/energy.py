"""Per-bit energy and per-bit transmission time as functions of the allocation.

All scalar entry points take the effective hop gains ``H`` (S_a-R) and
``G`` (R-S_b), i.e. mean gain per unit noise times path loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

Q_MODELS = ("as-printed", "symmetric")


class UnboundedDelay:
    """Marker for an infinite per-bit delay (no end-to-end rate)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"

    def __str__(self):
        return "unbounded"

    def __reduce__(self):
        return (UnboundedDelay, ())


UNBOUNDED = UnboundedDelay()


def is_unbounded(x) -> bool:
    return x is UNBOUNDED


def as_float(x) -> float:
    """Map the unbounded marker to IEEE inf for numeric work."""
    return math.inf if x is UNBOUNDED else float(x)


def from_float(x: float):
    return UNBOUNDED if not math.isfinite(x) else float(x)


@dataclass(frozen=True)
class AllocationFactors:
    alpha_a: float
    alpha_b: float
    alpha_r: float

    def __post_init__(self):
        for name in ("alpha_a", "alpha_b", "alpha_r"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.alpha_a + self.alpha_b + self.alpha_r > 1.0 + 1e-12:
            raise ValueError("allocation factors must sum to at most 1")

    @classmethod
    def equal_split(cls) -> "AllocationFactors":
        return cls(1 / 3, 1 / 3, 1 / 3)

    @classmethod
    def from_array(cls, x) -> "AllocationFactors":
        a, b, r = (float(v) for v in x)
        return cls(a, b, r)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha_a, self.alpha_b, self.alpha_r])

    @property
    def total(self) -> float:
        return self.alpha_a + self.alpha_b + self.alpha_r


class EnergyDelayPoint(NamedTuple):
    e_a: float
    e_b: float
    q_a: object
    q_b: object

    @property
    def e_total(self) -> float:
        return self.e_a + self.e_b


def energy_factor(q: float) -> float:
    """q * (2**(2/q) - 1), the per-bit energy cost of delivering a bit in time q."""
    if not q > 0:
        raise ValueError(f"per-bit time must be positive, got {q}")
    if math.isinf(q):
        return 2.0 * math.log(2.0)
    # expm1 keeps precision for long bit times
    return q * math.expm1(2.0 / q * math.log(2.0))


def bit_energy(a: AllocationFactors, H: float, G: float, q: float) -> tuple[float, float]:
    k = energy_factor(q)
    e_a = k * ((a.alpha_r + a.alpha_a) * H + a.alpha_b * G)
    e_b = k * (a.alpha_a * H + (a.alpha_r + a.alpha_b) * G)
    return e_a, e_b


def total_energy(a: AllocationFactors, H: float, G: float, q: float) -> float:
    e_a, e_b = bit_energy(a, H, G, q)
    return e_a + e_b


def _link_snrs(alpha_a, alpha_b, alpha_r, H, G, P, q_model):
    """High-SNR end-to-end SNRs at S_a and S_b; arrays broadcast."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if q_model == "as-printed":
            ratio = G / H
            s_a = G * P * alpha_r * alpha_b / (alpha_r + alpha_a + alpha_b * ratio)
            s_b = G * P * alpha_r * alpha_a / (alpha_a + (alpha_r + alpha_b) * ratio)
        elif q_model == "symmetric":
            s_a = P * alpha_r * alpha_b * H * G / ((alpha_r + alpha_a) * H + alpha_b * G)
            s_b = P * alpha_r * alpha_a * H * G / (alpha_a * H + (alpha_r + alpha_b) * G)
        else:
            raise ValueError(f"unknown q model {q_model!r}; expected one of {Q_MODELS}")
    s_a = np.nan_to_num(s_a, nan=0.0, posinf=np.inf)
    s_b = np.nan_to_num(s_b, nan=0.0, posinf=np.inf)
    return s_a, s_b


def delay_from_snr(s):
    """2 / log2(1 + s); inf where s == 0."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore"):
        return 2.0 * math.log(2.0) / np.log1p(s)


def bit_time_array(alpha_a, alpha_b, alpha_r, H, G, P, q_model="as-printed"):
    """Vectorised (q_a, q_b) with IEEE inf for unbounded delay."""
    s_a, s_b = _link_snrs(alpha_a, alpha_b, alpha_r, H, G, P, q_model)
    return delay_from_snr(s_a), delay_from_snr(s_b)


def bit_time(a: AllocationFactors, H: float, G: float, P: float, q_model: str = "as-printed"):
    """Per-bit times (q_a, q_b); either may be ``UNBOUNDED``."""
    if H <= 0 or G <= 0:
        if q_model not in Q_MODELS:
            raise ValueError(f"unknown q model {q_model!r}")
        return UNBOUNDED, UNBOUNDED
    q_a, q_b = bit_time_array(a.alpha_a, a.alpha_b, a.alpha_r, H, G, P, q_model)
    return from_float(float(q_a)), from_float(float(q_b))


def mean_bit_time(a: AllocationFactors, H: float, G: float, P: float, q_model: str = "as-printed"):
    q_a, q_b = bit_time(a, H, G, P, q_model)
    if q_a is UNBOUNDED or q_b is UNBOUNDED:
        return UNBOUNDED
    return 0.5 * (q_a + q_b)


def evaluate_point(a: AllocationFactors, H: float, G: float, P: float,
                   q: float | None = None, q_model: str = "as-printed") -> EnergyDelayPoint:
    """Energies and delays at one allocation; q defaults to the mean bit time there."""
    q_a, q_b = bit_time(a, H, G, P, q_model)
    if q is None:
        q = mean_bit_time(a, H, G, P, q_model)
        if q is UNBOUNDED:
            q = math.inf
    e_a, e_b = bit_energy(a, H, G, q)
    return EnergyDelayPoint(e_a, e_b, q_a, q_b)


def power_budget_ok(per_slot: Iterable, P: float) -> bool:
    """Total transmit power over the transmitting slots stays within P.

    ``per_slot`` holds the powers of the forwarding slots n = 2..N; the
    first (relay-receive) slot is not part of the budget sum.
    """
    used = sum(s.p_a + s.p_b + s.p_R for s in per_slot)
    return used <= P
