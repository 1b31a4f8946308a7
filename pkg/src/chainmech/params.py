"""Parameter schedules shared by both mechanisms."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Union

FSpec = Union[None, int, Callable[[int], float]]


def log_divisor(n: int) -> int:
    """Default slowly growing divisor: natural log of ``n``, floored."""
    return int(math.floor(math.log(n))) if n > 1 else 0


def f_value(n: int, f: FSpec = None) -> int:
    """Evaluate the divisor at ``n``; always clamped to at least 2."""
    if f is None:
        raw = log_divisor(n)
    elif callable(f):
        raw = int(math.floor(f(n)))
    else:
        raw = int(f)
    return max(2, raw)


@dataclass(frozen=True)
class MechParamsS:
    s: int
    s_prime: int
    s_dprime: int
    f_value: int

    @classmethod
    def from_s(cls, s: int, n: int, f: FSpec = None) -> "MechParamsS":
        if s < 1:
            raise ValueError("s must be positive")
        fv = f_value(n, f)
        s_dprime = max(1, s // (fv * fv))
        s_prime = max(2, s // fv, 2 * s_dprime)
        return cls(s, s_prime, s_dprime, fv)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MechParamsAvg:
    s: int
    s_prime: int
    f_value: int

    @classmethod
    def from_s(cls, s: int, n: int, f: FSpec = None) -> "MechParamsAvg":
        if s < 1:
            raise ValueError("s must be positive")
        fv = f_value(n, f)
        return cls(s, max(1, s // (fv * fv)), fv)

    def as_dict(self) -> dict:
        return asdict(self)
