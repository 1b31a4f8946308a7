"""JSON instance files."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path as FilePath
from typing import Optional, Union

from .errors import InstanceError
from .graph_core import Instance

FIELDS = ("n", "altruist", "owners", "base_edges", "p")
OPTIONAL_FIELDS = ("certificates",)


def fraction_to_decimal(p: Fraction) -> str:
    """Exact decimal string when one exists, otherwise ``num/den``."""
    den = p.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{p.numerator}/{p.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(p.numerator)
    scaled = p * 10**digits
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return ("-" if p < 0 else "") + s[:-digits] + "." + s[-digits:]


def instance_to_dict(instance: Instance) -> dict:
    return {
        "n": instance.n,
        "altruist": instance.altruist,
        "owners": list(instance.owners),
        "base_edges": sorted([u, v] for u, v in instance.base_edges),
        "p": fraction_to_decimal(instance.p),
    }


def instance_from_dict(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("instance JSON must be an object")
    unknown = set(data) - set(FIELDS) - set(OPTIONAL_FIELDS)
    if unknown:
        raise InstanceError(f"unknown instance fields: {sorted(unknown)}")
    missing = [f for f in FIELDS if f not in data]
    if missing:
        raise InstanceError(f"missing instance fields: {missing}")
    if not isinstance(data["p"], str):
        raise InstanceError("p must be a decimal string")
    try:
        p = Fraction(data["p"])
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"bad probability {data['p']!r}") from exc
    edges = data["base_edges"]
    if any(not isinstance(e, list) or len(e) != 2 for e in edges):
        raise InstanceError("base_edges must be [u, v] pairs")
    return Instance(int(data["n"]), tuple(data["owners"]), frozenset(map(tuple, edges)), int(data["altruist"]), p)


def dumps(instance: Instance, certificates: Optional[dict] = None) -> str:
    data = instance_to_dict(instance)
    if certificates is not None:
        data["certificates"] = certificates
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def load_instance(path: Union[str, FilePath]) -> tuple[Instance, Optional[dict]]:
    data = json.loads(FilePath(path).read_text())
    return instance_from_dict(data), data.get("certificates")


def save_instance(path: Union[str, FilePath], instance: Instance, certificates: Optional[dict] = None) -> None:
    FilePath(path).write_text(dumps(instance, certificates))
