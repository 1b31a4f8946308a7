"""Hospital-alternating arrangements and stitching of internal paths."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Optional, Sequence, TypeVar

from .errors import PreconditionViolated
from .graph_core import Path

T = TypeVar("T")


def is_alternating(colors: Sequence[Hashable], cyclic: bool = True) -> bool:
    if len(colors) < 2:
        return True
    pairs = zip(colors, colors[1:])
    if any(a == b for a, b in pairs):
        return False
    return not (cyclic and colors[0] == colors[-1])


def arrange_alternating(items: Sequence[tuple[Hashable, T]], first: Optional[int] = None) -> list[tuple[Hashable, T]]:
    """Arrange colored items cyclically so that no two neighbours share a color.

    Uses the stack construction: with ``n1`` the size of the largest color
    class, deal the items onto ``n1`` stacks round-robin, largest class first,
    then read the stacks one after another.  ``first`` is an index into
    ``items``; when given, the cyclic order is rotated to start there.
    Raises ``PreconditionViolated`` when the largest class outnumbers all
    others combined.
    """
    if not items:
        return []
    groups: dict[Hashable, list[int]] = {}
    for k, (color, _) in enumerate(items):
        groups.setdefault(color, []).append(k)
    order = sorted(groups, key=lambda c: (-len(groups[c]), _sort_key(c)))
    n1 = len(groups[order[0]])
    if n1 > len(items) - n1:
        raise PreconditionViolated(f"color {order[0]!r} has {n1} of {len(items)} items; no alternating cycle exists")
    stacks: list[list[int]] = [[] for _ in range(n1)]
    dealt = 0
    for color in order:
        for k in groups[color]:
            stacks[dealt % n1].append(k)
            dealt += 1
    seq = [k for stack in stacks for k in stack]
    if first is not None:
        at = seq.index(first)
        seq = seq[at:] + seq[:at]
    return [items[k] for k in seq]


def _sort_key(c: Hashable):
    return (0, c) if isinstance(c, int) else (1, repr(c))


@dataclass(frozen=True)
class StitchPlan:
    sequence: tuple[tuple[int, Path], ...]
    window: int

    def validate(self) -> None:
        if self.window < 1:
            raise PreconditionViolated("stitch window must be positive")
        owners = [o for o, _ in self.sequence]
        if not is_alternating(owners, cyclic=False):
            raise PreconditionViolated("consecutive stitch entries must have different owners")
        if any(not path for k, (_, path) in enumerate(self.sequence) if k > 0):
            raise PreconditionViolated("only the first stitch entry may be empty")

    def short_entries(self) -> list[int]:
        """Indices after the first whose paths are shorter than twice the window."""
        return [k for k, (_, p) in enumerate(self.sequence) if k > 0 and len(p) < 2 * self.window]


@dataclass(frozen=True)
class StitchResult:
    path: Optional[Path]
    stitches: tuple[tuple[int, int], ...]
    failed_at: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.path is not None


def stitch(plan: StitchPlan, has_edge: Callable[[int, int], bool]) -> StitchResult:
    """Join the plan's paths in order through edges between adjacent windows.

    The first entry may be empty, in which case the result starts with the
    second.  For each consecutive pair, an edge must run from one of the last
    ``window`` nodes of the current path (after its own head truncation) to
    one of the first ``window`` nodes of the next; nodes after the tail
    endpoint and before the head endpoint are dropped.  Among candidate edges
    the one keeping the most nodes wins, then the smallest ``(tail, head)``.
    """
    plan.validate()
    w = plan.window
    if not plan.sequence:
        return StitchResult((), ())
    seq = plan.sequence
    if not seq[0][1] and len(seq) > 1:
        seq = seq[1:]
    result = list(seq[0][1])
    piece_start = 0
    used: list[tuple[int, int]] = []
    offset = len(plan.sequence) - len(seq)
    for k, (_, nxt) in enumerate(seq[1:], start=1 + offset):
        best = None
        for ti in range(max(piece_start, len(result) - w), len(result)):
            x = result[ti]
            for hj in range(min(w, len(nxt))):
                y = nxt[hj]
                if has_edge(x, y):
                    key = (hj - ti, x, y)
                    if best is None or key < best[0]:
                        best = (key, ti, hj)
        if best is None:
            return StitchResult(None, tuple(used), failed_at=k)
        _, ti, hj = best
        used.append((result[ti], nxt[hj]))
        del result[ti + 1:]
        piece_start = len(result)
        result.extend(nxt[hj:])
    return StitchResult(tuple(result), tuple(used))
