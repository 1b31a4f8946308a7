from __future__ import annotations

from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from chainmech.graph_core import Instance

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def instances(draw, max_n: int = 8, max_hospitals: int = 3, edge_prob: float = 0.3):
    """Small arbitrary instances; the altruist is node 0."""
    n = draw(st.integers(1, max_n))
    h = draw(st.integers(1, min(max_hospitals, n)))
    owners = [0] + [draw(st.integers(0, h - 1)) for _ in range(n - 1)]
    # keep hospital ids dense
    remap = {o: k for k, o in enumerate(sorted(set(owners)))}
    owners = [remap[o] for o in owners]
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = frozenset(e for e, keep in zip(pairs, mask) if keep)
    p = draw(st.sampled_from([Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)]))
    return Instance(n, tuple(owners), edges, 0, p)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
