"""Statistical acceptance tests, the bipartite cross-check, counterexamples.

The chi-square harness compares sampled canonical forms against the
enumerated space: in stub mode the expected counts are proportional to each
class's stub realization count (the pushforward of the uniform stub
distribution), in vertex mode they are flat over classes.  Thresholds
(p > 0.01 to pass, p < 1e-4 for negative controls) are artifact choices and
are recorded in every report.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

from scipy.stats import chisquare

from .chains import build_stub_chain, check_strongly_connected
from .enumeration import count_stub_realizations, enumerate_vertex_space
from .hypergraph import (
    DegreeSequence,
    DirectedHypergraph,
    Hyperarc,
    SpaceSpec,
    canonical_form,
)

PASS_P = 0.01
FAIL_P = 1e-4
MIN_EXPECTED = 5.0


class SampleOutsideSpaceError(AssertionError):
    """A sample fell outside the enumerated space: that is a kernel bug."""


@dataclass
class UniformityReport:
    statistic: float
    p_value: float
    dof: int
    histogram: dict[str, int]
    n_samples: int
    n_cells: int
    pooled_cells: int
    verdict: str

    def to_json(self, **context) -> str:
        payload = dict(context)
        payload.update(
            {
                "histogram": self.histogram,
                "chi2": self.statistic,
                "p": self.p_value,
                "dof": self.dof,
                "pooled_cells": self.pooled_cells,
                "verdict": self.verdict,
                "thresholds": {"pass_p": PASS_P, "negative_control_p": FAIL_P},
            }
        )
        return json.dumps(payload, indent=2, sort_keys=True)


def uniformity_test(
    samples: Counter[bytes] | list[bytes],
    space: list[bytes],
    weights: list[int] | None = None,
    min_expected: float = MIN_EXPECTED,
) -> UniformityReport:
    """Pearson chi-square of sampled canonical forms against the space.

    ``weights`` gives expected counts proportional to the weight per state
    (stub realization counts for a stub-mode pushforward test); the default
    is flat.  Cells whose expected count falls below ``min_expected`` are
    pooled into one bucket, the standard validity fix.
    """
    counts = Counter(samples) if not isinstance(samples, Counter) else samples
    index = set(space)
    for key in counts:
        if key not in index:
            raise SampleOutsideSpaceError(
                f"sampled state not in the enumerated space: {key!r}"
            )
    n = sum(counts.values())
    if weights is None:
        weights = [1] * len(space)
    total_w = sum(weights)
    observed = [counts.get(key, 0) for key in space]
    expected = [n * w / total_w for w in weights]

    pooled_obs, pooled_exp = [], []
    spill_obs = spill_exp = 0.0
    for o, e in zip(observed, expected):
        if e < min_expected:
            spill_obs += o
            spill_exp += e
        else:
            pooled_obs.append(o)
            pooled_exp.append(e)
    pooled = 0
    if spill_exp > 0:
        pooled = len(observed) - len(pooled_obs)
        pooled_obs.append(spill_obs)
        pooled_exp.append(spill_exp)
    if len(pooled_obs) < 2:
        raise ValueError("not enough cells with adequate expected counts")

    stat, p = chisquare(pooled_obs, pooled_exp)
    histogram = {
        key.decode("ascii"): counts.get(key, 0) for key in space
    }
    return UniformityReport(
        statistic=float(stat),
        p_value=float(p),
        dof=len(pooled_obs) - 1,
        histogram=histogram,
        n_samples=n,
        n_cells=len(space),
        pooled_cells=pooled,
        verdict="pass" if p > PASS_P else "fail",
    )


# ---------------------------------------------------------------------------
# Bipartite incidence mapping


@dataclass(frozen=True)
class BipartiteIncidence:
    """One side of the incidence picture: vertex nodes joined to arc nodes.

    ``arcs`` maps (vertex_node, arc_node) to a multiplicity; a multiplicity
    of 2 or more is a multi-arc in the bipartite digraph.
    """

    vertex_nodes: tuple[str, ...]
    arc_nodes: tuple[str, ...]
    arcs: tuple[tuple[tuple[str, str], int], ...]

    @property
    def has_multi_arc(self) -> bool:
        return any(count >= 2 for _, count in self.arcs)


def map_to_bipartite(H: DirectedHypergraph) -> tuple[BipartiteIncidence, BipartiteIncidence]:
    """Split H into its tail incidence digraph and head incidence digraph.

    Every hyperarc becomes one arc-node per side; vertex v sends an arc to
    arc-node a with multiplicity equal to v's multiplicity in the tail
    (resp. head).  Multi-hyperarcs map to distinct arc-nodes and therefore
    never create bipartite multi-arcs; degenerate hyperarcs always do.
    """

    def side(which: str, pick) -> BipartiteIncidence:
        vertex_nodes = tuple(
            f"u_{which}_{H.vertex_name(v)}" for v in range(H.n_vertices)
        )
        arc_nodes = tuple(f"u_{'t' if which == 'out' else 'h'}_a{k}" for k in range(H.n_arcs))
        entries = []
        for k, a in enumerate(H.arcs):
            for v in sorted(set(pick(a))):
                entries.append(
                    ((vertex_nodes[v], arc_nodes[k]), pick(a).count(v))
                )
        return BipartiteIncidence(vertex_nodes, arc_nodes, tuple(entries))

    tail_graph = side("out", lambda a: a[0])
    head_graph = side("in", lambda a: a[1])
    return tail_graph, head_graph


def check_sm_equivalence(H: DirectedHypergraph) -> bool:
    """Degenerate-freeness of H, read off the bipartite image.

    Returns True iff neither incidence digraph has a multi-arc, which holds
    iff H has no degenerate hyperarc.  The agreement of the two readings is
    a structural fact; tests cross-check it against feature classification.
    """
    tail_graph, head_graph = map_to_bipartite(H)
    return not (tail_graph.has_multi_arc or head_graph.has_multi_arc)


# ---------------------------------------------------------------------------
# Counterexample suites

D1_DEGREES = DegreeSequence(
    vertex_degrees=((0, 2), (0, 2), (0, 2), (3, 0)),
    arc_degrees=((2, 1), (2, 1), (2, 1)),
)

D1_BLOCKED_START: tuple[Hyperarc, ...] = (
    ((0, 0), (3,)),
    ((1, 1), (3,)),
    ((2, 2), (3,)),
)

D1_SPREAD_STATE: tuple[Hyperarc, ...] = (
    ((0, 1), (3,)),
    ((0, 2), (3,)),
    ((1, 2), (3,)),
)


@dataclass
class CounterexampleReport:
    blocked_class_isolated: bool
    blocked_row_is_identity: bool
    blocked_fiber_closed: bool
    stub_disconnected: bool
    class_space_size: int
    stub_space_size: int
    spread_state_present: bool
    control_connected: bool
    digraph_disconnections: dict[str, dict]

    @property
    def all_confirmed(self) -> bool:
        return (
            self.blocked_class_isolated
            and self.blocked_row_is_identity
            and self.blocked_fiber_closed
            and self.stub_disconnected
            and self.class_space_size >= 2
            and self.spread_state_present
            and self.control_connected
            and all(
                found["found"] for found in self.digraph_disconnections.values()
            )
        )

    def to_json(self) -> str:
        payload = {k: v for k, v in self.__dict__.items()}
        payload["all_confirmed"] = self.all_confirmed
        return json.dumps(payload, indent=2, sort_keys=True)


def counterexample_suite() -> CounterexampleReport:
    """Reproduce the known failures of the shuffle walk.

    (a) With self-loops and degenerate arcs allowed but multi-arcs
    forbidden, the all-doubled start of the three-tail-pair instance is
    frozen: every shuffle that mixes two tails would create a multi-arc, so
    no shuffle ever yields a different hypergraph.  On canonical classes
    that start is an isolated state with unit diagonal; on stub states its
    realization fiber is closed (head stubs still swap inside it) and the
    walk is disconnected from the rest of the space.  (b) With tail and
    head sizes all 1 the walk reduces to digraph edge swapping, which
    disconnects for some degree sequences in every space without
    self-loops; an exhaustive search over small degree sequences exhibits
    one per space.  A control confirms that re-allowing multi-arcs
    reconnects instance (a).
    """
    from .chains import build_vertex_chain
    from .enumeration import stub_state_to_hypergraph

    blocked_key = canonical_form(
        DirectedHypergraph(D1_DEGREES.n_vertices, D1_BLOCKED_START)
    )
    spread_key = canonical_form(
        DirectedHypergraph(D1_DEGREES.n_vertices, D1_SPREAD_STATE)
    )

    gv = build_vertex_chain(D1_DEGREES, SpaceSpec.from_string("sd", "vertex"))
    blocked_idx = gv.keys.index(blocked_key)
    _, comps_v = check_strongly_connected(gv)
    blocked_class_isolated = [blocked_idx] in comps_v
    blocked_row_is_identity = gv.rows[blocked_idx] == {blocked_idx: 1}

    g = build_stub_chain(D1_DEGREES, SpaceSpec.from_string("sd"))
    stub_connected, _ = check_strongly_connected(g)
    fiber = {
        k
        for k, state in enumerate(g.states)
        if canonical_form(stub_state_to_hypergraph(state, g.degree.n_vertices))
        == blocked_key
    }
    blocked_fiber_closed = all(
        set(g.rows[k]) <= fiber for k in fiber
    )

    control_connected, _ = check_strongly_connected(
        build_stub_chain(D1_DEGREES, SpaceSpec.from_string("sdm"))
    )

    disconnections = {
        features: find_digraph_disconnection(features)
        for features in ("", "d", "m", "dm")
    }

    return CounterexampleReport(
        blocked_class_isolated=blocked_class_isolated,
        blocked_row_is_identity=blocked_row_is_identity,
        blocked_fiber_closed=blocked_fiber_closed,
        stub_disconnected=not stub_connected,
        class_space_size=gv.n_states,
        stub_space_size=g.n_states,
        spread_state_present=spread_key in gv.keys,
        control_connected=control_connected,
        digraph_disconnections=disconnections,
    )


def find_digraph_disconnection(
    features: str, max_vertices: int = 4, max_arcs: int = 4
) -> dict:
    """Search small all-(1,1) degree sequences for a disconnected chain.

    Spaces without self-loops reduce to (multi)digraph spaces when every
    arc is a single edge; the search sweeps vertex degree sequences in
    increasing size and returns the first disconnected chain graph found.
    """
    if "s" in features:
        raise ValueError("the reduction argument concerns no-self-loop spaces")
    spec = SpaceSpec.from_string(features)
    for n in range(2, max_vertices + 1):
        for k in range(2, max_arcs + 1):
            if 2 * k > 12:  # stub enumeration guard
                continue
            for in_deg in _degree_vectors(n, k):
                for out_deg in _degree_vectors(n, k):
                    d = DegreeSequence(
                        vertex_degrees=tuple(zip(in_deg, out_deg)),
                        arc_degrees=((1, 1),) * k,
                    )
                    g = build_stub_chain(d, spec)
                    if g.n_states < 2:
                        continue
                    connected, components = check_strongly_connected(g)
                    if not connected:
                        return {
                            "found": True,
                            "vertex_degrees": [list(p) for p in d.vertex_degrees],
                            "n_arcs": k,
                            "n_states": g.n_states,
                            "n_components": len(components),
                        }
    return {"found": False}


def _degree_vectors(n: int, total: int):
    """Nonincreasing-free enumeration of degree vectors summing to total."""
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _degree_vectors(n - 1, total - first):
            yield (first,) + rest


def stub_pushforward_weights(
    d: DegreeSequence, spec: SpaceSpec
) -> tuple[list[bytes], list[int]]:
    """Canonical class keys and their stub realization counts, aligned."""
    classes = enumerate_vertex_space(d, spec)
    keys = [canonical_form(H) for H in classes]
    return keys, [count_stub_realizations(H) for H in classes]
