"""Exact analysis of the shuffle walk on an enumerated space.

The "graph of graphs": states are the hypergraphs of a space (stub-labeled
sets of linked stubs, or vertex-labeled canonical classes), edges carry the
one-step transition probability.  Matrix entries are exact rationals; the
binomials involved at desk scale are tiny, and regularity is an exact
symmetry claim, so no tolerance is acceptable there.  Floating point enters
only for stationary vectors and total-variation curves.

Every row accumulates mass per (arc pair, stub-level repartition): a
repartition contributes ``C(|A|,2)^-1 C(ta+tb,ta)^-1 C(ha+hb,ha)^-1`` to its
target, with rejected targets folded onto the diagonal.  Distinct
repartitions may hit one target state; their contributions add up.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from .enumeration import (
    StubState,
    enumerate_stub_space,
    enumerate_vertex_space,
    stub_state_to_hypergraph,
)
from .hypergraph import (
    DegreeSequence,
    DirectedHypergraph,
    SpaceSpec,
    canonical_form,
    canonicalize,
    classify_features,
    multiset,
)
from .shuffle import ShuffleProposal, acceptance_probability

STATE_LIMIT = 5000

Row = dict[int, Fraction]


class StateSpaceLimitError(ValueError):
    """Enumerated space is larger than the analysis guard allows."""


@dataclass
class ChainGraph:
    """Enumerated state space with its exact transition matrix."""

    spec: SpaceSpec
    degree: DegreeSequence
    states: list  # StubState in stub mode, DirectedHypergraph in vertex mode
    keys: list[bytes]  # canonical key per state, defines the ordering
    rows: list[Row]

    @property
    def n_states(self) -> int:
        return len(self.states)

    def row_sums(self) -> list[Fraction]:
        return [sum(row.values(), Fraction(0)) for row in self.rows]

    def column_sums(self) -> list[Fraction]:
        sums = [Fraction(0)] * self.n_states
        for row in self.rows:
            for j, p in row.items():
                sums[j] += p
        return sums

    def to_dense(self) -> np.ndarray:
        P = np.zeros((self.n_states, self.n_states))
        for i, row in enumerate(self.rows):
            for j, p in row.items():
                P[i, j] = float(p)
        return P


def _stub_key(state: StubState) -> bytes:
    return repr(state).encode("ascii")


def _check_rows(rows: Sequence[Row]) -> None:
    for i, row in enumerate(rows):
        total = sum(row.values(), Fraction(0))
        if total != 1:
            raise AssertionError(f"row {i} sums to {total}, not 1")


def _feature_ok(H: DirectedHypergraph, spec: SpaceSpec) -> bool:
    return not classify_features(H, spec.overlap_self_loops).forbidden_by(spec)


def build_stub_chain(
    d: DegreeSequence, spec: SpaceSpec, limit: int = STATE_LIMIT
) -> ChainGraph:
    """Exact transition matrix of the shuffle walk on the stub-labeled space."""
    states = enumerate_stub_space(d, spec)
    if len(states) > limit:
        raise StateSpaceLimitError(f"{len(states)} states exceed the cap {limit}")
    index = {s: k for k, s in enumerate(states)}
    n = d.n_vertices
    rows: list[Row] = []
    for state in states:
        row: Row = defaultdict(Fraction)
        for target, mass, _ in _stub_transitions(state, n, spec):
            if target is None:
                row[index[state]] += mass
            else:
                if target not in index:
                    raise AssertionError(
                        "one-shuffle target missing from enumerated space"
                    )
                row[index[target]] += mass
        rows.append(dict(row))
    _check_rows(rows)
    return ChainGraph(spec, d, list(states), [_stub_key(s) for s in states], rows)


def _stub_transitions(state: StubState, n_vertices: int, spec: SpaceSpec):
    """Yield (target_state_or_None, mass, proposal_info) per repartition.

    ``None`` marks a feature rejection; the caller folds it onto the
    diagonal.  ``proposal_info`` carries (i, j, new stub arcs) for callers
    that thin by an acceptance probability.
    """
    arcs = list(state)
    m = len(arcs)
    if m < 2:
        yield state, Fraction(1), None
        return
    npairs = comb(m, 2)
    for i, j in combinations(range(m), 2):
        tail_i, head_i = arcs[i]
        tail_j, head_j = arcs[j]
        pool_t = tuple(sorted(tail_i + tail_j))
        pool_h = tuple(sorted(head_i + head_j))
        kt, kh = len(tail_i), len(head_i)
        denom = npairs * comb(len(pool_t), kt) * comb(len(pool_h), kh)
        mass = Fraction(1, denom)
        for picked_t in combinations(range(len(pool_t)), kt):
            chosen_t = set(picked_t)
            new_tail_i = tuple(pool_t[t] for t in picked_t)
            new_tail_j = tuple(pool_t[t] for t in range(len(pool_t)) if t not in chosen_t)
            for picked_h in combinations(range(len(pool_h)), kh):
                chosen_h = set(picked_h)
                new_head_i = tuple(pool_h[t] for t in picked_h)
                new_head_j = tuple(
                    pool_h[t] for t in range(len(pool_h)) if t not in chosen_h
                )
                new_arcs = list(arcs)
                new_arcs[i] = (new_tail_i, new_head_i)
                new_arcs[j] = (new_tail_j, new_head_j)
                target: StubState = tuple(sorted(new_arcs))
                info = (i, j, new_arcs[i], new_arcs[j])
                if _feature_ok(stub_state_to_hypergraph(target, n_vertices), spec):
                    yield target, mass, info
                else:
                    yield None, mass, info


def build_vertex_chain(
    d: DegreeSequence, spec: SpaceSpec, limit: int = STATE_LIMIT
) -> ChainGraph:
    """Exact vertex-labeled chain, built directly on canonical classes.

    Repartitions are enumerated at the multiset level, each weighted by the
    number of stub-level splits realizing it; the acceptance probability
    thins every proposal, with the refused share folded onto the diagonal
    ahead of the feature check.
    """
    spec = _as_vertex(spec)
    states = enumerate_vertex_space(d, spec)
    if len(states) > limit:
        raise StateSpaceLimitError(f"{len(states)} states exceed the cap {limit}")
    keys = [canonical_form(H) for H in states]
    index = {key: k for k, key in enumerate(keys)}
    rows: list[Row] = []
    for H in states:
        row: Row = defaultdict(Fraction)
        self_idx = index[canonical_form(H)]
        arcs = list(H.arcs)
        m = len(arcs)
        if m < 2:
            rows.append({self_idx: Fraction(1)})
            continue
        npairs = comb(m, 2)
        for i, j in combinations(range(m), 2):
            (tail_i, head_i), (tail_j, head_j) = arcs[i], arcs[j]
            pool_t = multiset(tail_i + tail_j)
            pool_h = multiset(head_i + head_j)
            denom = (
                npairs
                * comb(len(pool_t), len(tail_i))
                * comb(len(pool_h), len(head_i))
            )
            for ta, tb, w_t in _multiset_splits(pool_t, len(tail_i)):
                for ha, hb, w_h in _multiset_splits(pool_h, len(head_i)):
                    mass = Fraction(w_t * w_h, denom)
                    prop = ShuffleProposal(i, j, ta, ha, tb, hb)
                    alpha = acceptance_probability(H, prop)
                    new_arcs = list(arcs)
                    new_arcs[i] = (ta, ha)
                    new_arcs[j] = (tb, hb)
                    target = canonicalize(H.replace_arcs(new_arcs))
                    row[self_idx] += mass * (1 - alpha)
                    if _feature_ok(target, spec):
                        row[index[canonical_form(target)]] += mass * alpha
                    else:
                        row[self_idx] += mass * alpha
        rows.append({k: v for k, v in row.items() if v})
    _check_rows(rows)
    return ChainGraph(spec, d, states, keys, rows)


def _as_vertex(spec: SpaceSpec) -> SpaceSpec:
    if spec.labeling == "vertex":
        return spec
    return SpaceSpec(
        spec.allow_self_loops,
        spec.allow_degenerate,
        spec.allow_multi,
        "vertex",
        spec.overlap_self_loops,
    )


def _multiset_splits(pool: tuple[int, ...], k: int):
    """Splits of a pooled multiset into sizes (k, rest) at the vertex level.

    Yields (part_a, part_b, weight) where weight is the number of
    stub-level token splits realizing the pair, i.e. the product over
    vertices of C(pool_count, part_a_count).
    """
    values: list[int] = []
    counts: list[int] = []
    for v in pool:
        if values and values[-1] == v:
            counts[-1] += 1
        else:
            values.append(v)
            counts.append(1)

    def rec(idx: int, remaining: int, chosen: list[int], weight: int):
        if idx == len(values):
            if remaining == 0:
                part_a: list[int] = []
                part_b: list[int] = []
                for v, c_total, c_a in zip(values, counts, chosen):
                    part_a.extend([v] * c_a)
                    part_b.extend([v] * (c_total - c_a))
                yield tuple(part_a), tuple(part_b), weight
            return
        c_total = counts[idx]
        rest_capacity = sum(counts[idx + 1 :])
        lo = max(0, remaining - rest_capacity)
        hi = min(c_total, remaining)
        for take in range(lo, hi + 1):
            chosen.append(take)
            yield from rec(idx + 1, remaining - take, chosen, weight * comb(c_total, take))
            chosen.pop()

    yield from rec(0, k, [], 1)


def build_vertex_chain_lumped(
    d: DegreeSequence, spec: SpaceSpec, limit: int = STATE_LIMIT
) -> ChainGraph:
    """Vertex-labeled chain obtained by collapsing the stub-labeled walk.

    Independent construction route: build the alpha-thinned walk on stub
    states, then merge states with equal vertex projections.  Merging is
    only sound if every stub state of a class produces the same collapsed
    row; that is asserted exactly, and the result is comparable entry by
    entry with :func:`build_vertex_chain`.
    """
    spec = _as_vertex(spec)
    stub_states = enumerate_stub_space(d, spec)
    if len(stub_states) > limit:
        raise StateSpaceLimitError(f"{len(stub_states)} states exceed the cap {limit}")
    n = d.n_vertices

    projections = [canonicalize(stub_state_to_hypergraph(s, n)) for s in stub_states]
    class_keys = sorted({canonical_form(H) for H in projections})
    class_index = {key: k for k, key in enumerate(class_keys)}
    class_rep = {canonical_form(H): H for H in projections}

    lumped_rows: dict[int, Row] = {}
    for state, H_proj in zip(stub_states, projections):
        row: Row = defaultdict(Fraction)
        src = class_index[canonical_form(H_proj)]
        for target, mass, info in _stub_transitions(state, n, spec):
            if info is None:
                row[src] += mass
                continue
            i, j, new_a, new_b = info
            prop = ShuffleProposal(
                i,
                j,
                multiset(v for v, _ in new_a[0]),
                multiset(v for v, _ in new_a[1]),
                multiset(v for v, _ in new_b[0]),
                multiset(v for v, _ in new_b[1]),
            )
            alpha = acceptance_probability(H_proj, prop)
            row[src] += mass * (1 - alpha)
            if target is None:
                row[src] += mass * alpha
            else:
                tgt_class = class_index[
                    canonical_form(stub_state_to_hypergraph(target, n))
                ]
                row[tgt_class] += mass * alpha
        clean = {k: v for k, v in row.items() if v}
        if src in lumped_rows and lumped_rows[src] != clean:
            raise AssertionError(
                "stub states of one class produced different collapsed rows"
            )
        lumped_rows[src] = clean

    states = [class_rep[key] for key in class_keys]
    rows = [lumped_rows[k] for k in range(len(class_keys))]
    _check_rows(rows)
    return ChainGraph(spec, d, states, list(class_keys), rows)


def check_regular(g: ChainGraph) -> tuple[bool, tuple[int, int] | None]:
    """Exact symmetry of the matrix; returns a witness entry on failure.

    Scanning every stored entry covers missing mirrors too: a nonzero
    P[j][i] with zero P[i][j] is caught while scanning row j.
    """
    for i, row in enumerate(g.rows):
        for j, p in row.items():
            if g.rows[j].get(i, Fraction(0)) != p:
                return False, (i, j)
    return True, None


def check_doubly_stochastic(g: ChainGraph) -> tuple[bool, int | None]:
    """Rows and columns all sum to exactly 1."""
    for i, total in enumerate(g.row_sums()):
        if total != 1:
            return False, i
    for j, total in enumerate(g.column_sums()):
        if total != 1:
            return False, j
    return True, None


def check_aperiodic(g: ChainGraph) -> bool:
    """Positive diagonal everywhere (identity shuffle mass)."""
    return all(row.get(i, Fraction(0)) > 0 for i, row in enumerate(g.rows))


def check_strongly_connected(g: ChainGraph) -> tuple[bool, list[list[int]]]:
    """Strong connectivity over edges with positive probability.

    Returns the verdict and the partition into strongly connected
    components (each sorted, components ordered by smallest member).
    """
    n = g.n_states
    succ = [[j for j, p in row.items() if p > 0] for row in g.rows]
    pred: list[list[int]] = [[] for _ in range(n)]
    for i, out in enumerate(succ):
        for j in out:
            pred[j].append(i)

    order: list[int] = []
    seen = [False] * n
    for root in range(n):
        if seen[root]:
            continue
        stack = [(root, iter(succ[root]))]
        seen[root] = True
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if not seen[nxt]:
                    seen[nxt] = True
                    stack.append((nxt, iter(succ[nxt])))
                    advanced = True
                    break
            if not advanced:
                order.append(node)
                stack.pop()

    comp = [-1] * n
    n_comp = 0
    for root in reversed(order):
        if comp[root] != -1:
            continue
        stack2 = [root]
        comp[root] = n_comp
        while stack2:
            node = stack2.pop()
            for nxt in pred[node]:
                if comp[nxt] == -1:
                    comp[nxt] = n_comp
                    stack2.append(nxt)
        n_comp += 1

    groups: list[list[int]] = [[] for _ in range(n_comp)]
    for node, c in enumerate(comp):
        groups[c].append(node)
    groups = sorted([sorted(grp) for grp in groups], key=lambda grp: grp[0])
    return n_comp == 1, groups


@dataclass
class StationaryResult:
    """Either one global distribution or one per closed component."""

    pi: np.ndarray | None
    components: list[tuple[list[int], np.ndarray]] | None

    @property
    def is_global(self) -> bool:
        return self.pi is not None


def stationary_distribution(
    g: ChainGraph, tol: float = 1e-12, max_iter: int = 1_000_000
) -> StationaryResult:
    """Solve pi P = pi by power iteration to ``tol`` in sup norm.

    The chains built here always have positive diagonals, so power
    iteration converges on any strongly connected piece.  A reducible
    chain gets one stationary vector per closed component instead.
    """
    connected, components = check_strongly_connected(g)
    P = g.to_dense()
    if connected:
        return StationaryResult(_power_iterate(P, tol, max_iter), None)
    per_component = []
    for members in components:
        if _component_is_closed(g, members):
            sub = P[np.ix_(members, members)]
            per_component.append((members, _power_iterate(sub, tol, max_iter)))
    return StationaryResult(None, per_component)


def _component_is_closed(g: ChainGraph, members: list[int]) -> bool:
    inside = set(members)
    return all(j in inside for i in members for j in g.rows[i])


def _power_iterate(P: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    n = P.shape[0]
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = x @ P
        if np.max(np.abs(nxt - x)) < tol:
            return nxt
        x = nxt
    raise RuntimeError("power iteration did not converge")


def is_exactly_uniform_stationary(g: ChainGraph) -> bool:
    """Exact test that the uniform vector solves pi P = pi.

    Uniform is stationary iff every column sums to 1; together with strong
    connectivity and aperiodicity this pins the stationary distribution to
    uniform with zero error.
    """
    return all(total == 1 for total in g.column_sums())


def tv_curve(g: ChainGraph, start: int, steps: int) -> list[float]:
    """Total variation distance to uniform after t = 0..steps steps."""
    P = g.to_dense()
    n = g.n_states
    x = np.zeros(n)
    x[start] = 1.0
    uniform = 1.0 / n
    curve = []
    for _ in range(steps + 1):
        curve.append(0.5 * float(np.sum(np.abs(x - uniform))))
        x = x @ P
    return curve


def chain_edge_list(g: ChainGraph) -> str:
    """Plain-text export: one ``i j num/den`` line per positive entry."""
    lines = []
    for i, row in enumerate(g.rows):
        for j in sorted(row):
            p = row[j]
            lines.append(f"{i} {j} {p.numerator}/{p.denominator}")
    return "\n".join(lines) + "\n"


def tv_curve_csv(curve: Sequence[float]) -> str:
    lines = ["step,tv"]
    lines += [f"{t},{value:.17g}" for t, value in enumerate(curve)]
    return "\n".join(lines) + "\n"


def with_perturbed_entry(
    g: ChainGraph, i: int, j: int, eps: Fraction
) -> ChainGraph:
    """Negative-control copy: move ``eps`` mass from P[i][j] to P[i][i].

    Keeps the row stochastic while breaking symmetry and the column sums.
    """
    if i == j:
        raise ValueError("perturb an off-diagonal entry")
    rows = [dict(row) for row in g.rows]
    if rows[i].get(j, Fraction(0)) < eps:
        raise ValueError("entry too small to perturb by eps")
    rows[i][j] -= eps
    if rows[i][j] == 0:
        del rows[i][j]
    rows[i][i] = rows[i].get(i, Fraction(0)) + eps
    return ChainGraph(g.spec, g.degree, g.states, g.keys, rows)
