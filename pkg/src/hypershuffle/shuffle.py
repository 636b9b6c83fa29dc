"""The double hyperarc shuffle kernel.

One step picks an unordered pair of arc positions uniformly among
``C(|A|, 2)`` choices, pools the two tails and the two heads separately,
and deals each pool back at random: the first arc slot receives a uniformly
random subset of the pooled *distinguishable* stubs of its original tail
size, the second slot the rest, and likewise for heads.  Every specific
stub-level split of a pool of ``n`` tokens into sizes ``(k, n-k)`` therefore
has probability ``1/C(n, k)``, which is what makes the stub-labeled walk
doubly stochastic.  Proposals that land outside the requested space are
undone: the chain stays put, and the rejection still counts as a step.

In vertex-labeled mode each proposal is additionally thinned by an
acceptance probability before the feature check (see
:func:`acceptance_probability`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import NamedTuple

from .hypergraph import (
    DirectedHypergraph,
    Hyperarc,
    Multiset,
    SpaceSpec,
    canonical_form,
    degree_sequence,
    in_space,
    is_degenerate,
    is_self_loop,
)


class ProposalError(ValueError):
    """Raised when no shuffle can be proposed (fewer than two arcs)."""


class ChainConfigError(ValueError):
    """Raised when a chain is started from a state outside its space."""


class ShuffleProposal(NamedTuple):
    """Chosen arc positions plus the proposed repartition of pooled stubs."""

    arc_i: int
    arc_j: int
    new_tail_i: Multiset
    new_head_i: Multiset
    new_tail_j: Multiset
    new_head_j: Multiset


# Subsets of range(n) of size k, enumerated once; drawing an index from this
# table is both faster and easier to reason about than random.sample for the
# small pools a shuffle sees.  Larger pools fall back to rng.sample.
_COMBO_LIMIT = 4096


@lru_cache(maxsize=None)
def _subsets(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(n), k))


def _draw_split(pool: tuple[int, ...], k: int, rng: random.Random):
    """Split pool into a uniformly random size-k part and its complement.

    The pool is sorted, and a subset of a sorted sequence taken in index
    order is sorted too, so both parts come back as valid multisets.
    """
    n = len(pool)
    if comb(n, k) <= _COMBO_LIMIT:
        picked = _subsets(n, k)[rng.randrange(comb(n, k))]
    else:
        picked = tuple(sorted(rng.sample(range(n), k)))
    chosen = set(picked)
    first = tuple(pool[t] for t in picked)
    second = tuple(pool[t] for t in range(n) if t not in chosen)
    return first, second


def _merge(a: Multiset, b: Multiset) -> tuple[int, ...]:
    return tuple(sorted(a + b))


def propose(H: DirectedHypergraph, rng: random.Random) -> ShuffleProposal:
    """Draw one double hyperarc shuffle proposal.

    Draw order (fixed for reproducibility): arc pair, tail split, head
    split.  Tail and head sizes stay attached to their original arc slots.
    """
    m = H.n_arcs
    if m < 2:
        raise ProposalError("need at least two hyperarcs to shuffle")
    i = rng.randrange(m)
    j = rng.randrange(m - 1)
    if j >= i:
        j += 1
    if i > j:
        i, j = j, i
    (tail_i, head_i), (tail_j, head_j) = H.arcs[i], H.arcs[j]
    new_tail_i, new_tail_j = _draw_split(_merge(tail_i, tail_j), len(tail_i), rng)
    new_head_i, new_head_j = _draw_split(_merge(head_i, head_j), len(head_i), rng)
    return ShuffleProposal(i, j, new_tail_i, new_head_i, new_tail_j, new_head_j)


def proposal_probability(H: DirectedHypergraph, p: ShuffleProposal) -> Fraction:
    """Probability of drawing exactly this stub-level repartition."""
    (tail_i, head_i), (tail_j, head_j) = H.arcs[p.arc_i], H.arcs[p.arc_j]
    nt, kt = len(tail_i) + len(tail_j), len(tail_i)
    nh, kh = len(head_i) + len(head_j), len(head_i)
    return Fraction(1, comb(H.n_arcs, 2) * comb(nt, kt) * comb(nh, kh))


def proposed_arcs(p: ShuffleProposal) -> tuple[Hyperarc, Hyperarc]:
    return (p.new_tail_i, p.new_head_i), (p.new_tail_j, p.new_head_j)


def apply_shuffle(
    H: DirectedHypergraph, p: ShuffleProposal, spec: SpaceSpec
) -> tuple[DirectedHypergraph, bool]:
    """Apply a proposal, undoing it if the result leaves the space.

    Returns ``(H', True)`` on acceptance and ``(H, False)`` when the result
    contains a feature forbidden by ``spec``.  Degrees are preserved either
    way, by construction.
    """
    arc_a, arc_b = proposed_arcs(p)
    if _violates_features(H.arcs, p.arc_i, p.arc_j, arc_a, arc_b, spec):
        return H, False
    new_arcs = list(H.arcs)
    new_arcs[p.arc_i] = arc_a
    new_arcs[p.arc_j] = arc_b
    return H.replace_arcs(new_arcs), True


def _violates_features(
    arcs: tuple[Hyperarc, ...],
    i: int,
    j: int,
    arc_a: Hyperarc,
    arc_b: Hyperarc,
    spec: SpaceSpec,
) -> bool:
    # Only the two replaced arcs can introduce a forbidden feature.
    if not spec.allow_self_loops:
        overlap = spec.overlap_self_loops
        if is_self_loop(arc_a, overlap) or is_self_loop(arc_b, overlap):
            return True
    if not spec.allow_degenerate:
        if is_degenerate(arc_a) or is_degenerate(arc_b):
            return True
    if not spec.allow_multi:
        if arc_a == arc_b:
            return True
        for k, other in enumerate(arcs):
            if k == i or k == j:
                continue
            if other == arc_a or other == arc_b:
                return True
    return False


def acceptance_probability(H: DirectedHypergraph, p: ShuffleProposal) -> Fraction:
    """Vertex-labeled acceptance probability of a proposal.

    For a class-changing proposal this is one over the number of distinct
    stub-labeled one-shuffle outcomes that land in the proposal's target
    class, counted from any fixed stub-labeled realization of ``H``.
    Thinning each proposal by this factor collapses the stub-labeled walk
    onto canonical classes without skewing it, so the vertex-labeled kernel
    stays doubly stochastic.  (Class-preserving proposals keep the state
    whether accepted or not; their value never influences the walk.)

    When the two selected arcs are distinct and the two resulting arcs are
    distinct, this reduces to

        1 / ( m_a * m_b * prod_v C(cnt_ah(v)+cnt_bh(v), cnt_ah(v))
                               * C(cnt_at(v)+cnt_bt(v), cnt_at(v)) )

    with ``m_a``, ``m_b`` the multiplicities of the selected arcs in the arc
    multiset.  Selecting two copies of the same arc, or producing two equal
    arcs, changes the outcome count: ``m_a * m_b`` pair choices become
    ``C(m_a, 2)``, and equal-size repartitions collapse in pairs.
    """
    a, b = H.arcs[p.arc_i], H.arcs[p.arc_j]
    arc_a, arc_b = proposed_arcs(p)

    weight = _split_weight(arc_a[0], arc_b[0]) * _split_weight(arc_a[1], arc_b[1])

    if a == b:
        m_a = H.arcs.count(a)
        pair_count = comb(m_a, 2)
    else:
        pair_count = H.arcs.count(a) * H.arcs.count(b)

    sizes_equal = len(a[0]) == len(b[0]) and len(a[1]) == len(b[1])
    swap_forms = 2 if sizes_equal and arc_a != arc_b else 1
    coalesce = 2 if sizes_equal else 1
    return Fraction(coalesce, pair_count * swap_forms * weight)


def _split_weight(part_a: Multiset, part_b: Multiset) -> int:
    """Number of stub-level splits of the pooled tokens realizing this split."""
    counts_a: dict[int, int] = {}
    for v in part_a:
        counts_a[v] = counts_a.get(v, 0) + 1
    counts_b: dict[int, int] = {}
    for v in part_b:
        counts_b[v] = counts_b.get(v, 0) + 1
    w = 1
    for v, ca in counts_a.items():
        w *= comb(ca + counts_b.get(v, 0), ca)
    return w


def step(
    H: DirectedHypergraph,
    spec: SpaceSpec,
    rng: random.Random,
) -> DirectedHypergraph:
    """One chain step: propose, thin by alpha in vertex mode, apply.

    Rejections of either kind leave the state unchanged but still consume
    exactly one step, so the chain keeps its self-loop mass.
    """
    p = propose(H, rng)
    if spec.labeling == "vertex":
        alpha = acceptance_probability(H, p)
        if rng.random() >= alpha:
            return H
    H2, _ = apply_shuffle(H, p, spec)
    return H2


@dataclass(frozen=True)
class ChainConfig:
    """Run parameters: identical (seed, config, start) give identical runs."""

    steps: int
    seed: int
    spec: SpaceSpec
    record_trace: bool = False

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")


@dataclass(frozen=True)
class ChainResult:
    final: DirectedHypergraph
    trace: tuple[bytes, ...] | None


def run_chain(H0: DirectedHypergraph, config: ChainConfig) -> ChainResult:
    """Run the shuffle chain for ``config.steps`` steps from ``H0``.

    The start state must lie in the configured space; every intermediate
    state then does too, and the degree sequence never changes.
    """
    if not in_space(H0, config.spec, degree_sequence(H0)):
        raise ChainConfigError("start state is outside the configured space")
    rng = random.Random(config.seed)
    H = H0
    trace: list[bytes] | None = [] if config.record_trace else None
    if trace is not None:
        trace.append(canonical_form(H))
    single_arc = H.n_arcs < 2
    for _ in range(config.steps):
        if not single_arc:
            H = step(H, config.spec, rng)
        if trace is not None:
            trace.append(canonical_form(H))
    return ChainResult(final=H, trace=tuple(trace) if trace is not None else None)


def spawn_seed(seed: int, index: int) -> int:
    """Derived seed for replica ``index``; stable across platforms."""
    import hashlib

    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def reverse_proposal(
    H: DirectedHypergraph, p: ShuffleProposal
) -> tuple[DirectedHypergraph, ShuffleProposal]:
    """The shuffled hypergraph together with the repartition that undoes it.

    Used to check proposal-level reversibility: the reverse repartition has
    the same pair, the same pooled stubs and the same binomials, hence the
    same proposal probability.
    """
    arc_a, arc_b = proposed_arcs(p)
    new_arcs = list(H.arcs)
    new_arcs[p.arc_i] = arc_a
    new_arcs[p.arc_j] = arc_b
    H2 = H.replace_arcs(new_arcs)
    (tail_i, head_i), (tail_j, head_j) = H.arcs[p.arc_i], H.arcs[p.arc_j]
    back = ShuffleProposal(p.arc_i, p.arc_j, tail_i, head_i, tail_j, head_j)
    return H2, back
