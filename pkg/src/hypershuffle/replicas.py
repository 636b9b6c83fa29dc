"""Vectorized replica engine: many independent chains stepped together.

The reference kernel in :mod:`hypershuffle.shuffle` walks one chain at a
time; mass experiments (10^5 chains of 10^3 steps) need all replicas
advanced per step with numpy.  States are kept as per-slot vertex count
matrices, and the uniform stub-level repartition is drawn as a sequence of
conditional hypergeometric variables per vertex, which reproduces the
``prod_v C(pool_v, take_v) / C(n, k)`` split distribution of the kernel
exactly.  Agreement with the exact transition rows is covered by tests.

Randomness comes from ``numpy.random.Generator`` (PCG64) seeded once, so a
given (start, spec, steps, replicas, seed) is reproducible bit for bit.
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations
from math import comb

import numpy as np

from .hypergraph import (
    DirectedHypergraph,
    SpaceSpec,
    canonical_form,
    canonicalize,
    degree_sequence,
    in_space,
    multiset,
)
from .shuffle import ChainConfigError


def sample_replicas(
    H0: DirectedHypergraph,
    spec: SpaceSpec,
    steps: int,
    replicas: int,
    seed: int,
    bias_alpha_one: bool = False,
) -> Counter[bytes]:
    """Run ``replicas`` chains of ``steps`` steps; count final canonical forms.

    ``bias_alpha_one`` skips the vertex-labeled acceptance probability (a
    deliberately broken sampler used as a negative control); it has no
    effect in stub mode.
    """
    if not in_space(H0, spec, degree_sequence(H0)):
        raise ChainConfigError("start state is outside the configured space")
    m = H0.n_arcs
    n_v = H0.n_vertices
    if m < 2 or steps == 0:
        return Counter({canonical_form(H0): replicas})

    rng = np.random.default_rng(seed)
    tails = np.zeros((replicas, m, n_v), dtype=np.int16)
    heads = np.zeros((replicas, m, n_v), dtype=np.int16)
    for k, (tail, head) in enumerate(H0.arcs):
        for v in tail:
            tails[:, k, v] += 1
        for v in head:
            heads[:, k, v] += 1

    pairs = list(combinations(range(m), 2))
    pair_i = np.array([i for i, _ in pairs])
    pair_j = np.array([j for _, j in pairs])
    t_sizes = np.array([len(t) for t, _ in H0.arcs])
    h_sizes = np.array([len(h) for _, h in H0.arcs])

    max_count = int(max(t_sizes.max(), h_sizes.max())) * 2
    choose = np.array(
        [[comb(a, b) if b <= a else 0 for b in range(max_count + 1)]
         for a in range(max_count + 1)],
        dtype=np.float64,
    )

    vertex_mode = spec.labeling == "vertex" and not bias_alpha_one
    check_features = not spec.allows_everything()

    for _ in range(steps):
        pk = rng.integers(0, len(pairs), replicas)
        ai, aj = pair_i[pk], pair_j[pk]

        tail_a, tail_b = _split_pools(tails, ai, aj, t_sizes, rng)
        head_a, head_b = _split_pools(heads, ai, aj, h_sizes, rng)

        accept = np.ones(replicas, dtype=bool)
        if vertex_mode:
            alpha = _alpha_vector(
                tails, heads, ai, aj, tail_a, tail_b, head_a, head_b,
                t_sizes, h_sizes, choose,
            )
            accept &= rng.random(replicas) < alpha
        if check_features:
            accept &= ~_forbidden(
                tails, heads, ai, aj, tail_a, tail_b, head_a, head_b, spec
            )

        idx = np.nonzero(accept)[0]
        tails[idx, ai[idx]] = tail_a[idx]
        tails[idx, aj[idx]] = tail_b[idx]
        heads[idx, ai[idx]] = head_a[idx]
        heads[idx, aj[idx]] = head_b[idx]

    return _tally(tails, heads, n_v)


def _split_pools(counts, ai, aj, sizes, rng):
    """Uniform stub-level split of the pooled counts of the chosen arc pair.

    Per vertex in turn, the number of pooled tokens of that vertex handed to
    the first slot follows a hypergeometric law conditioned on what remains;
    the joint outcome is then exactly proportional to prod_v C(pool_v, x_v).
    """
    rows = np.arange(counts.shape[0])
    pool = (counts[rows, ai] + counts[rows, aj]).astype(np.int64)
    remaining = sizes[ai].astype(np.int64).copy()
    n_v = pool.shape[1]
    part = np.zeros_like(pool)
    rest_after = np.concatenate(
        [np.cumsum(pool[:, ::-1], axis=1)[:, ::-1][:, 1:], np.zeros((len(rows), 1), dtype=np.int64)],
        axis=1,
    )
    for v in range(n_v - 1):
        take = rng.hypergeometric(pool[:, v], rest_after[:, v], remaining)
        part[:, v] = take
        remaining = remaining - take
    part[:, n_v - 1] = remaining
    return part.astype(np.int16), (pool - part).astype(np.int16)


def _alpha_vector(
    tails, heads, ai, aj, tail_a, tail_b, head_a, head_b, t_sizes, h_sizes, choose
):
    """Vectorized acceptance probabilities (float64) for every replica."""
    rows = np.arange(tails.shape[0])
    m = tails.shape[1]

    sel_t_i, sel_h_i = tails[rows, ai], heads[rows, ai]
    sel_t_j, sel_h_j = tails[rows, aj], heads[rows, aj]

    mult_i = np.zeros(len(rows), dtype=np.int64)
    mult_j = np.zeros(len(rows), dtype=np.int64)
    for k in range(m):
        eq_i = (tails[:, k] == sel_t_i).all(1) & (heads[:, k] == sel_h_i).all(1)
        eq_j = (tails[:, k] == sel_t_j).all(1) & (heads[:, k] == sel_h_j).all(1)
        mult_i += eq_i
        mult_j += eq_j
    same_pick = (sel_t_i == sel_t_j).all(1) & (sel_h_i == sel_h_j).all(1)
    pair_count = np.where(same_pick, mult_i * (mult_i - 1) // 2, mult_i * mult_j)

    pool_t = (tail_a + tail_b).astype(np.int64)
    pool_h = (head_a + head_b).astype(np.int64)
    weight = choose[pool_t, tail_a.astype(np.int64)].prod(axis=1)
    weight *= choose[pool_h, head_a.astype(np.int64)].prod(axis=1)

    sizes_equal = (t_sizes[ai] == t_sizes[aj]) & (h_sizes[ai] == h_sizes[aj])
    result_equal = (tail_a == tail_b).all(1) & (head_a == head_b).all(1)
    swap_forms = np.where(sizes_equal & ~result_equal, 2, 1)
    coalesce = np.where(sizes_equal, 2, 1)
    return coalesce / (pair_count * swap_forms * weight)


def _forbidden(tails, heads, ai, aj, tail_a, tail_b, head_a, head_b, spec):
    """Replicas whose proposed result carries a forbidden feature."""
    replicas = tails.shape[0]
    m = tails.shape[1]
    bad = np.zeros(replicas, dtype=bool)
    if not spec.allow_self_loops:
        if spec.overlap_self_loops:
            bad |= ((tail_a > 0) & (head_a > 0)).any(1)
            bad |= ((tail_b > 0) & (head_b > 0)).any(1)
        else:
            bad |= (tail_a == head_a).all(1)
            bad |= (tail_b == head_b).all(1)
    if not spec.allow_degenerate:
        bad |= (tail_a >= 2).any(1) | (head_a >= 2).any(1)
        bad |= (tail_b >= 2).any(1) | (head_b >= 2).any(1)
    if not spec.allow_multi:
        bad |= (tail_a == tail_b).all(1) & (head_a == head_b).all(1)
        untouched = np.ones((replicas, m), dtype=bool)
        rows = np.arange(replicas)
        untouched[rows, ai] = False
        untouched[rows, aj] = False
        for k in range(m):
            other = untouched[:, k]
            hit_a = (tails[:, k] == tail_a).all(1) & (heads[:, k] == head_a).all(1)
            hit_b = (tails[:, k] == tail_b).all(1) & (heads[:, k] == head_b).all(1)
            bad |= other & (hit_a | hit_b)
    return bad


def _tally(tails, heads, n_vertices) -> Counter[bytes]:
    """Canonical form counts over final replica states."""
    replicas, m, _ = tails.shape
    stacked = np.concatenate([tails, heads], axis=2)
    raw: Counter[bytes] = Counter()
    first_seen: dict[bytes, int] = {}
    for r in range(replicas):
        key = b"".join(sorted(stacked[r, k].tobytes() for k in range(m)))
        raw[key] += 1
        first_seen.setdefault(key, r)

    out: Counter[bytes] = Counter()
    for key, count in raw.items():
        r = first_seen[key]
        arcs = []
        for k in range(m):
            tail = multiset(
                v for v in range(n_vertices) for _ in range(int(tails[r, k, v]))
            )
            head = multiset(
                v for v in range(n_vertices) for _ in range(int(heads[r, k, v]))
            )
            arcs.append((tail, head))
        H = canonicalize(DirectedHypergraph(n_vertices, tuple(arcs)))
        out[canonical_form(H)] += count
    return out
