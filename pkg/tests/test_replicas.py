"""Vectorized replica engine: agreement with the exact kernel law."""

import numpy as np
import pytest
from scipy.stats import chisquare

from hypershuffle import (
    ChainConfigError,
    SpaceSpec,
    build_stub_chain,
    build_vertex_chain,
    canonical_form,
    enumerate_vertex_space,
    sample_replicas,
    stub_state_to_hypergraph,
)
from conftest import D1_BLOCKED, FIG_DEGREES

SDM = SpaceSpec.from_string("sdm")


def lumped_class_row(g, n_vertices, start_key):
    """Exact one-step class distribution of the stub walk from a class."""
    fibers = {}
    for idx, state in enumerate(g.states):
        key = canonical_form(stub_state_to_hypergraph(state, n_vertices))
        fibers.setdefault(key, []).append(idx)
    src = fibers[start_key][0]
    out = {}
    for j, p in g.rows[src].items():
        key = canonical_form(stub_state_to_hypergraph(g.states[j], n_vertices))
        out[key] = out.get(key, 0.0) + float(p)
    return out


def chi2_against(counts, expected_probs):
    keys = sorted(expected_probs)
    n = sum(counts.values())
    observed = [counts.get(k, 0) for k in keys]
    expected = [n * expected_probs[k] for k in keys]
    # all expected counts are large here by construction
    return chisquare(observed, expected)


class TestSingleStepAgreement:
    def test_stub_mode_matches_exact_row(self):
        space = enumerate_vertex_space(FIG_DEGREES, SDM)
        H0 = space[0]
        g = build_stub_chain(FIG_DEGREES, SDM)
        expected = lumped_class_row(g, 3, canonical_form(H0))
        counts = sample_replicas(H0, SDM, steps=1, replicas=200_000, seed=901)
        assert set(counts) <= set(expected)
        stat, p = chi2_against(counts, expected)
        assert p > 0.01

    def test_vertex_mode_matches_exact_row(self):
        spec = SpaceSpec.from_string("sdm", "vertex")
        g = build_vertex_chain(FIG_DEGREES, spec)
        H0 = g.states[2]
        expected = {
            g.keys[j]: float(p) for j, p in g.rows[g.keys.index(canonical_form(H0))].items()
        }
        counts = sample_replicas(H0, spec, steps=1, replicas=200_000, seed=902)
        assert set(counts) <= set(expected)
        stat, p = chi2_against(counts, expected)
        assert p > 0.01

    def test_feature_rejection_path(self):
        # {sd} on the frozen instance: every replica must stay.
        spec = SpaceSpec.from_string("sd")
        counts = sample_replicas(D1_BLOCKED, spec, steps=5, replicas=5_000, seed=903)
        assert counts == {canonical_form(D1_BLOCKED): 5_000}

    def test_restricted_space_single_steps(self):
        # no-multi space on the worked example: compare against the exact
        # lumped row of the {sm} stub chain.
        spec = SpaceSpec.from_string("sm")
        space = enumerate_vertex_space(FIG_DEGREES, spec)
        H0 = space[0]
        g = build_stub_chain(FIG_DEGREES, spec)
        expected = lumped_class_row(g, 3, canonical_form(H0))
        counts = sample_replicas(H0, spec, steps=1, replicas=150_000, seed=904)
        assert set(counts) <= set(expected)
        stat, p = chi2_against(counts, expected)
        assert p > 0.01


class TestEngineBasics:
    def test_deterministic_under_seed(self):
        space = enumerate_vertex_space(FIG_DEGREES, SDM)
        a = sample_replicas(space[0], SDM, steps=20, replicas=2_000, seed=7)
        b = sample_replicas(space[0], SDM, steps=20, replicas=2_000, seed=7)
        assert a == b
        c = sample_replicas(space[0], SDM, steps=20, replicas=2_000, seed=8)
        assert a != c

    def test_zero_steps_returns_start(self):
        space = enumerate_vertex_space(FIG_DEGREES, SDM)
        counts = sample_replicas(space[0], SDM, steps=0, replicas=123, seed=1)
        assert counts == {canonical_form(space[0]): 123}

    def test_out_of_space_start_rejected(self):
        with pytest.raises(ChainConfigError):
            sample_replicas(
                D1_BLOCKED, SpaceSpec.from_string(""), steps=1, replicas=10, seed=1
            )

    def test_biased_alpha_control_changes_the_law(self):
        # With alpha forced to 1 the vertex walk converges to realization
        # weights instead of uniform; a long-run histogram must differ.
        spec = SpaceSpec.from_string("sdm", "vertex")
        space = enumerate_vertex_space(FIG_DEGREES, spec)
        fair = sample_replicas(space[0], spec, steps=60, replicas=30_000, seed=11)
        biased = sample_replicas(
            space[0], spec, steps=60, replicas=30_000, seed=11, bias_alpha_one=True
        )
        keys = sorted({*fair, *biased})
        fair_vec = np.array([fair.get(k, 0) for k in keys], dtype=float)
        biased_vec = np.array([biased.get(k, 0) for k in keys], dtype=float)
        tv = 0.5 * np.abs(fair_vec / fair_vec.sum() - biased_vec / biased_vec.sum()).sum()
        assert tv > 0.05


class TestSampledUniformity:
    def test_vertex_mode_samples_uniformly_over_classes(self):
        # Long-run vertex-labeled walk on the worked example: flat over the
        # 11 canonical classes.
        from hypershuffle import uniformity_test

        spec = SpaceSpec.from_string("sdm", "vertex")
        space = enumerate_vertex_space(FIG_DEGREES, SDM)
        keys = [canonical_form(H) for H in space]
        counts = sample_replicas(space[0], spec, steps=300, replicas=33_000, seed=5150)
        report = uniformity_test(counts, keys)
        assert report.p_value > 0.01

    def test_alpha_free_sampler_fails_flat_uniformity(self):
        # Negative control: without the acceptance probability the walk
        # lands proportional to stub realization counts, far from flat.
        from hypershuffle import uniformity_test

        spec = SpaceSpec.from_string("sdm", "vertex")
        space = enumerate_vertex_space(FIG_DEGREES, SDM)
        keys = [canonical_form(H) for H in space]
        counts = sample_replicas(
            space[0], spec, steps=300, replicas=33_000, seed=5151,
            bias_alpha_one=True,
        )
        report = uniformity_test(counts, keys)
        assert report.p_value < 1e-4
