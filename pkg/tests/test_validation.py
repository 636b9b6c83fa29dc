"""Chi-square harness, bipartite cross-check, counterexample suites."""

import json
import random
from collections import Counter

import pytest

from hypershuffle import (
    SampleOutsideSpaceError,
    SpaceSpec,
    canonical_form,
    check_sm_equivalence,
    classify_features,
    counterexample_suite,
    enumerate_vertex_space,
    hypergraph,
    map_to_bipartite,
    uniformity_test,
)
from hypershuffle.validation import find_digraph_disconnection, stub_pushforward_weights
from conftest import FIG_DEGREES, WORKED_EXAMPLE, random_instance

SDM = SpaceSpec.from_string("sdm")


class TestUniformityTest:
    def test_fair_multinomial_passes(self):
        rng = random.Random(1)
        space = [f"s{k}".encode() for k in range(8)]
        samples = Counter(rng.choice(space) for _ in range(8000))
        report = uniformity_test(samples, space)
        assert report.p_value > 0.01
        assert report.verdict == "pass"

    def test_biased_sample_fails_hard(self):
        rng = random.Random(2)
        space = [f"s{k}".encode() for k in range(8)]
        biased = space[:4] * 3 + space  # state weights 4,4,4,4,1,1,1,1
        samples = Counter(rng.choice(biased) for _ in range(8000))
        report = uniformity_test(samples, space)
        assert report.p_value < 1e-4

    def test_weighted_expectations(self):
        rng = random.Random(3)
        space = [b"a", b"b"]
        weights = [3, 1]
        samples = Counter(
            rng.choice([b"a", b"a", b"a", b"b"]) for _ in range(4000)
        )
        report = uniformity_test(samples, space, weights)
        assert report.p_value > 0.01

    def test_sample_outside_space_is_hard_failure(self):
        with pytest.raises(SampleOutsideSpaceError):
            uniformity_test(Counter({b"rogue": 1}), [b"a", b"b"])

    def test_small_cells_are_pooled(self):
        space = [b"a", b"b", b"c"]
        weights = [1000, 1000, 1]
        samples = Counter({b"a": 500, b"b": 501, b"c": 1})
        report = uniformity_test(samples, space, weights)
        assert report.pooled_cells >= 1

    def test_json_report_schema(self):
        space = [b"a", b"b"]
        samples = Counter({b"a": 50, b"b": 50})
        report = uniformity_test(samples, space)
        payload = json.loads(
            report.to_json(instance="x.dhg", spec="sdm", labeling="stub",
                           k=10, replicas=100, seed=1)
        )
        for field in ("instance", "spec", "labeling", "k", "replicas", "seed",
                      "histogram", "chi2", "p", "verdict"):
            assert field in payload


class TestBipartiteMap:
    def test_mapping_instance_classes(self):
        # Two arcs on vertices u,v,w: the incidence picture has one
        # vertex-side node per vertex and one arc-side node per arc.
        H = hypergraph(3, [((0, 1), (1, 2)), ((1,), (0,))],
                       labels=("u", "v", "w"))
        tail_graph, head_graph = map_to_bipartite(H)
        assert tail_graph.vertex_nodes == ("u_out_u", "u_out_v", "u_out_w")
        assert head_graph.vertex_nodes == ("u_in_u", "u_in_v", "u_in_w")
        assert tail_graph.arc_nodes == ("u_t_a0", "u_t_a1")
        assert head_graph.arc_nodes == ("u_h_a0", "u_h_a1")
        assert not tail_graph.has_multi_arc
        assert not head_graph.has_multi_arc

    def test_degenerate_arc_maps_to_double_arc(self):
        H = hypergraph(2, [((0, 0), (1,))])
        tail_graph, _ = map_to_bipartite(H)
        assert tail_graph.has_multi_arc
        assert not check_sm_equivalence(H)

    def test_multi_hyperarcs_do_not_create_multi_arcs(self):
        H = hypergraph(2, [((0,), (1,)), ((0,), (1,))])
        tail_graph, head_graph = map_to_bipartite(H)
        assert not tail_graph.has_multi_arc
        assert not head_graph.has_multi_arc
        assert check_sm_equivalence(H)

    def test_agreement_with_feature_classification(self):
        rng = random.Random(9)
        for _ in range(500):
            H = random_instance(rng)
            assert check_sm_equivalence(H) == (
                not classify_features(H).has_degenerate
            )

    def test_worked_example(self):
        # The worked example has a degenerate arc, so the bipartite image
        # carries a double arc and the membership verdict is negative.
        assert not check_sm_equivalence(WORKED_EXAMPLE)


class TestCounterexamples:
    def test_full_suite_confirms(self):
        report = counterexample_suite()
        assert report.blocked_class_isolated
        assert report.blocked_row_is_identity
        assert report.blocked_fiber_closed
        assert report.stub_disconnected
        assert report.class_space_size == 2
        assert report.spread_state_present
        assert report.control_connected
        assert report.all_confirmed
        payload = json.loads(report.to_json())
        assert payload["all_confirmed"] is True

    def test_digraph_search_rejects_self_loop_spaces(self):
        with pytest.raises(ValueError):
            find_digraph_disconnection("s")

    def test_digraph_search_finds_three_cycle(self):
        found = find_digraph_disconnection("")
        assert found["found"]
        assert found["n_arcs"] == 3
        assert sorted(map(tuple, found["vertex_degrees"])) == [(1, 1)] * 3


def test_pushforward_weights_align():
    keys, weights = stub_pushforward_weights(FIG_DEGREES, SDM)
    space = enumerate_vertex_space(FIG_DEGREES, SDM)
    assert keys == [canonical_form(H) for H in space]
    assert len(weights) == 11
    assert sum(weights) == 36
