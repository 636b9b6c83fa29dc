"""End-to-end verification targets runnable from the CLI.

Each target re-derives one headline claim by exhaustive enumeration and
exact chain analysis on desk-scale instances: the enumeration counts of the
worked example, uniform stationarity on the two unconditionally good
feature classes, the restricted single-tail-size class, the failure
catalogue, and the vertex-labeled correction.  Every function returns
(passed, report lines) so the CLI can stream progress and exit 0/1.
"""

from __future__ import annotations

from collections import Counter
from typing import Callable

from .chains import (
    build_stub_chain,
    build_vertex_chain,
    build_vertex_chain_lumped,
    check_aperiodic,
    check_doubly_stochastic,
    check_regular,
    check_strongly_connected,
    is_exactly_uniform_stationary,
)
from .enumeration import (
    count_stub_realizations,
    enumerate_vertex_space,
    stub_state_to_hypergraph,
)
from .hypergraph import DegreeSequence, SpaceSpec, canonical_form
from .validation import D1_DEGREES, counterexample_suite

FIG_DEGREES = DegreeSequence(
    vertex_degrees=((2, 1), (0, 2), (1, 1)),
    arc_degrees=((2, 1), (1, 1), (1, 1)),
)

FIG_EXPECTED_COUNTS = {"sdm": 11, "sm": 8, "d": 5, "": 4}

# Degree sequences whose unrestricted spaces exercise self-loops,
# degenerate arcs and multi-arcs; used by the thm1/thm4 batteries.
DEG_MULT_DEGREES = DegreeSequence(
    vertex_degrees=((0, 2), (0, 2), (2, 0)),
    arc_degrees=((2, 1), (2, 1)),
)

LOOP_DIGRAPH_DEGREES = DegreeSequence(
    vertex_degrees=((1, 1), (1, 1)),
    arc_degrees=((1, 1), (1, 1)),
)

WIDE_DEGREES = DegreeSequence(
    vertex_degrees=((1, 1), (1, 1), (1, 1)),
    arc_degrees=((2, 2), (1, 1)),
)

SHARED_HEAD_DEGREES = DegreeSequence(
    vertex_degrees=((0, 1), (0, 1), (2, 0), (1, 0), (1, 0)),
    arc_degrees=((1, 2), (1, 2)),
)

THM1_BATTERY = [
    ("worked-example", FIG_DEGREES),
    ("three-tail-pairs", D1_DEGREES),
    ("degenerate-vs-multi", DEG_MULT_DEGREES),
    ("two-loops", LOOP_DIGRAPH_DEGREES),
    ("mixed-sizes", WIDE_DEGREES),
    ("shared-heads", SHARED_HEAD_DEGREES),
]

# Single-size-1 tails with exactly two tail vertices: the restricted class
# for which connectivity is proven without multi-arcs or degenerate arcs.
THM2_BATTERY = [
    (
        "two-tails-four-heads",
        DegreeSequence(
            vertex_degrees=((0, 1), (0, 1), (1, 0), (1, 0), (1, 0), (1, 0)),
            arc_degrees=((1, 2), (1, 2)),
        ),
    ),
    (
        "two-tails-three-arcs",
        DegreeSequence(
            vertex_degrees=((0, 2), (0, 1), (2, 0), (2, 0), (2, 0)),
            arc_degrees=((1, 2), (1, 2), (1, 2)),
        ),
    ),
    (
        "tails-receive-too",
        DegreeSequence(
            vertex_degrees=((1, 2), (1, 1), (2, 0), (2, 0)),
            arc_degrees=((1, 2), (1, 2), (1, 2)),
        ),
    ),
    (
        "lopsided-heads",
        DegreeSequence(
            vertex_degrees=((0, 3), (0, 1), (3, 0), (3, 0), (2, 0)),
            arc_degrees=((1, 2), (1, 2), (1, 2), (1, 2)),
        ),
    ),
]

THM4_BATTERY = [
    ("worked-example", FIG_DEGREES),
    ("degenerate-vs-multi", DEG_MULT_DEGREES),
    ("shared-heads", SHARED_HEAD_DEGREES),
    ("three-tail-pairs", D1_DEGREES),
]

Target = Callable[[], tuple[bool, list[str]]]


def fig_fixed_degrees() -> tuple[bool, list[str]]:
    """Enumeration counts of the worked example: 11 / 8 / 5 / 4."""
    lines = []
    ok = True
    for features, want in FIG_EXPECTED_COUNTS.items():
        got = len(enumerate_vertex_space(FIG_DEGREES, SpaceSpec.from_string(features)))
        good = got == want
        ok &= good
        lines.append(
            f"{'PASS' if good else 'FAIL'} space [{features or 'none'}]: "
            f"{got} vertex-labeled hypergraphs (expected {want})"
        )
    return ok, lines


def thm1() -> tuple[bool, list[str]]:
    """Stub walk is exactly uniform on the two all-feature-friendly classes.

    For every battery instance and both feature sets {s,d,m} and {s,m}: the
    matrix is symmetric with positive diagonal, the state graph is strongly
    connected, and uniform solves pi P = pi exactly, which together pin the
    stationary distribution to uniform.
    """
    lines = []
    ok = True
    for name, d in THM1_BATTERY:
        for features in ("sdm", "sm"):
            spec = SpaceSpec.from_string(features)
            g = build_stub_chain(d, spec)
            symmetric, witness = check_regular(g)
            aperiodic = check_aperiodic(g)
            connected, comps = check_strongly_connected(g)
            uniform = is_exactly_uniform_stationary(g)
            good = symmetric and aperiodic and connected and uniform
            ok &= good
            detail = (
                f"{g.n_states} states, symmetric={symmetric}, "
                f"aperiodic={aperiodic}, connected={connected}, "
                f"uniform-stationary={uniform}"
            )
            if witness:
                detail += f", asymmetry witness {witness}"
            lines.append(f"{'PASS' if good else 'FAIL'} {name} [{features}]: {detail}")
    return ok, lines


# Whether connectivity extends past the two-tail-vertex restriction is an
# open question; these neighbours of the restricted class get an empirical
# verdict only, and never gate the target.
NEAR_RESTRICTED_BATTERY = [
    (
        "three-tail-vertices",
        DegreeSequence(
            vertex_degrees=((0, 1), (0, 1), (0, 1), (2, 0), (2, 0), (2, 0)),
            arc_degrees=((1, 2), (1, 2), (1, 2)),
        ),
    ),
    (
        "head-size-three",
        DegreeSequence(
            vertex_degrees=((0, 1), (0, 1), (2, 0), (2, 0), (2, 0)),
            arc_degrees=((1, 3), (1, 3)),
        ),
    ),
]


def thm2() -> tuple[bool, list[str]]:
    """Connectivity on the single-tail-stub, two-tail-vertex class."""
    lines = []
    ok = True
    spec = SpaceSpec.from_string("s")
    for name, d in THM2_BATTERY:
        assert all(t == 1 and h == 2 for t, h in d.arc_degrees)
        assert sum(1 for _, out in d.vertex_degrees if out > 0) == 2
        g = build_stub_chain(d, spec)
        connected, comps = check_strongly_connected(g)
        good = connected and g.n_states >= 1
        ok &= good
        lines.append(
            f"{'PASS' if good else 'FAIL'} {name}: {g.n_states} states, "
            f"connected={connected} ({len(comps)} component(s))"
        )
    for name, d in NEAR_RESTRICTED_BATTERY:
        g = build_stub_chain(d, spec)
        connected, comps = check_strongly_connected(g)
        lines.append(
            f"INFO outside the proven class, {name}: {g.n_states} states, "
            f"connected={connected} ({len(comps)} component(s))"
        )
    return ok, lines


def thm3() -> tuple[bool, list[str]]:
    """The failure catalogue: frozen start and digraph reductions."""
    report = counterexample_suite()
    frozen_ok = (
        report.blocked_class_isolated
        and report.blocked_row_is_identity
        and report.blocked_fiber_closed
        and report.stub_disconnected
        and report.class_space_size >= 2
    )
    lines = [
        f"{'PASS' if frozen_ok else 'FAIL'} "
        f"[sd] three-tail-pairs: frozen start is an isolated class with unit "
        f"diagonal ({report.class_space_size} classes, "
        f"{report.stub_space_size} stub states, stub walk "
        f"{'disconnected' if report.stub_disconnected else 'connected'})",
        f"{'PASS' if report.spread_state_present else 'FAIL'} "
        f"[sd] second state present in the space",
        f"{'PASS' if report.control_connected else 'FAIL'} "
        f"[sdm] control: allowing multi-arcs reconnects the instance",
    ]
    for features in ("", "d", "m", "dm"):
        found = report.digraph_disconnections[features]
        if found["found"]:
            lines.append(
                f"PASS [{features or 'none'}] disconnected edge-swap instance: "
                f"vertex degrees {found['vertex_degrees']}, "
                f"{found['n_arcs']} arcs, {found['n_states']} states in "
                f"{found['n_components']} components"
            )
        else:
            lines.append(f"FAIL [{features or 'none'}] no disconnected instance found")
    return report.all_confirmed, lines


def thm4() -> tuple[bool, list[str]]:
    """Vertex-labeled correction: exact uniformity over canonical classes.

    For each instance: the thinned chain built directly on classes is
    doubly stochastic (hence uniform is exactly stationary), it agrees
    entry by entry with the collapse of the thinned stub walk, and the
    plain stub walk pushes forward to class weights proportional to stub
    realization counts.
    """
    lines = []
    ok = True
    for name, d in THM4_BATTERY:
        spec = SpaceSpec.from_string("sdm", labeling="vertex")
        direct = build_vertex_chain(d, spec)
        lumped = build_vertex_chain_lumped(d, spec)
        routes_agree = direct.keys == lumped.keys and direct.rows == lumped.rows
        doubly, witness = check_doubly_stochastic(direct)
        aperiodic = check_aperiodic(direct)
        connected, _ = check_strongly_connected(direct)
        uniform = is_exactly_uniform_stationary(direct)

        # Plain stub walk pushforward: its stationary law is exactly uniform
        # over stub states, so the class weights are the fiber sizes; those
        # must match the closed-form realization counts, class by class.
        stub_spec = SpaceSpec.from_string("sdm")
        stub = build_stub_chain(d, stub_spec)
        stub_uniform = is_exactly_uniform_stationary(stub)
        fibers: Counter[bytes] = Counter(
            canonical_form(stub_state_to_hypergraph(s, d.n_vertices))
            for s in stub.states
        )
        pushforward_ok = stub_uniform and all(
            fibers.get(canonical_form(H), 0) == count_stub_realizations(H)
            for H in enumerate_vertex_space(d, stub_spec)
        )

        good = routes_agree and doubly and aperiodic and connected and uniform and pushforward_ok
        ok &= good
        lines.append(
            f"{'PASS' if good else 'FAIL'} {name}: {direct.n_states} classes, "
            f"doubly-stochastic={doubly}, uniform-stationary={uniform}, "
            f"routes-agree={routes_agree}, connected={connected}, "
            f"pushforward-counts={pushforward_ok}"
        )
    return ok, lines


TARGETS: dict[str, Target] = {
    "fig-fixed-degrees": fig_fixed_degrees,
    "thm1": thm1,
    "thm2": thm2,
    "thm3": thm3,
    "thm4": thm4,
}
