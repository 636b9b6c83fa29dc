"""Command-line front end.

Subcommands: ``sample`` (run chains, emit hypergraphs and a JSON report),
``enumerate`` (list a space with counts), ``chain-verify`` (exact chain
checks), ``reproduce`` (named end-to-end verification targets) and
``check`` (validate a file against a space).  Exit codes: 0 pass, 1 verdict
failure, 2 usage error.  Output is byte-deterministic under fixed seed and
flags; the default seed comes from ``HYPERSHUFFLE_SEED`` when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter

from .chains import (
    build_stub_chain,
    build_vertex_chain,
    chain_edge_list,
    check_aperiodic,
    check_doubly_stochastic,
    check_regular,
    check_strongly_connected,
    is_exactly_uniform_stationary,
    tv_curve,
    tv_curve_csv,
)
from .dhg import DhgParseError, parse_dhg, serialize_dhg
from .enumeration import (
    EnumerationLimitError,
    count_stub_realizations,
    enumerate_vertex_space,
)
from .hypergraph import (
    DirectedHypergraph,
    HypergraphError,
    SpaceSpec,
    canonical_form,
    classify_features,
    degree_sequence,
    in_space,
)
from .reproduce import TARGETS
from .shuffle import ChainConfig, ChainConfigError, run_chain, spawn_seed
from .validation import stub_pushforward_weights, uniformity_test

DEFAULT_SEED_ENV = "HYPERSHUFFLE_SEED"


def _default_seed() -> int:
    raw = os.environ.get(DEFAULT_SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{DEFAULT_SEED_ENV} must be an integer, got {raw!r}")


def _spec(args, labeling=None) -> SpaceSpec:
    return SpaceSpec.from_string(args.space, labeling or args.labeling)


def _load(path: str) -> DirectedHypergraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_dhg(fh.read())


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_sample(args) -> int:
    H0 = _load(args.input)
    spec = _spec(args)
    docs = []
    counts: Counter[bytes] = Counter()
    for r in range(args.samples):
        config = ChainConfig(
            steps=args.steps, seed=spawn_seed(args.seed, r), spec=spec
        )
        result = run_chain(H0, config)
        counts[canonical_form(result.final)] += 1
        docs.append(f"# sample {r}\n" + serialize_dhg(result.final))
    _emit("\n".join(docs), args.out)

    if args.report:
        d = degree_sequence(H0)
        try:
            if spec.labeling == "stub":
                keys, weights = stub_pushforward_weights(d, spec)
            else:
                keys = [
                    canonical_form(H) for H in enumerate_vertex_space(d, spec)
                ]
                weights = None
            report = uniformity_test(counts, keys, weights)
            payload = report.to_json(
                instance=args.input,
                spec=spec.feature_string,
                labeling=spec.labeling,
                k=args.steps,
                replicas=args.samples,
                seed=args.seed,
            )
        except EnumerationLimitError:
            payload = json.dumps(
                {
                    "instance": args.input,
                    "spec": spec.feature_string,
                    "labeling": spec.labeling,
                    "k": args.steps,
                    "replicas": args.samples,
                    "seed": args.seed,
                    "verdict": "space too large for the enumeration oracle",
                },
                indent=2,
                sort_keys=True,
            )
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    return 0


def cmd_enumerate(args) -> int:
    H = _load(args.input)
    d = degree_sequence(H)
    spec = _spec(args)
    states = enumerate_vertex_space(d, spec, limit=args.limit or 16)
    lines = [f"{len(states)}"]
    if args.verbose:
        for H_k in states:
            lines.append(
                f"# {count_stub_realizations(H_k)} stub realization(s)"
            )
            lines.append(serialize_dhg(H_k).rstrip("\n"))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_chain_verify(args) -> int:
    H = _load(args.input)
    d = degree_sequence(H)
    spec = _spec(args)
    limit = args.limit or 5000
    if spec.labeling == "stub":
        g = build_stub_chain(d, spec, limit=limit)
        symmetric, witness = check_regular(g)
    else:
        g = build_vertex_chain(d, spec, limit=limit)
        symmetric, witness = check_doubly_stochastic(g)
    aperiodic = check_aperiodic(g)
    connected, components = check_strongly_connected(g)
    uniform = is_exactly_uniform_stationary(g)
    lines = [
        f"states {g.n_states}",
        f"regular {str(symmetric).lower()}"
        + (f" (witness {witness})" if witness else ""),
        f"aperiodic {str(aperiodic).lower()}",
        f"strongly-connected {str(connected).lower()} ({len(components)} components)",
        f"uniform-stationary {str(uniform).lower()}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    if args.export_chain:
        with open(args.export_chain, "w", encoding="utf-8") as fh:
            fh.write(chain_edge_list(g))
    if args.export_tv is not None:
        curve = tv_curve(g, 0, args.steps or 64)
        with open(args.export_tv, "w", encoding="utf-8") as fh:
            fh.write(tv_curve_csv(curve))
    verdict = symmetric and aperiodic and connected and uniform
    return 0 if verdict else 1


def cmd_reproduce(args) -> int:
    target = TARGETS[args.target]
    passed, lines = target()
    _emit("\n".join(lines) + ("\n" if lines else ""), args.out)
    return 0 if passed else 1


def cmd_check(args) -> int:
    try:
        H = _load(args.input)
    except (DhgParseError, HypergraphError) as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return 1
    spec = _spec(args)
    d = degree_sequence(H)
    ok = in_space(H, spec, d)
    report = classify_features(H, spec.overlap_self_loops)
    lines = [
        f"vertices {H.n_vertices}",
        f"arcs {H.n_arcs}",
        f"self-loops {len(report.self_loops)}",
        f"degenerate {len(report.degenerate)}",
        f"multi-groups {len(report.multi_groups)}",
        f"in-space {str(ok).lower()}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypershuffle",
        description="Degree-preserving double hyperarc shuffles on directed "
        "hypergraphs: sampling, enumeration and exact chain verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, labeling_default="stub"):
        p.add_argument("--input", required=True, help=".dhg input file")
        p.add_argument("--space", default="sdm",
                       help="allowed features, a subset of 'sdm' (default sdm)")
        p.add_argument("--labeling", choices=("stub", "vertex"),
                       default=labeling_default)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--limit", type=int, default=None,
                       help="state-space / stub-count cap override")

    p_sample = sub.add_parser("sample", help="run shuffle chains")
    common(p_sample)
    p_sample.add_argument("--steps", type=int, default=1000)
    p_sample.add_argument("--samples", type=int, default=1)
    p_sample.add_argument("--seed", type=int, default=None)
    p_sample.add_argument("--report", default=None,
                          help="write a JSON uniformity report here")
    p_sample.set_defaults(func=cmd_sample)

    p_enum = sub.add_parser("enumerate", help="enumerate a space")
    common(p_enum)
    p_enum.add_argument("--verbose", action="store_true",
                        help="list every hypergraph, not just the count")
    p_enum.set_defaults(func=cmd_enumerate)

    p_chain = sub.add_parser("chain-verify", help="exact chain checks")
    common(p_chain)
    p_chain.add_argument("--steps", type=int, default=None,
                         help="length of the exported TV curve")
    p_chain.add_argument("--export-chain", default=None,
                         help="write the chain edge list here")
    p_chain.add_argument("--export-tv", default=None,
                         help="write the TV-to-uniform curve as CSV here")
    p_chain.set_defaults(func=cmd_chain_verify)

    p_rep = sub.add_parser("reproduce", help="run a named verification target")
    p_rep.add_argument("target", choices=sorted(TARGETS))
    p_rep.add_argument("--out", default=None)
    p_rep.set_defaults(func=cmd_reproduce)

    p_check = sub.add_parser("check", help="validate a file against a space")
    common(p_check)
    p_check.set_defaults(func=cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = _default_seed()
    try:
        return args.func(args)
    except (ChainConfigError, EnumerationLimitError, HypergraphError,
            DhgParseError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
