"""
Command-line front end.

    python -m app.cli rank --construct sp --m 3
    python -m app.cli replay --transcript table1
    python -m app.cli theorem4 --family Pminus --m 4 --factor g-3

Graphs come from --construct NAME [--m M] or --g6 FILE; graph arguments of
product, predict-rank and theorem4 also accept "replay:<transcript>" for the
final graph of a bundled replay. Exit status: 0 success, 1 domain error,
2 usage error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from app.config import apply_thread_cap, configure_logging, search_budget
from app.errors import InvalidSwitchingSetError, SrgSwitchError
from app.schemas import SearchConfig, SearchReport
from app.services.graphs import (
    Graph,
    check_srg,
    graph6_decode,
    graph6_encode,
    ones_in_colspace,
    two_rank,
)
from app.services.hadamard import (
    graph_of,
    hadamard_of,
    is_graphical,
    is_hadamard,
    is_normalized,
    is_regular,
    parse_sign_matrix,
)
from app.services.product import (
    construct,
    hadamard_factor,
    named_graph,
    ones_in_colspace_product,
    predicted_2rank,
    seidel_product,
)
from app.services.search import bundled_transcript, replay, search_increase
from app.services.switching import (
    classify_gm,
    gm_switch,
    seidel_switch,
    set_labels,
    vertex_set,
)

logger = logging.getLogger(__name__)

REPLAY_PREFIX = "replay:"


# ---------------------------------------------------------------------------
# Input / output helpers
# ---------------------------------------------------------------------------


def read_graph6(path: str) -> Graph:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise SrgSwitchError(f"cannot read {path}: {exc.strerror}") from exc
    lines = [line for line in data.splitlines() if line.strip()]
    if not lines:
        raise SrgSwitchError(f"{path} holds no graph6 line")
    return graph6_decode(lines[0])


def write_graph6(g: Graph, path: str) -> None:
    Path(path).write_bytes(graph6_encode(g) + b"\n")
    logger.info(f"cli: wrote {g.n}-vertex graph to {path}")


def source_graph(args: argparse.Namespace) -> Graph:
    if args.g6:
        return read_graph6(args.g6)
    return named_graph(args.construct, args.m)


def resolve_graph(token: str) -> Graph:
    """A named graph, a graph6 file, or replay:<transcript> for a replay's final graph."""
    if token.startswith(REPLAY_PREFIX):
        return replay(bundled_transcript(token[len(REPLAY_PREFIX):])).final_graph
    if Path(token).is_file():
        return read_graph6(token)
    return named_graph(token)


def params_payload(g: Graph) -> Optional[dict]:
    params = check_srg(g)
    return None if params is None else params.model_dump(by_alias=True)


def summary_payload(g: Graph) -> dict:
    return {
        "n": g.n,
        "rank": two_rank(g),
        "params": params_payload(g),
        "ones_in_colspace": ones_in_colspace(g),
        "graph6": graph6_encode(g).decode("ascii"),
    }


def summary_text(g: Graph) -> str:
    params = check_srg(g)
    return (
        f"n={g.n} rank={two_rank(g)} "
        f"srg={params if params is not None else 'no'} "
        f"ones_in_colspace={'yes' if ones_in_colspace(g) else 'no'}"
    )


def emit(args: argparse.Namespace, payload: Any, text: str) -> None:
    print(json.dumps(payload, indent=2) if args.json else text)


def finish_graph(args: argparse.Namespace, g: Graph) -> None:
    if getattr(args, "out", None):
        write_graph6(g, args.out)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_construct(args: argparse.Namespace) -> int:
    g = source_graph(args)
    finish_graph(args, g)
    emit(args, summary_payload(g), f"{summary_text(g)}\n{graph6_encode(g).decode('ascii')}")
    return 0


def cmd_rank(args: argparse.Namespace) -> int:
    g = source_graph(args)
    rank = two_rank(g)
    emit(args, {"rank": rank, "ones_in_colspace": ones_in_colspace(g)}, str(rank))
    return 0


def cmd_srg_check(args: argparse.Namespace) -> int:
    g = source_graph(args)
    params = check_srg(g)
    emit(args, {"params": params_payload(g)}, str(params) if params is not None else "not strongly regular")
    return 0


def cmd_seidel_switch(args: argparse.Namespace) -> int:
    g = source_graph(args)
    switched = seidel_switch(g, vertex_set(g, args.set, by_index=args.indices))
    finish_graph(args, switched)
    before, after = two_rank(g), two_rank(switched)
    emit(
        args,
        {"rank_before": before, **summary_payload(switched)},
        f"rank {before} -> {after}\n{summary_text(switched)}",
    )
    return 0


def cmd_gm_switch(args: argparse.Namespace) -> int:
    g = source_graph(args)
    switched = gm_switch(g, vertex_set(g, args.set, by_index=args.indices))
    finish_graph(args, switched)
    before, after = two_rank(g), two_rank(switched)
    emit(
        args,
        {"rank_before": before, "delta": after - before, **summary_payload(switched)},
        f"rank {before} -> {after} ({after - before:+d})\n{summary_text(switched)}",
    )
    return 0


def cmd_gm_validate(args: argparse.Namespace) -> int:
    g = source_graph(args)
    w = vertex_set(g, args.set, by_index=args.indices)
    cls = classify_gm(g, w)
    if cls is None:
        raise InvalidSwitchingSetError(f"{set_labels(g, w)} is not a GM switching set")
    payload = {
        "set": set_labels(g, w),
        "induced_degree": cls.induced_degree,
        "full": [g.label_of(v) for v in cls.full],
        "half": [g.label_of(v) for v in cls.half],
        "zero": [g.label_of(v) for v in cls.zero],
    }
    emit(
        args,
        payload,
        f"valid GM set: induced degree {cls.induced_degree}, "
        f"{len(cls.full)} full, {len(cls.half)} half, {len(cls.zero)} zero",
    )
    return 0


def cmd_product(args: argparse.Namespace) -> int:
    g = seidel_product(resolve_graph(args.left), resolve_graph(args.right))
    finish_graph(args, g)
    emit(args, summary_payload(g), summary_text(g))
    return 0


def cmd_predict_rank(args: argparse.Namespace) -> int:
    left, right = resolve_graph(args.left), resolve_graph(args.right)
    predicted = predicted_2rank(left, right)
    payload = {"predicted_rank": predicted, "ones_in_colspace": ones_in_colspace_product(left, right)}
    text = str(predicted)
    if args.verify:
        direct = two_rank(seidel_product(left, right))
        payload["direct_rank"] = direct
        text = f"{predicted} (direct {direct})"
    emit(args, payload, text)
    return 0


def report_text(report: SearchReport) -> str:
    lines = [f"start {report.start} {report.params} rank {report.start_rank}"]
    for i, step in enumerate(report.path, start=1):
        lines.append(f"step {i}: rank {step.rank} ({step.delta:+d}) set {' '.join(step.set)}")
    lines.append(
        f"final rank {report.final_rank} ({report.terminated_by}), "
        f"ones_in_colspace={'yes' if report.ones_in_colspace_final else 'no'}"
    )
    return "\n".join(lines)


def cmd_search(args: argparse.Namespace) -> int:
    g = source_graph(args)
    cfg = SearchConfig(
        set_size=args.set_size,
        budget_without_increase=args.budget if args.budget is not None else search_budget(),
        rng_seed=args.seed,
        max_rank=args.max_rank,
        enumeration=args.enumeration,
    )
    report = search_increase(g, cfg, start=args.g6 or args.construct)
    finish_graph(args, report.final_graph)
    emit(args, report.model_dump(by_alias=True), report_text(report))
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    report = replay(bundled_transcript(args.transcript))
    finish_graph(args, report.final_graph)
    emit(args, report.model_dump(by_alias=True), report_text(report))
    return 0


def cmd_hadamard_check(args: argparse.Namespace) -> int:
    if args.matrix:
        try:
            h = parse_sign_matrix(Path(args.matrix).read_text(encoding="utf-8"))
        except OSError as exc:
            raise SrgSwitchError(f"cannot read {args.matrix}: {exc.strerror}") from exc
    else:
        h, _ = hadamard_of(source_graph(args))
    hadamard = is_hadamard(h)
    graphical = is_graphical(h)
    payload = {
        "n": h.n,
        "hadamard": hadamard,
        "graphical": graphical,
        "regular": is_regular(h),
        "normalized": is_normalized(h),
        "params": params_payload(graph_of(h)) if graphical else None,
    }
    text = " ".join(f"{key}={'yes' if value is True else 'no' if value is False else value}"
                    for key, value in payload.items() if key != "params")
    if payload["params"] is not None:
        text += f" srg={check_srg(graph_of(h))}"
    emit(args, payload, text)
    return 0


def cmd_theorem4(args: argparse.Namespace) -> int:
    factors = []
    for token in args.factor or []:
        g = resolve_graph(token)
        if args.family == "P0" and g.n == 63:
            g = hadamard_factor(g)
        factors.append(g)
    plan, g = construct(args.family, args.m, factors)
    finish_graph(args, g)
    emit(
        args,
        {"plan": plan.model_dump(), "n": g.n, "rank": two_rank(g)},
        f"{plan.family}({plan.m}) head={plan.head} factor_ranks={plan.factor_ranks}\n"
        f"n={g.n} rank={two_rank(g)}",
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--verbose", action="store_true", help="log progress to stderr")

    source = argparse.ArgumentParser(add_help=False)
    group = source.add_mutually_exclusive_group(required=True)
    group.add_argument("--construct", metavar="NAME", help="named graph (sp needs --m)")
    group.add_argument("--g6", metavar="FILE", help="read the graph from a graph6 file")
    source.add_argument("--m", type=int, default=None)

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", metavar="FILE", help="write the resulting graph as graph6")

    vertices = argparse.ArgumentParser(add_help=False)
    vertices.add_argument("--set", nargs="+", required=True, metavar="V", help="vertex labels")
    vertices.add_argument("--indices", action="store_true", help="read --set as 0-based indices")

    parser = argparse.ArgumentParser(prog="srgswitch", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common, source, output])
    p.set_defaults(func=cmd_construct)
    p = sub.add_parser("rank", parents=[common, source])
    p.set_defaults(func=cmd_rank)
    p = sub.add_parser("srg-check", parents=[common, source])
    p.set_defaults(func=cmd_srg_check)
    p = sub.add_parser("seidel-switch", parents=[common, source, vertices, output])
    p.set_defaults(func=cmd_seidel_switch)
    p = sub.add_parser("gm-switch", parents=[common, source, vertices, output])
    p.set_defaults(func=cmd_gm_switch)
    p = sub.add_parser("gm-validate", parents=[common, source, vertices])
    p.set_defaults(func=cmd_gm_validate)

    for name, func in (("product", cmd_product), ("predict-rank", cmd_predict_rank)):
        p = sub.add_parser(name, parents=[common] + ([output] if name == "product" else []))
        p.add_argument("left", help="named graph, graph6 file or replay:<transcript>")
        p.add_argument("right", help="named graph, graph6 file or replay:<transcript>")
        if name == "predict-rank":
            p.add_argument("--verify", action="store_true", help="also build the product and rank it")
        p.set_defaults(func=func)

    p = sub.add_parser("search", parents=[common, source, output])
    p.add_argument("--max-rank", type=int, default=None)
    p.add_argument("--budget", type=int, default=None, help="detours without an increase before stopping")
    p.add_argument("--set-size", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--enumeration", choices=["exhaustive", "random"], default="exhaustive")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("replay", parents=[common, output])
    p.add_argument("--transcript", required=True, help="transcript file or bundled name (e.g. table1)")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("hadamard-check", parents=[common])
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--matrix", metavar="FILE", help="sign matrix, one row of +/- per line")
    group.add_argument("--construct", metavar="NAME")
    group.add_argument("--g6", metavar="FILE")
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(func=cmd_hadamard_check)

    p = sub.add_parser("theorem4", parents=[common, output])
    p.add_argument("--family", choices=["P0", "Pplus", "Pminus"], required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--factor", action="append", metavar="GRAPH",
                   help="order-64 factor (named graph, graph6 file or replay:<transcript>); repeat per factor")
    p.set_defaults(func=cmd_theorem4)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    configure_logging("INFO" if args.verbose else "WARNING")
    apply_thread_cap()
    try:
        return args.func(args)
    except SrgSwitchError as e:
        logger.debug(f"cli: {args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        # pydantic rejects out-of-range options (odd --set-size, --budget 0)
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
