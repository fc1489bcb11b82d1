"""Command line front end.

Exit codes: 0 when every audited fact is certified, 1 when some remain
provisional, 2 on refutations or errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from ..forcing import (
    CohConfig,
    D2Config,
    EmConfig,
    PipelineConfig,
    rt2_pipeline,
    run_coh,
    run_d2,
    run_em,
    verify_transcript,
)
from ..omega_model import build_model, model_audit
from ..trees import low_basis_path
from .generators import (
    gen_coloring,
    gen_d2_partition,
    gen_stable_coloring,
    gen_table_tree,
)
from .instances import (
    coloring_to_doc,
    dump_instance,
    load_instance,
    partition_to_doc,
)
from .oracles import brute_oracle
from .transcripts import emit_transcript, load_transcript, transcript_hash

log = logging.getLogger("forcingbench")


def _exit_code(report) -> int:
    if report.counts["refuted"]:
        return 2
    if report.counts["provisional"]:
        return 1
    return 0


def _finish(t, extracted, instance, args) -> int:
    if args.out:
        path, digest = emit_transcript(t, args.out)
        print(f"transcript {path} sha256 {digest}")
    else:
        print(f"transcript sha256 {transcript_hash(t)}")
    print(f"extracted: {extracted}")
    report = verify_transcript(t, audit_fuel=args.audit_fuel, instance=instance)
    for grade in ("certified", "provisional", "refuted"):
        print(f"{grade}: {report.counts[grade]}")
    return _exit_code(report)


def _cmd_run_coh(args) -> int:
    inst = load_instance(args.instance)
    if inst.kind != "RFamily":
        print(f"run-coh needs an RFamily instance, got {inst.kind}",
              file=sys.stderr)
        return 2
    cfg = CohConfig(window=args.window, density_min=args.density_min,
                    schedule=args.schedule)
    t, c = run_coh(inst.payload, args.stages, config=cfg)
    return _finish(t, {"C": c}, inst.payload, args)


def _cmd_run_em(args) -> int:
    inst = load_instance(args.instance)
    if inst.kind != "StableColoring":
        print(f"run-em needs a StableColoring instance, got {inst.kind}",
              file=sys.stderr)
        return 2
    t, b = run_em(inst.payload, args.stages, config=EmConfig())
    return _finish(t, {"B": b}, inst.payload, args)


def _cmd_run_d2(args) -> int:
    inst = load_instance(args.instance)
    if inst.kind != "Delta2Partition":
        print(f"run-d2 needs a Delta2Partition instance, got {inst.kind}",
              file=sys.stderr)
        return 2
    cfg = D2Config(partition_cap=args.partition_cap)
    t, (color, b) = run_d2(inst.payload, args.stages, config=cfg)
    return _finish(t, {"color": color, "B": b}, inst.payload, args)


def _cmd_run_rt2(args) -> int:
    inst = load_instance(args.instance)
    if inst.kind != "Coloring":
        print(f"run-rt2 needs a Coloring instance, got {inst.kind}",
              file=sys.stderr)
        return 2
    h, t = rt2_pipeline(inst.payload, args.stages,
                        config=PipelineConfig(d2_stages=args.d2_stages))
    return _finish(t, {"H": h}, inst.payload, args)


def _cmd_low_basis(args) -> int:
    inst = load_instance(args.instance)
    if inst.kind != "Tree":
        print(f"low-basis needs a Tree instance, got {inst.kind}",
              file=sys.stderr)
        return 2
    path, decisions = low_basis_path(inst.payload, args.e_bound, args.depth)
    print("path: " + "".join(str(b) for b in path))
    for d in decisions.decisions:
        flag = " (provisional)" if d.provisional else ""
        print(f"  e={d.e} {d.verdict} at depth {d.depth_committed}{flag}")
    return 0


def _cmd_build_model(args) -> int:
    inst = load_instance(args.instance)
    if inst.kind != "RFamily":
        print(f"build-model needs an RFamily instance, got {inst.kind}",
              file=sys.stderr)
        return 2
    m = build_model(inst.payload[0], args.depth, low=args.low)
    problems = model_audit(m)
    print(f"model depth {m.depth}, node bits {len(m.node)}")
    if problems:
        for p in problems:
            print(f"audit: {p}")
        return 2
    print("audit clean")
    return 0


def _cmd_verify(args) -> int:
    t = load_transcript(args.transcript, expect_hash=args.expect_hash)
    instance = None
    if args.instance:
        instance = load_instance(args.instance).payload
    report = verify_transcript(t, audit_fuel=args.audit_fuel,
                               instance=instance)
    for f in report.findings:
        if f["grade"] != "certified" or args.verbose:
            where = "" if f["stage"] is None else f" stage {f['stage']}"
            print(f"{f['grade']}{where}: {f['note']}")
    for grade in ("certified", "provisional", "refuted"):
        print(f"{grade}: {report.counts[grade]}")
    return _exit_code(report)


def _cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    members = None if args.members is None else tuple(args.members)
    rep = brute_oracle(args.kind, inst.payload, bound=args.bound,
                       color=args.color, members=members)
    print(json.dumps({
        "kind": rep.kind, "method": rep.method, "size": rep.size,
        "optimum": rep.optimum,
        "witness": None if rep.witness is None else list(rep.witness),
        "detail": {str(k): v for k, v in rep.detail.items()},
    }, default=list, indent=2))
    return 0


def _cmd_gen(args) -> int:
    if args.what == "stable-coloring":
        doc = coloring_to_doc(gen_stable_coloring(args.seed))
    elif args.what == "coloring":
        doc = coloring_to_doc(gen_coloring(args.seed), kind="Coloring")
    elif args.what == "d2-partition":
        doc = partition_to_doc(gen_d2_partition(args.seed))
    else:
        tree = gen_table_tree(args.seed, depth=args.depth)
        doc = {"kind": "Tree",
               "levels": [[list(n) for n in sorted(lv)]
                          for lv in tree.levels]}
    doc["seed"] = args.seed
    text = dump_instance(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _add_run_common(p):
    p.add_argument("instance")
    p.add_argument("--stages", type=int, default=60)
    p.add_argument("--audit-fuel", type=int, default=2)
    p.add_argument("--out", default=None, help="transcript destination")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="forcingbench",
        description="stagewise constructions over finite presentations")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-coh", help="cohesive set construction")
    _add_run_common(p)
    p.add_argument("--window", type=int, default=512)
    p.add_argument("--density-min", type=int, default=8)
    p.add_argument("--schedule", choices=("least", "committed-columns"),
                   default="least")
    p.set_defaults(fn=_cmd_run_coh)

    p = sub.add_parser("run-em", help="free set construction for a stable coloring")
    _add_run_common(p)
    p.set_defaults(fn=_cmd_run_em)

    p = sub.add_parser("run-d2", help="infinite subset of a limit partition")
    _add_run_common(p)
    p.add_argument("--partition-cap", type=int, default=3 ** 9)
    p.set_defaults(fn=_cmd_run_d2)

    p = sub.add_parser("run-rt2", help="monochromatic set for a pair coloring")
    _add_run_common(p)
    p.add_argument("--d2-stages", type=int, default=40)
    p.set_defaults(fn=_cmd_run_rt2)

    p = sub.add_parser("low-basis", help="divergence-forcing path through a tree")
    p.add_argument("instance")
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--e-bound", type=int, default=4)
    p.set_defaults(fn=_cmd_low_basis)

    p = sub.add_parser("build-model", help="coded model over a base set")
    p.add_argument("instance")
    p.add_argument("--depth", type=int, default=200)
    p.add_argument("--low", action="store_true")
    p.set_defaults(fn=_cmd_build_model)

    p = sub.add_parser("verify", help="re-audit a stored transcript")
    p.add_argument("transcript")
    p.add_argument("--instance", default=None)
    p.add_argument("--audit-fuel", type=int, default=2)
    p.add_argument("--expect-hash", default=None)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("oracle", help="brute-force reference answers")
    p.add_argument("kind", choices=("homogeneous", "fallow", "d2_subset",
                                    "cohesive_check"))
    p.add_argument("instance")
    p.add_argument("--bound", type=int, default=None)
    p.add_argument("--color", type=int, default=0)
    p.add_argument("--members", type=int, nargs="*", default=None)
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("gen", help="emit a seeded instance file")
    p.add_argument("what", choices=("stable-coloring", "coloring",
                                    "d2-partition", "table-tree"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_gen)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # surface a one-line diagnosis, not a traceback
        if args.verbose:
            raise
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
