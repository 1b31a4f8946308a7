"""Command-line experiment runner.

Every artifact carries the seed and a digest of the full configuration
(including the instance contents) so that it can be replayed exactly.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from . import benchmarks
from .errors import ExactSearchBudgetError, InstanceError
from .graph_core import Report, sample_random_edges, view
from .incentives import audit_hiding, monte_carlo
from .instances import (
    FuzzConfig,
    gen_chains,
    gen_random_fuzz,
    gen_semirandom_ic,
    gen_semirandom_ir,
    gen_worst_case_ic,
    gen_worst_case_ir,
)
from .mechanisms import check_outcome, make_mechanism
from .outcome import canonical_json, digest
from .serialization import dumps, instance_to_dict, load_instance

EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_BUDGET = 4

FAMILY_ALIASES = {
    "worst-ir": "worst_case_ir",
    "semi-ir": "semirandom_ir",
    "worst-ic": "worst_case_ic",
    "semi-ic": "semirandom_ic",
    "fuzz": "fuzz",
    "chains": "chains",
}


def _family(name: str) -> str:
    key = name.replace("_", "-")
    for alias, canon in FAMILY_ALIASES.items():
        if key in (alias, canon.replace("_", "-")):
            return canon
    raise argparse.ArgumentTypeError(f"unknown family {name!r}")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _config_digest(args: argparse.Namespace, instance_dict: Optional[dict] = None) -> str:
    cfg = {k: v for k, v in vars(args).items() if k not in ("out", "func", "instance", "workers", "timing")}
    if instance_dict is not None:
        cfg["instance"] = instance_dict
    return digest(cfg)


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_generate(args: argparse.Namespace) -> int:
    fam = args.family
    p = Fraction(args.p)
    if fam == "fuzz":
        cfg = FuzzConfig(tuple(_int_list(args.sizes)), args.max_chains, args.internal_density, args.cross_density, p)
        inst = gen_random_fuzz(cfg, args.seed)
        certs = {"family": "fuzz", "params": {"sizes": list(cfg.hospital_sizes), "seed": args.seed}}
    else:
        if fam == "chains":
            lengths = [_int_list(part) for part in args.lengths.split(";")]
            gen = gen_chains(lengths, p)
        elif args.k is None:
            raise argparse.ArgumentTypeError("--k is required for this family")
        elif fam == "worst_case_ir":
            gen = gen_worst_case_ir(args.k, p)
        elif fam == "semirandom_ir":
            gen = gen_semirandom_ir(args.k, p)
        elif fam == "worst_case_ic":
            gen = gen_worst_case_ic(args.k, not args.no_x, p)
        else:
            gen = gen_semirandom_ic(args.k, not args.no_squares, p)
        inst, certs = gen.instance, gen.certificates_record()
    certs["config_digest"] = _config_digest(args)
    _emit(args, dumps(inst, certs))
    return 0


def _load(args: argparse.Namespace):
    inst, certs = load_instance(args.instance)
    graph = sample_random_edges(inst, args.seed)
    return inst, certs, graph


def cmd_run(args: argparse.Namespace) -> int:
    inst, _, graph = _load(args)
    report = Report.truthful(inst)
    hidden = _int_list(args.hide) if args.hide else []
    if hidden:
        declared = dict(report.declared)
        for v in hidden:
            declared[inst.owners[v]] = declared[inst.owners[v]] - {v}
        report = Report(declared)
    g = view(graph, report)
    mech = make_mechanism(args.mechanism, args.s, args.f, args.n_min, args.limit)
    out = mech(g)
    violations = check_outcome(out, g)
    rec = out.record(inst)
    rec.update(seed=args.seed, config_digest=_config_digest(args, instance_to_dict(inst)),
               hidden=sorted(hidden), violations=violations)
    if args.mechanism == "avg":
        search = out.event("search")
        stitch_ev = out.event("stitch")
        rec["search_steps"] = len(search["steps"]) if search else 0
        rec["stitch_count"] = len(stitch_ev["edges"]) if stitch_ev else 0
    else:
        stitch_ev = out.event("stitch")
        rec["stitch_count"] = len(stitch_ev["edges"]) if stitch_ev else 0
    _emit(args, canonical_json(rec) + "\n")
    if violations:
        for v in violations:
            print(f"invariant violation: {v}", file=sys.stderr)
        return EXIT_INVARIANT
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    inst, certs, graph = _load(args)
    kinds = list(benchmarks.BENCHMARKS) if args.kind == "all" else [args.kind]
    cfg = _config_digest(args, instance_to_dict(inst))
    rows = []
    for kind in kinds:
        needs_s = kind in ("sopt", "avgopt")
        if needs_s and args.s is None:
            raise argparse.ArgumentTypeError(f"--s is required for {kind}")
        t0 = time.perf_counter()
        res = benchmarks.BENCHMARKS[kind](graph, args.s if needs_s else None, args.limit)
        ms = (time.perf_counter() - t0) * 1000
        rows.append([kind, args.s if needs_s else "", res.length, str(res.certified).lower(),
                     f"{ms:.3f}" if args.timing else "NA", args.seed, cfg])
    _emit(args, _csv(["kind", "s", "length", "certified", "runtime_ms", "seed", "config_digest"], rows))
    return 0


def cmd_audit(args: argparse.Namespace) -> int:
    inst, _, graph = _load(args)
    mech = make_mechanism(args.mechanism, args.s, args.f, args.n_min, args.limit)
    hospitals = _int_list(args.hospitals) if args.hospitals else list(inst.hospitals)
    cfg = _config_digest(args, instance_to_dict(inst))
    exhaustive_max = 64 if args.exhaustive else 12
    if args.samples is not None:
        exhaustive_max = 0
    rows = []
    for h in hospitals:
        rep = audit_hiding(graph, h, mech, exhaustive_max=exhaustive_max, samples=args.samples or 256,
                           seed=args.seed, limit=args.limit)
        rows.append([h, rep.truthful_utility, rep.best_total_utility, f"{rep.gap_ratio:.6f}",
                     len(rep.best_total_set), "" if rep.best_total_divert is None else rep.best_total_divert,
                     rep.best_hiding_utility, rep.subsets_checked, str(rep.exhaustive).lower(), args.seed, cfg])
    header = ["hospital", "truthful_utility", "best_utility", "gap_ratio", "witness_hidden_count",
              "witness_divert_node", "best_hiding_only_utility", "subsets_checked", "exhaustive", "seed",
              "config_digest"]
    _emit(args, _csv(header, rows))
    return 0


def cmd_montecarlo(args: argparse.Namespace) -> int:
    inst, certs, _ = _load(args)
    if args.trials < 1:
        raise argparse.ArgumentTypeError("--trials must be positive")
    mech = make_mechanism(args.mechanism, args.s, args.f, args.n_min, args.limit)
    results = monte_carlo(inst, mech, args.trials, args.seed, args.workers)
    cfg = _config_digest(args, instance_to_dict(inst))
    n_ok = sum(r.status == "success" for r in results)
    mean_w = sum(r.welfare for r in results) / len(results)
    summary = {
        "config_digest": cfg,
        "seed0": args.seed,
        "trials": args.trials,
        "success_rate": n_ok / len(results),
        "mean_welfare": mean_w,
        "mean_utilities": [sum(r.utilities[h] for r in results) / len(results) for h in inst.hospitals],
    }
    if args.benchmark:
        cert = (certs or {}).get(args.benchmark)
        if cert is None:
            raise InstanceError(f"instance has no certificate {args.benchmark!r}")
        summary["benchmark"] = {"name": args.benchmark, **cert}
        summary["welfare_ratio"] = mean_w / cert["value"]
    if args.records:
        with open(args.records, "w") as fh:
            for r in results:
                fh.write(canonical_json({"seed": r.seed, "status": r.status, "branch": r.branch,
                                         "welfare": r.welfare, "utilities": list(r.utilities),
                                         "trace_digest": r.trace_digest, "config_digest": cfg}) + "\n")
    _emit(args, canonical_json(summary) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chainmech", description="Simulate altruist-initiated donation chains.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, mechanism: bool = True) -> None:
        p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--seed", type=int, default=0, help="seed of the random-edge realization (default 0)")
        p.add_argument("--limit", type=int, default=None,
                       help="exact-search node budget (default: $CHAINMECH_EXACT_LIMIT or 24)")
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        if mechanism:
            p.add_argument("--mechanism", choices=["s", "avg"], required=True, help="which mechanism to run")
            p.add_argument("--s", type=int, required=True, help="segment-length parameter s")
            p.add_argument("--f", type=int, default=None, help="fixed divisor f instead of floor(ln n) (>= 2)")
            p.add_argument("--n-min", type=int, default=1, help="instances smaller than this get the trivial outcome")

    g = sub.add_parser("generate", help="write an instance file for a family")
    g.add_argument("--family", type=_family, required=True,
                   help="worst-ir, semi-ir, worst-ic, semi-ic, chains or fuzz")
    g.add_argument("--k", type=int, default=None, help="family size parameter")
    g.add_argument("--p", default="0", help="random cross-edge probability as a decimal or fraction string")
    g.add_argument("--no-x", action="store_true", help="worst-ic: omit node x")
    g.add_argument("--no-squares", action="store_true", help="semi-ic: omit the square nodes")
    g.add_argument("--lengths", default="8;8", help="chains: per-hospital chain lengths, e.g. '60,10;60'")
    g.add_argument("--sizes", default="4,4", help="fuzz: hospital sizes")
    g.add_argument("--max-chains", type=int, default=2, help="fuzz: max internal chains per hospital")
    g.add_argument("--internal-density", type=float, default=0.1, help="fuzz: extra internal edge probability")
    g.add_argument("--cross-density", type=float, default=0.05, help="fuzz: base cross edge probability")
    g.add_argument("--seed", type=int, default=0, help="fuzz: generator seed")
    g.add_argument("--out", default=None, help="write output here instead of stdout")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run a mechanism on one realization")
    common(r)
    r.add_argument("--hide", default=None, help="comma-separated node ids withheld by their owners")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="exact benchmark lengths as CSV")
    common(b, mechanism=False)
    b.add_argument("--kind", choices=["opt", "sopt", "avgopt", "pi_ir", "all"], default="all", help="benchmark")
    b.add_argument("--s", type=int, default=None, help="segment-length parameter for sopt/avgopt")
    b.add_argument("--timing", action="store_true", help="fill runtime_ms (otherwise NA, keeping output reproducible)")
    b.set_defaults(func=cmd_bench)

    a = sub.add_parser("audit", help="search hiding and diversion manipulations")
    common(a)
    mode = a.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="enumerate all hidden subsets (up to 64 candidates)")
    mode.add_argument("--samples", type=int, default=None, help="sample this many hidden subsets")
    a.add_argument("--hospitals", default=None, help="comma-separated hospitals to audit (default all)")
    a.set_defaults(func=cmd_audit)

    m = sub.add_parser("montecarlo", help="run a mechanism over many realizations")
    common(m)
    m.add_argument("--trials", type=int, required=True, help="number of realizations (seeds seed..seed+trials-1)")
    m.add_argument("--workers", type=int, default=1, help="worker processes")
    m.add_argument("--benchmark", default=None, help="certificate name in the instance file to compare welfare against")
    m.add_argument("--records", default=None, help="also write one JSON record per trial to this file")
    m.set_defaults(func=cmd_montecarlo)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except (InstanceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExactSearchBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    return 0


if __name__ == "__main__":
    sys.exit(main())
