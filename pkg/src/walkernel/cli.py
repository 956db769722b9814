"""Command-line front end: dataset generation, Gram-matrix computation,
method benchmarking with scaling-slope analysis, and verification suites.

Exit codes: 0 success, 1 verification/benchmark check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bn
from . import graph as gr
from . import kernels as kn
from . import verify as vf

MANIFEST_FORMAT = "walkernel-manifest"


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------------------
# generate


def _generate_from_entries(entries, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for entry in entries:
        if entry["generator"] == "set1":
            g = gr.random_graph_set1(entry["k"], seed=entry["seed"])
        else:
            g = gr.random_graph_set2(entry["n"], entry["fill"], seed=entry["seed"])
        gr.save_graph(g, out_dir / entry["file"])


def cmd_generate(args) -> int:
    out_dir = Path(args.out)
    if args.from_manifest:
        doc = json.loads(Path(args.from_manifest).read_text())
        if doc.get("format") != MANIFEST_FORMAT:
            print("error: not a walkernel manifest", file=sys.stderr)
            return 2
        _generate_from_entries(doc["entries"], out_dir)
        print(f"regenerated {len(doc['entries'])} graphs into {out_dir}")
        return 0
    entries = []
    if args.set == "set1":
        for k in range(args.k_min, args.k_max + 1):
            for i in range(args.count):
                seed = args.seed * 100000 + k * 1000 + i
                entries.append({"generator": "set1", "k": k, "seed": seed,
                                "file": f"set1_k{k}_{i:02d}.json"})
    else:
        fills = _parse_float_list(args.fills)
        for fill in fills:
            for i in range(args.count):
                seed = args.seed * 100000 + int(fill) * 1000 + i
                entries.append({"generator": "set2", "n": args.n, "fill": fill,
                                "seed": seed,
                                "file": f"set2_n{args.n}_f{int(fill):03d}_{i:02d}.json"})
    _generate_from_entries(entries, out_dir)
    manifest = {"format": MANIFEST_FORMAT, "version": 1, "seed": args.seed,
                "entries": entries}
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    print(f"wrote {len(entries)} graphs + manifest into {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# gram


def _kernel_callable(args):
    cfg = kn.KernelConfig(lam=args.lam, method=args.method, tol=args.tol,
                          measure=("geometric" if args.measure == "geometric"
                                   else "exponential"))
    name = args.kernel
    if name == "random_walk":
        return lambda a, b: kn.random_walk_kernel(a, b, cfg)
    if name == "geometric":
        return lambda a, b: kn.geometric_kernel(a, b, args.lam)
    if name == "cartesian":
        return lambda a, b: kn.cartesian_walk_kernel(
            a, b, cfg, weight=args.weight, power_mode=args.power_mode)
    if name == "composite_random_walk":
        return lambda a, b: kn.composite_kernel(
            a, b, lambda x, y: kn.random_walk_kernel(x, y, cfg).value)
    raise ValueError(f"unknown kernel {name!r}")


def cmd_gram(args) -> int:
    paths = [Path(p) for p in args.inputs]
    graphs = [gr.load_graph(p) for p in paths]
    names = [p.name for p in paths]
    kernel = _kernel_callable(args)
    gram = kn.gram_matrix(kernel, graphs, names=names, parallel=args.parallel)
    min_eig, verdict = kn.psd_check(gram)
    meta = {
        "kernel": args.kernel, "method": args.method, "lambda": args.lam,
        "tol": args.tol, "graphs": names,
        "min_eigenvalue": min_eig, "psd": verdict,
    }
    lines = ["# " + json.dumps(meta, sort_keys=True)]
    for row in gram.values:
        lines.append(" ".join(repr(float(v)) for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {len(graphs)}x{len(graphs)} Gram matrix to {args.out}")
    else:
        print(text, end="")
    print(f"PSD verdict: {'pass' if verdict else 'FAIL'} "
          f"(min eigenvalue {min_eig:.6e})")
    return 0


# ---------------------------------------------------------------------------
# bench


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    plan = bn.BenchmarkPlan(
        methods=methods,
        set1_ks=_parse_int_list(args.set1_ks) if args.set1_ks else [],
        set2_n=args.set2_n,
        set2_fills=_parse_float_list(args.set2_fills) if args.set2_fills else [],
        graphs_per_cell=args.graphs,
        reps=args.reps,
        seed=args.seed,
        lam=args.lam,
        tol=args.tol,
        timeout_secs=args.timeout_secs,
    )

    def progress(method, n, fill, cell_records):
        ok = [r for r in cell_records if r.status == "ok"]
        where = f"n={n}" + (f" fill={fill}" if fill is not None else "")
        if ok:
            med = float(np.median([r.seconds for r in ok]))
            print(f"  {method:>14} {where}: {med:.4f}s")
        else:
            print(f"  {method:>14} {where}: excluded (timeout)")

    print(f"benchmark plan: methods={methods} set1_ks={plan.set1_ks} "
          f"set2_fills={plan.set2_fills} reps={plan.reps}")
    records = bn.run_plan(plan, progress=progress)
    if args.out:
        bn.write_csv(records, args.out)
        print(f"wrote {len(records)} timing rows to {args.out}")
    slopes = bn.slope_report(records, methods)
    report_lines = ["log-log slope fits (SET-1 sizes):"]
    for method, slope in slopes.items():
        report_lines.append(f"  {method}: {slope:.3f}")
    spread = bn.checksum_agreement(records)
    report_lines.append(f"worst cross-method checksum spread: {spread:.3e}")
    report = "\n".join(report_lines)
    print(report)
    if args.out:
        Path(args.out).with_suffix(".report.txt").write_text(report + "\n")
    if spread > 1e-6:
        print("error: cross-method checksums diverge beyond 1e-6", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    names = args.suites or None
    ok, lines = vf.run_suites(names)
    for line in lines:
        print(line)
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walkernel",
        description="graph-kernel computation, dataset generation, and benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--lambda", dest="lam", type=float, default=0.001,
                       help="decay parameter (default 0.001)")
        p.add_argument("--tol", type=float, default=1e-6,
                       help="solver tolerance (default 1e-6)")
        p.add_argument("--method", default="fixed_point", choices=kn.METHODS,
                       help="solver backend")
        p.add_argument("--measure", default="geometric",
                       choices=["geometric", "exponential"])
        p.add_argument("--power-mode", dest="power_mode", default="even",
                       choices=["even", "all"])
        p.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("generate", help="generate synthetic graph datasets")
    g.add_argument("set", nargs="?", choices=["set1", "set2"], default="set1")
    g.add_argument("--k-min", type=int, default=1)
    g.add_argument("--k-max", type=int, default=4)
    g.add_argument("--n", type=int, default=32)
    g.add_argument("--fills", default="10,20,30,40,50,60,70,80,90,100")
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--from-manifest", default=None,
                   help="regenerate byte-identical files from a manifest")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("gram", help="compute a Gram matrix over graph files")
    m.add_argument("inputs", nargs="+", help="graph files")
    m.add_argument("--kernel", default="random_walk",
                   choices=["random_walk", "geometric", "cartesian",
                            "composite_random_walk"])
    m.add_argument("--weight", default="laplacian",
                   choices=["adjacency", "laplacian"])
    m.add_argument("--parallel", action="store_true",
                   help="evaluate pairs concurrently (WALKERNEL_THREADS caps)")
    m.add_argument("--out", default=None)
    common(m)
    m.set_defaults(func=cmd_gram)

    b = sub.add_parser("bench", help="time kernel computation per method/size")
    b.add_argument("--methods", default="direct,sylvester,cg,fixed_point")
    b.add_argument("--set1-ks", dest="set1_ks", default="3,4,5",
                   help="comma-separated SET-1 size exponents")
    b.add_argument("--set2-n", dest="set2_n", type=int, default=32)
    b.add_argument("--set2-fills", dest="set2_fills", default="",
                   help="comma-separated SET-2 fill percentages")
    b.add_argument("--graphs", type=int, default=10,
                   help="graphs per cell (default 10)")
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--lambda", dest="lam", type=float, default=0.001)
    b.add_argument("--tol", type=float, default=1e-6)
    b.add_argument("--timeout-secs", dest="timeout_secs", type=float, default=None)
    b.add_argument("--out", default=None, help="timing CSV path")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="run named verification suites")
    v.add_argument("suites", nargs="*",
                   help=f"suites to run (default: all of {sorted(vf.SUITES)})")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
