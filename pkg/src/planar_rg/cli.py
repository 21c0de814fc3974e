"""Command-line front end: ``planar-rg {flow,sweep,trees,extract,borel,diagnose}``.

Exit codes
----------
0  success (``flow``: certified solution; ``sweep``: at least one cell succeeded)
1  run finished but was not certified, or a check failed
2  domain violation
3  contraction failure
4  expansion cap or enumeration cap exceeded
5  Borel continuation obstruction
6  invalid configuration or input
"""

from __future__ import annotations

import argparse
import itertools
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from .borel import (ContinuationObstruction, borel_sum, borel_transform,
                    check_nevanlinna_sokal, read_series, write_series)
from .config import ConfigError, RunConfig, load_config
from .domains import ComplexDomain, DomainError
from .flow_solver import (ContractionFailure, cutoff_scaling, diagnostics_contraction,
                          solve_full)
from .gn_trees import (EnumerationTooLarge, TreeValuation, count_trees, loglinear_fit,
                       parse_tree, tree_counts, verify_n_factorial_bound)
from .remainder_extraction import (ExpansionCapExceeded, ExtractionContext, TreeSum,
                                   certify_remainder_bound, default_extraction_model,
                                   run_extraction)

__all__ = ["main", "build_parser", "EXIT_CODES"]

EXIT_CODES = {"ok": 0, "uncertified": 1, "domain": 2, "contraction": 3, "cap": 4,
              "obstruction": 5, "input": 6}


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _emit(args, name: str, text: str) -> None:
    """Write ``text`` to ``--out/name`` when ``--out`` is set, else to stdout."""
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(lines: Sequence[tuple[str, object]]) -> str:
    out = []
    for key, val in lines:
        if isinstance(val, bool):
            val = "true" if val else "false"
        elif isinstance(val, float):
            val = fmt(val)
        out.append(f"{key}: {val}")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------ flow

def couplings_csv(res) -> str:
    seq = res.seq
    lines = ["k,lambda_re,lambda_im,alpha_re,alpha_im,mu_re,mu_im"]
    for k in range(seq.N + 1):
        lam, al, mu = complex(seq.lam[k]), complex(seq.alpha[k]), complex(seq.mu[k])
        lines.append(",".join([str(k), fmt(lam.real), fmt(lam.imag), fmt(al.real),
                               fmt(al.imag), fmt(mu.real), fmt(mu.imag)]))
    return "\n".join(lines) + "\n"


def cmd_flow(cfg: RunConfig, args) -> int:
    cfg = cfg.override("solver", "N", args.N)
    res = solve_full(cfg.model(), args.lam, args.alpha, args.mu, cfg.solver_options())
    _emit(args, "couplings.csv", couplings_csv(res))
    rep = _report([("certified", res.certified), ("residual", res.residual),
                   ("iterations_outer", res.iterations_outer),
                   ("iterations_inner", res.iterations_inner),
                   ("lambda0_re", res.lam0.real), ("lambda0_im", res.lam0.imag)])
    if args.out:
        _emit(args, "report.txt", rep)
    else:
        sys.stderr.write(rep)
    return 0 if res.certified else 1


# ------------------------------------------------------------------ sweep

def _grid_axis(spec: str) -> list[float]:
    """``value`` or ``start:stop:count`` (inclusive, evenly spaced)."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"bad grid axis {spec!r}")
    a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1:
        raise ValueError("grid counts must be positive")
    return [float(x) for x in np.linspace(a, b, n)]


def _sweep_cell(payload):
    values, lam_re, lam_im, alpha, mu, k = payload
    cfg = RunConfig(values)
    try:
        res = solve_full(cfg.model(), complex(lam_re, lam_im), alpha, mu, cfg.solver_options())
    except (DomainError, ContractionFailure, ArithmeticError) as exc:
        return (lam_re, lam_im, alpha, mu, k, None, type(exc).__name__)
    kk = min(k, res.seq.N)
    lk = complex(res.seq.lam[kk])
    return (lam_re, lam_im, alpha, mu, kk,
            (lk, complex(res.seq.alpha[kk]), complex(res.seq.mu[kk]), res.residual,
             res.iterations_outer), None)


def sweep_rows(cfg: RunConfig, re_axis, im_axis, alpha_axis, mu_axis, k: int,
               jobs: int = 1) -> list:
    cells = [(cfg.values, r, i, a, u, k)
             for r, i, a, u in itertools.product(re_axis, im_axis, alpha_axis, mu_axis)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_cell, cells))
    return [_sweep_cell(c) for c in cells]


def sweep_csv(rows) -> str:
    head = ("lambda_re,lambda_im,alpha,mu,k,lambdak_re,lambdak_im,alphak,muk,"
            "residual,iterations,error")
    lines = [head]
    for lam_re, lam_im, alpha, mu, k, out, err in rows:
        pre = [fmt(lam_re), fmt(lam_im), fmt(alpha), fmt(mu), str(k)]
        if out is None:
            lines.append(",".join(pre + ["nan"] * 6 + [err]))
        else:
            lk, ak, uk, resid, it = out
            lines.append(",".join(pre + [fmt(lk.real), fmt(lk.imag), fmt(ak.real), fmt(uk.real),
                                         fmt(resid), str(it), ""]))
    return "\n".join(lines) + "\n"


def cmd_sweep(cfg: RunConfig, args) -> int:
    cfg = cfg.override("solver", "N", args.N)
    rows = sweep_rows(cfg, _grid_axis(args.lambda_re), _grid_axis(args.lambda_im),
                      _grid_axis(args.alpha), _grid_axis(args.mu),
                      args.k if args.k is not None else cfg.get("solver", "N"), args.jobs)
    _emit(args, "sweep.csv", sweep_csv(rows))
    return 0 if any(r[5] is not None for r in rows) else 1


# ------------------------------------------------------------------ trees

def cmd_trees(cfg: RunConfig, args) -> int:
    max_scale = args.max_scale if args.max_scale is not None else cfg.get("trees", "max_scale")
    if args.action == "count":
        _emit(args, "trees.txt", f"{count_trees(args.n, args.root_scale, max_scale)}\n")
        return 0
    if args.action == "fit":
        counts = tree_counts(args.n, args.root_scale, max_scale)
        slope, r2 = loglinear_fit(counts)
        lines = ["n,count"] + [f"{i + 1},{c}" for i, c in enumerate(counts)]
        text = "\n".join(lines) + "\n" + _report([("slope", slope), ("r_squared", r2)])
        _emit(args, "trees.txt", text)
        return 0
    # bound: n! estimate on a solved flow
    res = solve_full(cfg.model(), args.lam, 0, 0, cfg.solver_options().with_(N=args.flow_N))
    v = TreeValuation(gamma=cfg.get("beta_model", "gamma"), rho=cfg.get("beta_model", "rho"),
                      renormalized=(args.lam, 0, 0, 0))
    out = verify_n_factorial_bound(args.n, v, res.seq, n_max=2, max_scale=max_scale)
    lines = ["n_frames,m,sum,ratio"]
    for key in sorted(out["ratios"]):
        lines.append(f"{key[0]},{key[1]},{fmt(out['sums'][key])},{fmt(out['ratios'][key])}")
    _emit(args, "trees.txt", "\n".join(lines) + "\n"
          + _report([("C", out["C"]), ("pass", out["pass"])]))
    return 0 if out["pass"] else 1


# ---------------------------------------------------------------- extract

def cmd_extract(cfg: RunConfig, args) -> int:
    N = args.N if args.N is not None else cfg.get("extract", "N")
    tree = parse_tree(args.tree or cfg.get("extract", "tree"))
    ctx = ExtractionContext(default_extraction_model(), N, args.M + 1,
                            cap=cfg.get("extract", "cap"))
    S = TreeSum([(tree, 1)])
    st = run_extraction(S, args.n, args.M, ctx)
    lines = [("rounds", st.step), ("F_trees", len(st.F)), ("R1_trees", len(st.R1)),
             ("R2_trees", len(st.R2)), ("max_n2p4", st.max_n2p4),
             ("routing_violations", len(st.routing_violations))]
    ok = not st.routing_violations
    if args.check_sum:
        total = st.F.value(ctx) + st.R1.value(ctx) + st.R2.value(ctx)
        conserved = total == S.value(ctx)
        lines.append(("conserved", conserved))
        ok = ok and conserved
    if args.lam is not None:
        cert = certify_remainder_bound(st, ctx, args.lam)
        lines += [("R1", cert["R1"]), ("R2", cert["R2"]), ("ratio1", cert["ratio1"]),
                  ("ratio2", cert["ratio2"])]
    _emit(args, "extract.txt", _report(lines))
    return 0 if ok else 1


# ------------------------------------------------------------------ borel

def _read_series_file(path: str):
    with open(path, encoding="utf-8") as fh:
        return read_series(fh.read())


def cmd_borel(cfg: RunConfig, args) -> int:
    s = _read_series_file(args.series)
    tol, nodes = cfg.get("borel", "tol"), cfg.get("borel", "max_nodes")
    if args.action == "transform":
        _emit(args, "borel.txt", write_series(borel_transform(s)))
        return 0
    delta = args.delta if args.delta is not None else cfg.get("domains", "delta_bar")
    domain = ComplexDomain.watson(delta, cfg.get("domains", "theta"))
    zs = [complex(z) for z in args.z]
    if args.action == "sum":
        rows = ["z_re,z_im,value_re,value_im,error,nodes,method"]
        for z in zs:
            r = borel_sum(s, z, tol=tol, max_nodes=nodes, domain=domain)
            rows.append(",".join([fmt(z.real), fmt(z.imag), fmt(r.value.real), fmt(r.value.imag),
                                  fmt(r.error), str(r.nodes), r.method]))
        _emit(args, "borel.csv", "\n".join(rows) + "\n")
        return 0
    fv = {z: borel_sum(s, z, tol=tol, max_nodes=nodes, domain=domain).value for z in zs}
    rep = check_nevanlinna_sokal(s, fv, zs, args.M_max, floor=args.floor)
    _emit(args, "borel.csv", rep.to_csv()
          + _report([("ns_constant", rep.ns_constant), ("ns_pass", rep.ns_pass)]))
    return 0 if rep.ns_pass else 1


# --------------------------------------------------------------- diagnose

def cmd_diagnose(cfg: RunConfig, args) -> int:
    m, opts = cfg.model(), cfg.solver_options()
    if args.N is not None:
        opts = opts.with_(N=args.N)
    if args.action == "contraction":
        d = diagnostics_contraction(m, opts, n_samples=args.samples, seed=args.seed)
        ok = d["ratio_Ttilde"] < 1 and d["ratio_T"] < 1
        _emit(args, "diagnose.txt", _report([("ratio_Ttilde", d["ratio_Ttilde"]),
                                             ("ratio_T", d["ratio_T"]),
                                             ("holder", d["holder"]), ("pass", ok)]))
        return 0 if ok else 1
    d = cutoff_scaling(m, args.lam, args.alpha, args.mu, opts=opts)
    lines = ["N,lambda,alpha,mu"] + [f"{r['N']},{fmt(r['lambda'])},{fmt(r['alpha'])},"
                                     f"{fmt(r['mu'])}" for r in d["rows"]]
    _emit(args, "diagnose.txt", "\n".join(lines) + "\n"
          + _report([("slope", d["slope"]), ("C", d["C"])]))
    return 0


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampling diagnostics")

    p = argparse.ArgumentParser(prog="planar-rg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("flow", parents=[common], help="solve the flow for one point")
    f.add_argument("--lambda", dest="lam", type=complex, required=True)
    f.add_argument("--alpha", type=complex, default=0j)
    f.add_argument("--mu", type=complex, default=0j)
    f.add_argument("--N", type=int)
    f.set_defaults(func=cmd_flow)

    s = sub.add_parser("sweep", parents=[common], help="solve over a rectangular grid")
    s.add_argument("--lambda-re", default="0.02", help="value or start:stop:count")
    s.add_argument("--lambda-im", default="0")
    s.add_argument("--alpha", default="0")
    s.add_argument("--mu", default="0")
    s.add_argument("--k", type=int, help="scale reported per cell (default N)")
    s.add_argument("--N", type=int)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("trees", parents=[common], help="tree enumeration and bounds")
    t.add_argument("action", choices=["count", "fit", "bound"])
    t.add_argument("--n", type=int, required=True, help="endpoints (max endpoints for fit/bound)")
    t.add_argument("--root-scale", type=int, default=-1)
    t.add_argument("--max-scale", type=int)
    t.add_argument("--lambda", dest="lam", type=float, default=0.02)
    t.add_argument("--flow-N", type=int, default=10)
    t.set_defaults(func=cmd_trees)

    e = sub.add_parser("extract", parents=[common], help="remainder extraction")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--M", type=int, required=True)
    e.add_argument("--N", type=int)
    e.add_argument("--tree", help="input tree as an s-expression")
    e.add_argument("--check-sum", action="store_true")
    e.add_argument("--lambda", dest="lam", type=complex)
    e.set_defaults(func=cmd_extract)

    b = sub.add_parser("borel", parents=[common], help="Borel transform, sum and remainder check")
    b.add_argument("action", choices=["transform", "sum", "ns"])
    b.add_argument("--series", required=True, help="one coefficient per line")
    b.add_argument("--z", type=complex, nargs="+", default=[0.1 + 0j])
    b.add_argument("--delta", type=float, help="radius of the admissible Watson sector (default domains.delta_bar)")
    b.add_argument("--M-max", type=int, default=12)
    b.add_argument("--floor", type=float, default=0.0)
    b.set_defaults(func=cmd_borel)

    d = sub.add_parser("diagnose", parents=[common], help="contraction and cutoff diagnostics")
    d.add_argument("action", choices=["contraction", "cutoff"])
    d.add_argument("--samples", type=int, default=100)
    d.add_argument("--N", type=int)
    d.add_argument("--lambda", dest="lam", type=complex, default=0.02)
    d.add_argument("--alpha", type=complex, default=0j)
    d.add_argument("--mu", type=complex, default=0j)
    d.set_defaults(func=cmd_diagnose)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(cfg, args)
    except DomainError as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return EXIT_CODES["domain"]
    except ContractionFailure as exc:
        sys.stderr.write(f"contraction failure: {exc}\n")
        return EXIT_CODES["contraction"]
    except (ExpansionCapExceeded, EnumerationTooLarge) as exc:
        sys.stderr.write(f"cap exceeded: {exc}\n")
        return EXIT_CODES["cap"]
    except ContinuationObstruction as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_CODES["obstruction"]
    except (ConfigError, ValueError, OSError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_CODES["input"]


if __name__ == "__main__":
    sys.exit(main())
