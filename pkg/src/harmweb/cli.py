"""Command-line front end.

Exit codes: 0 success, 2 numeric failure, 3 oracle mismatch, 4 precondition
refusal, 64 usage error.  Every command is deterministic for a fixed seed.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import diagram as dg
from . import mgt as mgt_mod
from . import orbitgrpd as og
from .errors import HarmwebError, NumericalError, PreconditionError, UsageError

EXIT_OK, EXIT_NUMERIC, EXIT_ORACLE, EXIT_PRECONDITION, EXIT_USAGE = 0, 2, 3, 4, 64


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 2
    seed: int = 0
    samples: int = 50
    trace_tol: float = 1e-12
    merge_tol: float = 1e-4
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.trace_tol <= 0 or self.merge_tol <= 0:
            raise UsageError("tolerances must be positive")
        if self.workers < 1:
            raise UsageError("worker count must be positive")

    def trace_params(self):
        from .webtrace import TraceParams
        return TraceParams(ftol_frac=self.trace_tol, merge_tol_frac=self.merge_tol)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _default_workers() -> int:
    raw = os.environ.get("HARMWEB_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="harmweb", description="Harmonic webs of complex polynomials and related checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, n=True):
        if n:
            sp.add_argument("--n", type=int, default=2, help="degree")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=_default_workers())
        sp.add_argument("--out", default=None, help="output path")
        sp.add_argument("--tol-trace", type=float, default=1e-12, help="corrector tolerance (times R^n)")
        sp.add_argument("--tol-merge", type=float, default=1e-4, help="merge tolerance (fraction of R)")

    sp = sub.add_parser("diagram", help="trace a polynomial and write its chord diagram")
    sp.add_argument("poly", help='e.g. "z^2-1" or "2; -1,0; 0,0"')
    sp.add_argument("--render", action="store_true", help="also write an SVG figure")
    sp.add_argument("--oracle", action="store_true", help="cross-check against the sign-grid oracle")
    common(sp, n=False)

    sp = sub.add_parser("enumerate", help="enumerate generic diagrams of degree n")
    common(sp)

    sp = sub.add_parser("equivariance", help="check dihedral equivariance on random polynomials")
    sp.add_argument("--samples", type=int, default=50)
    common(sp)

    sp = sub.add_parser("mgt", help="table of the finite groups mGT_q")
    sp.add_argument("--q-min", type=int, default=2)
    sp.add_argument("--q-max", type=int, default=20)
    sp.add_argument("--csv", action="store_true", help="machine-readable rows")
    common(sp, n=False)

    sp = sub.add_parser("orbitgrpd", help="orbit groupoid checks for a graph with a group action")
    sp.add_argument("graph", nargs="?", help="edge list file, 'u v' per line")
    sp.add_argument("action", nargs="?", help="generator lines of u:v vertex images")
    sp.add_argument("--random", type=int, default=0, metavar="K", help="check K random free actions instead")
    sp.add_argument("--samples", type=int, default=50, help="walks for the path-lifting report")
    common(sp, n=False)

    sp = sub.add_parser("chambers", help="chamber decomposition of the diagram set")
    common(sp)

    sp = sub.add_parser("pentagon", help="reassociation graph on four letters")
    common(sp, n=False)
    return p


# ---------------------------------------------------------------------------
# commands


def cmd_diagram(args, cfg: RunConfig, out) -> int:
    from .gridweb import sign_grid_oracle
    from .poly import parse_polynomial
    from .render import web_svg
    from .webtrace import extract_web

    P = parse_polynomial(args.poly)
    web = extract_web(P, cfg.trace_params())
    d = dg.web_to_diagram(web)
    code = dg.canonical_form(d)
    stem = Path(cfg.out or "diagram")
    stem.parent.mkdir(parents=True, exist_ok=True)
    jpath = stem.with_suffix(".json")
    jpath.write_text(dg.dumps(d))
    print(f"degree {P.degree}, leaves {d.num_leaves}, generic {dg.is_generic(d)}", file=out)
    print(f"code {code}", file=out)
    print(f"wrote {jpath}", file=out)
    if args.render:
        spath = stem.with_suffix(".svg")
        spath.write_text(web_svg(web))
        print(f"wrote {spath}", file=out)
    if args.oracle:
        other = dg.canonical_form(dg.web_to_diagram(sign_grid_oracle(P)))
        if other != code:
            print(f"oracle mismatch: grid gives {other}", file=out)
            return EXIT_ORACLE
        print("oracle agrees", file=out)
    return EXIT_OK


def cmd_enumerate(args, cfg: RunConfig, out) -> int:
    from .strata import catalan, enumerate_generic, noncrossing_matchings

    n = cfg.n
    if not 1 <= n <= 6:
        raise UsageError("enumerate needs 1 <= n <= 6")
    single = len(noncrossing_matchings(n))
    diagrams = enumerate_generic(n)
    codes = [dg.canonical_form(d) for d in diagrams]
    print(f"n={n}", file=out)
    print(f"single-colour forests: {single} (Catalan {catalan(n)})", file=out)
    print(f"generic diagrams: {len(codes)}", file=out)
    if cfg.out:
        order = sorted(range(len(codes)), key=codes.__getitem__)
        Path(cfg.out).write_text(dg.dumps_list([diagrams[i] for i in order]))
        print(f"wrote {cfg.out}", file=out)
    return EXIT_OK


def _equivariance_job(job):
    coeffs, n, trace_tol, merge_tol = job
    from .dihedral import check_equivariance, s, t
    from .poly import MonicPolynomial
    from .webtrace import TraceParams

    P = MonicPolynomial(tuple(coeffs))
    params = TraceParams(ftol_frac=trace_tol, merge_tol_frac=merge_tol)
    try:
        return [check_equivariance(P, g, params) for g in (s(n), t(n))]
    except NumericalError as exc:
        return str(exc)


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def cmd_equivariance(args, cfg: RunConfig, out) -> int:
    from .dihedral import group_order_report
    from .poly import random_monic

    n = cfg.n
    if n < 1:
        raise UsageError("degree must be positive")
    if cfg.samples < 1:
        raise UsageError("need at least one sample")
    rng = np.random.default_rng(cfg.seed)
    jobs = [(random_monic(rng, n).coeffs, n, cfg.trace_tol, cfg.merge_tol) for _ in range(cfg.samples)]
    results = _map(_equivariance_job, jobs, cfg.workers)
    traced = [r for r in results if not isinstance(r, str)]
    failures = len(results) - len(traced)
    passed = sum(1 for r in traced if all(r))
    rate = 100.0 * passed / len(traced) if traced else 0.0
    print(f"degree {n}: {passed}/{len(traced)} traced samples equivariant under s and t ({rate:.1f}%)", file=out)
    print(f"trace failures: {failures}/{len(results)}", file=out)
    print(str(group_order_report(n)), file=out)
    return EXIT_OK if traced and passed == len(traced) else EXIT_ORACLE


def cmd_mgt(args, cfg: RunConfig, out) -> int:
    if not (2 <= args.q_min <= args.q_max <= mgt_mod.Q_MAX):
        raise UsageError(f"need 2 <= q-min <= q-max <= {mgt_mod.Q_MAX}")
    rows = mgt_mod.table(range(args.q_min, args.q_max + 1))
    out.write(mgt_mod.format_table(rows, machine=args.csv))
    if cfg.out:
        Path(cfg.out).write_text(mgt_mod.format_table(rows, machine=True))
    return EXIT_OK if all(r.ok for r in rows) else EXIT_ORACLE


def _report_action(X, act, samples, seed, out, label="") -> bool:
    rep = og.orbit_groupoid_check(X, act)
    club = og.check_clubsuit(X, act, walks=samples, seed=seed)
    print(f"{label}|G|={act.order} V={X.V} E={X.E} quotient ranks {list(rep.quotient_ranks)} "
          f"orbit-groupoid ranks {list(rep.orbit_ranks)} surjective {all(rep.surjective)} "
          f"-> {'pass' if rep.ok else 'FAIL'}", file=out)
    print(f"{label}{club}", file=out)
    return rep.ok and club.lifting and club.stabilizer_relates


def cmd_orbitgrpd(args, cfg: RunConfig, out) -> int:
    if args.random:
        rng = random.Random(cfg.seed)
        ok_all = True
        for i in range(args.random):
            X, act, name = og.random_free_action(rng)
            ok_all &= _report_action(X, act, args.samples, cfg.seed + i, out, label=f"[{i} {name}] ")
        print(f"{'all pass' if ok_all else 'FAILURES'} ({args.random} instances)", file=out)
        return EXIT_OK if ok_all else EXIT_ORACLE
    if not args.graph or not args.action:
        raise UsageError("need GRAPH and ACTION files, or --random K")
    try:
        X = og.parse_graph(Path(args.graph).read_text())
        act = og.parse_action(Path(args.action).read_text(), X)
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    try:
        ok = _report_action(X, act, args.samples, cfg.seed, out)
    except PreconditionError as exc:
        w = exc.witness
        if isinstance(w, dict):
            print(f"refused: {exc} (element acting on vertices as {w['element']})", file=out)
            print(str(og.check_clubsuit(X, act, walks=args.samples, seed=cfg.seed)), file=out)
        raise
    return EXIT_OK if ok else EXIT_ORACLE


def cmd_chambers(args, cfg: RunConfig, out) -> int:
    from .chambers import chamber_decomposition

    if not 1 <= cfg.n <= 4:
        raise UsageError("chambers needs 1 <= n <= 4")
    dec = chamber_decomposition(cfg.n)
    print(dec.report(), file=out)
    return EXIT_OK


def cmd_pentagon(args, cfg: RunConfig, out) -> int:
    from .strata import reassociation_graph

    rep = reassociation_graph(4)
    print(f"vertices {len(rep.vertices)}, edges {len(rep.edges)}, 5-cycle {rep.is_cycle}, "
          f"realized by diagrams {rep.realized}", file=out)
    for v in rep.vertices:
        print(f"  {v}", file=out)
    ok = bool(rep) and len(rep.vertices) == 5 and len(rep.edges) == 5
    return EXIT_OK if ok else EXIT_ORACLE


COMMANDS = {
    "diagram": cmd_diagram,
    "enumerate": cmd_enumerate,
    "equivariance": cmd_equivariance,
    "mgt": cmd_mgt,
    "orbitgrpd": cmd_orbitgrpd,
    "chambers": cmd_chambers,
    "pentagon": cmd_pentagon,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, n=getattr(args, "n", 2), seed=args.seed,
                        samples=getattr(args, "samples", 50), trace_tol=args.tol_trace,
                        merge_tol=args.tol_merge, workers=args.workers, out=args.out)
        return COMMANDS[args.command](args, cfg, out)
    except HarmwebError as exc:
        print(f"harmweb: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
