"""Command-line front end.

Subcommands: ``certify`` (solve a problem file and emit certificates),
``check-cert`` (verify certificate files independently), ``compat`` (quiver
compatibility only), ``reduce`` (normal forms of the claims against the raw
assumptions, with traces), ``matcheck`` (exact-matrix example suites and
fixture files).

Exit codes: 0 success, 1 invalid certificate or incompatible statement,
2 budget exhausted, 3 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .certify import load_certificate, save_certificate, verify_certificate
from .freealg import AlgebraError
from .kernels import BACKEND
from .matcheck import example1_check, example2_check, fixture_penrose_report
from .rewrite import CompletionLimits, reduce as nf_reduce
from .statements import load_problem, run_problem, translate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BUDGET = 2
EXIT_INPUT = 3

_FIXDIR = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    """Resolve a path or the name of a bundled fixture."""
    p = Path(name)
    if p.exists():
        return p
    for suffix in ("", ".prob", ".cert", ".mat"):
        candidate = _FIXDIR / (name + suffix)
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"no such file or bundled fixture: {name}")


def _apply_limit_overrides(problem, args) -> None:
    lim = problem.options.limits
    problem.options.limits = CompletionLimits(
        args.max_degree or lim.max_degree,
        args.max_iterations or lim.max_iterations,
        lim.max_basis_size,
        args.time_budget or lim.time_budget)
    if args.order:
        problem.options.ranking = [s.strip() for s in args.order.split(",")]
    if args.workers:
        problem.options.workers = args.workers
    if args.no_closure:
        problem.options.closure = False


def _load(args):
    try:
        path = fixture_path(args.problem)
        return path, load_problem(path)
    except (OSError, AlgebraError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT) from None


def cmd_certify(args) -> int:
    path, problem = _load(args)
    _apply_limit_overrides(problem, args)
    try:
        trans, report = run_problem(problem)
    except AlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"problem {path.stem}: {trans.indeterminate_count} indeterminates, "
          f"{len(trans.assumptions)} assumptions, {len(trans.claims)} claims "
          f"[{BACKEND} kernel]")
    if trans.quiver_check is not None:
        _print_quiver_check(trans)
        if not trans.quiver_check.ok:
            return EXIT_INVALID
    for wf in trans.workflow_reports:
        print(f"  workflow {wf.conclusion_name}: witness certified "
              f"({wf.certificate.term_count} terms), conclusion added")
    outdir = Path(args.output) if args.output else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    worst = EXIT_OK
    for res in report.results:
        if res.certified:
            cert = res.certificate
            used = ", ".join(sorted(cert.assumption_names[i]
                                    for i in cert.used_indices))
            print(f"  claim {res.name}: certified | {cert.term_count} terms | "
                  f"integral={cert.integral} | uses: {used}")
            if args.verbose:
                alg = cert.claim.alg
                for s in cert.summands:
                    print(f"      ({alg.render(s.left)}) . "
                          f"{cert.assumption_names[s.index]} . "
                          f"({alg.render(s.right)})")
            if outdir:
                dest = outdir / f"{path.stem}.{res.name}.cert"
                save_certificate(cert, dest)
                print(f"    wrote {dest}")
        else:
            print(f"  claim {res.name}: budget exhausted; irreducible "
                  f"remainder: {res.remainder}")
            worst = EXIT_BUDGET
    s = report.stats
    print(f"  basis {s.basis_size}, obstructions {s.obstructions_processed}, "
          f"{s.elapsed:.2f}s, completion {s.completion_status}")
    return worst


def cmd_check_cert(args) -> int:
    worst = EXIT_OK
    for name in args.certificate:
        try:
            cert = load_certificate(fixture_path(name))
        except (OSError, AlgebraError, KeyError, ValueError) as exc:
            print(f"{name}: error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        result = verify_certificate(cert)
        if result.valid:
            print(f"{name}: valid | {cert.term_count} terms | "
                  f"integral={cert.integral} | claim: {cert.claim}")
        else:
            print(f"{name}: INVALID: {result.reason}")
            worst = EXIT_INVALID
    return worst


def cmd_compat(args) -> int:
    path, problem = _load(args)
    try:
        trans = translate(problem)
    except AlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if trans.quiver is None:
        print(f"{path.stem}: no quiver given and none inferable")
        return EXIT_INVALID
    _print_quiver_check(trans)
    return EXIT_OK if trans.quiver_check.ok else EXIT_INVALID


def _print_quiver_check(trans) -> None:
    check = trans.quiver_check
    q = trans.quiver
    print(f"  quiver: {len(q.vertices)} vertices, {len(q.edges)} edges; "
          f"compatibility {'passed' if check.ok else 'FAILED'}")
    for name, _poly, comp in check.failures:
        print(f"    {name}: {comp.reason}")
    for label, partner in check.adjoint_violations:
        print(f"    adjoint edges not reversed: {label} vs {partner}")


def cmd_reduce(args) -> int:
    path, problem = _load(args)
    _apply_limit_overrides(problem, args)
    try:
        trans = translate(problem)
    except AlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    alg = trans.algebra
    for name, claim in zip(trans.claim_names, trans.claims):
        if args.claim and name != args.claim:
            continue
        traced = nf_reduce(claim, trans.assumptions, trans.order)
        print(f"claim {name}: remainder {alg.render(traced.value)}")
        for left, idx, right in traced.trace_triples():
            aname = trans.assumption_names[idx]
            print(f"    ({alg.render(left)}) . {aname} . ({alg.render(right)})")
    return EXIT_OK


def cmd_matcheck(args) -> int:
    reports = []
    if args.fixture:
        for name in args.fixture:
            try:
                reports.append(fixture_penrose_report(fixture_path(name)))
            except (OSError, AlgebraError, KeyError, ValueError) as exc:
                print(f"{name}: error: {exc}", file=sys.stderr)
                return EXIT_INPUT
    else:
        reports = [example1_check(), example2_check()]
    ok = True
    for rep in reports:
        print(f"{rep.name}: {'pass' if rep.ok else 'FAIL'}")
        for line in rep.lines():
            print(line)
        ok = ok and rep.ok
    return EXIT_OK if ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opcert",
        description="Certified proofs of operator identities via "
                    "noncommutative polynomial ideal membership.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_limits(p):
        p.add_argument("--max-degree", type=int, default=None)
        p.add_argument("--max-iterations", type=int, default=None)
        p.add_argument("--time-budget", type=float, default=None)
        p.add_argument("--order", default=None,
                       help="comma-separated variable ranking")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--no-closure", action="store_true")

    p = sub.add_parser("certify", help="solve a problem file, emit certificates")
    p.add_argument("problem")
    p.add_argument("--output", default=None, help="directory for .cert files")
    p.add_argument("-v", "--verbose", action="store_true",
                   help="print every certificate summand")
    add_limits(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("check-cert", help="verify certificate files")
    p.add_argument("certificate", nargs="+")
    p.set_defaults(func=cmd_check_cert)

    p = sub.add_parser("compat", help="quiver compatibility checks only")
    p.add_argument("problem")
    p.set_defaults(func=cmd_compat)

    p = sub.add_parser("reduce", help="normal forms against the raw assumptions")
    p.add_argument("problem")
    p.add_argument("--claim", default=None, help="restrict to one claim name")
    add_limits(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("matcheck", help="exact-matrix example suites")
    p.add_argument("fixture", nargs="*",
                   help="optional .mat fixture files (default: built-in suites)")
    p.set_defaults(func=cmd_matcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
