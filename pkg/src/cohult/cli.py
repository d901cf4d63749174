"""Command line front end: lemma suites, derived ultrapowers, enumeration, acceptance.

Every command prints a key-sorted JSON report (or writes it to ``--out``)
and exits 0 exactly when the report has no failures.  Exit code 2 means
the command refused to run (bad input or a budget that is too large).
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from math import comb
from pathlib import Path

from cohult import acceptance
from cohult.filters import lemmas
from cohult.filters.cube import all_tuples
from cohult.logic.io import StructureFileError
from cohult.logic.syntax import ParseError
from cohult.ultrapower.scenario import SEED, ScenarioError, load_scenario, verify_isomorphism

WORK_LIMIT = 10 ** 8
EXTRA_SUITES = {
    "coherent_extend": lemmas.coherent_extend_suite,
    "completion": lemmas.completion_suite,
    "functoriality": lemmas.functoriality_suite,
    "fullification": lemmas.fullification_suite,
}
ALL_SUITES = sorted(acceptance.LEMMA_SUITES) + sorted(EXTRA_SUITES)


class BudgetExceeded(Exception):
    pass


def enumeration_work(k: int, lam: int, max_arity: int) -> int:
    """Number of core assignments the system enumerator walks through."""
    top = min(lam, max_arity)
    return 2 ** (k ** top * comb(lam, top))


def suite_work(max_a: int, max_lambda: int, max_arity: int) -> int:
    """Rough count of elementary checks for a lemma-suite run."""
    total = 0
    for k in range(1, max_a + 1):
        for lam in range(1, max_lambda + 1):
            for ar in range(1, max_arity + 1):
                n = len(all_tuples(lam, ar))
                cube = k ** min(lam, ar)
                total += n ** 3 * 4 ** cube + enumeration_work(k, lam, ar) * n * 2 ** cube
    return total


def _check_budget(work: int, force: bool):
    if work > WORK_LIMIT and not force:
        raise BudgetExceeded(
            f"estimated {work:.3g} elementary checks exceeds the limit of {WORK_LIMIT:.0e}; "
            "lower the bounds or pass --force"
        )


def _emit(report: dict, out: str | None) -> int:
    text = acceptance.dumps(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.get("passed") else 1


def cmd_verify_lemmas(args) -> int:
    _check_budget(suite_work(args.max_a, args.max_lambda, args.max_arity), args.force)
    names = args.suite or ALL_SUITES
    core = [n for n in names if n in acceptance.LEMMA_SUITES]
    report = acceptance.lemma_report(args.max_a, args.max_lambda, args.max_arity, core, args.mutant)
    for name in names:
        if name in EXTRA_SUITES:
            runs = [
                EXTRA_SUITES[name](k, lam, ar)
                for k in range(1, args.max_a + 1)
                for lam in range(1, args.max_lambda + 1)
                for ar in range(1, args.max_arity + 1)
            ]
            report["suites"][name] = acceptance._merge(runs)
    report["bounds"] = {"max_a": args.max_a, "max_lambda": args.max_lambda, "max_arity": args.max_arity}
    if args.mutant:
        report["mutant"] = args.mutant
    report["passed"] = all(v["passed"] for v in report["suites"].values())
    return _emit(report, args.out)


def _scenario_path(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    shipped = resources.files("cohult") / "scenarios" / f"{name}.scn"
    if shipped.is_file():
        return Path(str(shipped))
    raise ScenarioError(f"no scenario file or shipped scenario named {name!r}")


def cmd_build_ultrapower(args) -> int:
    scn = load_scenario(_scenario_path(args.scenario))
    budgets = {"seed": args.seed}
    if args.samples is not None:
        budgets["samples"] = args.samples
    if args.depth is not None:
        budgets["depth"] = args.depth
    return _emit(verify_isomorphism(scn, budgets), args.out)


def cmd_enumerate_ultra(args) -> int:
    work = sum(
        enumeration_work(k, lam, args.max_arity)
        for k in range(1, args.max_a + 1)
        for lam in range(1, args.max_lambda + 1)
    )
    _check_budget(work, args.force)
    counts = {}
    ok = True
    for k in range(1, args.max_a + 1):
        for lam in range(1, args.max_lambda + 1):
            r = lemmas.enumeration_suite(k, lam, args.max_arity)
            counts[f"{k},{lam}"] = {
                "ultrafilters": r.details["ultrafilters"],
                "functions": r.details["functions"],
                "bijection": r.passed,
            }
            ok = ok and r.passed
    report = {"max_arity": args.max_arity, "counts": counts, "passed": ok}
    return _emit(report, args.out)


def cmd_acceptance(args) -> int:
    which = args.criteria or sorted(acceptance.CRITERIA)
    report = acceptance.run_criteria([c for c in which if c != "7"])
    if "7" in which:
        report["7"] = acceptance.criterion_7(report)
    for k in sorted(report):
        print(f"criterion {k}: {'PASS' if report[k]['passed'] else 'FAIL'}", file=sys.stderr)
    report = {"criteria": report, "passed": all(r["passed"] for r in report.values())}
    return _emit(report, args.out)


def _positive(text: str) -> int:
    v = int(text, 0)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cohult", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def bounds(sp, a=2, lam=2, ar=2):
        sp.add_argument("--max-a", type=_positive, default=a, help="largest base set size")
        sp.add_argument("--max-lambda", type=_positive, default=lam, help="largest number of indices")
        sp.add_argument("--max-arity", type=_positive, default=ar, help="largest stored tuple length")
        sp.add_argument("--force", action="store_true", help="run even above the work limit")

    sp = sub.add_parser("verify-lemmas", help="run the exhaustive filter suites")
    bounds(sp)
    sp.add_argument("--suite", action="append", choices=ALL_SUITES, help="restrict to a suite (repeatable)")
    sp.add_argument("--mutant", choices=sorted(acceptance.MUTANTS), help="swap in a broken fullification")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify_lemmas)

    sp = sub.add_parser("build-ultrapower", help="derive the filter for a scenario and check the isomorphism")
    sp.add_argument("scenario", help="scenario file, or the name of a shipped scenario")
    sp.add_argument("--samples", type=_positive)
    sp.add_argument("--depth", type=_positive)
    sp.add_argument("--seed", type=lambda t: int(t, 0), default=SEED)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_build_ultrapower)

    sp = sub.add_parser("enumerate-ultra", help="count proper coherent ultrafilters")
    bounds(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_enumerate_ultra)

    sp = sub.add_parser("acceptance", help="run the acceptance criteria")
    sp.add_argument("--criteria", nargs="*", choices=sorted(acceptance.CRITERIA) + ["7"])
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_acceptance)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except (ScenarioError, StructureFileError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
