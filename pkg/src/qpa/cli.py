"""Command-line front end: ``qpa <command> [options]``.

Commands
--------
bound          bounds, key length and rate at the scenario's base point
exact          as ``bound`` plus the exact key distance
sweep          ``exact`` over every point of the scenario's sweep grid
rate           asymptotic key rate H(Z|rho) per sweep point of ``p``
aep            smoothed entropy rates of tensor powers along an n-ladder
verify-lemmas  randomized verification of every lemma; dumps failures

Exit status: 0 when everything passes, 1 on any failed check, 2 on usage,
parse, validation or cap errors.  Options may also be set through
environment variables ``QPA_OUT``, ``QPA_FORMAT``, ``QPA_TRIALS``,
``QPA_RNG_SEED``, ``QPA_CAP_SEEDS`` and ``QPA_TIMING``.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import entropy, lemmas, pa, scenario, states
from .errors import CapExceeded, ParseError, QpaError, ValidationError

AEP_COLUMNS = ["n", "eps", "S0_eps_rate", "Sinf_eps_rate", "S", "gap_0", "gap_inf", "rng_algorithm"]
LEMMA_COLUMNS = ["lemma", "trials", "passed", "failed", "max_violation", "statement"]
RATE_COLUMNS = ["scenario_id", "n", "p", "rate", "rng_algorithm", "rng_seed"]


def _env(name, default=None):
    return os.environ.get("QPA_" + name, default)


def _load(args):
    if not args.scenario:
        raise ValidationError("--scenario", "required for this command")
    scn = scenario.load_scenario(args.scenario)
    if args.rng_seed is not None:
        scn.rng_seed = args.rng_seed
    if args.cap_seeds is not None:
        scn.cap_seeds = args.cap_seeds
    return scn


def _report_row(scn, s, eps, p, exact=True):
    inst = scn.instance(s, eps, p)
    cap = scn.cap_seeds if exact else -1
    report = pa.build_report(inst, cap_bits=cap)
    return scenario.ResultRow.from_report(scn.id, report, p, scn.rng_seed)


def run_scenario(path_or_scenario, command="sweep", rng_seed=None, cap_seeds=None):
    """Evaluate a scenario and return its ResultRows.

    ``bound`` and ``exact`` evaluate the base point; ``sweep`` every grid
    point in order.
    """
    scn = path_or_scenario
    if not isinstance(scn, scenario.Scenario):
        scn = scenario.load_scenario(scn)
    if rng_seed is not None:
        scn.rng_seed = rng_seed
    if cap_seeds is not None:
        scn.cap_seeds = cap_seeds
    if command == "sweep":
        points = scn.points()
    else:
        points = [(scn.s, scn.eps, scn.source.get("p"))]
    return [_report_row(scn, s, e, p, exact=(command != "bound")) for s, e, p in points]


def rate_rows(scn):
    ps = scn.sweep.get("p", [scn.source.get("p")])
    rows = []
    for p in ps:
        inst = scn.instance(p=p)
        rows.append(
            {
                "scenario_id": scn.id,
                "n": scn.n,
                "p": p,
                "rate": pa.asymptotic_rate(inst.source),
                "rng_algorithm": scenario.RNG_ALGORITHM,
                "rng_seed": scn.rng_seed,
            }
        )
    return rows


def aep_study(rho, eps, ladder):
    """Rows ``(n, S0^eps/n, Sinf^eps/n, S, gaps)`` along ``ladder``."""
    rho = np.asarray(rho, dtype=complex)
    S = entropy.von_neumann(rho)
    rows = []
    for n in ladder:
        sp = entropy.product_spectrum(rho, int(n))
        r0 = entropy.smooth_renyi_0(sp, eps).value / n
        rinf = entropy.smooth_renyi_inf(sp, eps).value / n
        rows.append(
            {
                "n": int(n),
                "eps": eps,
                "S0_eps_rate": r0,
                "Sinf_eps_rate": rinf,
                "S": S,
                "gap_0": abs(r0 - S),
                "gap_inf": abs(rinf - S),
                "rng_algorithm": scenario.RNG_ALGORITHM,
            }
        )
    return rows


def _aep_inputs(args):
    rho = eps = ladder = None
    if args.scenario:
        with open(args.scenario, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(exc.msg, lineno=exc.lineno) from exc
        sec = data.get("aep")
        if not isinstance(sec, dict):
            raise ValidationError("aep", "scenario needs an 'aep' section")
        if "diag" in sec:
            rho = np.diag(np.asarray(sec["diag"], dtype=float))
        elif "rho" in sec:
            rho = scenario._matrix(sec["rho"], "aep.rho")
        eps = sec.get("eps")
        ladder = sec.get("ladder")
    if args.diag:
        rho = np.diag([float(x) for x in args.diag.split(",")])
    if args.eps is not None:
        eps = args.eps
    if args.ladder:
        ladder = [int(x) for x in args.ladder.split(",")]
    if rho is None:
        raise ValidationError("aep.rho", "give --diag or a scenario with an aep section")
    eps = 0.01 if eps is None else float(eps)
    ladder = [4, 64, 1024] if ladder is None else ladder
    try:
        states.check_density(rho, "aep.rho")
    except ValueError as exc:
        raise ValidationError("aep.rho", str(exc)) from exc
    return rho, eps, ladder


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_table(rows, columns, args):
    if args.format == "json":
        _write(json.dumps({"rng_algorithm": scenario.RNG_ALGORITHM, "rows": [scenario._jsonable(r) for r in rows]}, indent=2) + "\n", args.out)
    else:
        _write(scenario.rows_to_csv(rows, columns=columns), args.out)


def cmd_results(args):
    scn = _load(args)
    rows = run_scenario(scn, args.command)
    if args.format == "json":
        _write(scenario.rows_to_json(rows, timing=args.timing), args.out)
    else:
        _write(scenario.rows_to_csv(rows, timing=args.timing), args.out)
    return 0 if all(r.passed for r in rows) else 1


def cmd_rate(args):
    _emit_table(rate_rows(_load(args)), RATE_COLUMNS, args)
    return 0


def cmd_aep(args):
    rho, eps, ladder = _aep_inputs(args)
    _emit_table(aep_study(rho, eps, ladder), AEP_COLUMNS, args)
    return 0


def dump_failure(summary, trial, outcome, rng_seed, dump_dir):
    """Write a failing trial as a replayable JSON file; returns the path."""
    os.makedirs(dump_dir, exist_ok=True)
    path = os.path.join(dump_dir, "%s-trial%d.json" % (summary.name, trial))
    data = outcome.instance.get("scenario")
    if data is None:
        data = {"lemma": summary.name, "data": outcome.instance}
    else:
        data = dict(data)
    data["replay"] = {"lemma": summary.name, "rng_seed": rng_seed, "trial": trial, "violation": outcome.violation}
    with open(path, "w", encoding="utf-8") as fh:
        # full precision: the dump must replay the failing instance exactly
        json.dump(data, fh, indent=2)
        fh.write("\n")
    return path


def cmd_verify(args):
    if args.trials < 1:
        raise ValidationError("--trials", "must be >= 1")
    seed = 0 if args.rng_seed is None else args.rng_seed
    t0 = time.perf_counter()
    summaries = lemmas.verify_all(args.trials, seed, tamper=args.self_test)
    rows = []
    for sm in summaries:
        rows.append(
            {
                "lemma": sm.name,
                "trials": sm.trials,
                "passed": sm.passed,
                "failed": sm.failed,
                "max_violation": sm.max_violation,
                "statement": lemmas.CHECKS[sm.name][1],
            }
        )
        for trial, outcome in sm.failures:
            path = dump_failure(sm, trial, outcome, seed, args.dump_dir)
            print("FAIL %s trial %d (violation %.3e) -> %s" % (sm.name, trial, outcome.violation, path), file=sys.stderr)
    _emit_table(rows, LEMMA_COLUMNS, args)
    print("rng=%s seed=%d elapsed=%.1fs" % (scenario.RNG_ALGORITHM, seed, time.perf_counter() - t0), file=sys.stderr)
    return 1 if any(sm.failed for sm in summaries) else 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file")
    common.add_argument("--out", default=_env("OUT"), help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=_env("FORMAT", "csv"))
    common.add_argument("--rng-seed", type=int, default=_int_env("RNG_SEED"))
    common.add_argument("--cap-seeds", type=int, default=_int_env("CAP_SEEDS"), help="log2 of the seed enumeration cap")
    common.add_argument("--timing", action="store_true", default=_env("TIMING", "") not in ("", "0"), help="add a runtime_ms column")

    parser = argparse.ArgumentParser(prog="qpa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, text in (
        ("bound", cmd_results, "bounds, key length, rate"),
        ("exact", cmd_results, "bounds plus exact key distance"),
        ("sweep", cmd_results, "exact report over the sweep grid"),
        ("rate", cmd_rate, "asymptotic key rate"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.set_defaults(func=fn)
    p = sub.add_parser("aep", parents=[common], help="smooth entropy rates of tensor powers")
    p.add_argument("--diag", help="comma-separated eigenvalues of a diagonal rho")
    p.add_argument("--eps", type=float)
    p.add_argument("--ladder", help="comma-separated n values")
    p.set_defaults(func=cmd_aep)
    p = sub.add_parser("verify-lemmas", parents=[common], help="randomized lemma verification")
    p.add_argument("--trials", type=int, default=_int_env("TRIALS", 100))
    p.add_argument("--self-test", action="store_true", help="tamper with the theorem bound to exercise failure dumps")
    p.add_argument("--dump-dir", default="qpa-failures")
    p.set_defaults(func=cmd_verify)
    return parser


def _int_env(name, default=None):
    v = _env(name)
    if v is None:
        return default
    try:
        return int(v)
    except ValueError:
        raise SystemExit("QPA_%s must be an integer, got %r" % (name, v))


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (ParseError, ValidationError, CapExceeded) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (QpaError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
