"""Command-line entry point: ``rangeproj {check,verify,limit}``.

Exit codes: 0 when every check passes, 1 when some check fails (a theorem
violation or a wrong equality classification), 2 for usage or input errors.

Report JSON (``--json PATH``)::

    {
      "tool_version": str, "seed": int, "trials": int, "config": {...},
      "checks": {name: {"pass": int, "fail": int, "indeterminate": int,
                        "min_gap": float, "min_scaled_gap": float,
                        "max_defect": float}},
      "failures": [{"trial": int, "trial_seed": int, "n": int,
                    "partition": "1,3|2", "check": str, "verdict": {...},
                    "error": str | null, "reproduce": str}],
      "extras": {...}
    }

``min_scaled_gap`` is the smallest ``gap / scale`` seen (Loewner checks) and
``max_defect`` the largest ``max(0, -gap / scale)``. The file is written
with sorted keys and no timestamps, so identical flags give identical bytes.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import RangeProjError, ZeroOperator
from .functional_calculus import default_schedule, range_projection, range_projection_via_limit, smallest_retained_ratio
from .generators import (
    GenConfig,
    SplitMix64,
    derive_seed,
    psd_with_block_diag_range,
    psd_with_strict_gap,
    random_partition,
    random_pd,
    random_projection,
    random_psd,
)
from .inequalities import (
    InequalityVerdict,
    check_hadamard_fischer,
    check_jensen_power,
    check_limit_lemma,
    check_main_theorem,
    check_normalized_rank,
    check_projection_lemma,
    check_rank_inequality,
)
from .linalg_core import Tolerances, load_matrix
from .pinching import PinchingMap, format_partition, parse_partition

JENSEN_POWERS = (0.1, 0.25, 0.5, 0.75, 0.9)
STRICT_EXCESS = 1e-4
CHECKS = (
    "main_theorem",
    "jensen_power",
    "rank_inequality",
    "normalized_rank",
    "hadamard_fischer",
    "projection_lemma",
    "limit_lemma",
)
ALIASES = {
    "main": "main_theorem",
    "jensen": "jensen_power",
    "rank": "rank_inequality",
    "normalized": "normalized_rank",
    "hf": "hadamard_fischer",
    "projection": "projection_lemma",
    "limit": "limit_lemma",
}


class UsageError(Exception):
    pass


@dataclass
class CheckSummary:
    passed: int = 0
    failed: int = 0
    indeterminate: int = 0
    min_gap: float = math.inf
    min_scaled_gap: float = math.inf
    max_defect: float = 0.0

    def record(self, status: str, verdicts=()):
        if status == "pass":
            self.passed += 1
        elif status == "indeterminate":
            self.indeterminate += 1
        else:
            self.failed += 1
        for v in verdicts:
            scale = v.witnesses.get("scale", 1.0)
            self.min_gap = min(self.min_gap, v.gap)
            self.min_scaled_gap = min(self.min_scaled_gap, v.gap / scale)
            self.max_defect = max(self.max_defect, max(0.0, -v.gap / scale))

    def to_dict(self) -> dict:
        def finite(x):
            return None if math.isinf(x) else x

        return {
            "pass": self.passed,
            "fail": self.failed,
            "indeterminate": self.indeterminate,
            "min_gap": finite(self.min_gap),
            "min_scaled_gap": finite(self.min_scaled_gap),
            "max_defect": self.max_defect,
        }


@dataclass
class RunReport:
    tool_version: str
    seed: int
    trials: int
    config: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def n_failures(self) -> int:
        return sum(s.failed for s in self.checks.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["checks"] = {name: s.to_dict() for name, s in sorted(self.checks.items())}
        return d

    def to_json(self) -> str:
        return json.dumps(_plain(self.to_dict()), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())


def _plain(obj):
    """Convert numpy scalars and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def _worst_status(statuses) -> str:
    statuses = list(statuses)
    if "fail" in statuses:
        return "fail"
    if "indeterminate" in statuses:
        return "indeterminate"
    return "pass"


def _verdict_dicts(verdicts):
    return [v.to_dict() for v in verdicts]


# --- check ------------------------------------------------------------------

def parse_checks(selector: str):
    if selector.strip() == "all":
        return list(CHECKS), True
    names = []
    for item in selector.split(","):
        item = item.strip()
        name = ALIASES.get(item, item)
        if name not in CHECKS:
            raise UsageError(f"unknown check {item!r}; choose from {', '.join(CHECKS)} or 'all'")
        names.append(name)
    return names, False


def run_checks(A, partition, names, tol, implicit=False):
    """Run the named checkers on one ``(A, partition)`` pair.

    With ``implicit`` (the ``all`` selector) checks that do not apply to the
    input are skipped instead of raising: Hadamard-Fischer on a one-block
    partition and the limit check on the zero matrix.
    """
    phi = PinchingMap(partition)
    results = {}
    for name in names:
        if name == "main_theorem":
            results[name] = [check_main_theorem(A, phi, tol)]
        elif name == "jensen_power":
            results[name] = [check_jensen_power(A, phi, r, tol) for r in JENSEN_POWERS]
        elif name == "rank_inequality":
            results[name] = [check_rank_inequality(A, phi, tol)]
        elif name == "normalized_rank":
            results[name] = [check_normalized_rank(A, phi, tol)]
        elif name == "hadamard_fischer":
            if partition.k < 2 and implicit:
                continue
            results[name] = [check_hadamard_fischer(A, partition.blocks[0], tol)]
        elif name == "projection_lemma":
            results[name] = [check_projection_lemma(range_projection(A, tol), phi, tol)]
        elif name == "limit_lemma":
            try:
                results[name] = [check_limit_lemma(A, tol)]
            except ZeroOperator:
                if not implicit:
                    raise
    return results


def _witness_text(v: InequalityVerdict) -> str:
    parts = []
    for key, val in v.witnesses.items():
        if isinstance(val, float):
            parts.append(f"{key}={val:.6g}")
        else:
            parts.append(f"{key}={val}")
    return " ".join(parts)


def print_table(results, out=None):
    out = out or sys.stdout
    header = f"{'check':<18} {'status':<13} {'holds':<6} {'gap':>12} {'excess':>12} {'eq_pred':<7} {'eq_obs':<7} witnesses"
    print(header, file=out)
    print("-" * len(header), file=out)
    for verdicts in results.values():
        for v in verdicts:
            print(
                f"{v.name:<18} {v.status:<13} {str(v.holds):<6} {v.gap:>12.4e} {v.excess:>12.4e} "
                f"{str(v.equality_predicted):<7} {str(v.equality_observed):<7} {_witness_text(v)}",
                file=out,
            )


def cmd_check(matrix_path, partition_string, checks="all", tol=Tolerances(), json_path=None, out=None):
    out = out or sys.stdout
    A = load_matrix(matrix_path, tol)
    partition = parse_partition(partition_string, A.shape[0])
    names, implicit = parse_checks(checks)
    results = run_checks(A, partition, names, tol, implicit)
    report = RunReport(__version__, 0, 1, config={
        "command": "check",
        "matrix": str(matrix_path),
        "partition": format_partition(partition),
        "checks": names,
        "tolerances": asdict(tol),
    })
    for name, verdicts in results.items():
        summary = report.checks.setdefault(name, CheckSummary())
        status = _worst_status(v.status for v in verdicts)
        summary.record(status, verdicts)
        if status == "fail":
            report.failures.append({
                "trial": 0, "trial_seed": None, "n": int(A.shape[0]),
                "partition": format_partition(partition), "check": name,
                "verdict": _verdict_dicts(verdicts), "error": None,
                "reproduce": f"rangeproj check --matrix {matrix_path} --partition '{format_partition(partition)}' --checks {name}",
            })
    report.extras["verdicts"] = {name: _verdict_dicts(vs) for name, vs in results.items()}
    print_table(results, out)
    if json_path:
        report.write(json_path)
    return report


# --- verify -----------------------------------------------------------------

def _draw_k(rng: SplitMix64, n: int, policy: str) -> int:
    if policy == "random":
        return rng.integers(1, min(n, 5))
    if policy == "two":
        return 2
    if policy == "singletons":
        return n
    raise UsageError(f"unknown k policy {policy!r}")


def run_trial(trial_seed: int, dim_max: int, k_policy: str, field_name: str, tol: Tolerances):
    """One randomized trial; returns ``(n, partition, {check: (status, verdicts)}, extras)``."""
    rng = SplitMix64(trial_seed)
    n = rng.integers(2, dim_max)
    rank = rng.integers(0, n)
    k = _draw_k(rng, n, k_policy)
    partition = random_partition(derive_seed(trial_seed, 1), n, k)
    phi = PinchingMap(partition)
    A = random_psd(GenConfig(derive_seed(trial_seed, 2), n, rank, field_name))
    out = {}
    extras = {}

    out.update({name: (_worst_status(v.status for v in vs), vs)
                for name, vs in run_checks(A, partition, ["main_theorem", "jensen_power", "rank_inequality"], tol).items()})

    nr = check_normalized_rank(A, phi, tol)
    rk = out["rank_inequality"][1][0]
    agree = (nr.holds == rk.holds and nr.equality_observed == rk.equality_observed
             and nr.equality_predicted == rk.equality_predicted)
    nr.witnesses["agrees_with_rank_inequality"] = agree
    out["normalized_rank"] = (nr.status if agree else "fail", [nr])

    pd = random_pd(GenConfig(derive_seed(trial_seed, 3), n, n, field_name))
    alpha = partition.blocks[0] if k >= 2 else tuple(sorted(rng.permutation(n)[: max(1, n // 2)].tolist()))
    hf = check_hadamard_fischer(pd, alpha, tol)
    out["hadamard_fischer"] = (hf.status, [hf])

    E = random_projection(GenConfig(derive_seed(trial_seed, 4), n, rng.integers(0, n), field_name))
    pl = check_projection_lemma(E, phi, tol)
    out["projection_lemma"] = (pl.status, [pl])

    B = A if rank > 0 else random_psd(GenConfig(derive_seed(trial_seed, 5), n, 1, field_name))
    ll = check_limit_lemma(B, tol)
    out["limit_lemma"] = (ll.status, [ll])

    ranks = [rng.integers(0, len(b)) for b in partition.blocks]
    C = psd_with_block_diag_range(phi, ranks, derive_seed(trial_seed, 6), field_name)
    eq = [check_main_theorem(C, phi, tol), check_rank_inequality(C, phi, tol)]
    ok = all(v.holds and v.equality_observed and v.equality_predicted for v in eq)
    out["equality_case"] = ("pass" if ok else "fail", eq)

    strict_partition = partition if k >= 2 else random_partition(derive_seed(trial_seed, 7), n, 2)
    D = psd_with_strict_gap(PinchingMap(strict_partition), derive_seed(trial_seed, 8), field_name,
                            noise_rank=rng.integers(0, 2))
    sv = check_main_theorem(D, PinchingMap(strict_partition), tol)
    ok = sv.holds and sv.status == "pass" and not sv.equality_observed and sv.excess > STRICT_EXCESS
    out["strict_gap"] = ("pass" if ok else "fail", [sv])
    extras["strict_partition"] = format_partition(strict_partition)

    if field_name == "real":
        imag = max(float(np.linalg.norm(np.imag(range_projection(M, tol)))) for M in (A, C, D, B))
        extras["max_imag_range_projection"] = imag
        out["real_closure"] = ("pass" if imag <= 1e-9 else "fail", [])
    return n, partition, out, extras


def cmd_verify(trials=1000, dim_max=12, k_policy="random", seed=42, field_name="complex",
               tol=Tolerances(), json_path=None, first_trial=0, out=None):
    out = out or sys.stdout
    if trials < 1:
        raise UsageError("--trials must be at least 1")
    if dim_max < 2:
        raise UsageError("--dim-max must be at least 2")
    if field_name not in ("real", "complex"):
        raise UsageError("--field must be 'real' or 'complex'")
    _draw_k(SplitMix64(0), 2, k_policy)
    report = RunReport(__version__, int(seed), int(trials), config={
        "command": "verify",
        "dim_max": dim_max,
        "k_policy": k_policy,
        "field": field_name,
        "first_trial": first_trial,
        "jensen_powers": list(JENSEN_POWERS),
        "tolerances": asdict(tol),
    })
    max_imag = 0.0
    for t in range(first_trial, first_trial + trials):
        trial_seed = derive_seed(seed, t)
        reproduce = (f"rangeproj verify --seed {seed} --first-trial {t} --trials 1 "
                     f"--dim-max {dim_max} --field {field_name} --k-policy {k_policy}")
        try:
            n, partition, results, extras = run_trial(trial_seed, dim_max, k_policy, field_name, tol)
        except RangeProjError as exc:
            summary = report.checks.setdefault("trial_setup", CheckSummary())
            summary.record("fail")
            report.failures.append({"trial": t, "trial_seed": trial_seed, "n": None, "partition": None,
                                    "check": "trial_setup", "verdict": None,
                                    "error": f"{type(exc).__name__}: {exc}", "reproduce": reproduce})
            continue
        max_imag = max(max_imag, extras.get("max_imag_range_projection", 0.0))
        for name, (status, verdicts) in results.items():
            report.checks.setdefault(name, CheckSummary()).record(status, verdicts)
            if status == "fail":
                report.failures.append({
                    "trial": t, "trial_seed": trial_seed, "n": n,
                    "partition": extras["strict_partition"] if name == "strict_gap" else format_partition(partition),
                    "check": name, "verdict": _verdict_dicts(verdicts), "error": None,
                    "reproduce": reproduce,
                })
    if field_name == "real":
        report.extras["max_imag_range_projection"] = max_imag
    _print_summary(report, out)
    if json_path:
        report.write(json_path)
    return report


def _print_summary(report: RunReport, out):
    print(f"rangeproj {report.tool_version}  seed={report.seed}  trials={report.trials}", file=out)
    header = f"{'check':<18} {'pass':>6} {'fail':>6} {'indet':>6} {'min_gap':>12} {'min_gap/scale':>14}"
    print(header, file=out)
    print("-" * len(header), file=out)
    for name, s in sorted(report.checks.items()):
        d = s.to_dict()
        mg = "-" if d["min_gap"] is None else f"{d['min_gap']:.4e}"
        ms = "-" if d["min_scaled_gap"] is None else f"{d['min_scaled_gap']:.4e}"
        print(f"{name:<18} {d['pass']:>6} {d['fail']:>6} {d['indeterminate']:>6} {mg:>12} {ms:>14}", file=out)
    print(f"failures: {len(report.failures)}", file=out)


# --- limit ------------------------------------------------------------------

def cmd_limit(matrix_path, steps=40, tol=Tolerances(), json_path=None, out=None):
    """Tabulate ``(r_k, e_k, r_k |log mu_min|)`` for the ``r -> 0`` limit."""
    out = out or sys.stdout
    if steps < 1:
        raise UsageError("--steps must be at least 1")
    A = load_matrix(matrix_path, tol)
    schedule = default_schedule(steps)
    verdict = check_limit_lemma(A, tol, schedule)
    _, errors = range_projection_via_limit(A, schedule, tol)
    mu_min = smallest_retained_ratio(A, tol)
    bounds = schedule * abs(math.log(mu_min))
    print(f"mu_min = {mu_min:.6g}", file=out)
    print(f"{'k':>3} {'r_k':>12} {'e_k':>12} {'bound_k':>12}", file=out)
    rows = []
    for k, (r, e, b) in enumerate(zip(schedule, errors, bounds), start=1):
        print(f"{k:>3} {r:>12.4e} {e:>12.4e} {b:>12.4e}", file=out)
        rows.append({"k": k, "r": float(r), "error": float(e), "bound": float(b)})
    print(f"holds: {verdict.holds}", file=out)
    report = RunReport(__version__, 0, 1, config={"command": "limit", "matrix": str(matrix_path), "steps": steps,
                                                  "tolerances": asdict(tol)})
    report.checks["limit_lemma"] = CheckSummary()
    report.checks["limit_lemma"].record(verdict.status, [verdict])
    report.extras = {"mu_min": mu_min, "rows": rows, "verdict": verdict.to_dict()}
    if verdict.status == "fail":
        report.failures.append({"trial": 0, "trial_seed": None, "n": int(A.shape[0]), "partition": None,
                                "check": "limit_lemma", "verdict": [verdict.to_dict()], "error": None,
                                "reproduce": f"rangeproj limit --matrix {matrix_path} --steps {steps}"})
    if json_path:
        report.write(json_path)
    return report


# --- argument parsing -------------------------------------------------------

def _tolerances(args) -> Tolerances:
    default = Tolerances()
    slack = args.loewner_slack
    try:
        return Tolerances(
            rank_rel=args.rank_rel,
            loewner_slack=slack,
            equality_eps=args.equality_eps,
            clamp_tol=min(default.clamp_tol, slack),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    default = Tolerances()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rank-rel", type=float, default=default.rank_rel)
    common.add_argument("--loewner-slack", type=float, default=default.loewner_slack)
    common.add_argument("--equality-eps", type=float, default=default.equality_eps)
    common.add_argument("--json", metavar="PATH", help="write the JSON report here")

    parser = argparse.ArgumentParser(prog="rangeproj", description="Numerical checks of range-projection inequalities.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check one matrix against one partition")
    p.add_argument("--matrix", required=True, metavar="PATH")
    p.add_argument("--partition", required=True, help='1-based blocks, e.g. "1,3|2,4"')
    p.add_argument("--checks", default="all", help=f"comma list of {', '.join(CHECKS)}, or 'all'")

    p = sub.add_parser("verify", parents=[common], help="randomized sweep over all checks")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--dim-max", type=int, default=12)
    p.add_argument("--k-policy", choices=["random", "two", "singletons"], default="random")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--field", choices=["real", "complex"], default="complex")
    p.add_argument("--first-trial", type=int, default=0, help="index of the first trial (for reproducing one)")

    p = sub.add_parser("limit", parents=[common], help="tabulate the r -> 0 limit of A**r")
    p.add_argument("--matrix", required=True, metavar="PATH")
    p.add_argument("--steps", type=int, default=40)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = _tolerances(args)
        if args.command == "check":
            report = cmd_check(args.matrix, args.partition, args.checks, tol, args.json)
        elif args.command == "verify":
            report = cmd_verify(args.trials, args.dim_max, args.k_policy, args.seed, args.field, tol,
                                args.json, args.first_trial)
        else:
            report = cmd_limit(args.matrix, args.steps, tol, args.json)
    except UsageError as exc:
        print(f"rangeproj: usage error: {exc}", file=sys.stderr)
        return 2
    except RangeProjError as exc:
        detail = f" (lambda_min = {exc.min_eigenvalue:.3e})" if getattr(exc, "min_eigenvalue", None) is not None else ""
        print(f"rangeproj: {type(exc).__name__}: {exc}{detail}", file=sys.stderr)
        return 2
    return 1 if report.n_failures else 0


if __name__ == "__main__":
    sys.exit(main())
