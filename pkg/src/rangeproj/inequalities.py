"""Checkers for the range-projection inequality and its consequences.

Every checker returns an :class:`InequalityVerdict`. For a Loewner check
``LHS <= RHS`` the verdict's ``gap`` is ``lambda_min(RHS - LHS)`` (validity)
and ``excess`` is ``lambda_max(RHS - LHS)`` (how strict the inequality is);
for scalar checks both are ``RHS - LHS``.

Equality is classified from Frobenius defects against
``tol.equality_eps * n``. Inputs whose deciding defect lands in the band
``(eps * n, 10 * eps * n]`` are reported with ``status == "indeterminate"``
instead of being forced either way.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyComplement,
    NotAProjection,
    NotPSD,
    PowerOutOfRange,
    QuadratureNonConvergence,
)
from .functional_calculus import (
    default_schedule,
    is_projection,
    matrix_power,
    normalized_rank,
    numeric_rank,
    range_projection,
    range_projection_via_limit,
    rank_cutoff,
    smallest_retained_ratio,
)
from .linalg_core import DEFAULT_TOLERANCES, Tolerances, eigvalsh, loewner_leq, operator_norm
from .pinching import PinchingMap, apply_pinching, extract_block, index_set, is_in_subalgebra, two_block

BAND = 10.0


@dataclass
class InequalityVerdict:
    name: str
    holds: bool
    gap: float
    excess: float
    equality_predicted: Optional[bool]
    equality_observed: Optional[bool]
    status: str = "pass"
    witnesses: dict = field(default_factory=dict)

    @property
    def indeterminate(self) -> bool:
        return self.status == "indeterminate"

    def to_dict(self) -> dict:
        return asdict(self)


def _status(holds, predicted, observed, borderline) -> str:
    if not holds:
        return "fail"
    if borderline:
        return "indeterminate"
    if predicted is not None and predicted != observed:
        return "fail"
    return "pass"


def _in_band(value: float, threshold: float) -> bool:
    return threshold < value <= BAND * threshold


def _require_psd(A: np.ndarray, tol: Tolerances) -> None:
    w = eigvalsh(A)
    lo, hi = float(w[0]), float(w[-1])
    if lo < -tol.loewner_slack * max(1.0, hi, -lo):
        raise NotPSD(f"matrix is not positive semidefinite: lambda_min = {lo:.3e}", lo)


def _require_dims(A: np.ndarray, phi: PinchingMap) -> None:
    if A.shape != (phi.n, phi.n):
        raise DimensionMismatch(f"matrix of shape {A.shape} with partition of n = {phi.n}")


def _loewner_verdict_parts(lhs, rhs, tol):
    res = loewner_leq(lhs, rhs, tol)
    d = eigvalsh(rhs - lhs)
    return res, float(d[0]), float(d[-1])


def check_main_theorem(A: np.ndarray, phi: PinchingMap, tol: Tolerances = DEFAULT_TOLERANCES) -> InequalityVerdict:
    """``Phi(R[A]) <= R[Phi(A)]``, with equality iff ``R[A]`` is block diagonal."""
    _require_dims(A, phi)
    _require_psd(A, tol)
    n = A.shape[0]
    thr = tol.equality_eps * n
    R = range_projection(A, tol)
    lhs = apply_pinching(phi, R)
    rhs = range_projection(apply_pinching(phi, A), tol)
    res, gap, excess = _loewner_verdict_parts(lhs, rhs, tol)
    defect = float(np.linalg.norm(rhs - lhs))
    observed = defect <= thr
    predicted, offdiag = is_in_subalgebra(R, phi, thr)
    borderline = _in_band(offdiag, thr) or _in_band(defect, thr)
    return InequalityVerdict(
        "main_theorem", res.holds, gap, excess, predicted, observed,
        _status(res.holds, predicted, observed, borderline),
        {
            "scale": res.scale,
            "equality_defect": defect,
            "offdiag_norm": offdiag,
            "trace_lhs": float(np.real(np.trace(lhs))),
            "trace_rhs": float(np.real(np.trace(rhs))),
        },
    )


def check_jensen_power(A: np.ndarray, phi: PinchingMap, r: float,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> InequalityVerdict:
    """``Phi(A**r) <= Phi(A)**r`` for ``0 < r < 1``.

    No equality clause is checked, so both equality flags are ``None``.
    """
    if not 0 < r < 1:
        raise PowerOutOfRange(f"r must lie in (0, 1), got {r}")
    _require_dims(A, phi)
    _require_psd(A, tol)
    lhs = apply_pinching(phi, matrix_power(A, r, tol))
    rhs = matrix_power(apply_pinching(phi, A), r, tol)
    res, gap, excess = _loewner_verdict_parts(lhs, rhs, tol)
    return InequalityVerdict(
        "jensen_power", res.holds, gap, excess, None, None,
        _status(res.holds, None, None, False),
        {"r": float(r), "scale": res.scale, "norm_A": operator_norm(A)},
    )


def _rank_flags(A, phi, tol):
    thr = tol.equality_eps * A.shape[0]
    predicted, offdiag = is_in_subalgebra(range_projection(A, tol), phi, thr)
    return predicted, offdiag, _in_band(offdiag, thr)


def check_rank_inequality(A: np.ndarray, phi: PinchingMap, tol: Tolerances = DEFAULT_TOLERANCES) -> InequalityVerdict:
    """``rank(A) <= sum_i rank(A[alpha_i])`` as an exact integer comparison."""
    _require_dims(A, phi)
    _require_psd(A, tol)
    rank_a = numeric_rank(A, tol)
    block_ranks = [numeric_rank(extract_block(A, b, b), tol) for b in phi.partition.blocks]
    total = sum(block_ranks)
    holds = rank_a <= total
    observed = rank_a == total
    predicted, offdiag, borderline = _rank_flags(A, phi, tol)
    witnesses = {"rank_A": rank_a, "rank_sum": total, "offdiag_norm": offdiag}
    for i, rk in enumerate(block_ranks, start=1):
        witnesses[f"rank_block_{i}"] = rk
    return InequalityVerdict(
        "rank_inequality", holds, float(total - rank_a), float(total - rank_a),
        predicted, observed, _status(holds, predicted, observed, borderline), witnesses,
    )


def check_normalized_rank(A: np.ndarray, phi: PinchingMap, tol: Tolerances = DEFAULT_TOLERANCES) -> InequalityVerdict:
    """Normalized-trace version: ``rank(A)/n <= rank(Phi(A))/n``."""
    _require_dims(A, phi)
    _require_psd(A, tol)
    lhs = normalized_rank(A, tol)
    rhs = normalized_rank(apply_pinching(phi, A), tol)
    holds = lhs <= rhs + 1e-12
    observed = abs(rhs - lhs) <= 1e-12
    predicted, offdiag, borderline = _rank_flags(A, phi, tol)
    return InequalityVerdict(
        "normalized_rank", holds, rhs - lhs, rhs - lhs, predicted, observed,
        _status(holds, predicted, observed, borderline),
        {"normalized_rank_A": lhs, "normalized_rank_pinched": rhs, "offdiag_norm": offdiag},
    )


def eig_det(M: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Determinant of a PSD matrix as the product of its eigenvalues.

    Eigenvalues at or below the rank cutoff count as exact zeros, so a
    numerically singular matrix has determinant 0 rather than round-off.
    """
    w = np.maximum(eigvalsh(M), 0.0)
    if w[0] <= rank_cutoff(w, tol):
        return 0.0
    return float(np.prod(w))


def check_hadamard_fischer(A: np.ndarray, alpha, tol: Tolerances = DEFAULT_TOLERANCES) -> InequalityVerdict:
    """``det(A) <= det(A[alpha]) * det(A[alpha^c])``, equality iff ``A`` is
    block diagonal with respect to ``{alpha, alpha^c}``.

    The equality clause is only sharp for positive definite ``A``; singular
    inputs get ``status == "indeterminate"`` unless the inequality fails.
    """
    n = A.shape[0]
    alpha = index_set(alpha, n)
    if len(alpha) == n:
        raise EmptyComplement("alpha must leave a non-empty complement")
    _require_psd(A, tol)
    phi = PinchingMap(two_block(alpha, n))
    comp = phi.partition.blocks[1]
    det_a = eig_det(A, tol)
    det_alpha = eig_det(extract_block(A, alpha, alpha), tol)
    det_comp = eig_det(extract_block(A, comp, comp), tol)
    rhs = det_alpha * det_comp
    holds = det_a <= rhs * (1 + 1e-8) + 1e-12
    thr = tol.equality_eps * n
    if rhs > 0:
        observed = rhs - det_a <= thr * rhs
    else:
        observed = det_a == 0.0
    predicted, offdiag = is_in_subalgebra(A, phi, thr)
    singular = numeric_rank(A, tol) < n
    return InequalityVerdict(
        "hadamard_fischer", holds, rhs - det_a, rhs - det_a, predicted, observed,
        _status(holds, predicted, observed, singular or _in_band(offdiag, thr)),
        {"det_A": det_a, "det_alpha": det_alpha, "det_complement": det_comp, "offdiag_norm": offdiag},
    )


def check_projection_lemma(E: np.ndarray, phi: PinchingMap, tol: Tolerances = DEFAULT_TOLERANCES) -> InequalityVerdict:
    """``Phi(E)`` is a projection iff ``Phi(E) == E``.

    ``equality_predicted`` records ``Phi(E) == E`` and ``equality_observed``
    records whether ``Phi(E)`` is a projection; the lemma holds when they
    agree.
    """
    _require_dims(E, phi)
    if not is_projection(E):
        raise NotAProjection("E is not an orthogonal projection within 1e-9")
    n = E.shape[0]
    thr = tol.equality_eps * n
    F = apply_pinching(phi, E)
    proj_defect = float(np.linalg.norm(F @ F - F))
    fixed_defect = float(np.linalg.norm(F - E))
    is_proj = proj_defect <= thr
    is_fixed = fixed_defect <= thr
    holds = is_proj == is_fixed
    borderline = _in_band(proj_defect, thr) or _in_band(fixed_defect, thr)
    status = "indeterminate" if borderline else ("pass" if holds else "fail")
    return InequalityVerdict(
        "projection_lemma", holds, 0.0, 0.0, is_fixed, is_proj, status,
        {"projection_defect": proj_defect, "fixed_point_defect": fixed_defect},
    )


def check_limit_lemma(A: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES, schedule=None) -> InequalityVerdict:
    """``(A/||A||)**r -> R[A]`` with ``||(A/||A||)**r - R[A]|| <= r |log mu_min|``."""
    _require_psd(A, tol)
    schedule = default_schedule() if schedule is None else np.asarray(schedule, dtype=np.float64)
    _, errors = range_projection_via_limit(A, schedule, tol)
    mu_min = smallest_retained_ratio(A, tol)
    bounds = schedule * abs(math.log(mu_min))
    slack = bounds + 1e-9 - errors
    holds = bool(np.all(slack >= 0) and errors[-1] <= 1e-6)
    return InequalityVerdict(
        "limit_lemma", holds, float(slack.min()), float(slack.min()), None, None,
        _status(holds, None, None, False),
        {
            "mu_min": mu_min,
            "final_r": float(schedule[-1]),
            "final_error": float(errors[-1]),
            "max_error": float(errors.max()),
            "monotone": bool(np.all(np.diff(errors) <= 1e-12)),
        },
    )


# --- scalar integral representation of t**r --------------------------------

@dataclass(frozen=True)
class QuadratureParams:
    """Composite trapezoid rule on ``u = log(lambda)`` over ``[-L, L]``.

    ``L`` starts at ``initial_half_width`` and grows by ``growth`` until the
    analytic tail bound drops below ``tail_tol`` times the current estimate;
    the step starts at ``initial_step`` and is halved until the relative
    change is below ``rel_tol``.
    """

    initial_step: float = 1.0
    rel_tol: float = 1e-9
    tail_tol: float = 1e-12
    initial_half_width: float = 8.0
    growth: float = 1.5
    max_half_width: float = 700.0  # exp(u) overflows beyond this
    max_halvings: int = 20


def power_integrand(lam, t: float, r: float):
    """``((1+lam) t / (lam+t)) * lam**(r-1) / (1+lam)`` in the form written."""
    lam = np.asarray(lam, dtype=np.float64)
    return (1.0 + lam) * t / (lam + t) * lam ** (r - 1.0) / (1.0 + lam)


def _tail_bound(L: float, t: float, r: float) -> float:
    # integrand in u is t e^{ur} / (e^u + t) <= min(e^{ur}, t e^{u(r-1)})
    return math.exp(-L * r) / r + t * math.exp(-L * (1.0 - r)) / (1.0 - r)


def _trapezoid(t: float, r: float, L: float, h: float) -> float:
    m = int(math.ceil(2 * L / h))
    u = np.linspace(-L, L, m + 1)
    lam = np.exp(u)
    f = power_integrand(lam, t, r) * lam
    step = 2 * L / m
    return step * (f.sum() - 0.5 * (f[0] + f[-1]))


def scalar_power_integral(t: float, r: float, quad: QuadratureParams = QuadratureParams()) -> float:
    """Evaluate ``t**r`` through its integral representation

    ``t**r = sin(r pi)/pi * int_0^inf (1+lam) t/(lam+t) * lam**(r-1)/(1+lam) dlam``

    by numerical quadrature; ``t = 0`` returns 0 directly.
    """
    if not 0 < r < 1:
        raise PowerOutOfRange(f"r must lie in (0, 1), got {r}")
    if t < 0 or not math.isfinite(t):
        raise ValueError(f"t must be a finite non-negative number, got {t}")
    if t == 0:
        return 0.0
    L, h = quad.initial_half_width, quad.initial_step
    estimate = _trapezoid(t, r, L, h)
    while _tail_bound(L, t, r) > quad.tail_tol * abs(estimate):
        L *= quad.growth
        if L > quad.max_half_width:
            raise QuadratureNonConvergence(f"truncation did not converge for t={t}, r={r}")
        estimate = _trapezoid(t, r, L, h)
    for _ in range(quad.max_halvings):
        h /= 2
        refined = _trapezoid(t, r, L, h)
        done = abs(refined - estimate) <= quad.rel_tol * abs(refined)
        estimate = refined
        if done:
            return math.sin(r * math.pi) / math.pi * estimate
    raise QuadratureNonConvergence(f"step refinement stalled for t={t}, r={r}")
