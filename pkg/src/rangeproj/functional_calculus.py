"""Spectral functional calculus on Hermitian matrices.

``f(A) = V diag(f(lambda)) V*`` for a Hermitian ``A = V diag(lambda) V*``.
On top of that: fractional powers, numeric range projections and ranks, and
the ``r -> 0`` limit of ``A**r`` which recovers the range projection.

Conventions
-----------
* ``0**r = 0`` for ``r > 0``.
* Eigenvalues in ``[-clamp_tol * max(1, ||A||), 0)`` are round-off and are
  clamped to zero before powers are taken; anything more negative raises
  :class:`~rangeproj.errors.DomainViolation`.
* The numeric rank cutoff is ``rank_rel * lambda_max * n``. Powers send
  eigenvalues at or below it to 0 as well: round-off eigenvalues of a
  singular matrix (~1e-16 * ||A||) would otherwise turn into
  ``(1e-16)**r``, which is far from 0 for small ``r``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainViolation, ZeroOperator
from .linalg_core import DEFAULT_TOLERANCES, Tolerances, dagger, eigh, eigvalsh


@dataclass(frozen=True)
class SpectralFunction:
    """A scalar map applied to the spectrum of a Hermitian matrix.

    Build instances with :meth:`power`, :meth:`log`,
    :meth:`indicator_positive` or :meth:`custom` rather than directly.
    """

    kind: str
    r: Optional[float] = None
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain_floor: float = 0.0

    @classmethod
    def power(cls, r: float) -> "SpectralFunction":
        if not r > 0:
            raise ValueError(f"power exponent must be positive, got {r}")
        return cls("power", r=float(r))

    @classmethod
    def log(cls, domain_floor: float = 0.0) -> "SpectralFunction":
        return cls("log", domain_floor=float(domain_floor))

    @classmethod
    def indicator_positive(cls, threshold: float = 0.0) -> "SpectralFunction":
        return cls("indicator_positive", domain_floor=float(threshold))

    @classmethod
    def custom(cls, func, domain_floor: float = -np.inf) -> "SpectralFunction":
        return cls("custom", func=func, domain_floor=float(domain_floor))

    def __call__(self, w: np.ndarray) -> np.ndarray:
        if self.kind == "power":
            out = np.zeros_like(w)
            pos = w > 0
            out[pos] = w[pos] ** self.r
            return out
        if self.kind == "log":
            return np.log(w)
        if self.kind == "indicator_positive":
            return (w > self.domain_floor).astype(np.float64)
        return np.asarray(self.func(w), dtype=np.float64)


def _clamp_scale(w: np.ndarray) -> float:
    return max(1.0, abs(float(w[0])), abs(float(w[-1])))


def _clamp_psd_spectrum(w: np.ndarray, tol: Tolerances) -> np.ndarray:
    if w[0] < -tol.clamp_tol * _clamp_scale(w):
        raise DomainViolation(f"matrix is not positive semidefinite: lambda_min = {w[0]:.3e}")
    return np.where(w < 0, 0.0, w)


def _assemble(v: np.ndarray, fw: np.ndarray) -> np.ndarray:
    M = (v * fw) @ dagger(v)
    return (M + dagger(M)) / 2


def apply_spectral(f: SpectralFunction, A: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    w, v = eigh(A)
    if f.kind == "power":
        w = _clamp_psd_spectrum(w, tol)
        w = np.where(w > rank_cutoff(w, tol), w, 0.0)
    elif f.kind == "indicator_positive":
        w = _clamp_psd_spectrum(w, tol)
    elif f.kind == "log":
        if w[0] <= f.domain_floor or w[0] <= 0:
            raise DomainViolation(f"log needs eigenvalues above {max(f.domain_floor, 0.0)}, got {w[0]:.3e}")
    elif w[0] < f.domain_floor:
        raise DomainViolation(f"eigenvalue {w[0]:.3e} below domain floor {f.domain_floor}")
    return _assemble(v, f(w))


def matrix_power(A: np.ndarray, r: float, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """``A**r`` for positive semidefinite ``A`` and ``r > 0``."""
    return apply_spectral(SpectralFunction.power(r), A, tol)


def rank_cutoff(w: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Eigenvalues strictly above this value count towards the rank."""
    return tol.rank_rel * max(float(w[-1]), 1e-300) * len(w)


def _retained(A: np.ndarray, tol: Tolerances):
    w, v = eigh(A)
    w = _clamp_psd_spectrum(w, tol)
    return w, v, w > rank_cutoff(w, tol)


def range_projection(A: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Orthogonal projection onto the range of a positive semidefinite ``A``."""
    w, v, keep = _retained(A, tol)
    vk = v[:, keep]
    P = vk @ dagger(vk)
    return (P + dagger(P)) / 2


def numeric_rank(A: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    w, _, keep = _retained(A, tol)
    return int(np.count_nonzero(keep))


def normalized_rank(A: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Rank divided by the dimension, i.e. the normalized trace of the range projection."""
    return numeric_rank(A, tol) / A.shape[0]


def is_projection(P: np.ndarray, atol: float = 1e-9) -> bool:
    n = P.shape[0]
    if np.linalg.norm(P @ P - P) > atol * n:
        return False
    w = eigvalsh(P)
    return bool(np.all(np.minimum(np.abs(w), np.abs(w - 1)) <= atol))


def default_schedule(steps: int = 40) -> np.ndarray:
    return 2.0 ** -np.arange(1, steps + 1, dtype=np.float64)


def _normalized_retained(A: np.ndarray, tol: Tolerances):
    w, v = eigh(A)
    w = _clamp_psd_spectrum(w, tol)
    top = float(w[-1])
    if not top > 1e-300:
        raise ZeroOperator("range projection via limit needs a nonzero operator")
    mu = w / top
    return mu, v, mu > rank_cutoff(mu, tol)


def smallest_retained_ratio(A: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Smallest eigenvalue of ``A / ||A||`` above the rank cutoff."""
    mu, _, keep = _normalized_retained(A, tol)
    return float(mu[keep].min())


def range_projection_via_limit(A: np.ndarray, schedule=None, tol: Tolerances = DEFAULT_TOLERANCES):
    """Approach the range projection of ``A`` through ``(A/||A||)**r``, ``r -> 0``.

    Returns ``(P, errors)`` where ``P`` is the thresholded range projection and
    ``errors[k] = ||(A/||A||)**schedule[k] - P||_op``. In exact arithmetic
    ``errors[k] = 1 - mu_min**r_k <= r_k * |log mu_min|``.

    Eigenvalues at or below the rank cutoff are treated as exact zeros, so
    they map to 0 for every ``r`` rather than drifting towards 1.
    """
    schedule = default_schedule() if schedule is None else np.asarray(schedule, dtype=np.float64)
    if schedule.ndim != 1 or schedule.size == 0:
        raise ValueError("schedule must be a non-empty 1-d sequence")
    if np.any(schedule <= 0) or np.any(np.diff(schedule) >= 0):
        raise ValueError("schedule must be strictly decreasing positive numbers")
    mu, v, keep = _normalized_retained(A, tol)
    indicator = keep.astype(np.float64)
    P = _assemble(v, indicator)
    errors = np.empty_like(schedule)
    for k, r in enumerate(schedule):
        Ar = _assemble(v, np.where(keep, mu, 0.0) ** r * indicator)
        d = eigvalsh(Ar - P)
        errors[k] = max(abs(d[0]), abs(d[-1]))
    return P, errors
