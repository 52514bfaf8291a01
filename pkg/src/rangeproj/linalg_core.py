"""Dense Hermitian matrix helpers: validation, eigendecomposition, norms and
the Loewner order.

Matrices are plain ``numpy.ndarray`` objects. A matrix that went through
:func:`make_hermitian` is exactly Hermitian; everything downstream assumes
that and does not re-check. Real input stays real (``float64``), so the
real-entry code path never touches complex arithmetic.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NonHermitianInput,
    NonSquare,
    ParseError,
)


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds used by every check.

    :param rank_rel: relative eigenvalue cutoff for the numeric rank.
    :param loewner_slack: allowed negative-eigenvalue slack, relative to the
        comparison scale.
    :param equality_eps: classification threshold (times ``n``) for the
        Frobenius defects used to detect equality cases.
    :param hermicity_tol: largest relative ``||A - A*||_F`` accepted on input.
    :param clamp_tol: negative eigenvalues no larger than this (relative to
        ``max(1, ||A||_op)``) are treated as round-off and clamped to zero.
    """

    rank_rel: float = 1e-10
    loewner_slack: float = 1e-9
    equality_eps: float = 1e-8
    hermicity_tol: float = 1e-12
    clamp_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rank_rel", "loewner_slack", "equality_eps", "hermicity_tol", "clamp_tol"):
            value = getattr(self, name)
            if not (value > 0 and np.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.clamp_tol > self.loewner_slack:
            raise ValueError("clamp_tol must not exceed loewner_slack")


DEFAULT_TOLERANCES = Tolerances()


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    vectors: np.ndarray  # columns are orthonormal eigenvectors


@dataclass(frozen=True)
class LoewnerResult:
    holds: bool
    min_eigenvalue_of_difference: float
    scale: float


def _check_square(A: np.ndarray) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise NonSquare(f"expected a non-empty square matrix, got shape {A.shape}")


def _check_same_shape(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")


def dagger(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return A.conj().T


def make_hermitian(raw, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Validate ``raw`` and return its exactly Hermitian part.

    Asymmetry up to ``tol.hermicity_tol * max(1, ||raw||_F)`` (Frobenius) is
    removed by symmetrization; anything larger raises
    :class:`NonHermitianInput`.

    >>> make_hermitian([[1, 1e-13], [0, 1]])
    array([[1.e+00, 5.e-14],
           [5.e-14, 1.e+00]])
    """
    A = np.asarray(raw)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise NonSquare(f"expected a non-empty square matrix, got shape {A.shape}")
    A = A.astype(np.complex128 if np.iscomplexobj(A) else np.float64)
    if not np.all(np.isfinite(A)):
        raise NonHermitianInput("matrix has non-finite entries")
    deviation = np.linalg.norm(A - dagger(A))
    if deviation > tol.hermicity_tol * max(1.0, np.linalg.norm(A)):
        raise NonHermitianInput(f"||A - A*||_F = {deviation:.3e} exceeds tolerance")
    return (A + dagger(A)) / 2


def eigh(A: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    _check_square(A)
    try:
        w, v = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return EigenDecomposition(w, v)


def eigvalsh(A: np.ndarray) -> np.ndarray:
    _check_square(A)
    try:
        return np.linalg.eigvalsh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def reconstruct(decomp: EigenDecomposition) -> np.ndarray:
    w, v = decomp
    return (v * w) @ dagger(v)


def trace(A: np.ndarray) -> float:
    return float(np.real(np.trace(A)))


def frobenius_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A))


def operator_norm(A: np.ndarray) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix."""
    w = eigvalsh(A)
    return float(max(abs(w[0]), abs(w[-1])))


def is_psd(A: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    w = eigvalsh(A)
    lo, hi = float(w[0]), float(w[-1])
    return lo >= -tol.loewner_slack * max(1.0, hi, -lo)


def loewner_leq(A: np.ndarray, B: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> LoewnerResult:
    """Test ``A <= B`` in the Loewner order via ``lambda_min(B - A)``."""
    _check_square(A)
    _check_same_shape(A, B)
    lam = float(eigvalsh(B - A)[0])
    scale = max(1.0, operator_norm(A), operator_norm(B))
    return LoewnerResult(lam >= -tol.loewner_slack * scale, lam, scale)


# --- matrix file format -----------------------------------------------------

def matrix_from_json(obj, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Build a Hermitian matrix from ``{"n": int, "real": [[..]], "imag": [[..]]}``.

    ``imag`` is optional. A file without it yields a real matrix.
    """
    if not isinstance(obj, dict) or "n" not in obj or "real" not in obj:
        raise ParseError('matrix JSON needs keys "n" and "real"')
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f'"n" must be a positive integer, got {n!r}')
    try:
        re = np.array(obj["real"], dtype=np.float64)
        im = np.array(obj["imag"], dtype=np.float64) if obj.get("imag") is not None else None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix entries are not numeric: {exc}") from exc
    if re.shape != (n, n) or (im is not None and im.shape != (n, n)):
        raise ParseError(f"matrix arrays must be {n}x{n}")
    raw = re if im is None else re + 1j * im
    return make_hermitian(raw, tol)


def matrix_to_json(A: np.ndarray) -> dict:
    A = np.asarray(A)
    out = {"n": int(A.shape[0]), "real": np.real(A).tolist()}
    if np.iscomplexobj(A):
        out["imag"] = np.imag(A).tolist()
    return out


def load_matrix(path, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read matrix file {path}: {exc}") from exc
    return matrix_from_json(obj, tol)


def save_matrix(path, A: np.ndarray) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_json(A), fh)
