"""Partitions of ``{0, ..., n-1}`` and the block-diagonal pinching they define.

A partition ``alpha_1 | ... | alpha_k`` picks out the subalgebra of matrices
that vanish outside the diagonal blocks ``A[alpha_i]``. The pinching keeps
exactly those entries and zeroes the rest; it is the trace-preserving
conditional expectation onto that subalgebra. Index sets need not be
contiguous, so the result is always kept in ambient ``n x n`` coordinates.

Indices are 0-based everywhere in the API. The text syntax (``"1,3|2,4"``)
used at the command line is 1-based and is translated by
:func:`parse_partition` / :func:`format_partition` only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, ParseError

IndexSet = Tuple[int, ...]


def index_set(indices: Sequence[int], n: int) -> IndexSet:
    """Validate and normalize a non-empty set of indices in ``[0, n)``."""
    idx = tuple(sorted(int(i) for i in indices))
    if not idx:
        raise ValueError("index set must be non-empty")
    if len(set(idx)) != len(idx):
        raise ValueError(f"index set {idx} has duplicates")
    if idx[0] < 0 or idx[-1] >= n:
        raise IndexOutOfRange(f"index set {idx} not contained in [0, {n})")
    return idx


@dataclass(frozen=True)
class Partition:
    n: int
    blocks: Tuple[IndexSet, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("partition dimension must be >= 1")
        blocks = tuple(index_set(b, self.n) for b in self.blocks)
        if not blocks:
            raise ValueError("partition needs at least one block")
        seen = [i for b in blocks for i in b]
        if len(seen) != len(set(seen)):
            raise ValueError("partition blocks overlap")
        if len(seen) != self.n:
            missing = sorted(set(range(self.n)) - set(seen))
            raise ValueError(f"partition does not cover indices {missing}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def labels(self) -> np.ndarray:
        """Block number of every index."""
        lab = np.empty(self.n, dtype=np.intp)
        for b, block in enumerate(self.blocks):
            lab[list(block)] = b
        return lab

    def __str__(self):
        return format_partition(self)


@dataclass(frozen=True)
class PinchingMap:
    partition: Partition

    @property
    def n(self) -> int:
        return self.partition.n

    def mask(self) -> np.ndarray:
        lab = self.partition.labels()
        return lab[:, None] == lab[None, :]

    def __call__(self, A: np.ndarray) -> np.ndarray:
        return apply_pinching(self, A)


def single_block(n: int) -> Partition:
    return Partition(n, (tuple(range(n)),))


def singletons(n: int) -> Partition:
    return Partition(n, tuple((i,) for i in range(n)))


def complement(alpha: Sequence[int], n: int) -> IndexSet:
    alpha = set(alpha)
    return tuple(i for i in range(n) if i not in alpha)


def two_block(alpha: Sequence[int], n: int) -> Partition:
    """The partition ``{alpha, alpha^c}``."""
    return Partition(n, (tuple(alpha), complement(alpha, n)))


def parse_partition(text: str, n: int | None = None) -> Partition:
    """Parse the 1-based ``"1,3|2,4"`` syntax into a 0-based :class:`Partition`.

    If ``n`` is omitted it is taken to be the largest index mentioned.
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty partition string")
    blocks = []
    for chunk in text.split("|"):
        items = [s.strip() for s in chunk.split(",")]
        if not all(items):
            raise ParseError(f"empty block or index in partition {text!r}")
        try:
            block = [int(s) for s in items]
        except ValueError as exc:
            raise ParseError(f"non-integer index in partition {text!r}") from exc
        blocks.append(block)
    flat = [i for b in blocks for i in b]
    if min(flat) < 1:
        raise ParseError(f"partition indices are 1-based, got {min(flat)}")
    if len(flat) != len(set(flat)):
        raise ParseError(f"duplicate index in partition {text!r}")
    if n is None:
        n = max(flat)
    try:
        return Partition(n, tuple(tuple(i - 1 for i in b) for b in blocks))
    except (ValueError, IndexOutOfRange) as exc:
        raise ParseError(f"invalid partition {text!r} for n = {n}: {exc}") from exc


def format_partition(partition: Partition) -> str:
    return "|".join(",".join(str(i + 1) for i in b) for b in partition.blocks)


def _check_dim(phi: PinchingMap, A: np.ndarray) -> None:
    if A.shape != (phi.n, phi.n):
        raise DimensionMismatch(f"pinching on n = {phi.n} applied to matrix of shape {A.shape}")


def extract_block(A: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    """The submatrix ``A[rows, cols]``; ``A[alpha]`` when ``rows == cols``."""
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    for idx, size in ((rows, A.shape[0]), (cols, A.shape[1])):
        if idx.size and (idx.min() < 0 or idx.max() >= size):
            raise IndexOutOfRange(f"indices {idx.tolist()} out of range for size {size}")
    return A[np.ix_(rows, cols)]


def apply_pinching(phi: PinchingMap, A: np.ndarray) -> np.ndarray:
    _check_dim(phi, A)
    return np.where(phi.mask(), A, 0)


def pinching_via_unitaries(phi: PinchingMap, A: np.ndarray) -> np.ndarray:
    """Pinching computed as an average of diagonal phase conjugations.

    ``(1/k) sum_j U_j A U_j*`` with ``(U_j)_mm = exp(2 pi i j b(m) / k)`` and
    ``b(m)`` the block of ``m``. Independent of :func:`apply_pinching`; used
    as its oracle.
    """
    _check_dim(phi, A)
    k = phi.partition.k
    lab = phi.partition.labels()
    acc = np.zeros(A.shape, dtype=np.complex128)
    for j in range(k):
        d = np.exp(2j * np.pi * j * lab / k)
        acc += d[:, None] * A * d.conj()[None, :]
    out = acc / k
    out = (out + out.conj().T) / 2
    if not np.iscomplexobj(A):
        out = out.real.copy()
    return out


def is_in_subalgebra(A: np.ndarray, phi: PinchingMap, eps: float):
    """Return ``(offdiag <= eps, offdiag)`` with ``offdiag`` the Frobenius
    norm of the entries outside the diagonal blocks."""
    _check_dim(phi, A)
    offdiag = float(np.linalg.norm(np.where(phi.mask(), 0, A)))
    return offdiag <= eps, offdiag
