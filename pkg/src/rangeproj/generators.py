"""Seeded construction of test inputs.

All randomness comes from :class:`SplitMix64`, a counter-based 64-bit
generator whose output depends only on the seed and the draw index. Normal
variates come from Box-Muller on its uniform stream, so every fixture is
reproducible from ``(seed, parameters)`` without relying on numpy's
bit-generator internals.

SplitMix64 (Steele, Lea, Flood 2014): the ``i``-th output (``i = 1, 2, ...``)
is ``mix64(seed + i * 0x9E3779B97F4A7C15 mod 2**64)`` with::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

Uniform doubles are ``(x >> 11) * 2**-53``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailure, InvalidK, RankTooLarge
from .functional_calculus import is_projection, numeric_rank
from .linalg_core import dagger
from .pinching import Partition, PinchingMap

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
MAX_RETRIES = 3


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def mix64(x: int) -> int:
    """Scalar SplitMix64 finalizer on a Python int."""
    return int(_mix64(np.array([x & _MASK], dtype=np.uint64))[0])


def derive_seed(seed: int, index: int) -> int:
    """Per-trial seed: ``mix64(seed ^ mix64((index + 1) * golden))``."""
    return mix64((seed & _MASK) ^ mix64(((index + 1) * _GOLDEN) & _MASK))


class SplitMix64:
    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self.counter = 0

    def next_uint64(self, size: int) -> np.ndarray:
        steps = np.arange(self.counter + 1, self.counter + size + 1, dtype=np.uint64)
        self.counter += size
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + steps * np.uint64(_GOLDEN)
            return _mix64(z)

    def uniform(self, size: int) -> np.ndarray:
        """Doubles in ``[0, 1)`` with 53 random bits."""
        return (self.next_uint64(size) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def integers(self, lo: int, hi: int, size: int | None = None):
        """Uniform integers in ``[lo, hi]`` (inclusive)."""
        m = 1 if size is None else size
        out = lo + np.floor(self.uniform(m) * (hi - lo + 1)).astype(np.int64)
        return int(out[0]) if size is None else out

    def normal(self, size: int) -> np.ndarray:
        pairs = (size + 1) // 2
        u = self.uniform(2 * pairs)
        radius = np.sqrt(-2.0 * np.log(1.0 - u[0::2]))
        angle = 2.0 * np.pi * u[1::2]
        z = np.empty(2 * pairs)
        z[0::2] = radius * np.cos(angle)
        z[1::2] = radius * np.sin(angle)
        return z[:size]

    def gaussian_matrix(self, rows: int, cols: int, field: str) -> np.ndarray:
        if field == "real":
            return self.normal(rows * cols).reshape(rows, cols)
        if field == "complex":
            z = self.normal(2 * rows * cols)
            return (z[0::2] + 1j * z[1::2]).reshape(rows, cols) / np.sqrt(2.0)
        raise ValueError(f"field must be 'real' or 'complex', got {field!r}")

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of ``0..n-1``."""
        perm = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = self.integers(0, i)
            perm[i], perm[j] = perm[j], perm[i]
        return perm


@dataclass(frozen=True)
class GenConfig:
    seed: int
    n: int
    rank: int
    field: str = "complex"
    scale: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.rank <= self.n:
            raise ValueError(f"rank must lie in [0, {self.n}], got {self.rank}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.field not in ("real", "complex"):
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")


def _retry_seeds(seed: int):
    yield seed
    for attempt in range(1, MAX_RETRIES + 1):
        yield derive_seed(seed, 10**6 + attempt)


def _factor_product(B: np.ndarray) -> np.ndarray:
    A = B @ dagger(B)
    return (A + dagger(A)) / 2


def random_psd(cfg: GenConfig) -> np.ndarray:
    """``scale * B B*`` with ``B`` an ``n x rank`` standard Gaussian matrix."""
    dtype = np.float64 if cfg.field == "real" else np.complex128
    if cfg.rank == 0:
        return np.zeros((cfg.n, cfg.n), dtype=dtype)
    for s in _retry_seeds(cfg.seed):
        B = SplitMix64(s).gaussian_matrix(cfg.n, cfg.rank, cfg.field)
        A = cfg.scale * _factor_product(B)
        if numeric_rank(A) == cfg.rank:
            return A
    raise GenerationFailure(f"could not draw a rank-{cfg.rank} matrix from seed {cfg.seed}")


def random_hermitian(seed: int, n: int, field: str = "complex") -> np.ndarray:
    """``(G + G*) / 2`` for a standard Gaussian ``n x n`` matrix ``G``; indefinite."""
    G = SplitMix64(seed).gaussian_matrix(n, n, field)
    return (G + dagger(G)) / 2


def random_pd(cfg: GenConfig, floor: float = 1e-3) -> np.ndarray:
    """Full-rank :func:`random_psd` shifted by ``floor * scale * I``."""
    if cfg.rank != cfg.n:
        raise ValueError("random_pd needs rank == n")
    return random_psd(cfg) + floor * cfg.scale * np.eye(cfg.n)


def orthonormalize(X: np.ndarray, floor: float = 1e-8) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass."""
    Q = np.array(X, dtype=X.dtype, copy=True)
    for j in range(Q.shape[1]):
        v = Q[:, j]
        original = np.linalg.norm(v)
        for _ in range(2):
            for i in range(j):
                v = v - (Q[:, i].conj() @ v) * Q[:, i]
        norm = np.linalg.norm(v)
        if not norm > floor * max(original, 1.0):
            raise GenerationFailure("columns are numerically dependent")
        Q[:, j] = v / norm
    return Q


def random_projection(cfg: GenConfig) -> np.ndarray:
    """Orthogonal projection onto a random ``rank``-dimensional subspace."""
    dtype = np.float64 if cfg.field == "real" else np.complex128
    if cfg.rank == 0:
        return np.zeros((cfg.n, cfg.n), dtype=dtype)
    for s in _retry_seeds(cfg.seed):
        X = SplitMix64(s).gaussian_matrix(cfg.n, cfg.rank, cfg.field)
        try:
            Q = orthonormalize(X)
        except GenerationFailure:
            continue
        P = _factor_product(Q)
        if np.linalg.norm(P @ P - P) <= 1e-10 * cfg.n and is_projection(P):
            return P
    raise GenerationFailure(f"could not orthonormalize a rank-{cfg.rank} frame from seed {cfg.seed}")


def random_partition(seed: int, n: int, k: int) -> Partition:
    """Shuffle ``0..n-1``; the first ``k`` go one per block, the rest land in
    uniformly chosen blocks. Blocks are ordered by their smallest index."""
    if not 1 <= k <= n:
        raise InvalidK(f"need 1 <= k <= n, got k = {k}, n = {n}")
    rng = SplitMix64(seed)
    perm = rng.permutation(n)
    blocks = [[int(perm[b])] for b in range(k)]
    if n > k:
        for idx, b in zip(perm[k:], rng.integers(0, k - 1, size=n - k)):
            blocks[b].append(int(idx))
    blocks = sorted((sorted(b) for b in blocks), key=lambda b: b[0])
    return Partition(n, tuple(tuple(b) for b in blocks))


def psd_with_block_diag_range(phi: PinchingMap, ranks, seed: int, field: str = "complex") -> np.ndarray:
    """Block-diagonal PSD matrix whose block on ``alpha_i`` has rank ``ranks[i]``.

    Its range projection lies in the pinching's subalgebra by construction.
    """
    blocks = phi.partition.blocks
    if len(ranks) != len(blocks):
        raise ValueError(f"need {len(blocks)} ranks, got {len(ranks)}")
    dtype = np.float64 if field == "real" else np.complex128
    A = np.zeros((phi.n, phi.n), dtype=dtype)
    for i, (block, rank) in enumerate(zip(blocks, ranks)):
        if not 0 <= rank <= len(block):
            raise RankTooLarge(f"block {i} has size {len(block)} but rank {rank} was requested")
        if rank:
            sub = random_psd(GenConfig(derive_seed(seed, i), len(block), int(rank), field))
            A[np.ix_(block, block)] = sub
    return A


def psd_with_strict_gap(phi: PinchingMap, seed: int, field: str = "complex",
                        noise_rank: int = 0, min_mass: float = 0.3) -> np.ndarray:
    """PSD matrix whose range projection has an off-diagonal block of
    Frobenius norm at least ``min_mass**2``.

    The core is ``x x*`` for a unit vector ``x`` with norm at least
    ``min_mass`` on each of two distinct blocks. Optional noise adds
    ``noise_rank`` directions, each supported inside a single block and
    orthogonal to ``x``, so the off-diagonal part of the range projection is
    exactly that of ``x x*``.
    """
    part = phi.partition
    if part.k < 2:
        raise InvalidK("a strict gap needs a partition with at least two blocks")
    rng = SplitMix64(seed)
    a, b = (int(i) for i in rng.permutation(part.k)[:2])
    # mass on the two chosen blocks, in [min_mass, sqrt(1 - min_mass**2)]
    lo, hi = min_mass, np.sqrt(1.0 - min_mass**2)
    mass_a = lo + (hi - lo) * float(rng.uniform(1)[0])
    mass_b = np.sqrt(1.0 - mass_a**2)
    x = np.zeros(part.n, dtype=np.float64 if field == "real" else np.complex128)
    for block, mass in ((part.blocks[a], mass_a), (part.blocks[b], mass_b)):
        g = rng.gaussian_matrix(len(block), 1, field)[:, 0]
        x[list(block)] = mass * g / np.linalg.norm(g)
    A = np.outer(x, x.conj())
    frames = {}
    for _ in range(noise_rank):
        c = rng.integers(0, part.k - 1)
        block = list(part.blocks[c])
        cols = frames.setdefault(c, [x[block]] if np.linalg.norm(x[block]) > 0 else [])
        if len(cols) >= len(block):
            continue
        cols.append(rng.gaussian_matrix(len(block), 1, field)[:, 0])
        y = np.zeros_like(x)
        y[block] = orthonormalize(np.stack(cols, axis=1))[:, -1]
        A = A + np.outer(y, y.conj())
    return (A + dagger(A)) / 2
