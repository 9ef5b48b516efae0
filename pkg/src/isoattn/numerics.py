"""Dense float64 matrix kernels and the deterministic seeded generator.

Everything downstream works on plain 2-D numpy arrays in double precision.
The helpers here add the shape and finiteness checks the rest of the package
relies on, so callers can assume clean inputs after any public call.
"""

from __future__ import annotations

import numpy as np

# Public alias used in signatures: a 2-D float64 ndarray.
Matrix = np.ndarray

_UINT64_MAX = 2**64 - 1


def as_matrix(values) -> Matrix:
    """Coerce to a 2-D float64 array, rejecting anything of other rank."""
    m = np.asarray(values, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    return m


def matmul(a, b) -> Matrix:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul: inner dimensions differ, {a.shape} x {b.shape}")
    return a @ b


def transpose(m) -> Matrix:
    return as_matrix(m).T


def add(a, b) -> Matrix:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"add: shapes differ, {a.shape} vs {b.shape}")
    return a + b


def sub(a, b) -> Matrix:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"sub: shapes differ, {a.shape} vs {b.shape}")
    return a - b


def scale(m, c: float) -> Matrix:
    return as_matrix(m) * float(c)


def frobenius_sq(m) -> float:
    """Sum of squared entries (squared Frobenius norm)."""
    m = np.asarray(m, dtype=np.float64)
    return float((m * m).sum())


def softmax_rows(m) -> Matrix:
    """Row-wise softmax with per-row max subtraction.

    Safe for entries anywhere in the finite float64 range; each output row is
    nonnegative and sums to 1. Non-finite input is rejected.
    """
    m = as_matrix(m)
    if not np.isfinite(m).all():
        raise ValueError("softmax_rows: input contains NaN or Inf")
    shifted = m - m.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_rows_vjp(weights: Matrix, grad: Matrix) -> Matrix:
    """Backward of softmax_rows in closed form.

    Per row p with upstream gradient g: p * (g - <g, p>), which is the action
    of the Jacobian diag(p) - p p^T.
    """
    weights = as_matrix(weights)
    grad = as_matrix(grad)
    if weights.shape != grad.shape:
        raise ValueError(f"softmax_rows_vjp: shapes differ, {weights.shape} vs {grad.shape}")
    dot = (grad * weights).sum(axis=1, keepdims=True)
    return weights * (grad - dot)


class Rng:
    """Deterministic random stream with a counter-based (Philox) core.

    The same 64-bit unsigned seed always reproduces the same byte stream,
    independent of platform. `derive(tag)` opens an independent stream
    addressed by (seed, tag) without consuming from this one.
    """

    def __init__(self, seed: int, _path: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed <= _UINT64_MAX:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._path = _path
        ss = np.random.SeedSequence(entropy=seed, spawn_key=_path)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def derive(self, tag: int) -> "Rng":
        return Rng(self.seed, self._path + (int(tag),))

    def uniform(self, low: float, high: float, shape=None):
        return self._gen.uniform(low, high, shape)

    def integers(self, n: int, size=None):
        """Uniform integers in [0, n)."""
        if n < 1:
            raise ValueError(f"integers: need n >= 1, got {n}")
        return self._gen.integers(0, n, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)


def rand_matrix(rng: Rng, rows: int, cols: int, scale: float = 1.0) -> Matrix:
    """Matrix with entries drawn uniformly from [-scale, +scale]."""
    if rows < 1 or cols < 1:
        raise ValueError(f"rand_matrix: need positive dimensions, got {rows}x{cols}")
    if not scale > 0:
        raise ValueError(f"rand_matrix: scale must be positive, got {scale}")
    return rng.uniform(-scale, scale, (rows, cols))
