"""Scaled dot-product attention and its symmetry-channel decompositions.

Plain attention on a window is softmax_rows(q k^T / sqrt(d)) v. Because
conjugating a matrix by a permutation commutes with the row softmax, this map
is equivariant under the window action of any permutation group when q, k, v
all come from the same window.

Two decompositions split it into one channel per isotypic projector P:

    post: channel = P @ attention(q, k, v); the channels share the plain
          attention weights and sum exactly to plain attention.
    pre:  channel = softmax_rows((Pq)(Pk)^T / sqrt(d)) @ (Pv); the total is
          defined as the channel sum. Each channel is itself equivariant,
          but the total is not numerically equal to plain attention.

Channels whose irrep does not occur in the window carry a zero projector:
their weights are uniform rows and their output is exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup, Permutation, permute_rows
from .irreps import ProjectorSet
from .numerics import Matrix, Rng, as_matrix, frobenius_sq, rand_matrix, softmax_rows


def _check_qkv(q, k, v) -> tuple[Matrix, Matrix, Matrix]:
    q, k, v = as_matrix(q), as_matrix(k), as_matrix(v)
    if not (q.shape == k.shape == v.shape):
        raise ValueError(f"attention: q/k/v shapes differ: {q.shape}, {k.shape}, {v.shape}")
    return q, k, v


def attention_weights(q: Matrix, k: Matrix) -> Matrix:
    """Row-stochastic weights softmax_rows(q k^T / sqrt(d))."""
    d = q.shape[1]
    return softmax_rows((q @ k.T) / math.sqrt(d))


def attention(q, k, v) -> Matrix:
    q, k, v = _check_qkv(q, k, v)
    return attention_weights(q, k) @ v


@dataclass(frozen=True, eq=False)
class Channel:
    label: str
    output: Matrix
    weights: Matrix


@dataclass(frozen=True, eq=False)
class DecompositionOutput:
    total: Matrix
    channels: tuple[Channel, ...]


def _check_window(q: Matrix, ps: ProjectorSet) -> None:
    if q.shape[0] != ps.window:
        raise ValueError(f"decomposition: window is {ps.window}, input has {q.shape[0]} rows")


def decompose_post(q, k, v, ps: ProjectorSet) -> DecompositionOutput:
    """Project the plain attention output onto each isotypic component."""
    q, k, v = _check_qkv(q, k, v)
    _check_window(q, ps)
    weights = attention_weights(q, k)
    total = weights @ v
    channels = tuple(Channel(item.irrep.label, item.projector @ total, weights)
                     for item in ps.items)
    return DecompositionOutput(total=total, channels=channels)


def decompose_pre(q, k, v, ps: ProjectorSet) -> DecompositionOutput:
    """Run attention inside each isotypic component and sum the results."""
    q, k, v = _check_qkv(q, k, v)
    _check_window(q, ps)
    channels = []
    total = np.zeros_like(v)
    for item in ps.items:
        p = item.projector
        wts = attention_weights(p @ q, p @ k)
        out = wts @ (p @ v)
        channels.append(Channel(item.irrep.label, out, wts))
        total = total + out
    return DecompositionOutput(total=total, channels=tuple(channels))


def equivariance_error(fn, x, h: Permutation) -> float:
    """Squared Frobenius norm of fn(action(h) x) - action(h) fn(x).

    fn must map window-by-feature matrices to matrices of the same shape.
    """
    x = as_matrix(x)
    left = fn(permute_rows(h, x))
    base = fn(x)
    if np.asarray(base).shape != x.shape or np.asarray(left).shape != x.shape:
        raise ValueError("equivariance_error: fn changed the window shape")
    return frobenius_sq(left - permute_rows(h, base))


@dataclass(frozen=True)
class EquivarianceReport:
    max_error: float
    mean_error: float
    trials: int
    group_order: int


def equivariance_report(fn, g: FiniteGroup, feature_dim: int, trials: int,
                        rng: Rng) -> EquivarianceReport:
    """Exhaustive-in-h, sampled-in-x equivariance check of a window map."""
    if trials < 1:
        raise ValueError(f"equivariance_report: trials must be >= 1, got {trials}")
    errors = []
    for _ in range(trials):
        x = rand_matrix(rng, g.degree, feature_dim, 1.0)
        for h in g.elements:
            errors.append(equivariance_error(fn, x, h))
    return EquivarianceReport(max_error=max(errors),
                              mean_error=float(np.mean(errors)),
                              trials=trials, group_order=g.order)
