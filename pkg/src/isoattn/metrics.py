"""Classification scores, channel activation mapping, equivariance tracking."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attention import equivariance_report
from .groups import FiniteGroup
from .numerics import Rng, as_matrix, softmax_rows

_ZERO_ROW_TOL = 1e-12


def _check_binary(values, name: str) -> np.ndarray:
    arr = np.asarray(values).reshape(-1)
    if arr.size == 0:
        raise ValueError(f"{name}: empty input")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name}: entries must be 0 or 1")
    return arr.astype(np.int64)


def accuracy(preds, labels) -> float:
    preds = _check_binary(preds, "accuracy")
    labels = _check_binary(labels, "accuracy")
    if preds.shape != labels.shape:
        raise ValueError(f"accuracy: shapes differ, {preds.shape} vs {labels.shape}")
    return float((preds == labels).mean())


def f1(preds, labels) -> float:
    """Binary F1 = 2 TP / (2 TP + FP + FN); 0 when that denominator is 0."""
    preds = _check_binary(preds, "f1")
    labels = _check_binary(labels, "f1")
    if preds.shape != labels.shape:
        raise ValueError(f"f1: shapes differ, {preds.shape} vs {labels.shape}")
    tp = int(((preds == 1) & (labels == 1)).sum())
    fp = int(((preds == 1) & (labels == 0)).sum())
    fn = int(((preds == 0) & (labels == 1)).sum())
    denom = 2 * tp + fp + fn
    return 2.0 * tp / denom if denom else 0.0


@dataclass(frozen=True)
class ActivationRow:
    """Mean attention mass of one channel over the two window sets.

    For one window, the channel's mass is how much attention the active rows
    (nonzero projected query) place on the active columns (nonzero projected
    key), averaged over those rows; each such row mass lies in [0, 1] because
    the weight matrix is row-stochastic. A channel whose projection kills
    every row of every window in a set has no mass there and is reported
    absent (None) instead of dividing by nothing. The ratio is
    motif / max(background, 1e-12) when both sides are present.
    """

    label: str
    motif_mass: float | None
    background_mass: float | None
    ratio: float | None


@dataclass(frozen=True)
class ActivationReport:
    rows: tuple[ActivationRow, ...]


def _window_features(w):
    return as_matrix(w.features if hasattr(w, "features") else w)


def activation_mapping(layer, motif_windows, background_windows) -> ActivationReport:
    """Per-channel attention mass on motif versus background windows.

    Uses the pre-variant channel weights: each channel attends with
    softmax((Pq)(Pk)^T / sqrt(d)). Rows where the projected query vanishes
    carry no channel signal and are excluded, and the mass of a surviving row
    is the attention it pays to columns whose projected key survives; windows
    with no valid rows are excluded; channels degenerate on a whole set come
    back as None.
    """
    motifs = [_window_features(w) for w in motif_windows]
    backgrounds = [_window_features(w) for w in background_windows]
    if not motifs or not backgrounds:
        raise ValueError("activation_mapping: both window sets must be non-empty")
    scale = math.sqrt(layer.feature_dim)

    def set_mass(proj, windows) -> float | None:
        masses = []
        for x in windows:
            q = x @ layer.w_q
            k = x @ layer.w_k
            qp = q if proj is None else proj @ q
            kp = k if proj is None else proj @ k
            valid_rows = np.abs(qp).max(axis=1) > _ZERO_ROW_TOL
            valid_cols = np.abs(kp).max(axis=1) > _ZERO_ROW_TOL
            if not valid_rows.any() or not valid_cols.any():
                continue
            wts = softmax_rows((qp @ kp.T) / scale)
            row_masses = wts[np.ix_(valid_rows, valid_cols)].sum(axis=1)
            masses.append(float(row_masses.mean()))
        return float(np.mean(masses)) if masses else None

    rows = []
    for item in layer.projectors.items:
        proj = item.projector
        motif_mass = set_mass(proj, motifs)
        background_mass = set_mass(proj, backgrounds)
        ratio = None
        if motif_mass is not None and background_mass is not None:
            ratio = motif_mass / max(background_mass, 1e-12)
        rows.append(ActivationRow(item.irrep.label, motif_mass, background_mass, ratio))
    return ActivationReport(rows=tuple(rows))


def equivariance_tracker(layer, g: FiniteGroup, rng: Rng, trials: int) -> float:
    """Max equivariance error of the layer's window map over the whole group
    and seeded random inputs. Order-independent: it is a max over the set."""
    report = equivariance_report(layer.window_map, g, layer.feature_dim, trials, rng)
    return report.max_error
