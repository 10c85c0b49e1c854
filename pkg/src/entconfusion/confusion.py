"""Learning by confusion: relabel, train across a gamma sweep, read off the peak.

For a trial transition point ``gamma`` every dataset point with
``gamma_i <= gamma`` gets label 0 and the rest label 1.  A classifier trained
on that labeling is most accurate when the trial point coincides with a real
change in the data, which shows up as the middle peak of a W-shaped
accuracy curve.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import ffnn
from .errors import DataError, DomainError, NoPeakError
from .ffnn import TrainConfig
from .qstate import DensityMatrix
from .trajectory import (
    CurveSpec,
    LabeledDataset,
    classification_dataset,
    curve_point_at,
    two_param_dataset,
)

DEFAULT_SPLIT = 0.7
DEFAULT_MARGIN = 0.1
FLAT_THRESHOLD = 0.01


@dataclass
class ConfusionSplit:
    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    gamma: float
    train_idx: np.ndarray
    test_idx: np.ndarray


def confusion_labels(gammas: np.ndarray, gamma: float) -> np.ndarray:
    return np.where(np.asarray(gammas) <= gamma, 0, 1)


def label_split(data: LabeledDataset, gamma: float, split_ratio: float = DEFAULT_SPLIT,
                rng: np.random.Generator | None = None) -> ConfusionSplit:
    """Random train/test partition with confusion labels at ``gamma``."""
    if not 0 < split_ratio < 1:
        raise DataError(f"split_ratio must lie in (0, 1), got {split_ratio}")
    rng = np.random.default_rng() if rng is None else rng
    n = len(data)
    n_train = int(round(split_ratio * n))
    if n_train == 0 or n_train == n:
        raise DataError(f"split ratio {split_ratio} leaves one side empty for N={n}")
    order = rng.permutation(n)
    tr, te = np.sort(order[:n_train]), np.sort(order[n_train:])
    y = confusion_labels(data.gammas, gamma)
    return ConfusionSplit(data.probs[tr], y[tr], data.probs[te], y[te], float(gamma), tr, te)


def ideal_wshape(gamma, gamma_i: float, gamma_ii: float, gamma_crit: float):
    """Accuracy of a classifier that cannot tell points within one phase apart."""
    if not gamma_i < gamma_crit < gamma_ii:
        raise DomainError(f"need gamma_I < gamma_crit < gamma_II, got {gamma_i}, {gamma_crit}, {gamma_ii}")
    g = np.asarray(gamma, dtype=float)
    if np.any(g < gamma_i - 1e-12) or np.any(g > gamma_ii + 1e-12):
        raise DomainError("gamma outside [gamma_I, gamma_II]")
    width = gamma_ii - gamma_i
    left = np.minimum(gamma_crit - g, g - gamma_i)
    right = np.minimum(g - gamma_crit, gamma_ii - g)
    out = 1 - np.where(g <= gamma_crit, left, right) / width
    return float(out) if out.ndim == 0 else out


@dataclass
class WShapeCurve:
    gammas: np.ndarray
    accuracy: np.ndarray
    acc_min: np.ndarray
    acc_max: np.ndarray
    acc_std: np.ndarray
    repeats: int
    raw: np.ndarray  # (len(gammas), repeats)
    critical: float | None = None
    critical_error: str | None = None
    method: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gamma", "acc_mean", "acc_min", "acc_max"])
        for row in zip(self.gammas, self.accuracy, self.acc_min, self.acc_max):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_raw(cls, gammas, raw: np.ndarray, margin_fraction: float = DEFAULT_MARGIN) -> "WShapeCurve":
        raw = np.asarray(raw, dtype=float)
        curve = cls(np.asarray(gammas, dtype=float), raw.mean(axis=1), raw.min(axis=1), raw.max(axis=1),
                    raw.std(axis=1), raw.shape[1], raw)
        try:
            curve.critical = find_critical(curve, margin_fraction)
        except (NoPeakError, DataError) as exc:
            curve.critical_error = str(exc)
        curve.method = {"smoothing_window": 3, "margin_fraction": margin_fraction}
        return curve


def _smooth3(y: np.ndarray) -> np.ndarray:
    """Centered moving average over 3 points, repeating the end values as padding.

    Padding by repetition keeps every output a 3-point average; averaging only
    two points at the ends would favour an end point sitting next to a peak.
    """
    pad = np.pad(y, 1, mode="edge")
    return (pad[:-2] + pad[1:-1] + pad[2:]) / 3


def find_critical(curve, margin_fraction: float = DEFAULT_MARGIN) -> float:
    """Location of the interior accuracy peak.

    ``curve`` is a :class:`WShapeCurve` or a ``(gammas, accuracy)`` pair.  The
    outer ``margin_fraction`` of the grid is dropped on both sides, the
    remaining means are smoothed with a 3-point moving average, and the
    interior maximum is returned (ties go to the point nearest the grid
    middle).  Raises :class:`NoPeakError` for a flat interior or when the
    maximum sits on the edge of the trimmed window.
    """
    if isinstance(curve, WShapeCurve):
        gammas, acc = curve.gammas, curve.accuracy
    else:
        gammas, acc = (np.asarray(a, dtype=float) for a in curve)
    if len(gammas) < 7:
        raise DataError(f"find_critical needs at least 7 grid points, got {len(gammas)}")
    if not 0 <= margin_fraction <= 0.3:
        raise DomainError(f"margin_fraction must be in [0, 0.3], got {margin_fraction}")
    n = len(gammas)
    cut = int(round(margin_fraction * n))
    lo, hi = cut, n - cut
    smooth = _smooth3(np.asarray(acc, dtype=float)[lo:hi])
    if smooth.max() - smooth.min() < FLAT_THRESHOLD:
        raise NoPeakError(f"interior accuracy is flat (spread {smooth.max() - smooth.min():.4f})")
    best = np.flatnonzero(np.isclose(smooth, smooth.max(), rtol=0, atol=1e-12))
    mid = (n - 1) / 2
    k = best[np.argmin(np.abs(best + lo - mid))]
    if k == 0 or k == len(smooth) - 1:
        raise NoPeakError(f"accuracy maximum lies on the edge of the interior window (gamma={gammas[k + lo]:.4g})")
    return float(gammas[k + lo])


def _run_task(args) -> float:
    data, gamma, cfg, split, rng, crossed = args
    split_rng, init_rng, train_rng = rng.spawn(3)
    s = label_split(data, gamma, split, split_rng)
    params = ffnn.init(data.probs.shape[1], cfg.hidden_size, init_rng)
    res = ffnn.train(params, s.x_train, s.y_train, cfg, s.x_test, s.y_test, train_rng, crossed=crossed)
    return res.best_accuracy


def sweep(
    data: LabeledDataset | Sequence[LabeledDataset],
    grid: Sequence[float],
    cfg: TrainConfig,
    repeats: int,
    rng: np.random.Generator,
    split: float = DEFAULT_SPLIT,
    margin_fraction: float = DEFAULT_MARGIN,
    workers: int = 1,
    crossed: bool = True,
) -> WShapeCurve:
    """Best test accuracy for every (gamma, repeat) and the extracted peak.

    Each repeat uses a fresh split and initialization.  Passing a list of
    datasets uses dataset ``r % len(list)`` for repeat ``r`` (for bootstrapped
    data).  ``crossed`` selects the output wiring used in training (label
    ``r`` paired with ``F^{1-r}``); accuracy is invariant under the choice.
    Results do not depend on ``workers``.
    """
    datasets = [data] if isinstance(data, LabeledDataset) else list(data)
    if repeats < 1:
        raise DataError("repeats must be >= 1")
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise DataError("gamma grid must be strictly increasing")
    task_rngs = rng.spawn(len(grid) * repeats)
    tasks = [
        (datasets[r % len(datasets)], float(g), cfg, split, task_rngs[i * repeats + r], crossed)
        for i, g in enumerate(grid)
        for r in range(repeats)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_run_task(t) for t in tasks]
    raw = np.array(results).reshape(len(grid), repeats)
    return WShapeCurve.from_raw(grid, raw, margin_fraction)


def default_grid(data: LabeledDataset, points: int = 21) -> np.ndarray:
    return np.linspace(data.gammas.min(), data.gammas.max(), points)


@dataclass
class PhaseDiagram:
    family: str
    curves: list[tuple[CurveSpec, WShapeCurve]]
    critical_points: list[np.ndarray | None]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["curve_id", "param1", "param2", "gamma_star"])
        for (spec, curve), pt in zip(self.curves, self.critical_points):
            if pt is None:
                w.writerow([spec.label, "", "", ""])
            else:
                w.writerow([spec.label, repr(float(pt[0])), repr(float(pt[1])), repr(float(curve.critical))])
        return buf.getvalue()

    def heatmap_csv(self) -> str:
        """Long format: one row per (curve, gamma) with the mean accuracy."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["curve_id", "gamma", "param1", "param2", "acc_mean"])
        for spec, curve in self.curves:
            for g, a in zip(curve.gammas, curve.accuracy):
                p1, p2 = curve_point_at(spec, float(g))
                w.writerow([spec.label, repr(float(g)), repr(float(p1)), repr(float(p2)), repr(float(a))])
        return buf.getvalue()


def phase_diagram(
    family: str,
    curve_specs: Sequence[CurveSpec],
    cfg: TrainConfig,
    repeats: int,
    rng: np.random.Generator,
    grid_points: int = 15,
    n: int | None = None,
    workers: int = 1,
    margin_fraction: float = DEFAULT_MARGIN,
) -> PhaseDiagram:
    """W shape on each curve and the channel parameters at its peak.

    A curve without a peak gets ``None`` as its critical point.
    """
    curves, points = [], []
    for spec, crng in zip(curve_specs, rng.spawn(len(curve_specs))):
        if spec.family != family:
            raise DomainError(f"curve {spec.label} does not belong to family {family!r}")
        data_rng, sweep_rng = crng.spawn(2)
        size = n or cfg.data_size or spec.samples
        data = two_param_dataset(spec, size, data_rng)
        curve = sweep(data, np.linspace(0, 1, grid_points), cfg, repeats, sweep_rng,
                      margin_fraction=margin_fraction, workers=workers)
        curves.append((spec, curve))
        points.append(None if curve.critical is None else curve_point_at(spec, curve.critical))
    return PhaseDiagram(family, curves, points)


@dataclass
class Verdict:
    verdict: str  # "entangled", "separable" or "inconclusive"
    lambda_star: float | None
    curve: WShapeCurve

    def to_json(self, curve_path: str | None = None) -> str:
        return json.dumps({"verdict": self.verdict, "lambda_star": self.lambda_star, "curve": curve_path})


def verdict_from_curve(curve: WShapeCurve) -> Verdict:
    if curve.critical is None:
        return Verdict("inconclusive", None, curve)
    return Verdict("entangled" if curve.critical > 0.5 else "separable", curve.critical, curve)


def classify(
    rho_in: DensityMatrix,
    cfg: TrainConfig,
    repeats: int,
    rng: np.random.Generator,
    n: int | None = None,
    grid_points: int = 21,
    workers: int = 1,
    margin_fraction: float = DEFAULT_MARGIN,
) -> Verdict:
    """Entangled iff the confusion peak on the thermal path lies above ``lambda = 1/2``."""
    data_rng, sweep_rng = rng.spawn(2)
    data = classification_dataset(rho_in, n or cfg.data_size or 1400, data_rng)
    curve = sweep(data, np.linspace(0.1, 0.9, grid_points), cfg, repeats, sweep_rng,
                  margin_fraction=margin_fraction, workers=workers)
    return verdict_from_curve(curve)
