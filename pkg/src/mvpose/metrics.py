"""Pose evaluation metrics: ADD, ADD-S, rotation/translation error, AUC of ADD-S.

Numpy implementations for evaluation; the corresponding training losses live
in :mod:`mvpose.losses`.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import spatial

from .exceptions import InvariantViolation

# Rotation-error histogram: 3 degree bins covering [0, 180].
ROT_HIST_BIN_DEG = 3.0
MODEL_POINT_SEED = 12345  # fixed subsampling seed for reproducible ADD values
AUC_MAX_THRESHOLD_M = 0.1


@dataclass(frozen=True)
class ModelPoints:
    """3D model vertices (meters) used by the ADD family of metrics."""

    points: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        if pts.shape[0] < 4:
            raise InvariantViolation(f"need >= 4 model points, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise InvariantViolation("model points must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def diameter(self) -> float:
        """Largest pairwise point distance."""
        d = spatial.distance.cdist(self.points, self.points)
        return float(d.max())


def _transform(pts, rotation, translation):
    return pts @ np.asarray(rotation, dtype=np.float64).T + np.asarray(translation, dtype=np.float64)


def add_metric(r_pred, t_pred, r_gt, t_gt, model: ModelPoints) -> float:
    """Mean distance between corresponding transformed model points."""
    pts_pred = _transform(model.points, r_pred, t_pred)
    pts_gt = _transform(model.points, r_gt, t_gt)
    return float(np.linalg.norm(pts_pred - pts_gt, axis=1).mean())


def add_s_metric(r_pred, t_pred, r_gt, t_gt, model: ModelPoints) -> float:
    """Mean nearest-neighbor distance from gt-transformed to pred-transformed points."""
    pts_pred = _transform(model.points, r_pred, t_pred)
    pts_gt = _transform(model.points, r_gt, t_gt)
    nn = spatial.cKDTree(pts_pred)
    dists, _ = nn.query(pts_gt, k=1)
    return float(dists.mean())


def rotation_error_deg(r_pred, r_gt) -> float:
    """Geodesic rotation error in degrees."""
    r_pred = np.asarray(r_pred, dtype=np.float64)
    r_gt = np.asarray(r_gt, dtype=np.float64)
    trace = np.trace(r_gt @ r_pred.T)
    arg = np.clip((trace - 1.0) / 2.0, -1.0, 1.0)
    return float(np.degrees(np.arccos(arg)))


def rotation_translation_error(r_pred, t_pred, r_gt, t_gt):
    """(rotation error in degrees, translation L2 error in meters)."""
    t_err = float(np.linalg.norm(np.asarray(t_pred, dtype=np.float64) - np.asarray(t_gt, dtype=np.float64)))
    return rotation_error_deg(r_pred, r_gt), t_err


def auc_of_add_s(errors, max_threshold=AUC_MAX_THRESHOLD_M) -> float:
    """Exact area under the accuracy-vs-threshold step curve, normalized to [0, 1].

    accuracy(tau) = fraction of errors <= tau; integrating the indicator of
    each error over tau in [0, T] gives max(0, T - e), hence
    auc = sum(max(0, T - e_i)) / (n * T).
    """
    errors = np.asarray(errors, dtype=np.float64).reshape(-1)
    if errors.size == 0:
        raise InvariantViolation("auc_of_add_s needs at least one error value")
    if max_threshold <= 0:
        raise InvariantViolation("max_threshold must be positive")
    return float(np.maximum(0.0, max_threshold - errors).sum() / (errors.size * max_threshold))


def rotation_error_histogram(rot_errors_deg, bin_deg=ROT_HIST_BIN_DEG):
    """Counts of rotation errors in fixed-width degree bins covering [0, 180]."""
    n_bins = int(np.ceil(180.0 / bin_deg))
    edges = np.arange(n_bins + 1) * bin_deg
    counts, _ = np.histogram(np.asarray(rot_errors_deg, dtype=np.float64), bins=edges)
    return counts, edges


@dataclass
class MetricsReport:
    """Aggregate evaluation result for one dataset split."""

    split: str
    sample_count: int
    mean_add_m: float
    mean_add_s_m: float
    mean_rotation_error_deg: float
    mean_translation_error_m: float
    auc_of_add_s: float
    rotation_hist_bin_deg: float = ROT_HIST_BIN_DEG
    rotation_hist_counts: list = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "split": self.split,
            "sample_count": self.sample_count,
            "mean_add_m": self.mean_add_m,
            "mean_add_s_m": self.mean_add_s_m,
            "mean_rotation_error_deg": self.mean_rotation_error_deg,
            "mean_translation_error_m": self.mean_translation_error_m,
            "auc_of_add_s": self.auc_of_add_s,
            "rotation_hist_bin_deg": self.rotation_hist_bin_deg,
            "rotation_hist_counts": [int(c) for c in self.rotation_hist_counts],
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def build_report(split, r_preds, t_preds, r_gts, t_gts, model: ModelPoints) -> MetricsReport:
    """Evaluate aligned prediction/ground-truth pose lists into a report."""
    n = len(r_preds)
    if not (len(t_preds) == len(r_gts) == len(t_gts) == n) or n == 0:
        raise InvariantViolation("prediction/ground-truth lists must be non-empty and aligned")
    adds, add_ss, rots, trans = [], [], [], []
    for rp, tp, rg, tg in zip(r_preds, t_preds, r_gts, t_gts):
        adds.append(add_metric(rp, tp, rg, tg, model))
        add_ss.append(add_s_metric(rp, tp, rg, tg, model))
        r_err, t_err = rotation_translation_error(rp, tp, rg, tg)
        rots.append(r_err)
        trans.append(t_err)
    counts, _ = rotation_error_histogram(rots)
    return MetricsReport(
        split=split,
        sample_count=n,
        mean_add_m=float(np.mean(adds)),
        mean_add_s_m=float(np.mean(add_ss)),
        mean_rotation_error_deg=float(np.mean(rots)),
        mean_translation_error_m=float(np.mean(trans)),
        auc_of_add_s=auc_of_add_s(add_ss),
        rotation_hist_counts=[int(c) for c in counts],
    )


def sphere_model_points(radius, max_points=2048, seed=MODEL_POINT_SEED) -> ModelPoints:
    """Vertices of a latitude/longitude sphere mesh, subsampled to <= max_points.

    Deterministic: fixed mesh resolution and a fixed subsampling seed, so ADD
    numbers are comparable across runs.
    """
    n_lat, n_lon = 63, 128
    lat = np.linspace(0, np.pi, n_lat + 2)[1:-1]
    lon = np.linspace(0, 2 * np.pi, n_lon, endpoint=False)
    lat_g, lon_g = np.meshgrid(lat, lon, indexing="ij")
    pts = radius * np.stack(
        [
            np.sin(lat_g) * np.cos(lon_g),
            np.sin(lat_g) * np.sin(lon_g),
            np.cos(lat_g),
        ],
        axis=-1,
    ).reshape(-1, 3)
    pts = np.concatenate([pts, [[0, 0, radius], [0, 0, -radius]]], axis=0)
    if pts.shape[0] > max_points:
        rng = np.random.default_rng(seed)
        keep = rng.choice(pts.shape[0], size=max_points, replace=False)
        pts = pts[np.sort(keep)]
    return ModelPoints(pts, symmetric=False)
