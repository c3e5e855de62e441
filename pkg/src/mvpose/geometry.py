"""Camera models, rigid transforms and per-pixel line-of-sight encodings.

Conventions:
  * Camera frames are right-handed with +x right, +y down, +z forward
    (pinhole looks along +z).
  * All rays and object poses are expressed in the reference-camera frame
    (the first view of a rig); the reference camera's extrinsics are the
    identity transform.
  * Pixel coordinates are (x, y) = (column, row). A feature map at scale s
    covers the image with cells of s x s pixels; continuous feature-map
    coordinate p maps to image coordinate p * s, so integer cell (i, j) is
    sampled through its center (i + 0.5, j + 0.5).
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import BehindCameraError, InvariantViolation, OutOfBoundsError

ROTATION_TOL = 1e-6
UNIT_TOL = 1e-6

LOS_MODES = ("dir_only", "dir_origin", "pluecker", "pluecker_origin")
LOS_DIMS = {"dir_only": 3, "dir_origin": 6, "pluecker": 6, "pluecker_origin": 9}


def check_rotation(rotation, tol=ROTATION_TOL):
    """Raise InvariantViolation unless `rotation` is a proper rotation matrix."""
    rotation = np.asarray(rotation, dtype=np.float64)
    if rotation.shape != (3, 3):
        raise InvariantViolation(f"rotation must be 3x3, got {rotation.shape}")
    err = np.abs(rotation.T @ rotation - np.eye(3)).max()
    if err > tol:
        raise InvariantViolation(f"rotation not orthonormal (max |R^T R - I| = {err:.3e})")
    det = np.linalg.det(rotation)
    if abs(det - 1.0) > tol:
        raise InvariantViolation(f"rotation determinant {det:.9f} != +1")
    return rotation


@dataclass(frozen=True)
class Pose:
    """Rigid transform: x_out = rotation @ x_in + translation (meters)."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rotation = check_rotation(self.rotation)
        translation = np.asarray(self.translation, dtype=np.float64).reshape(3)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, mat):
        mat = np.asarray(mat, dtype=np.float64)
        return cls(mat[:3, :3], mat[:3, 3])

    def as_matrix(self):
        mat = np.eye(4)
        mat[:3, :3] = self.rotation
        mat[:3, 3] = self.translation
        return mat

    def apply(self, points):
        """Transform one point (3,) or many (n, 3)."""
        points = np.asarray(points, dtype=np.float64)
        return points @ self.rotation.T + self.translation


def compose_pose(a: Pose, b: Pose) -> Pose:
    """Composition that applies `b` first, then `a`."""
    return Pose(a.rotation @ b.rotation, a.rotation @ b.translation + a.translation)


def invert_pose(p: Pose) -> Pose:
    return Pose(p.rotation.T, -p.rotation.T @ p.translation)


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole interior orientation: zero skew, no distortion."""

    focal: np.ndarray           # (fx, fy) in pixels
    principal_point: np.ndarray  # (cx, cy) in pixels
    image_size: np.ndarray      # (width, height) in pixels

    def __post_init__(self):
        focal = np.asarray(self.focal, dtype=np.float64).reshape(2)
        pp = np.asarray(self.principal_point, dtype=np.float64).reshape(2)
        size = np.asarray(self.image_size, dtype=np.int64).reshape(2)
        if not np.all(focal > 0):
            raise InvariantViolation(f"focal lengths must be positive, got {focal}")
        if not np.all(size >= 1):
            raise InvariantViolation(f"image size must be >= 1, got {size}")
        object.__setattr__(self, "focal", focal)
        object.__setattr__(self, "principal_point", pp)
        object.__setattr__(self, "image_size", size)

    @property
    def k_matrix(self):
        fx, fy = self.focal
        cx, cy = self.principal_point
        return np.array([[fx, 0.0, cx], [0.0, fy, cy], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class CameraExtrinsics:
    """Relative orientation: pose of this camera in the reference-camera frame."""

    camera_to_reference: Pose = field(default_factory=Pose.identity)

    @classmethod
    def identity(cls):
        return cls(Pose.identity())

    @property
    def center(self):
        """Camera center expressed in the reference frame."""
        return self.camera_to_reference.translation


def relative_extrinsics(world_to_ref: Pose, world_to_cam: Pose) -> CameraExtrinsics:
    """Extrinsics of a camera w.r.t. a reference camera, from world-to-camera poses."""
    return CameraExtrinsics(compose_pose(world_to_ref, invert_pose(world_to_cam)))


@dataclass(frozen=True)
class Ray:
    """Line of sight in the reference-camera frame; direction is unit length."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=np.float64).reshape(3)
        direction = np.asarray(self.direction, dtype=np.float64).reshape(3)
        norm = np.linalg.norm(direction)
        if abs(norm - 1.0) > UNIT_TOL:
            raise InvariantViolation(f"ray direction norm {norm:.9f} != 1")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "direction", direction)


@dataclass(frozen=True)
class LoSCode:
    """Line-of-sight encoding; length depends on the mode (3, 6, 6 or 9)."""

    mode: str
    values: np.ndarray

    def __post_init__(self):
        if self.mode not in LOS_MODES:
            raise InvariantViolation(f"unknown LoS mode {self.mode!r}")
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.shape[0] != LOS_DIMS[self.mode]:
            raise InvariantViolation(
                f"mode {self.mode!r} needs {LOS_DIMS[self.mode]} values, got {values.shape[0]}"
            )
        object.__setattr__(self, "values", values)


def project_point(intr: CameraIntrinsics, extr: CameraExtrinsics, point) -> np.ndarray:
    """Pinhole projection of a reference-frame point into (x, y) pixels."""
    cam = invert_pose(extr.camera_to_reference).apply(np.asarray(point, dtype=np.float64))
    if cam[2] <= 0:
        raise BehindCameraError(f"point has non-positive depth {cam[2]:.6f}")
    fx, fy = intr.focal
    cx, cy = intr.principal_point
    return np.array([fx * cam[0] / cam[2] + cx, fy * cam[1] / cam[2] + cy])


def pixel_ray(intr: CameraIntrinsics, extr: CameraExtrinsics, pixel, scale=1.0) -> Ray:
    """Line of sight through a (continuous) feature-map coordinate.

    `pixel` is an (x, y) coordinate on the feature map obtained by
    downsampling the image by `scale`; it maps to image pixels as
    pixel * scale. Integer cell indices should be passed as (i + 0.5) to cast
    through the cell center. The returned ray lives in the reference frame.
    """
    if scale <= 0:
        raise OutOfBoundsError(f"scale must be positive, got {scale}")
    pixel = np.asarray(pixel, dtype=np.float64).reshape(2)
    grid_size = intr.image_size / scale
    if np.any(pixel < 0) or np.any(pixel > grid_size):
        raise OutOfBoundsError(f"pixel {pixel} outside feature map of size {grid_size}")
    image_xy = pixel * scale
    fx, fy = intr.focal
    cx, cy = intr.principal_point
    d_cam = np.array([(image_xy[0] - cx) / fx, (image_xy[1] - cy) / fy, 1.0])
    d_cam /= np.linalg.norm(d_cam)
    pose = extr.camera_to_reference
    return Ray(pose.translation, pose.rotation @ d_cam)


def encode_los(ray: Ray, mode: str) -> LoSCode:
    """Encode a ray as direction / direction+origin / Pluecker / Pluecker+origin.

    The Pluecker moment is the vector product of the ray direction and a point
    on the ray, with the camera center as that point: m = d x o.
    """
    d, o = ray.direction, ray.origin
    if mode == "dir_only":
        values = d
    elif mode == "dir_origin":
        values = np.concatenate([d, o])
    elif mode == "pluecker":
        values = np.concatenate([d, np.cross(d, o)])
    elif mode == "pluecker_origin":
        values = np.concatenate([d, np.cross(d, o), o])
    else:
        raise InvariantViolation(f"unknown LoS mode {mode!r}")
    return LoSCode(mode, values)


def los_map(intr: CameraIntrinsics, extr: CameraExtrinsics, scale, mode) -> np.ndarray:
    """LoS codes for every cell of one feature-map scale, cast through cell centers.

    Returns an (H, W, ray_dim) array where (H, W) = image_size / scale.
    Vectorized equivalent of encode_los(pixel_ray(...)) over the full grid.
    """
    width, height = (int(s) for s in np.asarray(intr.image_size) // int(scale))
    xs = (np.arange(width) + 0.5) * scale
    ys = (np.arange(height) + 0.5) * scale
    fx, fy = intr.focal
    cx, cy = intr.principal_point
    gx, gy = np.meshgrid((xs - cx) / fx, (ys - cy) / fy)
    d_cam = np.stack([gx, gy, np.ones_like(gx)], axis=-1)
    d_cam /= np.linalg.norm(d_cam, axis=-1, keepdims=True)
    pose = extr.camera_to_reference
    d = d_cam @ pose.rotation.T
    o = np.broadcast_to(pose.translation, d.shape)
    if mode == "dir_only":
        return d
    if mode == "dir_origin":
        return np.concatenate([d, o], axis=-1)
    moment = np.cross(d, o)
    if mode == "pluecker":
        return np.concatenate([d, moment], axis=-1)
    if mode == "pluecker_origin":
        return np.concatenate([d, moment, o], axis=-1)
    raise InvariantViolation(f"unknown LoS mode {mode!r}")


def random_rotation(rng) -> np.ndarray:
    """Uniform rotation matrix (Marsaglia: normalized Gaussian quaternion)."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def rotation_about_axis(axis, angle) -> np.ndarray:
    """Rodrigues rotation about a (not necessarily unit) axis."""
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    k = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def look_at_pose(camera_position, target, up_hint, roll=0.0) -> Pose:
    """World pose of a camera at `camera_position` looking at `target`.

    Returns the camera-to-world pose (+z toward the target, +y roughly
    opposite `up_hint` to honor the y-down image convention), with an extra
    roll about the viewing axis.
    """
    position = np.asarray(camera_position, dtype=np.float64)
    z = np.asarray(target, dtype=np.float64) - position
    z = z / np.linalg.norm(z)
    up = np.asarray(up_hint, dtype=np.float64)
    x = np.cross(-up, z)
    n = np.linalg.norm(x)
    if n < 1e-9:
        raise InvariantViolation("up_hint parallel to the viewing direction")
    x /= n
    y = np.cross(z, x)
    rot = np.stack([x, y, z], axis=1)
    if roll != 0.0:
        rot = rot @ rotation_about_axis([0.0, 0.0, 1.0], roll)
    return Pose(rot, position)


# --- BOP-convention JSON (de)serialization -------------------------------
# {"cam_K": 9 floats row-major, "cam_R_w2c": 9 floats row-major,
#  "cam_t_w2c": 3 floats in millimeters}

def camera_to_json(intr: CameraIntrinsics, world_to_cam: Pose) -> dict:
    return {
        "cam_K": [float(v) for v in intr.k_matrix.reshape(-1)],
        "cam_R_w2c": [float(v) for v in world_to_cam.rotation.reshape(-1)],
        "cam_t_w2c": [float(v) for v in world_to_cam.translation * 1000.0],
    }


def camera_from_json(entry: dict, image_size) -> tuple:
    """Inverse of camera_to_json; needs the image size (not stored by BOP)."""
    k = np.asarray(entry["cam_K"], dtype=np.float64).reshape(3, 3)
    intr = CameraIntrinsics(
        focal=(k[0, 0], k[1, 1]),
        principal_point=(k[0, 2], k[1, 2]),
        image_size=image_size,
    )
    rot = np.asarray(entry["cam_R_w2c"], dtype=np.float64).reshape(3, 3)
    t = np.asarray(entry["cam_t_w2c"], dtype=np.float64) / 1000.0
    return intr, Pose(rot, t)
