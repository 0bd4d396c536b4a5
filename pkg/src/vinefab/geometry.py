"""Rigid-body math, DH chains, forward kinematics, and polyline conversion.

Conventions used throughout the package:

* lengths in millimeters, angles in radians;
* classic (distal) DH convention with zero joint offset: the transform of
  link i is ``Rot_z(theta_i) * Trans_x(a_i) * Rot_x(alpha_i)``;
* the chain base coincides with the world frame, so frame 0 is the
  identity and each frame's x-axis points along the segment just traversed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

ORTHONORMALITY_TOL = 1e-9

# polyline_to_dh accepts inputs whose first vertex / first segment sit in the
# chain base frame within these tolerances
ORIGIN_TOL = 1e-6
PLANE_TOL = 1e-9


def wrap_angle(x: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    y = math.fmod(x + math.pi, 2.0 * math.pi)
    if y <= 0.0:
        y += 2.0 * math.pi
    return y - math.pi


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_x(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def nearest_rotation(m: np.ndarray) -> np.ndarray:
    """Project a 3x3 matrix onto SO(3) (closest rotation in Frobenius norm)."""
    u, _, vt = np.linalg.svd(np.asarray(m, float))
    r = u @ vt
    if np.linalg.det(r) < 0.0:
        r = u @ np.diag([1.0, 1.0, -1.0]) @ vt
    return r


def rotation_to_quaternion(r: np.ndarray) -> np.ndarray:
    """Rotation matrix to unit quaternion (w, x, y, z), w >= 0."""
    r = np.asarray(r, float)
    t = np.trace(r)
    if t > 0.0:
        s = math.sqrt(t + 1.0) * 2.0
        q = np.array([0.25 * s, (r[2, 1] - r[1, 2]) / s,
                      (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s])
    else:
        i = int(np.argmax(np.diag(r)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = math.sqrt(max(r[i, i] - r[j, j] - r[k, k] + 1.0, 0.0)) * 2.0
        q = np.empty(4)
        q[0] = (r[k, j] - r[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (r[j, i] + r[i, j]) / s
        q[1 + k] = (r[k, i] + r[i, k]) / s
    if q[0] < 0.0:
        q = -q
    return q / np.linalg.norm(q)


def quaternion_to_rotation(q: np.ndarray) -> np.ndarray:
    """Unit quaternion (w, x, y, z) to rotation matrix."""
    w, x, y, z = np.asarray(q, float) / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


@dataclass(frozen=True)
class RigidPose:
    """Rotation + translation in 3D. Immutable after construction."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.array(self.rotation, float)
        t = np.array(self.translation, float).reshape(3)
        if r.shape != (3, 3):
            raise ValidationError(f"rotation must be 3x3, got {r.shape}")
        if np.max(np.abs(r.T @ r - np.eye(3))) >= ORTHONORMALITY_TOL:
            raise ValidationError("rotation is not orthonormal within 1e-9")
        if abs(np.linalg.det(r) - 1.0) >= ORTHONORMALITY_TOL:
            raise ValidationError("rotation determinant is not 1 within 1e-9")
        r.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RigidPose":
        return cls(np.eye(3), np.zeros(3))

    def compose(self, other: "RigidPose") -> "RigidPose":
        """self applied first in world, then other in self's frame: self * other."""
        return RigidPose(self.rotation @ other.rotation,
                         self.translation + self.rotation @ other.translation)

    def __matmul__(self, other: "RigidPose") -> "RigidPose":
        return self.compose(other)

    def inverse(self) -> "RigidPose":
        rt = self.rotation.T
        return RigidPose(rt, -(rt @ self.translation))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform one point (3,) or many points (n, 3)."""
        p = np.asarray(points, float)
        return p @ self.rotation.T + self.translation

    def quaternion(self) -> np.ndarray:
        return rotation_to_quaternion(self.rotation)


@dataclass(frozen=True)
class DHLink:
    """One link: length a (mm), twist alpha, joint angle theta (rad), offset d = 0."""

    a: float
    alpha: float = 0.0
    theta: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        # -pi and pi are the same angle; store the canonical endpoint
        object.__setattr__(self, "alpha", _canon_angle(float(self.alpha), "alpha"))
        object.__setattr__(self, "theta", _canon_angle(float(self.theta), "theta"))
        object.__setattr__(self, "d", float(self.d))
        if not math.isfinite(self.a) or self.a < 0.0:
            raise ValidationError(f"link length a must be >= 0, got {self.a}")
        if self.d != 0.0:
            raise ValidationError(f"joint offset d must be exactly 0, got {self.d}")

    def transform(self) -> RigidPose:
        """Rot_z(theta) * Trans_x(a) * Rot_x(alpha)."""
        rz = rot_z(self.theta)
        return RigidPose(rz @ rot_x(self.alpha), rz @ np.array([self.a, 0.0, 0.0]))


def _canon_angle(x: float, name: str) -> float:
    if not math.isfinite(x) or x < -math.pi - 1e-12 or x > math.pi + 1e-12:
        raise ValidationError(f"{name} must lie in (-pi, pi], got {x}")
    if x <= -math.pi or x > math.pi:
        return math.pi
    return x


@dataclass(frozen=True)
class DHChain:
    """Ordered links plus the body radius of the inflated tube."""

    links: tuple
    radius: float

    def __post_init__(self):
        raw = tuple(self.links)
        if len(raw) < 1:
            raise ValidationError("chain needs at least one link")
        links = []
        for i, link in enumerate(raw, start=1):
            if not isinstance(link, DHLink):
                try:
                    link = DHLink(**link) if isinstance(link, dict) else DHLink(*link)
                except (TypeError, ValidationError) as exc:
                    raise ValidationError(f"link {i}: {exc}") from exc
            links.append(link)
        object.__setattr__(self, "links", tuple(links))
        object.__setattr__(self, "radius", float(self.radius))
        if not math.isfinite(self.radius) or self.radius <= 0.0:
            raise ValidationError(f"radius must be > 0, got {self.radius}")

    @classmethod
    def from_arrays(cls, a, alpha, theta, radius) -> "DHChain":
        """Build a chain from parallel parameter sequences, naming bad links."""
        a, alpha, theta = (list(map(float, v)) for v in (a, alpha, theta))
        if not len(a) == len(alpha) == len(theta):
            raise ValidationError("a, alpha, theta must have equal lengths")
        links = []
        for i, (ai, ali, thi) in enumerate(zip(a, alpha, theta), start=1):
            try:
                links.append(DHLink(a=ai, alpha=ali, theta=thi))
            except ValidationError as exc:
                raise ValidationError(f"link {i}: {exc}") from exc
        return cls(links=tuple(links), radius=radius)

    @property
    def n(self) -> int:
        return len(self.links)

    @property
    def total_length(self) -> float:
        return float(sum(link.a for link in self.links))

    def thetas(self) -> np.ndarray:
        return np.array([link.theta for link in self.links])

    def alphas(self) -> np.ndarray:
        return np.array([link.alpha for link in self.links])

    def lengths(self) -> np.ndarray:
        return np.array([link.a for link in self.links])


def fk_chain(chain: DHChain) -> list:
    """Cumulative frames of a chain: n+1 poses, frame 0 = base, last = tip.

    Frame i's x-axis points along link i; joint i+1 bends in frame i's
    x-y plane.
    """
    frames = [RigidPose.identity()]
    for i, link in enumerate(chain.links, start=1):
        try:
            frames.append(frames[-1] @ link.transform())
        except ValidationError as exc:
            raise ValidationError(f"link {i}: {exc}") from exc
    return frames


def dh_to_polyline(chain: DHChain) -> np.ndarray:
    """Joint positions (n+1, 3): the centerline vertices of the chain."""
    return np.array([f.translation for f in fk_chain(chain)])


def canonicalize_polyline(points: np.ndarray):
    """Rigidly move a polyline into the chain base frame.

    Returns (canonical_points, base_pose) with
    ``base_pose.apply(canonical_points) == points``. The canonical polyline
    starts at the origin with its first segment along +x and its first
    bending plane (if any bend exists) in the x-y plane.
    """
    p = np.asarray(points, float).reshape(-1, 3)
    if p.shape[0] < 2:
        raise ValidationError("polyline needs at least 2 points")
    u = p[1] - p[0]
    nu = np.linalg.norm(u)
    if nu == 0.0:
        raise ValidationError("polyline segment 1 is degenerate (coincident points)")
    xhat = u / nu
    # pick z normal to the first non-collinear bend plane, else any normal to xhat
    zhat = None
    for k in range(1, p.shape[0] - 1):
        v = p[k + 1] - p[k]
        cr = np.cross(xhat, v)
        if np.linalg.norm(cr) > 1e-9 * max(np.linalg.norm(v), 1.0):
            zhat = cr / np.linalg.norm(cr)
            break
    if zhat is None:
        helper = np.array([0.0, 0.0, 1.0])
        if abs(xhat @ helper) > 0.9:
            helper = np.array([0.0, 1.0, 0.0])
        zhat = np.cross(xhat, helper)
        zhat /= np.linalg.norm(zhat)
    yhat = np.cross(zhat, xhat)
    base = RigidPose(np.column_stack([xhat, yhat, zhat]), p[0])
    return base.inverse().apply(p), base


def polyline_to_dh(points: np.ndarray, radius: float) -> DHChain:
    """Fit a DH chain through polyline vertices.

    Link lengths are the segment lengths; each bend angle is the (nonnegative)
    angle between consecutive segments and each twist is the dihedral angle
    between consecutive bending planes. Collinear triples give a zero bend and
    carry the bending plane forward; with no prior bend the world x-y plane is
    used.

    The chain base is the world frame, so the input must start at the origin
    with its first segment in the x-y plane (use :func:`canonicalize_polyline`
    for arbitrary polylines); ``fk_chain`` of the result then reproduces the
    vertices exactly.
    """
    p = np.asarray(points, float).reshape(-1, 3)
    if p.shape[0] < 2:
        raise ValidationError("polyline needs at least 2 points")
    seg = np.diff(p, axis=0)
    lengths = np.linalg.norm(seg, axis=1)
    for i, a in enumerate(lengths, start=1):
        if a < 1e-12:
            raise ValidationError(
                f"segment {i} is degenerate (coincident consecutive points)")
    if np.linalg.norm(p[0]) > ORIGIN_TOL:
        raise ValidationError(
            "polyline must start at the origin (canonicalize_polyline first)")
    if abs(seg[0, 2] / lengths[0]) > PLANE_TOL:
        raise ValidationError(
            "first segment must lie in the world x-y plane "
            "(canonicalize_polyline first)")

    n = p.shape[0] - 1
    r_cum = np.eye(3)
    thetas = np.empty(n)
    alphas = np.empty(n)
    for i in range(n):
        d = r_cum.T @ (seg[i] / lengths[i])
        thetas[i] = math.atan2(d[1], d[0])
        r_mid = r_cum @ rot_z(thetas[i])
        if i + 1 < n:
            # twist that brings the next segment into this frame's x-y plane;
            # atan2(0, 0) = 0 keeps the plane of the previous bend
            e = r_mid.T @ (seg[i + 1] / lengths[i + 1])
            alphas[i] = math.atan2(e[2], e[1])
        else:
            alphas[i] = 0.0
        r_cum = r_mid @ rot_x(alphas[i])

    links = tuple(DHLink(a=float(a), alpha=float(al), theta=float(th))
                  for a, al, th in zip(lengths, alphas, thetas))
    return DHChain(links=links, radius=radius)
