"""Tip pose as a function of everted length, and body clearance to obstacles.

Joint angles are fixed into the body before deployment, so growth only
advances the tip along the final shape: the everted portion of the robot at
length L is the first L millimeters of the fully-everted centerline. Bends
are modeled as instantaneous at the (zero-length) joints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .geometry import DHChain, RigidPose, fk_chain, rot_z

DEFAULT_SWEEP_STEP_MM = 1.0


@dataclass(frozen=True)
class GrowthState:
    """A chain everted up to a given arc length of its centerline."""

    chain: DHChain
    everted_length: float

    def __post_init__(self):
        object.__setattr__(self, "everted_length", float(self.everted_length))
        total = self.chain.total_length
        if not 0.0 <= self.everted_length <= total:
            raise ValidationError(
                f"everted_length must lie in [0, {total:.6g}] mm, "
                f"got {self.everted_length:.6g}")


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.center, float).reshape(3)
        c.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0.0:
            raise ValidationError(f"sphere radius must be > 0, got {self.radius}")

    def surface_distance(self, points: np.ndarray) -> np.ndarray:
        """Signed distance from points to the sphere surface (negative inside)."""
        p = np.atleast_2d(np.asarray(points, float))
        return np.linalg.norm(p - self.center, axis=1) - self.radius


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by min and max corners."""

    min_corner: np.ndarray
    max_corner: np.ndarray

    def __post_init__(self):
        lo = np.array(self.min_corner, float).reshape(3)
        hi = np.array(self.max_corner, float).reshape(3)
        if not np.all(lo < hi):
            raise ValidationError("box min corner must be < max corner per axis")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    def surface_distance(self, points: np.ndarray) -> np.ndarray:
        """Signed distance from points to the box surface (negative inside)."""
        p = np.atleast_2d(np.asarray(points, float))
        center = 0.5 * (self.min_corner + self.max_corner)
        half = 0.5 * (self.max_corner - self.min_corner)
        q = np.abs(p - center) - half
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
        inside = np.minimum(np.max(q, axis=1), 0.0)
        return outside + inside


@dataclass(frozen=True)
class ObstacleScene:
    spheres: tuple = ()
    boxes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "spheres", tuple(self.spheres))
        object.__setattr__(self, "boxes", tuple(self.boxes))

    @property
    def empty(self) -> bool:
        return not self.spheres and not self.boxes

    def surface_distance(self, points: np.ndarray) -> np.ndarray:
        """Signed distance to the nearest obstacle surface, per point."""
        p = np.atleast_2d(np.asarray(points, float))
        if self.empty:
            return np.full(p.shape[0], math.inf)
        dists = [ob.surface_distance(p) for ob in (*self.spheres, *self.boxes)]
        return np.min(np.vstack(dists), axis=0)


def tip_pose_at(state: GrowthState) -> RigidPose:
    """Pose of the everting tip.

    Fully-everted links contribute their whole transforms; the remainder is a
    pure translation along the current link. A joint's bend applies the
    instant the joint everts, so at exact link boundaries the pre-bend frame
    is returned (everted_length = 0 gives the base frame).
    """
    chain = state.chain
    frames = fk_chain(chain)
    cum = np.concatenate([[0.0], np.cumsum(chain.lengths())])
    idx = int(np.searchsorted(cum, state.everted_length, side="right")) - 1
    idx = min(idx, chain.n)
    rem = state.everted_length - cum[idx]
    if idx >= chain.n or rem <= 0.0:
        return frames[idx]
    rz = rot_z(chain.links[idx].theta)
    return frames[idx] @ RigidPose(rz, rz @ np.array([rem, 0.0, 0.0]))


def centerline_points(state: GrowthState, arc_lengths: np.ndarray) -> np.ndarray:
    """Centerline positions at the given arc lengths (vectorized tip_pose_at)."""
    chain = state.chain
    s = np.asarray(arc_lengths, float)
    if np.any(s < -1e-12) or np.any(s > state.everted_length + 1e-12):
        raise ValidationError("arc lengths must lie within the everted body")
    frames = fk_chain(chain)
    cum = np.concatenate([[0.0], np.cumsum(chain.lengths())])
    verts = np.array([f.translation for f in frames])
    dirs = np.array([
        frames[i].rotation @ rot_z(chain.links[i].theta) @ np.array([1.0, 0.0, 0.0])
        for i in range(chain.n)
    ])
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, chain.n - 1)
    return verts[idx] + dirs[idx] * (s - cum[idx])[:, None]


@dataclass(frozen=True)
class SweptBody:
    """Sphere-swept centerline samples of the everted body."""

    centers: np.ndarray
    arc_lengths: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.centers, float)
        a = np.array(self.arc_lengths, float)
        c.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "arc_lengths", a)


def sweep_samples(state: GrowthState, step: float = DEFAULT_SWEEP_STEP_MM) -> SweptBody:
    """Sample the everted centerline every `step` mm, plus the tip.

    Produces floor(everted/step) + 1 grid samples and one tip sample, so both
    endpoints are always present.
    """
    if not step > 0.0:
        raise ValidationError(f"step must be > 0, got {step}")
    n_grid = int(math.floor(state.everted_length / step)) + 1
    s = np.append(np.arange(n_grid) * step, state.everted_length)
    return SweptBody(centers=centerline_points(state, s), arc_lengths=s,
                     radius=state.chain.radius)


@dataclass(frozen=True)
class ClearanceResult:
    """Worst signed clearance of the swept body; negative means penetration."""

    clearance: float
    location: np.ndarray | None
    arc_length: float | None
    no_obstacles: bool = False

    @classmethod
    def empty_scene(cls) -> "ClearanceResult":
        return cls(clearance=math.inf, location=None, arc_length=None,
                   no_obstacles=True)


def clearance(state: GrowthState, scene: ObstacleScene,
              step: float = DEFAULT_SWEEP_STEP_MM) -> ClearanceResult:
    """Minimum (surface distance - body radius) over the everted body."""
    if scene.empty:
        return ClearanceResult.empty_scene()
    body = sweep_samples(state, step)
    gaps = scene.surface_distance(body.centers) - body.radius
    worst = int(np.argmin(gaps))
    return ClearanceResult(clearance=float(gaps[worst]),
                           location=body.centers[worst],
                           arc_length=float(body.arc_lengths[worst]))
