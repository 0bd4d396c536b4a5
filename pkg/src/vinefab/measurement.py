"""Optical-marker ingestion, sample averaging, and DH parameter recovery.

Marker protocol: each bend joint j (joints 2..n of the chain; the base joint
does not bend) carries a marker on the joint plus one a fixed offset toward
each neighbor joint. The first bend joint uses a marker at the chain base in
place of its proximal neighbor and the last uses one at the tip, so the
marker set also bounds the first and last links. Only marker positions enter
the recovery; orientations are retained for completeness.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateGeometryError, MissingMarkerError,
                     ValidationError)
from .geometry import DHChain, RigidPose, dh_to_polyline, fk_chain, nearest_rotation

# offset of the neighbor-facing markers from their joint, per the measurement jig
DEFAULT_MARKER_OFFSET_MM = 76.5

_ROLES = {
    "on": "on", "joint": "on", "on-joint": "on",
    "prox": "prox", "proximal": "prox",
    "dist": "dist", "distal": "dist",
}
_ID_RE = re.compile(r"^j(\d+)[_:](.+)$")

_MIN_DIRECTION_MM = 1.0


def parse_marker_id(marker_id: str):
    """Split a marker id into (joint index or None, canonical role).

    Accepts 'base', 'tip', and 'j<k>_<role>' with role spelled 'on'/'joint'/
    'on-joint', 'prox'/'proximal', or 'dist'/'distal'.
    """
    s = marker_id.strip().lower()
    if s in ("base", "tip"):
        return None, s
    m = _ID_RE.match(s)
    if m and m.group(2) in _ROLES:
        return int(m.group(1)), _ROLES[m.group(2)]
    raise ValidationError(f"unrecognized marker id {marker_id!r}")


@dataclass(frozen=True)
class MarkerRecord:
    """Time-stamped pose samples of one labeled marker."""

    marker_id: str
    samples: tuple  # of (timestamp_s, RigidPose)

    def __post_init__(self):
        samples = tuple(self.samples)
        if not samples:
            raise ValidationError(f"marker {self.marker_id!r} has no samples")
        object.__setattr__(self, "samples", samples)
        parse_marker_id(self.marker_id)

    @property
    def joint(self):
        return parse_marker_id(self.marker_id)[0]

    @property
    def role(self):
        return parse_marker_id(self.marker_id)[1]


def average_samples(record: MarkerRecord) -> RigidPose:
    """Average a marker's samples: mean translation, chordal-mean rotation."""
    ts = np.array([pose.translation for _, pose in record.samples])
    rs = np.array([pose.rotation for _, pose in record.samples])
    return RigidPose(nearest_rotation(rs.mean(axis=0)), ts.mean(axis=0))


@dataclass(frozen=True)
class MeasuredDH:
    """Recovered DH parameters: (index, value) pairs per parameter kind."""

    phase: str
    joint_thetas: tuple  # ((joint index, rad), ...)
    link_alphas: tuple   # ((link index, rad), ...)
    link_lengths: tuple  # ((link index, mm), ...)

    def __post_init__(self):
        if self.phase not in ("pre", "post"):
            raise ValidationError(f"phase must be 'pre' or 'post', got {self.phase!r}")
        nj = len(self.joint_thetas)
        if len(self.link_lengths) != nj + 1 or len(self.link_alphas) != max(nj - 1, 0):
            raise ValidationError(
                "measured parameter counts do not match a serial chain "
                f"({nj} joints, {len(self.link_alphas)} twists, "
                f"{len(self.link_lengths)} lengths)")


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    n = np.linalg.norm(v)
    if n < _MIN_DIRECTION_MM:
        raise DegenerateGeometryError(
            f"{what}: direction vector shorter than {_MIN_DIRECTION_MM} mm")
    return v / n


def recover_dh(markers, phase: str = "pre") -> MeasuredDH:
    """Recover joint angles, link twists, and link lengths from marker records.

    For joint j with averaged positions p (proximal), o (on-joint), and
    d (distal): the incoming direction is o - p, the outgoing direction is
    d - o, and the joint angle is the angle between them (nonnegative). Each
    twist is the dihedral angle between the bending planes of consecutive
    joints about the line connecting them; lengths are distances between
    consecutive joint positions with the base and tip markers bounding the
    end links.
    """
    positions = {}
    for rec in markers:
        key = (rec.joint, rec.role)
        if key in positions:
            raise ValidationError(f"duplicate marker {rec.marker_id!r}")
        positions[key] = average_samples(rec).translation

    joints = sorted({j for j, _ in positions if j is not None})
    if not joints:
        raise ValidationError("no joint markers present")
    if joints != list(range(joints[0], joints[-1] + 1)):
        raise ValidationError(f"joint markers must be consecutive, got {joints}")
    first, last = joints[0], joints[-1]

    def pos(j, role):
        if (j, role) in positions:
            return positions[(j, role)]
        if role == "prox" and j == first and (None, "base") in positions:
            return positions[(None, "base")]
        if role == "dist" and j == last and (None, "tip") in positions:
            return positions[(None, "tip")]
        raise MissingMarkerError(j, role)

    thetas = []
    normals = {}
    for j in joints:
        o = pos(j, "on")
        v = _unit(o - pos(j, "prox"), f"joint {j} incoming")
        w = _unit(pos(j, "dist") - o, f"joint {j} outgoing")
        cross = np.cross(v, w)
        thetas.append((j, math.atan2(np.linalg.norm(cross), float(v @ w))))
        normals[j] = cross

    alphas = []
    for j in joints[:-1]:
        axis = _unit(pos(j + 1, "on") - pos(j, "on"), f"link {j}")
        n0, n1 = normals[j], normals[j + 1]
        if np.linalg.norm(n0) < 1e-9 or np.linalg.norm(n1) < 1e-9:
            # a straight joint has no bending plane; no twist is observable
            alphas.append((j, 0.0))
            continue
        n0, n1 = n0 / np.linalg.norm(n0), n1 / np.linalg.norm(n1)
        alphas.append((j, math.atan2(float(np.cross(n0, n1) @ axis),
                                     float(n0 @ n1))))

    lengths = [(first - 1, float(np.linalg.norm(pos(first, "on") - pos(first, "prox"))))]
    for j in joints[:-1]:
        lengths.append((j, float(np.linalg.norm(pos(j + 1, "on") - pos(j, "on")))))
    lengths.append((last, float(np.linalg.norm(pos(last, "dist") - pos(last, "on")))))

    return MeasuredDH(phase=phase, joint_thetas=tuple(thetas),
                      link_alphas=tuple(alphas), link_lengths=tuple(lengths))


@dataclass(frozen=True)
class ErrorRow:
    """One line of the measured-vs-target error table (angles in degrees)."""

    parameter: str
    index: int
    target: float
    measured: float
    error: float
    phase: str


def dh_errors(measured: MeasuredDH, target: DHChain) -> list:
    """Signed errors (measured - target) per parameter, degrees / millimeters.

    The measured set must cover the full chain: bend joints 2..n, twists of
    the links between them, and all n link lengths. Targets are compared in
    the nonnegative-angle gauge (|theta|), matching the recovery.
    """
    n = target.n
    joint_idx = [j for j, _ in measured.joint_thetas]
    alpha_idx = [i for i, _ in measured.link_alphas]
    length_idx = [i for i, _ in measured.link_lengths]
    if (joint_idx != list(range(2, n + 1))
            or alpha_idx != list(range(2, n))
            or length_idx != list(range(1, n + 1))):
        raise ValidationError(
            f"measured topology does not match a {n}-link chain: "
            f"joints {joint_idx}, twists {alpha_idx}, lengths {length_idx}")

    rows = []
    for (j, th) in measured.joint_thetas:
        t = abs(target.links[j - 1].theta)
        rows.append(ErrorRow("joint", j, math.degrees(t), math.degrees(th),
                             math.degrees(th - t), measured.phase))
    for (i, al) in measured.link_alphas:
        t = target.links[i - 1].alpha
        rows.append(ErrorRow("twist", i, math.degrees(t), math.degrees(al),
                             math.degrees(al - t), measured.phase))
    for (i, a) in measured.link_lengths:
        t = target.links[i - 1].a
        rows.append(ErrorRow("length", i, t, a, a - t, measured.phase))
    return rows


def synthetic_markers(chain: DHChain, offset: float = DEFAULT_MARKER_OFFSET_MM,
                      n_samples: int = 1, rate_hz: float = 20.0,
                      position_noise_mm: float = 0.0,
                      rotation_noise_deg: float = 0.0,
                      rng: np.random.Generator | None = None) -> list:
    """Generate the marker set a perfectly instrumented chain would produce.

    Useful for tests and for exercising the ingestion formats. Gaussian
    position noise (per axis) and small rotation noise (per axis angle) can
    be added; with both zero, recover_dh inverts this generator exactly.
    """
    if chain.n < 2:
        raise ValidationError("marker protocol needs at least 2 links")
    if rng is None:
        rng = np.random.default_rng(0)
    verts = dh_to_polyline(chain)
    frames = fk_chain(chain)
    seg = np.diff(verts, axis=0)
    units = seg / np.linalg.norm(seg, axis=1)[:, None]

    spots = [("base", verts[0], frames[0].rotation)]
    for j in range(2, chain.n + 1):
        o = verts[j - 1]
        rot = frames[j - 1].rotation
        spots.append((f"j{j}_on", o, rot))
        if j > 2:
            spots.append((f"j{j}_prox", o - offset * units[j - 2], rot))
        if j < chain.n:
            spots.append((f"j{j}_dist", o + offset * units[j - 1], rot))
    spots.append(("tip", verts[-1], frames[-1].rotation))

    records = []
    for marker_id, p, rot in spots:
        samples = []
        for k in range(n_samples):
            noisy_p = p + rng.normal(0.0, position_noise_mm, 3) \
                if position_noise_mm > 0.0 else p
            noisy_r = rot
            if rotation_noise_deg > 0.0:
                axis_angle = rng.normal(0.0, math.radians(rotation_noise_deg), 3)
                noisy_r = nearest_rotation(rot @ _small_rotation(axis_angle))
            samples.append((k / rate_hz, RigidPose(noisy_r, noisy_p)))
        records.append(MarkerRecord(marker_id=marker_id, samples=tuple(samples)))
    return records


def _small_rotation(axis_angle: np.ndarray) -> np.ndarray:
    angle = float(np.linalg.norm(axis_angle))
    if angle < 1e-15:
        return np.eye(3)
    x, y, z = axis_angle / angle
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)
