"""File formats: chain / scene / plan JSON, polyline / marker / sample CSV.

All numeric output goes through one formatter (9 significant digits) and all
JSON is emitted by a fixed-order serializer, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .errors import ValidationError
from .fabrication import FabricationPlan, JointSpec
from .geometry import (DHChain, RigidPose, quaternion_to_rotation)
from .growth import Box, ObstacleScene, Sphere
from .measurement import MarkerRecord, MeasuredDH
from .stats import SampleRow, SampleTable


def fmt9(value) -> str:
    """Format a number with 9 significant digits; integers stay integral."""
    if isinstance(value, bool):
        raise ValidationError("fmt9 does not format booleans")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if not math.isfinite(v):
        raise ValidationError(f"cannot format non-finite number {v}")
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return f"{v:.9g}"


def dumps_json(obj) -> str:
    """Serialize dict/list/str/number/bool/None with fixed field order."""
    parts = []
    _write_json(obj, parts, 0)
    return "".join(parts) + "\n"


def _write_json(obj, parts, indent):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        parts.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            parts.append(f"{inner}{json.dumps(str(key))}: ")
            _write_json(value, parts, indent + 1)
            parts.append(",\n" if i < len(obj) - 1 else "\n")
        parts.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            parts.append("[]")
            return
        parts.append("[\n")
        for i, value in enumerate(obj):
            parts.append(inner)
            _write_json(value, parts, indent + 1)
            parts.append(",\n" if i < len(obj) - 1 else "\n")
        parts.append(pad + "]")
    elif isinstance(obj, bool) or obj is None:
        parts.append("true" if obj is True else "false" if obj is False else "null")
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, (int, float, np.integer, np.floating)):
        parts.append(fmt9(obj))
    else:
        raise ValidationError(f"cannot serialize {type(obj).__name__} to JSON")


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_json(obj))


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def _require(mapping, key, path):
    if key not in mapping:
        raise ValidationError(f"{path}: missing required field {key!r}")
    return mapping[key]


# ---------------------------------------------------------------- chain JSON

def chain_to_dict(chain: DHChain) -> dict:
    return {
        "radius_mm": chain.radius,
        "links": [{"a_mm": link.a,
                   "alpha_deg": math.degrees(link.alpha),
                   "theta_deg": math.degrees(link.theta)}
                  for link in chain.links],
    }


def chain_from_dict(data: dict, context: str = "chain") -> DHChain:
    radius = float(_require(data, "radius_mm", context))
    links = _require(data, "links", context)
    if not isinstance(links, list) or not links:
        raise ValidationError(f"{context}: 'links' must be a non-empty list")
    a, alpha, theta = [], [], []
    for i, entry in enumerate(links, start=1):
        a.append(float(_require(entry, "a_mm", f"{context} link {i}")))
        alpha.append(math.radians(float(entry.get("alpha_deg", 0.0))))
        theta.append(math.radians(float(entry.get("theta_deg", 0.0))))
    return DHChain.from_arrays(a, alpha, theta, radius=radius)


def read_chain(path) -> DHChain:
    return chain_from_dict(load_json(path), context=str(path))


def write_chain(chain: DHChain, path) -> None:
    write_json(chain_to_dict(chain), path)


# ------------------------------------------------------------- polyline CSV

POLYLINE_HEADER = ["x_mm", "y_mm", "z_mm"]


def read_polyline(path) -> np.ndarray:
    rows = _read_csv(path, POLYLINE_HEADER)
    try:
        pts = np.array([[float(r[c]) for c in POLYLINE_HEADER] for r in rows])
    except ValueError as exc:
        raise ValidationError(f"{path}: non-numeric coordinate ({exc})") from exc
    if pts.shape[0] < 2:
        raise ValidationError(f"{path}: polyline needs at least 2 points")
    return pts


def write_polyline(points: np.ndarray, path) -> None:
    pts = np.asarray(points, float).reshape(-1, 3)
    _write_csv(path, POLYLINE_HEADER,
               [[fmt9(v) for v in p] for p in pts])


# ---------------------------------------------------------------- scene JSON

def read_scene(path) -> ObstacleScene:
    data = load_json(path)
    spheres = []
    for i, entry in enumerate(data.get("spheres", []), start=1):
        spheres.append(Sphere(center=_require(entry, "center_mm", f"sphere {i}"),
                              radius=float(_require(entry, "radius_mm", f"sphere {i}"))))
    boxes = []
    for i, entry in enumerate(data.get("boxes", []), start=1):
        boxes.append(Box(min_corner=_require(entry, "min_mm", f"box {i}"),
                         max_corner=_require(entry, "max_mm", f"box {i}")))
    return ObstacleScene(spheres=tuple(spheres), boxes=tuple(boxes))


def write_scene(scene: ObstacleScene, path) -> None:
    write_json({
        "spheres": [{"center_mm": list(s.center), "radius_mm": s.radius}
                    for s in scene.spheres],
        "boxes": [{"min_mm": list(b.min_corner), "max_mm": list(b.max_corner)}
                  for b in scene.boxes],
    }, path)


# ----------------------------------------------------------------- plan JSON

def plan_to_dict(plan: FabricationPlan) -> dict:
    return {
        "radius_mm": plan.radius,
        "cylinders_mm": list(plan.cylinders),
        "joints": [{"index": j.index,
                    "s_tilde_mm": j.s_tilde,
                    "axial_start_mm": j.axial_start,
                    "circumferential_mm": j.circumferential,
                    "d_g_mm": j.d_g}
                   for j in plan.joints],
        "arc_offsets_mm": list(plan.arc_offsets),
        "total_tube_length_mm": plan.total_tube_length,
    }


def plan_from_dict(data: dict, context: str = "plan") -> FabricationPlan:
    joints = []
    for entry in _require(data, "joints", context):
        joints.append(JointSpec(index=int(_require(entry, "index", context)),
                                s_tilde=float(_require(entry, "s_tilde_mm", context)),
                                axial_start=float(_require(entry, "axial_start_mm", context)),
                                circumferential=float(_require(entry, "circumferential_mm", context)),
                                d_g=float(_require(entry, "d_g_mm", context))))
    return FabricationPlan(
        radius=float(_require(data, "radius_mm", context)),
        cylinders=tuple(float(v) for v in _require(data, "cylinders_mm", context)),
        joints=tuple(joints),
        arc_offsets=tuple(float(v) for v in _require(data, "arc_offsets_mm", context)),
        total_tube_length=float(_require(data, "total_tube_length_mm", context)))


def read_plan(path) -> FabricationPlan:
    return plan_from_dict(load_json(path), context=str(path))


def write_plan(plan: FabricationPlan, path) -> None:
    write_json(plan_to_dict(plan), path)


# ---------------------------------------------------------------- marker CSV

MARKER_HEADER = ["marker_id", "t_s", "x_mm", "y_mm", "z_mm",
                 "qw", "qx", "qy", "qz"]


def read_markers(path) -> list:
    rows = _read_csv(path, MARKER_HEADER)
    samples = {}
    order = []
    for i, row in enumerate(rows, start=2):
        try:
            t = float(row["t_s"])
            p = np.array([float(row["x_mm"]), float(row["y_mm"]),
                          float(row["z_mm"])])
            q = np.array([float(row["qw"]), float(row["qx"]),
                          float(row["qy"]), float(row["qz"])])
        except ValueError as exc:
            raise ValidationError(f"{path}: line {i}: {exc}") from exc
        norm = np.linalg.norm(q)
        if abs(norm - 1.0) > 1e-6:
            raise ValidationError(
                f"{path}: line {i}: quaternion norm {norm:.6g} is not 1")
        marker_id = row["marker_id"]
        if marker_id not in samples:
            samples[marker_id] = []
            order.append(marker_id)
        samples[marker_id].append((t, RigidPose(quaternion_to_rotation(q), p)))
    return [MarkerRecord(marker_id=mid, samples=tuple(samples[mid]))
            for mid in order]


def write_markers(records, path) -> None:
    rows = []
    for rec in records:
        for t, pose in rec.samples:
            q = pose.quaternion()
            rows.append([rec.marker_id, fmt9(t),
                         *(fmt9(v) for v in pose.translation),
                         *(fmt9(v) for v in q)])
    _write_csv(path, MARKER_HEADER, rows)


# ------------------------------------------------------------ measured DH IO

def measured_to_dict(measured: MeasuredDH) -> dict:
    return {
        "phase": measured.phase,
        "joints": [{"joint": j, "theta_deg": math.degrees(v)}
                   for j, v in measured.joint_thetas],
        "twists": [{"link": i, "alpha_deg": math.degrees(v)}
                   for i, v in measured.link_alphas],
        "lengths": [{"link": i, "a_mm": v} for i, v in measured.link_lengths],
    }


def write_measured(measured: MeasuredDH, path) -> None:
    write_json(measured_to_dict(measured), path)


ERROR_HEADER = ["parameter", "joint_or_link_index", "target", "measured",
                "error", "phase"]


def write_errors(rows, path) -> None:
    _write_csv(path, ERROR_HEADER,
               [[r.parameter, str(r.index), fmt9(r.target), fmt9(r.measured),
                 fmt9(r.error), r.phase] for r in rows])


# ---------------------------------------------------------------- sample CSV

SAMPLE_HEADER = ["value", "method", "material", "phase", "parameter", "robot_id"]


def read_samples(path) -> SampleTable:
    rows = _read_csv(path, SAMPLE_HEADER)
    out = []
    for i, row in enumerate(rows, start=2):
        try:
            out.append(SampleRow(value=float(row["value"]),
                                 method=row["method"], material=row["material"],
                                 phase=row["phase"], parameter=row["parameter"],
                                 robot_id=row["robot_id"]))
        except (ValueError, ValidationError) as exc:
            raise ValidationError(f"{path}: line {i}: {exc}") from exc
    if not out:
        raise ValidationError(f"{path}: no sample rows")
    return SampleTable(rows=tuple(out))


def write_samples(table: SampleTable, path) -> None:
    _write_csv(path, SAMPLE_HEADER,
               [[fmt9(r.value), r.method, r.material, r.phase, r.parameter,
                 r.robot_id] for r in table.rows])


# ------------------------------------------------------------- trace outputs

FK_HEADER = ["frame", "x_mm", "y_mm", "z_mm", "qw", "qx", "qy", "qz"]
GROW_HEADER = ["everted_mm", "tip_x_mm", "tip_y_mm", "tip_z_mm", "clearance_mm"]


def write_fk_frames(frames, path) -> None:
    rows = []
    for i, pose in enumerate(frames):
        q = pose.quaternion()
        rows.append([str(i), *(fmt9(v) for v in pose.translation),
                     *(fmt9(v) for v in q)])
    _write_csv(path, FK_HEADER, rows)


def write_growth_trace(trace, path) -> None:
    """trace: iterable of (everted_mm, tip_xyz, clearance_mm or None)."""
    rows = []
    for everted, tip, clr in trace:
        rows.append([fmt9(everted), *(fmt9(v) for v in tip),
                     "" if clr is None else fmt9(clr)])
    _write_csv(path, GROW_HEADER, rows)


# ------------------------------------------------------------- CSV plumbing

def _read_csv(path, header):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise ValidationError(f"{path}: empty file")
            missing = [c for c in header if c not in reader.fieldnames]
            if missing:
                raise ValidationError(
                    f"{path}: missing columns {missing}; header is "
                    f"{reader.fieldnames}")
            return list(reader)
    except FileNotFoundError as exc:
        raise ValidationError(f"file not found: {path}") from exc
    except csv.Error as exc:
        raise ValidationError(f"{path}: malformed CSV ({exc})") from exc


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
