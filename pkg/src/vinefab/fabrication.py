"""Compile a DH chain into physical fold/cylinder/offset fabrication parameters.

The body is a tube of radius r. A discrete bend of angle theta is created by
joining two points on the same circumferential meridian separated by an axial
distance s_tilde; consecutive bends are offset along the circumference by an
arc length s that realizes the link twist. A single bend of -theta at
meridian c is the same fold as +theta at meridian c + pi*r, so fold distances
are always computed from |theta|, while joint placement follows the signed
arc-offset formula as given. Compile/recover round trips are exact on chains
whose bends are all nonnegative (the recovery gauge).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateJointWarning, InfeasibleLinkError,
                     InversionError, SingularityError, ValidationError)
from .geometry import DHChain, wrap_angle

GAP_METHODS = ("tape", "weld", "loop")

# fasteners of the loop method hold the joined points a screw length apart
DEFAULT_LOOP_GAP_MM = 9.3

_THETA_LIMIT = math.pi - 1e-12
_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class GapModel:
    """Fastening method plus the residual gap d_g it leaves between joined points."""

    method: str
    d_g: float = 0.0

    def __post_init__(self):
        if self.method not in GAP_METHODS:
            raise ValidationError(
                f"method must be one of {GAP_METHODS}, got {self.method!r}")
        object.__setattr__(self, "d_g", float(self.d_g))
        if not math.isfinite(self.d_g) or self.d_g < 0.0:
            raise ValidationError(f"d_g must be >= 0, got {self.d_g}")

    @classmethod
    def for_method(cls, method: str, d_g: float | None = None) -> "GapModel":
        """Default gaps: tape and weld join points flush, loop leaves a screw length."""
        if d_g is None:
            d_g = DEFAULT_LOOP_GAP_MM if method == "loop" else 0.0
        return cls(method=method, d_g=d_g)


@dataclass(frozen=True)
class JointSpec:
    """Fabrication parameters of one joint in tube coordinates.

    The two connection points sit at (circumferential, axial_start) and
    (circumferential, axial_start + s_tilde); both share one meridian.
    """

    index: int
    s_tilde: float
    axial_start: float
    circumferential: float
    d_g: float

    def __post_init__(self):
        object.__setattr__(self, "index", int(self.index))
        for name in ("s_tilde", "axial_start", "circumferential", "d_g"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.s_tilde < 0.0:
            raise ValidationError(
                f"joint {self.index}: s_tilde must be >= 0, got {self.s_tilde}")
        if self.d_g < 0.0:
            raise ValidationError(
                f"joint {self.index}: d_g must be >= 0, got {self.d_g}")


@dataclass(frozen=True)
class FabricationPlan:
    """Cylinder lengths, joint folds, and circumferential offsets of one tube."""

    radius: float
    cylinders: tuple
    joints: tuple
    arc_offsets: tuple
    total_tube_length: float

    def __post_init__(self):
        object.__setattr__(self, "cylinders", tuple(float(v) for v in self.cylinders))
        object.__setattr__(self, "joints", tuple(self.joints))
        object.__setattr__(self, "arc_offsets",
                           tuple(float(v) for v in self.arc_offsets))
        if self.radius <= 0.0:
            raise ValidationError(f"radius must be > 0, got {self.radius}")
        n = len(self.cylinders)
        if len(self.joints) != n or len(self.arc_offsets) != max(n - 1, 0):
            raise ValidationError("plan has inconsistent joint/cylinder counts")
        for i, l in enumerate(self.cylinders, start=1):
            if l <= 0.0:
                raise InfeasibleLinkError(i, l, 0.0)
        expected = sum(self.cylinders) + sum(j.s_tilde for j in self.joints)
        if abs(self.total_tube_length - expected) > 1e-6:
            raise ValidationError(
                "total_tube_length must equal sum of cylinders and folds")

    @property
    def n(self) -> int:
        return len(self.cylinders)

    @property
    def circumference(self) -> float:
        return 2.0 * math.pi * self.radius


def axial_fold_distance(theta: float, r: float, d_g: float = 0.0) -> float:
    """Axial distance between the two points joined to create a bend of theta.

    Equals ``2*d_g/sqrt(2 + 2*cos(theta)) + 2*r*theta``; with d_g = 0 this
    reduces to ``2*r*theta`` exactly. Diverges as |theta| approaches pi.
    """
    theta, r, d_g = float(theta), float(r), float(d_g)
    if not math.isfinite(r) or r <= 0.0:
        raise ValidationError(f"r must be > 0, got {r}")
    if not math.isfinite(d_g) or d_g < 0.0:
        raise ValidationError(f"d_g must be >= 0, got {d_g}")
    if not math.isfinite(theta):
        raise ValidationError(f"theta must be finite, got {theta}")
    if abs(theta) >= _THETA_LIMIT:
        raise SingularityError(
            f"theta = {theta:.6g} rad: fold distance diverges at |theta| = pi")
    return 2.0 * d_g / math.sqrt(2.0 + 2.0 * math.cos(theta)) + 2.0 * r * theta


def cylinder_length(a: float, s_tilde_i: float, s_tilde_next: float,
                    link_index: int | None = None) -> float:
    """Length of the cylinder realizing a link: ``a - (s_i + s_next)/4``.

    Raises InfeasibleLinkError when the folds consume the whole link.
    """
    a, s_tilde_i, s_tilde_next = float(a), float(s_tilde_i), float(s_tilde_next)
    for name, v in (("a", a), ("s_tilde_i", s_tilde_i), ("s_tilde_next", s_tilde_next)):
        if not math.isfinite(v) or v < 0.0:
            raise ValidationError(f"{name} must be >= 0, got {v}")
    consumed = (s_tilde_i + s_tilde_next) / 4.0
    l = a - consumed
    if l <= 0.0:
        raise InfeasibleLinkError(link_index if link_index is not None else 0,
                                  a, consumed)
    return l


def _sgn(x: float) -> float:
    return float(np.sign(x))


def arc_offset(alpha: float, theta_i: float, theta_next: float, r: float) -> float:
    """Circumferential arc between consecutive joints realizing twist alpha.

    ``r * sgn(theta_i*theta_next) * (alpha - min(0, pi*sgn(theta_next)))``.
    A zero joint angle collapses the offset to 0 (sgn(0) = 0); when that
    discards a nonzero twist a DegenerateJointWarning is emitted.
    """
    if not math.isfinite(r) or r <= 0.0:
        raise ValidationError(f"r must be > 0, got {r}")
    sign_pair = _sgn(theta_i * theta_next)
    if sign_pair == 0.0 and alpha != 0.0:
        warnings.warn(
            f"zero joint angle collapses arc offset for twist {alpha:.6g} rad",
            DegenerateJointWarning, stacklevel=2)
    return r * sign_pair * (alpha - min(0.0, math.pi * _sgn(theta_next)))


def compile_plan(chain: DHChain, gap: GapModel) -> FabricationPlan:
    """Compile a chain into tube fabrication parameters.

    Layout: joint i's connection points sit at Z_i and Z_i + s_i on meridian
    c_i; cylinder i spans [Z_i + s_i, Z_{i+1}] with Z_{i+1} = Z_i + s_i + l_i;
    c_1 = 0 and c_{i+1} = (c_i + arc_i) mod circumference. Joints with zero
    angle receive no fold (s_i = 0) regardless of the gap model, and twist
    accumulated across such joints is carried into the placement of the next
    joint that actually folds.
    """
    r = chain.radius
    thetas = chain.thetas()
    alphas = chain.alphas()
    lengths = chain.lengths()
    n = chain.n

    s_tilde = np.zeros(n)
    d_g_used = np.zeros(n)
    for i in range(n):
        if thetas[i] != 0.0:
            s_tilde[i] = axial_fold_distance(abs(thetas[i]), r, gap.d_g)
            d_g_used[i] = gap.d_g

    cylinders = []
    for i in range(n):
        s_next = s_tilde[i + 1] if i + 1 < n else 0.0
        cylinders.append(cylinder_length(lengths[i], s_tilde[i], s_next,
                                         link_index=i + 1))

    # stored arc offsets: zero across foldless joints, with their twist carried
    # into the next folding joint so that c accumulates correctly
    arcs = np.zeros(max(n - 1, 0))
    pending = 0.0
    pending_degenerate = False
    ref_theta = thetas[0]
    for i in range(n - 1):
        pending += alphas[i]
        if thetas[i + 1] != 0.0:
            ref = ref_theta if ref_theta != 0.0 else thetas[i + 1]
            if pending_degenerate and pending != 0.0:
                warnings.warn(
                    f"carrying twist {pending:.6g} rad across foldless joints "
                    f"into joint {i + 2} placement",
                    DegenerateJointWarning, stacklevel=2)
            arcs[i] = arc_offset(pending, ref, thetas[i + 1], r)
            pending = 0.0
            pending_degenerate = False
            ref_theta = thetas[i + 1]
        else:
            arcs[i] = arc_offset(alphas[i], thetas[i], thetas[i + 1], r)
            pending_degenerate = True

    circumference = 2.0 * math.pi * r
    joints = []
    z = 0.0
    c = 0.0
    for i in range(n):
        joints.append(JointSpec(index=i + 1, s_tilde=float(s_tilde[i]),
                                axial_start=z, circumferential=c,
                                d_g=float(d_g_used[i])))
        z += s_tilde[i] + cylinders[i]
        if i < n - 1:
            c = (c + arcs[i]) % circumference

    return FabricationPlan(radius=r, cylinders=tuple(cylinders),
                           joints=tuple(joints), arc_offsets=tuple(arcs),
                           total_tube_length=z)


def _solve_fold_angle(s_tilde: float, r: float, d_g: float) -> float:
    """Invert the fold-distance formula for theta in [0, pi) by bisection."""
    lo, hi = 0.0, math.pi - 1e-6
    f_lo = axial_fold_distance(lo, r, d_g) - s_tilde
    if f_lo > _BISECT_TOL:
        raise InversionError(
            f"s_tilde = {s_tilde:.6g} mm is below the d_g floor {d_g:.6g} mm; "
            "no joint angle in [0, pi) produces it")
    if axial_fold_distance(hi, r, d_g) < s_tilde:
        raise InversionError(
            f"s_tilde = {s_tilde:.6g} mm exceeds the fold distance of any "
            "joint angle in [0, pi)")
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if axial_fold_distance(mid, r, d_g) < s_tilde:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def recover_chain(plan: FabricationPlan, gap: GapModel) -> DHChain:
    """Invert compile_plan: fabrication parameters back to a DH chain.

    Returns the nonnegative-angle gauge: every recovered joint angle lies in
    [0, pi), and the arc offsets are read back under that gauge, which makes
    this an exact inverse for chains whose bends are all nonnegative. The
    last link's twist leaves no trace in the plan and is 0.
    """
    r = plan.radius
    n = plan.n
    thetas = np.zeros(n)
    for i, joint in enumerate(plan.joints):
        if joint.s_tilde > 0.0:
            thetas[i] = _solve_fold_angle(joint.s_tilde, r, gap.d_g)

    lengths = np.zeros(n)
    for i in range(n):
        s_next = plan.joints[i + 1].s_tilde if i + 1 < n else 0.0
        lengths[i] = plan.cylinders[i] + (plan.joints[i].s_tilde + s_next) / 4.0

    alphas = np.zeros(n)
    ref_theta = thetas[0]
    for i in range(n - 1):
        if thetas[i + 1] != 0.0:
            ref = ref_theta if ref_theta != 0.0 else thetas[i + 1]
            sign_pair = _sgn(ref * thetas[i + 1])
            alphas[i] = wrap_angle(
                plan.arc_offsets[i] / (r * sign_pair)
                + min(0.0, math.pi * _sgn(thetas[i + 1])))
            ref_theta = thetas[i + 1]

    return DHChain.from_arrays(lengths, alphas, thetas, radius=r)
