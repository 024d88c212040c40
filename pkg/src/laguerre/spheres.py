"""Oriented spheres and hyperplanes in R^n and their light-cone coordinates.

An oriented sphere S(p, r) is the set of contact elements (x, xi) with
x - p = r xi; the sign of r records the orientation of the unit normal
(r > 0 outward, r < 0 inward, r = 0 the point sphere).  An oriented
hyperplane P(xi, lam) is the set of (x, xi) with x . xi = lam.

Both kinds map to points of the projective quadric {<g, g> = 0} in
RP^{n+2}:

    S(p, r)    ->  ( (1 + |p|^2 - r^2)/2, (1 - |p|^2 + r^2)/2, p, -r )
    P(xi, lam) ->  ( lam, -lam, xi, 1 )

The map is a bijection onto the quadric minus the single point [wp], which
plays the role of the point sphere at infinity.  Two elements are in
oriented contact exactly when their coordinates are orthogonal.  A contact
element (x, xi) corresponds to the projective line spanned by its point
sphere and its hyperplane; spheres of the pencil through (x, xi) are the
combinations gamma1 + mu * gamma2, which carry signed radius -mu.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lorentz
from .errors import InvalidCoordinateError, InvalidLineError, UsageError

UNIT_TOL = 1e-12


def _as_float_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise UsageError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise UsageError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class Sphere:
    """Oriented sphere with center p in R^n and signed radius r (r = 0 allowed)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_float_vector(self.center, "center"))
        object.__setattr__(self, "radius", float(self.radius))
        if not np.isfinite(self.radius):
            raise UsageError("radius must be finite")

    @property
    def n(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True, eq=False)
class Plane:
    """Oriented hyperplane x . normal = offset with unit normal.

    A normal that is not unit length is rejected outright rather than
    renormalized; silent fixes would hide caller bugs.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", _as_float_vector(self.normal, "normal"))
        object.__setattr__(self, "offset", float(self.offset))
        if abs(np.linalg.norm(self.normal) - 1.0) > UNIT_TOL:
            raise UsageError("plane normal must be a unit vector")

    @property
    def n(self) -> int:
        return self.normal.shape[0]


@dataclass(frozen=True)
class PointAtInfinity:
    """The point sphere at infinity, the one quadric point with no element."""


SphereElement = Sphere | Plane


@dataclass(frozen=True, eq=False)
class ContactElement:
    """A point of the unit tangent bundle: base point x and unit vector xi."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _as_float_vector(self.x, "x"))
        object.__setattr__(self, "xi", _as_float_vector(self.xi, "xi"))
        if self.x.shape != self.xi.shape:
            raise UsageError("x and xi must have the same dimension")
        if abs(np.linalg.norm(self.xi) - 1.0) > UNIT_TOL:
            raise UsageError("xi must be a unit vector")

    @property
    def n(self) -> int:
        return self.x.shape[0]


def normalize_representative(vec: np.ndarray) -> np.ndarray:
    """Scale a nonzero vector so its first entry of largest magnitude is +1."""
    vec = np.asarray(vec, dtype=float)
    idx = int(np.argmax(np.abs(vec)))
    pivot = vec[idx]
    if pivot == 0.0:
        raise InvalidCoordinateError("zero vector has no projective class")
    return vec / pivot


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of the quadric, stored through a canonical representative.

    The representative is rescaled on construction so that its first entry
    of largest magnitude equals +1, which makes projective equality an
    ordinary comparison.  Construction rejects vectors that are not
    light-like within ``tol`` relative to the squared Euclidean norm.
    """

    vec: np.ndarray
    tol: float = field(default=1e-10, compare=False)

    def __post_init__(self):
        rep = normalize_representative(_as_float_vector(self.vec, "representative"))
        if rep.shape[0] < lorentz.MIN_BASE_DIM + 3:
            raise UsageError("representative too short for any base dimension >= 3")
        q = lorentz.inner(rep, rep)
        if abs(q) > self.tol * float(np.dot(rep, rep)):
            raise InvalidCoordinateError(f"representative is not light-like (<g,g> = {q:.3e})")
        object.__setattr__(self, "vec", rep)

    @property
    def n(self) -> int:
        return self.vec.shape[0] - 3

    def same_point(self, other: "ProjectivePoint", tol: float = 1e-9) -> bool:
        """Projective equality: proportionality of the representatives."""
        if self.vec.shape != other.vec.shape:
            return False
        u, v = self.vec, other.vec
        s = float(np.dot(u, v) / np.dot(v, v))
        return bool(np.abs(u - s * v).max() <= tol * max(1.0, np.abs(u).max()))


@dataclass(frozen=True, eq=False)
class LieLine:
    """The projective line of a contact element, spanned by its point sphere
    (gamma1) and its hyperplane (gamma2)."""

    gamma1: ProjectivePoint
    gamma2: ProjectivePoint

    def __post_init__(self):
        g1, g2 = self.gamma1.vec, self.gamma2.vec
        if g1.shape != g2.shape:
            raise UsageError("line generators must share a dimension")
        w = lorentz.wp(self.gamma1.n)
        scale = float(np.linalg.norm(g1) * np.linalg.norm(g2))
        if abs(lorentz.inner(g1, g2)) > 1e-9 * scale:
            raise InvalidLineError("generators are not mutually orthogonal")
        if abs(lorentz.inner(g2, w)) > 1e-9 * np.linalg.norm(g2):
            raise InvalidLineError("second generator must pair to zero with wp (a hyperplane)")
        if abs(lorentz.inner(g1, w)) <= 1e-9 * np.linalg.norm(g1):
            raise InvalidLineError("first generator must not pair to zero with wp (a sphere)")


def sphere_coord_vector(s: SphereElement) -> np.ndarray:
    """Raw light-cone representative of an oriented sphere or hyperplane."""
    if isinstance(s, Sphere):
        p, r = s.center, s.radius
        pp = float(np.dot(p, p))
        return np.concatenate(
            [[0.5 * (1.0 + pp - r * r), 0.5 * (1.0 - pp + r * r)], p, [-r]]
        )
    if isinstance(s, Plane):
        return np.concatenate([[s.offset, -s.offset], s.normal, [1.0]])
    raise UsageError(f"not a sphere element: {type(s).__name__}")


def sphere_coord(s: SphereElement) -> ProjectivePoint:
    """Quadric coordinate of an oriented sphere or hyperplane."""
    return ProjectivePoint(sphere_coord_vector(s))


def point_sphere_vector(x: np.ndarray) -> np.ndarray:
    """Coordinate of the point sphere S(x, 0), normalized to pair -1 with wp."""
    x = np.asarray(x, dtype=float)
    xx = float(np.dot(x, x))
    return np.concatenate([[0.5 * (1.0 + xx), 0.5 * (1.0 - xx)], x, [0.0]])


def classify_coord(
    gamma: ProjectivePoint | np.ndarray, tol: float = 1e-10
) -> SphereElement | PointAtInfinity:
    """Invert the coordinate map: recover the element behind a quadric point.

    The sphere branch rescales the representative so it pairs to -1 with
    wp and reads the center from the middle block and the signed radius
    from (minus) the last entry.  [wp] itself returns PointAtInfinity and
    is never silently reported as a hyperplane.
    """
    if isinstance(gamma, ProjectivePoint):
        rep = gamma.vec
    else:
        rep = normalize_representative(np.asarray(gamma, dtype=float))
        q = lorentz.inner(rep, rep)
        if abs(q) > max(tol, 1e-10) * float(np.dot(rep, rep)):
            raise InvalidCoordinateError("input is not a light-like coordinate")
    n = rep.shape[0] - 3
    w = lorentz.wp(n)
    # Projective test against the improper point: kill the component along
    # it and see what is left (robust against pivot ties in normalization).
    unit = w / np.linalg.norm(w)
    residue = rep - np.dot(rep, unit) * unit
    if np.abs(residue).max() <= max(tol, 1e-12) * max(1.0, float(np.abs(rep).max())):
        return PointAtInfinity()
    pairing = lorentz.inner(rep, w)
    if abs(pairing) > tol * float(np.abs(rep).max()):
        u = rep / (-pairing)
        return Sphere(center=u[2:-1], radius=-u[-1])
    last = rep[-1]
    if abs(last) <= tol * float(np.abs(rep).max()):
        raise InvalidCoordinateError("degenerate coordinate: neither sphere, plane nor infinity")
    u = rep / last
    xi = u[2:-1]
    # Light-likeness forces |xi| = 1 up to rounding; absorb the dust so the
    # strict Plane constructor does not trip over it.
    norm = float(np.linalg.norm(xi))
    return Plane(normal=xi / norm, offset=u[0] / norm)


def oriented_contact(a: SphereElement, b: SphereElement, tol: float = 1e-9) -> bool:
    """True iff the two elements are tangent with matching orientations."""
    ga = sphere_coord(a).vec
    gb = sphere_coord(b).vec
    scale = float(np.linalg.norm(ga) * np.linalg.norm(gb))
    return bool(abs(lorentz.inner(ga, gb)) <= tol * scale)


def tangential_invariant(a: SphereElement, b: SphereElement) -> float:
    """Squared length of the common tangent segment of two spheres,
    |p* - p|^2 - (r* - r)^2.  Vanishes exactly at oriented contact."""
    if not isinstance(a, Sphere) or not isinstance(b, Sphere):
        raise UsageError("the tangential invariant is defined for spheres only")
    dp = b.center - a.center
    dr = b.radius - a.radius
    return float(np.dot(dp, dp) - dr * dr)


def lie_line(c: ContactElement) -> LieLine:
    """Projective line of the sphere pencil through a contact element."""
    g1 = point_sphere_vector(c.x)
    lam = float(np.dot(c.x, c.xi))
    g2 = np.concatenate([[lam, -lam], c.xi, [1.0]])
    return LieLine(ProjectivePoint(g1), ProjectivePoint(g2))


def contact_from_line(line: LieLine) -> ContactElement:
    """Recover (x, xi) from a contact line.

    Works for any pair of generators: the hyperplane member is the
    combination pairing to zero with wp, the point sphere the combination
    with vanishing last coordinate.
    """
    g1, g2 = line.gamma1.vec, line.gamma2.vec
    n = line.gamma1.n
    w = lorentz.wp(n)

    s1 = lorentz.inner(g1, w)
    s2 = lorentz.inner(g2, w)
    plane_rep = s1 * g2 - s2 * g1
    point_rep = g2[-1] * g1 - g1[-1] * g2
    scale = max(float(np.abs(g1).max()), float(np.abs(g2).max()))
    if np.abs(plane_rep).max() <= 1e-12 * scale or np.abs(point_rep).max() <= 1e-12 * scale:
        raise InvalidLineError("degenerate line: generators are projectively equal")

    point = classify_coord(normalize_representative(point_rep))
    plane = classify_coord(normalize_representative(plane_rep))
    if not isinstance(point, Sphere) or abs(point.radius) > 1e-9 * (1 + np.abs(point.center).max()):
        raise InvalidLineError("line does not contain a point sphere")
    if not isinstance(plane, Plane):
        raise InvalidLineError("line does not contain a hyperplane")
    return ContactElement(x=point.center, xi=plane.normal)


def element_to_json(s: SphereElement) -> dict:
    if isinstance(s, Sphere):
        return {"kind": "sphere", "center": s.center.tolist(), "radius": s.radius}
    if isinstance(s, Plane):
        return {"kind": "plane", "normal": s.normal.tolist(), "offset": s.offset}
    raise UsageError(f"not a sphere element: {type(s).__name__}")


def element_from_json(obj: dict) -> SphereElement:
    try:
        kind = obj["kind"]
        if kind == "sphere":
            return Sphere(center=np.asarray(obj["center"], dtype=float), radius=obj["radius"])
        if kind == "plane":
            return Plane(normal=np.asarray(obj["normal"], dtype=float), offset=obj["offset"])
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed sphere element: {exc}") from exc
    raise UsageError(f"unknown sphere element kind {kind!r}")
