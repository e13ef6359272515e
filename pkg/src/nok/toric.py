"""Curve classes on toric varieties via the face-volume formula.

A movable curve class with positive dual volume determines a polytope whose
facet normal to the ray u_i has (n-1)-volume (alpha . D_i) |u_i| / (n-1)!.
Curve classes are supplied as their intersection lists (alpha . D_i), one
number per ray; the reconstruction itself is the Minkowski solver.  The fan
of a projectivized sum of line bundles over the projective line provides
the bridge to the bundle module: the same variety computed both ways.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from . import bundle as bd
from . import measure as ms
from . import polytope as pt
from .errors import LengthMismatch, NotCentered
from .linalg import int_rank, reduce_int_vector
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class FanData:
    """Ray generators of a fan: pairwise distinct primitive integer vectors
    spanning R^n."""

    dim: int
    rays: tuple

    def __post_init__(self):
        rays = tuple(reduce_int_vector(tuple(int(c) for c in u)) for u in self.rays)
        if len(set(rays)) != len(rays):
            raise ValueError("rays must be pairwise distinct")
        if any(len(u) != self.dim for u in rays):
            raise ValueError("ray dimension disagrees with fan dimension")
        if int_rank(list(rays), self.dim) != self.dim:
            raise ValueError("rays must span the ambient space")
        object.__setattr__(self, "rays", rays)

    @classmethod
    def from_json_dict(cls, data):
        rays = tuple(tuple(int(c) for c in u) for u in data["rays"])
        return cls(len(rays[0]), rays)

    def to_json_dict(self):
        return {"rays": [list(u) for u in self.rays]}


def _check_lengths(fan, intersections):
    if len(intersections) != len(fan.rays):
        raise LengthMismatch(
            f"{len(intersections)} intersection numbers for {len(fan.rays)} rays"
        )
    return [parse_rational(v) for v in intersections]


def toric_movability(fan: FanData, intersections) -> bool:
    """Movable with positive dual volume: all intersections non-negative and
    the positively-met rays span the ambient space."""
    values = _check_lengths(fan, intersections)
    if any(v < 0 for v in values):
        return False
    positive = [u for u, v in zip(fan.rays, values) if v > 0]
    return int_rank(positive, fan.dim) == fan.dim


def toric_curve_measure(fan: FanData, intersections) -> ms.AreaMeasure:
    """Prescribed area measure: mass (alpha . D_i) |u_i| / (n-1)! at u_i."""
    values = _check_lengths(fan, intersections)
    n = fan.dim
    atoms = [
        ms.Atom(u, v / factorial(n - 1))
        for u, v in zip(fan.rays, values)
        if v > 0
    ]
    return ms.AreaMeasure(n, atoms, pt.EXACT)


def toric_curve_polytope(fan: FanData, intersections, tol=ms.DEFAULT_TOL) -> pt.Polytope:
    """Polytope of a movable toric curve class, reconstructed from its
    prescribed facet volumes; canonical position."""
    if not toric_movability(fan, intersections):
        from .errors import NotMovable

        raise NotMovable("intersection numbers do not define a movable class")
    measure = toric_curve_measure(fan, intersections)
    report = ms.check_minkowski_conditions(measure, tol)
    if not report.centered:
        raise NotCentered(
            f"ray-weighted first moment {report.center_norm:.3e} does not vanish; "
            "the intersection list is not a curve class on a complete fan"
        )
    return ms.reconstruct(measure, tol)


@dataclass
class ToricBlaschkeReport:
    distance: float
    diameter: float
    tol: float
    facet_residuals: dict

    @property
    def ok(self):
        return self.distance <= self.tol * max(self.diameter, 1.0)


def toric_blaschke_check(fan: FanData, alpha, beta, tol=1e-6) -> ToricBlaschkeReport:
    """Compare the Blaschke sum of two curve polytopes with the polytope of
    the summed class; equality is expected for movable classes."""
    pa = toric_curve_polytope(fan, alpha, tol=min(tol, 1e-9))
    pb = toric_curve_polytope(fan, beta, tol=min(tol, 1e-9))
    gamma = [parse_rational(a) + parse_rational(b) for a, b in zip(alpha, beta)]
    pc = toric_curve_polytope(fan, gamma, tol=min(tol, 1e-9))
    summed = ms.blaschke_sum(pa, pb, tol=min(tol, 1e-9))
    distance = pt.hausdorff_distance(summed, pc.canonical_position())
    residuals = {}
    target = {a.direction: a.mass for a in toric_curve_measure(fan, gamma).atoms}
    got = {a.direction: a.mass for a in ms.area_measure(summed).atoms}
    for direction, mass in target.items():
        residuals[direction] = abs(got.get(direction, 0.0) - mass) / mass
    return ToricBlaschkeReport(distance, pc.diameter(), tol, residuals)


@dataclass(frozen=True)
class SplitBundleFan:
    """Fan of P(O(a_1) + ... + O(a_r)) over the projective line, with the
    divisor class of each ray in the (chi, f) basis."""

    fan: FanData
    twists: tuple
    ray_divisors: tuple  # DivisorClass per ray, aligned with fan.rays

    @property
    def bundle(self) -> bd.HNData:
        groups = []
        for a in sorted(set(self.twists)):
            groups.append((self.twists.count(a), a))
        return bd.HNData(tuple(groups))


def splitting_bundle_fan(twists) -> SplitBundleFan:
    """Standard fan of a projectivized split bundle over the projective line.

    r + 2 rays in R^r: the first coordinate carries the base, the fiber
    simplex lives in the remaining r - 1 coordinates, and the downward base
    ray is twisted by the degree differences.  Ray e_{i+1} carries the
    divisor class chi - a_i f; both horizontal rays carry the fiber class.
    """
    a = tuple(parse_rational(v) for v in twists)
    if any(v.denominator != 1 for v in a):
        raise ValueError("twists must be integers")
    a = tuple(int(v) for v in a)
    r = len(a)
    if r < 2:
        raise ValueError("need at least two summands")
    rays = []
    divisors = []
    e1 = tuple([1] + [0] * (r - 1))
    rays.append(e1)
    divisors.append(bd.DivisorClass(0, 1))
    down = [-1] + [a[i] - a[r - 1] for i in range(r - 1)]
    rays.append(tuple(down))
    divisors.append(bd.DivisorClass(0, 1))
    for i in range(r - 1):
        e = [0] * r
        e[i + 1] = 1
        rays.append(tuple(e))
        divisors.append(bd.DivisorClass(1, -a[i]))
    rays.append(tuple([0] + [-1] * (r - 1)))
    divisors.append(bd.DivisorClass(1, -a[r - 1]))
    return SplitBundleFan(FanData(r, tuple(rays)), a, tuple(divisors))


def bundle_curve_intersections(split: SplitBundleFan, curve: bd.CurveClass):
    """Intersection list of a bundle curve class against the toric divisors."""
    bundle = split.bundle
    return [bd.intersect(div, curve, bundle) for div in split.ray_divisors]


def curve_json_values(values):
    return [format_rational(parse_rational(v)) for v in values]
