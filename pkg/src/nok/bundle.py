"""Divisor and curve classes on a projective bundle over a curve.

The bundle enters only through its Harder-Narasimhan numerics: ranks and
slopes of the semistable quotients, from which the slope profile
sigma_1 >= ... >= sigma_r and the degree d are derived.  The intersection
ring is generated by the tautological class chi and the fiber class f with
f^2 = 0, chi^r = d [pt], chi^{r-1} f = [pt].

Everything downstream is the convex geometry of Newton-Okounkov bodies:
positivity cones, the defining inequality of the body of a divisor, its
decomposition into slices, the dual volume of movable curve classes via
one-dimensional minimization, the movable Zariski decomposition, and the
closed-form Blaschke sum of bodies of nef divisors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from . import polytope as pt
from .errors import (
    MNotPositive,
    NotEffective,
    NotMovable,
    NotNef,
    RankTooSmall,
)
from .rational import format_rational, is_perfect_power, nth_root, parse_rational


@dataclass(frozen=True)
class HNData:
    """Harder-Narasimhan numerics: (rank, slope) of each semistable quotient,
    listed with strictly increasing slopes."""

    quotients: tuple

    def __post_init__(self):
        q = tuple((int(r), parse_rational(mu)) for r, mu in self.quotients)
        if not q:
            raise ValueError("at least one quotient required")
        if any(r < 1 for r, _ in q):
            raise ValueError("quotient ranks must be positive")
        slopes = [mu for _, mu in q]
        if any(a >= b for a, b in zip(slopes, slopes[1:])):
            raise ValueError("quotient slopes must be strictly increasing")
        object.__setattr__(self, "quotients", q)

    @property
    def rank(self):
        return sum(r for r, _ in self.quotients)

    @property
    def degree(self):
        return sum(r * mu for r, mu in self.quotients)

    @property
    def sigma(self):
        """Slope profile sigma_1 >= ... >= sigma_r (largest slope first)."""
        out = []
        for r, mu in reversed(self.quotients):
            out.extend([mu] * r)
        return tuple(out)

    @property
    def is_semistable(self):
        return len(self.quotients) == 1

    @classmethod
    def from_json_dict(cls, data):
        return cls(tuple((int(e["rank"]), parse_rational(e["slope"])) for e in data))

    def to_json_dict(self):
        return [
            {"rank": r, "slope": format_rational(mu)} for r, mu in self.quotients
        ]


@dataclass(frozen=True)
class DivisorClass:
    """x * chi + y * f; for x != 0 this is a(chi - t f) with a = x, t = -y/x."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", parse_rational(self.x))
        object.__setattr__(self, "y", parse_rational(self.y))

    @property
    def a(self):
        return self.x

    @property
    def t(self):
        if self.x == 0:
            raise ZeroDivisionError("pure fiber class has no slope parameter")
        return -self.y / self.x

    def __add__(self, other):
        return DivisorClass(self.x + other.x, self.y + other.y)

    def __mul__(self, factor):
        lam = parse_rational(factor)
        return DivisorClass(lam * self.x, lam * self.y)

    __rmul__ = __mul__


@dataclass(frozen=True)
class CurveClass:
    """c1 * chi^{r-1} + c2 * chi^{r-2} f; for c1 != 0 also chi^{r-1} - s chi^{r-2} f
    up to scale, with s = -c2/c1."""

    c1: Fraction
    c2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c1", parse_rational(self.c1))
        object.__setattr__(self, "c2", parse_rational(self.c2))

    @property
    def s(self):
        if self.c1 == 0:
            raise ZeroDivisionError("fiber-power class has no slope parameter")
        return -self.c2 / self.c1

    def __add__(self, other):
        return CurveClass(self.c1 + other.c1, self.c2 + other.c2)

    def __mul__(self, factor):
        lam = parse_rational(factor)
        return CurveClass(lam * self.c1, lam * self.c2)

    __rmul__ = __mul__


class FlagPermutation:
    """Permutation of {1..r} in one-line notation: entry i is omega(i+1).

    Parametrizes the position of the flag relative to the filtration-adapted
    reference flag; it selects which slope enters each coefficient of the
    body's cutting hyperplane.
    """

    def __init__(self, images):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")
        self.images = images

    def __call__(self, i):
        return self.images[i - 1]

    def __len__(self):
        return len(self.images)

    def __eq__(self, other):
        return isinstance(other, FlagPermutation) and self.images == other.images

    def __repr__(self):
        return f"FlagPermutation{self.images}"

    @classmethod
    def standard(cls, r):
        """The long cycle 1 -> 2 -> ... -> r -> 1, the default flag position."""
        return cls(tuple(list(range(2, r + 1)) + [1]))

    @classmethod
    def identity(cls, r):
        return cls(tuple(range(1, r + 1)))


def intersect(divisor: DivisorClass, curve: CurveClass, bundle: HNData) -> Fraction:
    """Intersection number of a divisor and a curve class in the ring."""
    d = bundle.degree
    return divisor.x * (curve.c1 * d + curve.c2) + divisor.y * curve.c1


def divisor_power(divisor: DivisorClass, bundle: HNData) -> CurveClass:
    """(x chi + y f)^{r-1} expanded in the ring (f^2 = 0 kills higher terms)."""
    r = bundle.rank
    return CurveClass(
        divisor.x ** (r - 1), (r - 1) * divisor.x ** (r - 2) * divisor.y
    )


@dataclass(frozen=True)
class ConeTable:
    """Generator pairs for the positivity cones of divisors and curves.

    Movable and nef curve classes coincide on these bundles; the complete
    intersection cone cx sits inside them.
    """

    eff_divisors: tuple
    mov_divisors: tuple
    nef_divisors: tuple
    eff_curves: tuple
    mov_curves: tuple
    cx: tuple

    def to_json_dict(self):
        def dv(p):
            return [[format_rational(g.x), format_rational(g.y)] for g in p]

        def cv(p):
            return [[format_rational(g.c1), format_rational(g.c2)] for g in p]

        return {
            "eff_divisors": dv(self.eff_divisors),
            "mov_divisors": dv(self.mov_divisors),
            "nef_divisors": dv(self.nef_divisors),
            "eff_curves": cv(self.eff_curves),
            "mov_curves": cv(self.mov_curves),
            "cx": cv(self.cx),
        }


def cones(bundle: HNData) -> ConeTable:
    """The six positivity cones in terms of the slope profile."""
    r = bundle.rank
    if r < 2:
        raise RankTooSmall(f"rank {r} < 2")
    sigma = bundle.sigma
    d = bundle.degree
    fiber = DivisorClass(0, 1)
    fiber_curve = CurveClass(0, 1)
    return ConeTable(
        eff_divisors=(fiber, DivisorClass(1, -sigma[0])),
        mov_divisors=(fiber, DivisorClass(1, -sigma[1])),
        nef_divisors=(fiber, DivisorClass(1, -sigma[r - 1])),
        eff_curves=(fiber_curve, CurveClass(1, -(d - sigma[r - 1]))),
        mov_curves=(fiber_curve, CurveClass(1, -(d - sigma[0]))),
        cx=(fiber_curve, CurveClass(1, -(r - 1) * sigma[r - 1])),
    )


DIVISOR_LABELS = ("ample", "nef", "movable", "big", "pseudoeffective-boundary", "none")


def classify_divisor(divisor: DivisorClass, bundle: HNData) -> str:
    """Finest positivity label of a divisor class."""
    sigma = bundle.sigma
    r = bundle.rank
    if divisor.x == 0:
        return "nef" if divisor.y > 0 else "none"
    if divisor.x < 0:
        return "none"
    t = divisor.t
    if t < sigma[r - 1]:
        return "ample"
    if t <= sigma[r - 1]:
        return "nef"
    if t <= sigma[1]:
        return "movable"
    if t < sigma[0]:
        return "big"
    if t == sigma[0]:
        return "pseudoeffective-boundary"
    return "none"


CURVE_LABELS = (
    "complete-intersection",
    "movable-positive",
    "movable-boundary",
    "effective",
    "none",
)


def classify_curve(curve: CurveClass, bundle: HNData) -> str:
    """Finest positivity label of a curve class.

    movable-positive means movable with positive dual volume; the dual
    volume vanishes exactly when the class pairs to zero with some nonzero
    movable divisor class.
    """
    sigma = bundle.sigma
    r = bundle.rank
    d = bundle.degree
    if curve.c1 == 0:
        if curve.c2 > 0:
            return "movable-boundary"
        return "none"
    if curve.c1 < 0:
        return "none"
    s = curve.s
    if s <= (r - 1) * sigma[r - 1]:
        return "complete-intersection"
    if s < d - sigma[0]:
        return "movable-positive"
    if s == d - sigma[0]:
        return "movable-boundary"
    if s <= d - sigma[r - 1]:
        return "effective"
    return "none"


def _is_movable_curve(curve, bundle):
    return curve.c1 > 0 and curve.s <= bundle.degree - bundle.sigma[0]


def _has_positive_dual_volume(curve, bundle):
    return curve.c1 > 0 and curve.s < bundle.degree - bundle.sigma[1]


def body_of_divisor(divisor: DivisorClass, bundle: HNData, omega: FlagPermutation | None = None) -> pt.Polytope:
    """Newton-Okounkov body of a pseudoeffective divisor class, exact.

    The unit body for chi - t f lives in [0, inf) x (unit simplex) and is
    cut by the hyperplane whose coefficients are slope gaps selected by the
    flag permutation; the body of a(chi - t f) is the dilation by a.
    """
    r = bundle.rank
    sigma = bundle.sigma
    if omega is None:
        omega = FlagPermutation.standard(r)
    if len(omega) != r:
        raise ValueError(f"permutation length {len(omega)} != rank {r}")
    if divisor.x <= 0:
        raise NotEffective("divisor class needs a positive chi coefficient")
    t = divisor.t
    if t > sigma[0]:
        raise NotEffective(f"t = {t} exceeds the largest slope {sigma[0]}")
    top = sigma[omega(r) - 1]
    halfspaces = []
    e1 = [0] * r
    e1[0] = -1
    halfspaces.append((tuple(e1), 0))
    for i in range(2, r + 1):
        e = [0] * r
        e[i - 1] = -1
        halfspaces.append((tuple(e), 0))
    if r >= 2:
        halfspaces.append((tuple([0] + [1] * (r - 1)), 1))
    cut = [Fraction(1)] + [top - sigma[omega(i - 1) - 1] for i in range(2, r + 1)]
    halfspaces.append((tuple(cut), top - t))
    body = pt.from_halfspaces(halfspaces, r, pt.EXACT)
    if divisor.x != 1:
        body = body.scale(divisor.x)
    return body


def breakpoints(divisor: DivisorClass, bundle: HNData):
    """Slice boundaries a(sigma_i - t) along the first axis, descending."""
    t = divisor.t
    return tuple(divisor.x * (s - t) for s in bundle.sigma)


@dataclass(frozen=True)
class Slice:
    index: int
    lo: Fraction
    hi: Fraction
    body: pt.Polytope


@dataclass(frozen=True)
class SliceDecomposition:
    slices: tuple
    final_slice: Slice
    common_component: pt.Polytope
    breakpoints: tuple

    @property
    def all_slices(self):
        return self.slices + (self.final_slice,)


def body_slices(body: pt.Polytope, divisor: DivisorClass, bundle: HNData,
                omega: FlagPermutation | None = None) -> SliceDecomposition:
    """Decompose the body along the first axis at the slice boundaries.

    Slice i spans a[sigma_{i+1} - t, sigma_i - t]; the final slice runs down
    to zero and is empty exactly when the divisor is not nef.  The common
    component is the union of the non-final slices.
    """
    bps = breakpoints(divisor, bundle)
    r = bundle.rank
    slices = []
    for i in range(1, r):
        lo, hi = bps[i], bps[i - 1]
        slices.append(Slice(i, lo, hi, pt.slab_intersection(body, 0, lo, hi)))
    final = Slice(r, Fraction(0), bps[r - 1], pt.slab_intersection(body, 0, 0, bps[r - 1]))
    cc = pt.slab_intersection(body, 0, bps[r - 1], bps[0])
    return SliceDecomposition(tuple(slices), final, cc, bps)


def glue_slices(common: pt.Polytope, final: pt.Polytope) -> pt.Polytope:
    """Reassemble a body from its common component and final slice.

    The final slice is translated along the first axis until its top face
    meets the common component's bottom face, then the union is hulled; for
    pieces cut from one convex body this reproduces it exactly.
    """
    if final.is_empty:
        return common
    if common.is_empty:
        return final
    top = max(v[0] for v in final.vertices)
    bottom = min(v[0] for v in common.vertices)
    if top != bottom:
        shift = [Fraction(0)] * final.dim
        shift[0] = bottom - top
        final = final.translate(tuple(shift))
    return pt.hull_from_vertices(
        list(common.vertices) + list(final.vertices),
        pt.combine_modes(common.mode, final.mode),
    )


def positivity_from_body(body: pt.Polytope, bps) -> str:
    """Read the divisor's positivity off its body and slice boundaries.

    nef: every slice is non-empty (the final one may be degenerate);
    movable: the body contains the entire first slice, i.e. the slice's
    range does not spill below zero; big: positive volume.
    """
    if body.is_empty:
        return "none"
    bps = [parse_rational(b) for b in bps]
    r = len(bps)
    final = pt.slab_intersection(body, 0, 0, bps[r - 1])
    if not final.is_empty and bps[r - 1] > 0:
        return "ample"
    if not final.is_empty:
        return "nef"
    if r >= 2 and bps[1] >= 0:
        return "movable"
    if body.volume() > 0:
        return "big"
    return "pseudoeffective-boundary"


def divisor_volume(divisor: DivisorClass, bundle: HNData,
                   omega: FlagPermutation | None = None) -> Fraction:
    """r! times the Euclidean volume of the divisor's body (its volume as a
    divisor class); independent of the flag permutation."""
    body = body_of_divisor(divisor, bundle, omega)
    return factorial(bundle.rank) * body.volume()


@dataclass(frozen=True)
class DualVolume:
    value: float
    value_exact: Fraction | None
    u_star: Fraction
    on_nef_piece: bool


def _check_movable_positive(curve, bundle):
    if not _is_movable_curve(curve, bundle):
        raise NotMovable(f"curve class {curve} is not movable")
    if not _has_positive_dual_volume(curve, bundle):
        raise MNotPositive("dual volume vanishes for this class")


def dual_volume(curve: CurveClass, bundle: HNData) -> DualVolume:
    """Minimize ((A.curve) / vol(A)^{1/r})^{r/(r-1)} over big movable A.

    Scale invariance reduces the movable cone to the family A_u = chi - u f
    with u <= sigma_2.  On the nef piece u <= sigma_r the volume is linear
    and the critical point u = s/(r-1) is exact; past it the volume is
    piecewise polynomial with breakpoints at the slopes, and each piece is
    minimized by golden-section search.
    """
    _check_movable_positive(curve, bundle)
    r = bundle.rank
    d = bundle.degree
    sigma = bundle.sigma
    s = curve.s
    c1 = curve.c1
    u_crit = s / (r - 1)
    if u_crit <= sigma[r - 1]:
        base = d - r * u_crit
        exact = None
        if is_perfect_power(c1, r - 1):
            exact = nth_root(c1, r - 1) ** r * base
        value = float(c1) ** (r / (r - 1)) * float(base)
        return DualVolume(value, exact, u_crit, True)

    def objective(u):
        vol = divisor_volume(DivisorClass(1, -Fraction(u)), bundle)
        if vol <= 0:
            return float("inf")
        pairing = float(c1) * float(d - s - Fraction(u))
        return pairing ** (r / (r - 1)) / float(vol) ** (1 / (r - 1))

    cuts = sorted({float(x) for x in sigma if sigma[r - 1] <= x <= sigma[1]})
    cuts = [float(sigma[r - 1])] + cuts + [float(sigma[1])]
    best_u, best_val = None, float("inf")
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        u, val = _golden_section(objective, lo, hi)
        if val < best_val:
            best_u, best_val = u, val
    for u in cuts:
        val = objective(u)
        if val < best_val:
            best_u, best_val = u, val
    return DualVolume(best_val, None, Fraction(best_u), False)


def _golden_section(fn, lo, hi, rel_tol=1e-12):
    phi = (5 ** 0.5 - 1) / 2
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = fn(c), fn(d)
    while abs(b - a) > rel_tol * max(1.0, abs(a), abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fn(d)
    return (a + b) / 2, min(fc, fd)


@dataclass(frozen=True)
class MovableZariski:
    """The unique big movable divisor class whose (r-1)-st power recovers a
    movable curve class with positive dual volume."""

    divisor: DivisorClass
    lam: Fraction
    u_star: Fraction
    exact: bool
    nonnef: bool


def movable_zariski(curve: CurveClass, bundle: HNData) -> MovableZariski:
    """Decompose a movable curve class through a big movable divisor.

    Inside the complete intersection cone the decomposition is the exact
    (r-1)-st root; outside it the slope parameter is the achieved minimizer
    of the dual volume and the scale is normalized by matching volumes, so
    the result carries a nonnef flag and approximate scalars.
    """
    _check_movable_positive(curve, bundle)
    r = bundle.rank
    sigma = bundle.sigma
    s = curve.s
    u_crit = s / (r - 1)
    if u_crit <= sigma[r - 1]:
        lam = nth_root(curve.c1, r - 1)
        exact = is_perfect_power(curve.c1, r - 1)
        return MovableZariski(
            DivisorClass(lam, -lam * u_crit), lam, u_crit, exact, False
        )
    dv = dual_volume(curve, bundle)
    u = dv.u_star
    vol0 = divisor_volume(DivisorClass(1, -u), bundle)
    lam = Fraction((dv.value / float(vol0)) ** (1 / r))
    return MovableZariski(DivisorClass(lam, -lam * u), lam, u, False, True)


def body_of_curve(curve: CurveClass, bundle: HNData,
                  omega: FlagPermutation | None = None) -> pt.Polytope:
    """Newton-Okounkov body of a movable curve class: the body of its
    movable Zariski divisor."""
    mz = movable_zariski(curve, bundle)
    body = body_of_divisor(DivisorClass(1, -mz.u_star), bundle, omega)
    if mz.lam != 1:
        body = body.scale(mz.lam)
    if not mz.exact:
        body = body.with_mode(pt.APPROX)
    return body


@dataclass(frozen=True)
class ClosedFormSum:
    body: pt.Polytope
    b: Fraction
    t3: Fraction
    exact: bool


def blaschke_closed_form(d1: DivisorClass, d2: DivisorClass, bundle: HNData,
                         omega: FlagPermutation | None = None) -> ClosedFormSum:
    """Blaschke sum of the bodies of two big nef divisors, in closed form.

    For chi - t1 f and a(chi - t2 f), the sum is the body of b(chi - t3 f)
    with t3 the a^{r-1}-weighted mean of the slopes and b the (r-1)-st root
    of 1 + a^{r-1}.  General positive chi coefficients are handled by
    normalizing the first divisor and rescaling the output.
    """
    r = bundle.rank
    sigma = bundle.sigma
    if d1.x <= 0 or d2.x <= 0:
        raise NotNef("divisors must have positive chi coefficients")
    t1, t2 = d1.t, d2.t
    if t1 > sigma[r - 1] or t2 > sigma[r - 1]:
        raise NotNef(f"slopes ({t1}, {t2}) must not exceed sigma_r = {sigma[r-1]}")
    a = d2.x / d1.x
    apow = a ** (r - 1)
    t3 = (t1 + apow * t2) / (1 + apow)
    b = nth_root(1 + apow, r - 1)
    exact = is_perfect_power(1 + apow, r - 1)
    body = body_of_divisor(DivisorClass(1, -t3), bundle, omega).scale(d1.x * b)
    if not exact:
        body = body.with_mode(pt.APPROX)
    return ClosedFormSum(body, b, t3, exact)
