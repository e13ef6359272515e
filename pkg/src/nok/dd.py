"""Double description method over the integers.

Computes the extreme rays and lineality space of a polyhedral cone
``{x : <a_i, x> <= 0}`` given by integer constraint vectors.  Rays are kept
gcd-reduced, and ray adjacency during insertion uses the combinatorial
zero-set test, so the whole computation is exact and degeneracy-proof.
Conversions between vertex and halfspace descriptions of polytopes are thin
wrappers around the homogenized cone.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import UnboundedBody
from .linalg import dot, reduce_int_vector


def _combine(c1, v1, c2, v2):
    return tuple(c1 * a + c2 * b for a, b in zip(v1, v2))


def dd_cone(constraints, dim):
    """Extreme rays and lineality basis of {x in R^dim : <a, x> <= 0 for all a}.

    constraints: iterable of integer tuples.  Returns (rays, lineality) where
    rays is a list of (vector, zeroset bitmask over constraint indices) and
    lineality is a list of integer vectors.
    """
    lineality = [tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim)]
    rays = []
    seen = {}
    for index, raw in enumerate(constraints):
        a = reduce_int_vector(raw)
        if not any(a):
            continue
        if a in seen:
            continue
        seen[a] = index
        bit = 1 << index
        ds = [dot(a, l) for l in lineality]
        pivot = next((i for i, d in enumerate(ds) if d != 0), None)
        if pivot is not None:
            l0, d0 = lineality[pivot], ds[pivot]
            if d0 > 0:
                l0 = tuple(-x for x in l0)
                d0 = -d0
            new_lin = []
            for i, (l, dl) in enumerate(zip(lineality, ds)):
                if i == pivot:
                    continue
                if dl == 0:
                    new_lin.append(l)
                else:
                    new_lin.append(reduce_int_vector(_combine(d0, l, -dl, l0)))
            lineality = new_lin
            new_rays = []
            for v, z in rays:
                dv = dot(a, v)
                if dv == 0:
                    new_rays.append((v, z | bit))
                else:
                    # project onto the hyperplane along l0; coefficient of v is -d0 > 0
                    new_rays.append((reduce_int_vector(_combine(-d0, v, dv, l0)), z | bit))
            # the split lineality direction survives as a ray, tight on all
            # previously processed constraints
            new_rays.append((l0, bit - 1))
            rays = new_rays
            continue
        neg, zero, pos = [], [], []
        for v, z in rays:
            d = dot(a, v)
            if d < 0:
                neg.append((v, z, d))
            elif d == 0:
                zero.append((v, z | bit))
            else:
                pos.append((v, z, d))
        if not pos:
            rays = [(v, z) for v, z, _ in neg] + zero
            continue
        current = rays
        new_rays = [(v, z) for v, z, _ in neg] + zero
        for vp, zp, dp in pos:
            for vn, zn, dn in neg:
                common = zp & zn
                adjacent = True
                for vo, zo in current:
                    if vo is vp or vo is vn:
                        continue
                    if common & zo == common:
                        adjacent = False
                        break
                if adjacent:
                    w = reduce_int_vector(_combine(dp, vn, -dn, vp))
                    new_rays.append((w, common | bit))
        rays = new_rays
    unique = {}
    for v, z in rays:
        unique.setdefault(v, z)
    return [(v, z) for v, z in unique.items()], lineality


def _clear_denominators(values):
    fracs = [Fraction(v) for v in values]
    den = 1
    for f in fracs:
        den = den * f.denominator // gcd(den, f.denominator)
    return tuple(int(f * den) for f in fracs)


def facets_from_points(points):
    """H-description of conv(points) from exact rational points.

    Returns (facets, equalities): facets are (normal, offset) integer pairs
    with <normal, x> <= offset valid and tight on a facet; equalities cut out
    the affine hull (empty when the hull is full-dimensional).
    """
    n = len(points[0])
    constraints = [_clear_denominators(tuple(p) + (-1,)) for p in points]
    rays, lineality = dd_cone(constraints, n + 1)
    facets = []
    for v, _ in rays:
        normal, offset = v[:n], v[n]
        if any(normal):
            facets.append((normal, offset))
    equalities = []
    for l in lineality:
        normal, offset = l[:n], l[n]
        if any(normal):
            equalities.append((normal, offset))
    return facets, equalities


def vertices_from_halfspaces(halfspaces, dim):
    """V-description of {x : <u, x> <= c} for rational halfspaces.

    Raises UnboundedBody when the region contains a ray or a line; returns ()
    when the region is empty.
    """
    constraints = []
    for normal, offset in halfspaces:
        constraints.append(_clear_denominators(tuple(normal) + (-Fraction(offset),)))
    constraints.append(tuple([0] * dim + [-1]))
    rays, lineality = dd_cone(constraints, dim + 1)
    vertices = []
    recession = []
    for v, _ in rays:
        if v[dim] > 0:
            vertices.append(tuple(Fraction(x, v[dim]) for x in v[:dim]))
        elif any(v[:dim]):
            recession.append(v)
    if not vertices:
        return ()
    if recession or lineality:
        raise UnboundedBody("halfspace intersection is unbounded")
    return tuple(sorted(set(vertices)))
