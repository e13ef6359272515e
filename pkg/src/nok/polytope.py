"""Exact convex polytope engine.

Polytopes carry both representations at all times: rational vertices and
primitive-integer facet normals with rational offsets.  All arithmetic is
exact; floating point appears only in user-facing scalar conversions
(facet volumes, Hausdorff distances).  A polytope tagged APPROX is stored
with the same exact machinery, the tag recording that its coordinates were
rationalized from radical-valued or float data and that downstream
comparisons should be tolerance-based.

The face lattice (intersections of facet vertex sets) drives exact volume
computation via recursive pyramid triangulation, facet and ridge measures,
and point-to-body distances.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import factorial, gcd, sqrt

from . import dd
from .errors import DegenerateBody, DimensionMismatch, EmptyInput, IndexOutOfRange
from .linalg import affine_rank, dot, int_det, int_rank, reduce_int_vector
from .rational import format_rational, parse_rational

EXACT = "exact"
APPROX = "approx"

DEFAULT_TOL = 1e-9


class Facet:
    """One facet inequality <direction, x> <= offset with incident vertices."""

    __slots__ = ("direction", "offset", "vertex_ids")

    def __init__(self, direction, offset, vertex_ids=()):
        self.direction = tuple(direction)
        self.offset = Fraction(offset)
        self.vertex_ids = tuple(vertex_ids)

    def key(self):
        return (self.direction, self.offset)

    def __repr__(self):
        return f"Facet({self.direction}, {self.offset}, verts={len(self.vertex_ids)})"


def _normalize_facet(normal, offset):
    g = 0
    for x in normal:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero facet normal")
    return tuple(x // g for x in normal), Fraction(offset) / g


def _to_fraction_point(point):
    return tuple(parse_rational(c) for c in point)


def _infer_mode(points):
    for p in points:
        for c in p:
            if isinstance(c, float):
                return APPROX
    return EXACT


def combine_modes(*modes):
    return APPROX if APPROX in modes else EXACT


class Polytope:
    """Immutable convex polytope; construct via hull_from_vertices or from_halfspaces."""

    def __init__(self, dim, vertices, facets, equalities, mode):
        self.dim = dim
        self.vertices = vertices
        self.facets = facets
        self.equalities = equalities
        self.mode = mode
        self._cache = {}

    # -- construction -------------------------------------------------

    @classmethod
    def empty(cls, dim, mode=EXACT):
        return cls(dim, (), (), (), mode)

    @classmethod
    def _from_vertex_set(cls, points, mode):
        points = tuple(sorted(set(points)))
        n = len(points[0])
        raw_facets, raw_equalities = dd.facets_from_points(points)
        equalities = tuple(sorted(_normalize_facet(a, b) for a, b in raw_equalities))
        facets = sorted(set(_normalize_facet(a, b) for a, b in raw_facets))
        eq_rows = [e[0] for e in equalities]
        # integer-scaled points keep the tightness tests in int arithmetic
        den = 1
        for p in points:
            for c in p:
                den = den * c.denominator // gcd(den, c.denominator)
        ipoints = [tuple(int(c * den) for c in p) for p in points]
        tight_sets = []
        point_tight = [[] for _ in points]
        for j, (direction, offset) in enumerate(facets):
            onum, oden = offset.numerator, offset.denominator
            tight = [i for i, ip in enumerate(ipoints) if dot(direction, ip) * oden == onum * den]
            tight_sets.append(tight)
            for i in tight:
                point_tight[i].append(j)
        keep = []
        for i in range(len(points)):
            rows = [facets[j][0] for j in point_tight[i]] + eq_rows
            if int_rank(rows, n) == n:
                keep.append(i)
        remap = {old: new for new, old in enumerate(keep)}
        vertices = tuple(points[i] for i in keep)
        facet_objs = []
        for j, (direction, offset) in enumerate(facets):
            ids = tuple(remap[i] for i in tight_sets[j] if i in remap)
            facet_objs.append(Facet(direction, offset, ids))
        return cls(n, vertices, tuple(facet_objs), equalities, mode)

    # -- basic queries ------------------------------------------------

    @property
    def is_empty(self):
        return not self.vertices

    @property
    def affine_dim(self):
        if self.is_empty:
            return -1
        if "affdim" not in self._cache:
            self._cache["affdim"] = affine_rank(self.vertices)
        return self._cache["affdim"]

    @property
    def is_full_dim(self):
        return self.affine_dim == self.dim

    def _scaled_vertices(self):
        """Common denominator L and integer vertex matrix L * v."""
        if "scaled" not in self._cache:
            den = 1
            for v in self.vertices:
                for c in v:
                    den = den * c.denominator // gcd(den, c.denominator)
            ints = tuple(tuple(int(c * den) for c in v) for v in self.vertices)
            self._cache["scaled"] = (den, ints)
        return self._cache["scaled"]

    def support(self, direction):
        """max over the body of <direction, x>; direction rational."""
        if self.is_empty:
            raise EmptyInput("support of empty polytope")
        d = _to_fraction_point(direction)
        return max(sum(a * b for a, b in zip(d, v)) for v in self.vertices)

    def bounding_box(self):
        lo = tuple(min(v[i] for v in self.vertices) for i in range(self.dim))
        hi = tuple(max(v[i] for v in self.vertices) for i in range(self.dim))
        return lo, hi

    def diameter_sq(self):
        if len(self.vertices) < 2:
            return Fraction(0)
        best = Fraction(0)
        for i, v in enumerate(self.vertices):
            for w in self.vertices[i + 1 :]:
                d2 = sum((a - b) ** 2 for a, b in zip(v, w))
                if d2 > best:
                    best = d2
        return best

    def diameter(self):
        return sqrt(self.diameter_sq())

    def contains_point(self, point, tol=0.0):
        """Membership test; tol is a Euclidean slack distance."""
        p = _to_fraction_point(point)
        if len(p) != self.dim:
            raise DimensionMismatch(f"point dim {len(p)} != {self.dim}")
        if self.is_empty:
            return False
        tol = Fraction(tol) if tol else Fraction(0)
        t2 = tol * tol
        for rows in (tuple((f.direction, f.offset) for f in self.facets), self.equalities):
            for direction, offset in rows:
                excess = sum(a * b for a, b in zip(direction, p)) - offset
                if rows is self.equalities:
                    excess = abs(excess)
                if excess > 0 and excess * excess > t2 * dot(direction, direction):
                    return False
        return True

    def contains_polytope(self, other, tol=0.0):
        if other.dim != self.dim:
            raise DimensionMismatch("ambient dimensions differ")
        return all(self.contains_point(v, tol) for v in other.vertices)

    # -- face lattice, triangulation, measures ------------------------

    def _full_mask(self):
        return (1 << len(self.vertices)) - 1

    def _face_lattice(self):
        """All nonempty proper faces as vertex bitmasks, plus the body itself."""
        if "faces" not in self._cache:
            masks = set()
            facet_masks = []
            for f in self.facets:
                m = 0
                for i in f.vertex_ids:
                    m |= 1 << i
                facet_masks.append(m)
                masks.add(m)
            frontier = set(masks)
            while frontier:
                new = set()
                for a in frontier:
                    for b in facet_masks:
                        c = a & b
                        if c and c not in masks:
                            masks.add(c)
                            new.add(c)
                frontier = new
            full = self._full_mask()
            if full:
                masks.add(full)
            self._cache["faces"] = masks
            self._cache["facedim"] = {}
        return self._cache["faces"]

    def _mask_vertices(self, mask):
        ids = []
        i = 0
        while mask:
            if mask & 1:
                ids.append(i)
            mask >>= 1
            i += 1
        return ids

    def _face_dim(self, mask):
        dims = self._cache.setdefault("facedim", {})
        if mask not in dims:
            ids = self._mask_vertices(mask)
            if len(ids) == 1:
                dims[mask] = 0
            else:
                _, ints = self._scaled_vertices()
                base = ints[ids[0]]
                rows = [tuple(a - b for a, b in zip(ints[i], base)) for i in ids[1:]]
                dims[mask] = int_rank(rows, self.dim)
        return dims[mask]

    def _triangulate(self, mask):
        """Pyramid triangulation of a face into simplices (vertex id tuples)."""
        memo = self._cache.setdefault("tri", {})
        if mask in memo:
            return memo[mask]
        ids = self._mask_vertices(mask)
        k = self._face_dim(mask)
        if len(ids) == k + 1:
            memo[mask] = (tuple(ids),)
            return memo[mask]
        v0 = ids[0]
        v0_bit = 1 << v0
        out = []
        for sub in self._face_lattice():
            if sub != mask and sub & mask == sub and not sub & v0_bit and self._face_dim(sub) == k - 1:
                for s in self._triangulate(sub):
                    out.append(s + (v0,))
        memo[mask] = tuple(out)
        return memo[mask]

    def volume(self):
        """Exact Lebesgue volume; 0 for bodies of lower affine dimension."""
        if "volume" not in self._cache:
            n = self.dim
            if self.is_empty or self.affine_dim < n:
                self._cache["volume"] = Fraction(0)
            else:
                self._face_lattice()
                den, ints = self._scaled_vertices()
                total = 0
                for simplex in self._triangulate(self._full_mask()):
                    apex = ints[simplex[-1]]
                    rows = [tuple(a - b for a, b in zip(ints[i], apex)) for i in simplex[:-1]]
                    total += abs(int_det(rows))
                self._cache["volume"] = Fraction(total, factorial(n) * den ** n)
        return self._cache["volume"]

    def volume_error_bound(self):
        """Reported volume error: zero in exact mode, else a first-order bound
        from the coordinate quantization of radical-valued inputs."""
        if self.mode == EXACT or self.is_empty:
            return 0.0
        from .rational import precision_bits

        eps = 2.0 ** (-precision_bits())
        surface = sum(self.facet_volume(i) for i in range(len(self.facets)))
        return surface * eps * max(1.0, self.diameter())

    def _facet_mask(self, index):
        m = 0
        for i in self.facets[index].vertex_ids:
            m |= 1 << i
        return m

    def facet_weight(self, index):
        """Exact facet measure divided by |direction|: vol_{n-1}(F) / |u|_2."""
        weights = self._cache.setdefault("fweights", {})
        if index not in weights:
            if not 0 <= index < len(self.facets):
                raise IndexOutOfRange(f"facet {index}")
            f = self.facets[index]
            self._face_lattice()
            den, ints = self._scaled_vertices()
            n = self.dim
            mask = self._facet_mask(index)
            if self._face_dim(mask) < n - 1:
                weights[index] = Fraction(0)
            else:
                total = 0
                for simplex in self._triangulate(mask):
                    apex = ints[simplex[-1]]
                    rows = [tuple(a - b for a, b in zip(ints[i], apex)) for i in simplex[:-1]]
                    rows.append(f.direction)
                    total += abs(int_det(rows))
                weights[index] = Fraction(
                    total, den ** (n - 1) * factorial(n - 1) * dot(f.direction, f.direction)
                )
        return weights[index]

    def facet_volume(self, index):
        """(n-1)-dimensional measure of a facet, as a float."""
        w = self.facet_weight(index)
        f = self.facets[index]
        return float(w) * sqrt(dot(f.direction, f.direction))

    def ridge_weight(self, i, j):
        """Scaled ridge measure between facets i and j: the exact Jacobian
        entry d(facet i weight)/d(offset j) of the support-offset system."""
        fi, fj = self.facets[i], self.facets[j]
        mask = self._facet_mask(i) & self._facet_mask(j)
        if not mask:
            return Fraction(0)
        n = self.dim
        self._face_lattice()
        if mask not in self._face_lattice():
            # shared vertices that do not form a lattice face
            return Fraction(0)
        if self._face_dim(mask) != n - 2:
            return Fraction(0)
        den, ints = self._scaled_vertices()
        gram = dot(fi.direction, fi.direction) * dot(fj.direction, fj.direction) - dot(
            fi.direction, fj.direction
        ) ** 2
        if gram == 0:
            return Fraction(0)
        total = 0
        for simplex in self._triangulate(mask):
            apex = ints[simplex[-1]]
            rows = [tuple(a - b for a, b in zip(ints[k], apex)) for k in simplex[:-1]]
            rows.append(fi.direction)
            rows.append(fj.direction)
            total += abs(int_det(rows))
        return Fraction(total, den ** (n - 2) * factorial(n - 2) * gram)

    # -- distances ----------------------------------------------------

    def _float_faces(self):
        """Per-face orthonormal bases for fast nearest-point queries."""
        if "ffaces" not in self._cache:
            import numpy as np

            verts = np.array([[float(c) for c in v] for v in self.vertices])
            faces = []
            masks = set(self._face_lattice())
            if self.affine_dim == self.dim and self._full_mask() in masks:
                masks.discard(self._full_mask())
            for mask in sorted(masks):
                ids = self._mask_vertices(mask)
                v0 = verts[ids[0]]
                if len(ids) == 1:
                    faces.append((v0, None))
                    continue
                diffs = (verts[ids[1:]] - v0).T
                u, s, _ = np.linalg.svd(diffs, full_matrices=False)
                keep = s > 1e-12 * max(1.0, s[0])
                faces.append((v0, u[:, keep]))
            normals = np.array([[float(c) for c in f.direction] for f in self.facets])
            nrm = np.linalg.norm(normals, axis=1) if len(normals) else np.zeros(0)
            offsets = np.array([float(f.offset) for f in self.facets])
            eq_n = np.array([[float(c) for c in d] for d, _ in self.equalities])
            eq_nrm = np.linalg.norm(eq_n, axis=1) if len(eq_n) else np.zeros(0)
            eq_o = np.array([float(o) for _, o in self.equalities])
            self._cache["ffaces"] = (verts, faces, normals, offsets, nrm, eq_n, eq_o, eq_nrm)
        return self._cache["ffaces"]

    def distance_sq_to_point(self, point):
        """Squared Euclidean distance from a point to the body.

        Exact zero for contained points; otherwise a float computed by
        projecting onto every face's affine hull and keeping the feasible
        candidates.
        """
        import numpy as np

        p = _to_fraction_point(point)
        if self.is_empty:
            raise EmptyInput("distance to empty polytope")
        if self.contains_point(p):
            return 0.0
        verts, faces, normals, offsets, nrm, eq_n, eq_o, eq_nrm = self._float_faces()
        pf = np.array([float(c) for c in p])
        scale = max(1.0, float(np.abs(verts).max()), float(np.abs(pf).max()))
        slack = 1e-11 * scale
        best = None
        for v0, q in faces:
            if q is None:
                proj = v0
            else:
                rel = pf - v0
                proj = v0 + q @ (q.T @ rel)
            if len(normals) and np.any(normals @ proj - offsets > slack * nrm):
                continue
            if len(eq_n) and np.any(np.abs(eq_n @ proj - eq_o) > slack * eq_nrm):
                continue
            d2 = float(np.dot(pf - proj, pf - proj))
            if best is None or d2 < best:
                best = d2
        if best is None:
            best = float(min(np.sum((verts - pf) ** 2, axis=1)))
        return best

    def directed_hausdorff(self, other):
        if self.is_empty or other.is_empty:
            if self.is_empty and other.is_empty:
                return 0.0
            raise EmptyInput("Hausdorff distance with an empty body")
        if other.contains_polytope(self):
            return 0.0
        return max(other.distance_sq_to_point(v) for v in self.vertices) ** 0.5

    # -- transforms ---------------------------------------------------

    def translate(self, vector):
        t = _to_fraction_point(vector)
        if len(t) != self.dim:
            raise DimensionMismatch("translation vector dimension")
        if self.is_empty:
            return self
        vertices = tuple(tuple(a + b for a, b in zip(v, t)) for v in self.vertices)
        facets = tuple(
            Facet(f.direction, f.offset + sum(a * b for a, b in zip(f.direction, t)), f.vertex_ids)
            for f in self.facets
        )
        equalities = tuple(
            (d, o + sum(a * b for a, b in zip(d, t))) for d, o in self.equalities
        )
        return Polytope(self.dim, vertices, facets, equalities, self.mode)

    def scale(self, factor):
        lam = parse_rational(factor)
        if lam <= 0:
            raise ValueError("scale factor must be positive")
        if self.is_empty:
            return self
        mode = self.mode if isinstance(factor, (int, Fraction, str)) else APPROX
        vertices = tuple(tuple(lam * c for c in v) for v in self.vertices)
        facets = tuple(Facet(f.direction, lam * f.offset, f.vertex_ids) for f in self.facets)
        equalities = tuple((d, lam * o) for d, o in self.equalities)
        return Polytope(self.dim, vertices, facets, equalities, mode)

    def with_mode(self, mode):
        if mode == self.mode:
            return self
        return Polytope(self.dim, self.vertices, self.facets, self.equalities, mode)

    def canonical_position(self):
        """Translate so the bounding box minimum corner sits at the origin."""
        if self.is_empty:
            return self
        lo, _ = self.bounding_box()
        if all(c == 0 for c in lo):
            return self
        return self.translate(tuple(-c for c in lo))

    # -- serialization ------------------------------------------------

    def _num_out(self, q):
        return format_rational(q) if self.mode == EXACT else float(q)

    def to_json_dict(self):
        return {
            "dim": self.dim,
            "mode": self.mode,
            "vertices": [[self._num_out(c) for c in v] for v in self.vertices],
            "facets": [
                {
                    "normal": [self._num_out(Fraction(c)) for c in f.direction],
                    "offset": self._num_out(f.offset),
                    "vertices": list(f.vertex_ids),
                }
                for f in self.facets
            ],
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data):
        dim = int(data["dim"])
        mode = data.get("mode", EXACT)
        if mode not in (EXACT, APPROX):
            raise ValueError(f"unknown mode {mode!r}")
        verts = [tuple(parse_rational(c) for c in v) for v in data.get("vertices", [])]
        if not verts:
            return cls.empty(dim, mode)
        if any(len(v) != dim for v in verts):
            raise DimensionMismatch("vertex dimension disagrees with dim field")
        return cls._from_vertex_set(verts, mode)

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))

    def __repr__(self):
        return (
            f"Polytope(dim={self.dim}, vertices={len(self.vertices)}, "
            f"facets={len(self.facets)}, mode={self.mode})"
        )


# -- module-level operations -----------------------------------------


def hull_from_vertices(points, mode=None):
    """Convex hull of rational points with both representations populated.

    Lower-dimensional hulls are first-class: affine_dim reports the actual
    dimension and facet data describes the body inside its affine hull.
    """
    pts = list(points)
    if not pts:
        raise EmptyInput("hull of no points")
    if mode is None:
        mode = _infer_mode(pts)
    converted = [_to_fraction_point(p) for p in pts]
    n = len(converted[0])
    if n < 1:
        raise EmptyInput("points must have dimension >= 1")
    if any(len(p) != n for p in converted):
        raise DimensionMismatch("points of unequal dimension")
    return Polytope._from_vertex_set(converted, mode)


def from_halfspaces(halfspaces, dim, mode=EXACT):
    """Bounded intersection of halfspaces (normal, offset); may be empty."""
    hs = [(_to_fraction_point(u), parse_rational(c)) for u, c in halfspaces]
    if any(len(u) != dim for u, _ in hs):
        raise DimensionMismatch("halfspace dimension")
    vertices = dd.vertices_from_halfspaces(hs, dim)
    if not vertices:
        return Polytope.empty(dim, mode)
    return Polytope._from_vertex_set(vertices, mode)


def minkowski_sum(p, q):
    """{x + y : x in P, y in Q} via vertex sums and a hull."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"{p.dim} != {q.dim}")
    if p.is_empty or q.is_empty:
        return Polytope.empty(p.dim, combine_modes(p.mode, q.mode))
    sums = [tuple(a + b for a, b in zip(v, w)) for v in p.vertices for w in q.vertices]
    return Polytope._from_vertex_set(sums, combine_modes(p.mode, q.mode))


def hausdorff_distance(p, q):
    """Hausdorff distance between convex bodies.

    Exactly zero iff the bodies coincide (mutual containment is tested in
    exact arithmetic); positive values are floats from the face-projection
    scan, valid for convex sets when maximized over vertices.
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"{p.dim} != {q.dim}")
    return max(p.directed_hausdorff(q), q.directed_hausdorff(p))


def slab_intersection(p, axis, lo, hi):
    """P intersected with {lo <= x_axis <= hi}; may be empty or degenerate."""
    if not 0 <= axis < p.dim:
        raise IndexOutOfRange(f"axis {axis}")
    lo = parse_rational(lo)
    hi = parse_rational(hi)
    if lo > hi or p.is_empty:
        return Polytope.empty(p.dim, p.mode)
    halfspaces = [(f.direction, f.offset) for f in p.facets]
    for d, o in p.equalities:
        halfspaces.append((d, o))
        halfspaces.append((tuple(-c for c in d), -o))
    e = [0] * p.dim
    e[axis] = 1
    halfspaces.append((tuple(e), hi))
    e2 = [0] * p.dim
    e2[axis] = -1
    halfspaces.append((tuple(e2), -lo))
    return from_halfspaces(halfspaces, p.dim, p.mode)


def scale(p, factor):
    return p.scale(factor)


def translate(p, vector):
    return p.translate(vector)


def canonical_position(p):
    return p.canonical_position()


# -- OFF export -------------------------------------------------------


def _facet_cycle(p, index):
    """Vertex ids of a 2-dimensional facet ordered along its boundary."""
    mask = p._facet_mask(index)
    edges = [
        m
        for m in p._face_lattice()
        if m != mask and m & mask == m and p._face_dim(m) == 1
    ]
    adjacency = {}
    for m in edges:
        a, b = p._mask_vertices(m)
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    start = p._mask_vertices(mask)[0]
    cycle = [start]
    prev = None
    while True:
        nxt = [x for x in adjacency[cycle[-1]] if x != prev]
        prev = cycle[-1]
        cycle.append(nxt[0])
        if cycle[-1] == start:
            cycle.pop()
            break
    return cycle


def to_off(p):
    """OFF mesh text for bodies of ambient dimension at most 3."""
    if p.dim > 3:
        raise DimensionMismatch("OFF export only for dim <= 3")
    if p.is_empty:
        return "OFF\n0 0 0\n"
    verts = [tuple(float(c) for c in v) + (0.0,) * (3 - p.dim) for v in p.vertices]
    faces = []
    if p.dim == 3 and p.affine_dim == 3:
        for i in range(len(p.facets)):
            cycle = _facet_cycle(p, i)
            # orient outward
            a, b, c = (verts[cycle[0]], verts[cycle[1]], verts[cycle[2 % len(cycle)]])
            u = [b[k] - a[k] for k in range(3)]
            w = [c[k] - a[k] for k in range(3)]
            nrm = (
                u[1] * w[2] - u[2] * w[1],
                u[2] * w[0] - u[0] * w[2],
                u[0] * w[1] - u[1] * w[0],
            )
            d = p.facets[i].direction + (0,) * (3 - p.dim)
            if sum(x * float(y) for x, y in zip(nrm, d)) < 0:
                cycle.reverse()
            faces.append(cycle)
    elif p.affine_dim == 2:
        if p.dim == 2:
            mask = p._full_mask()
            edges = [m for m in p._face_lattice() if m != mask and p._face_dim(m) == 1]
            adjacency = {}
            for m in edges:
                a, b = p._mask_vertices(m)
                adjacency.setdefault(a, []).append(b)
                adjacency.setdefault(b, []).append(a)
            cycle = [0]
            prev = None
            while True:
                nxt = [x for x in adjacency[cycle[-1]] if x != prev]
                prev = cycle[-1]
                cycle.append(nxt[0])
                if cycle[-1] == 0:
                    cycle.pop()
                    break
            faces.append(cycle)
        else:
            faces.append(list(range(len(verts))))
    elif len(verts) > 1:
        faces.append(list(range(len(verts))))
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    for v in verts:
        lines.append(" ".join(repr(c) for c in v))
    for f in faces:
        lines.append(str(len(f)) + " " + " ".join(str(i) for i in f))
    return "\n".join(lines) + "\n"
