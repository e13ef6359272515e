"""Surface area measures and the discrete Minkowski problem.

An area measure is stored as atoms (direction, weight) where direction is a
primitive integer vector and weight is the facet measure divided by the
direction's Euclidean length.  The true atom mass is weight * |direction|,
so masses of rational polytopes are exact rationals times a shared square
root per direction; sums, centering checks and direction merges all stay in
exact arithmetic.

Reconstruction solves the support-offset system A_i(h) = f_i by damped
Newton iteration.  Offsets are kept as dyadic rationals so facet areas and
their derivatives (ridge measures) come from the exact polytope engine,
making every Newton step certifiable; the linear algebra itself runs in
floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import polytope as pt
from .errors import (
    DegenerateBody,
    DimensionMismatch,
    NoConvergence,
    NotCentered,
    NotSpanning,
)
from .dd import dd_cone
from .linalg import dot, reduce_int_vector
from .rational import parse_rational, sqrt_rational

DEFAULT_TOL = 1e-9
MAX_ITERATIONS = 10000
MAX_RESTARTS = 3
MERGE_ANGLE = 1e-12
_QUANT_BITS = 48

# merge threshold as an exact constant: angle <= MERGE_ANGLE roughly means
# cos^2 >= 1 - MERGE_ANGLE^2
_MERGE_COS2 = Fraction(1) - Fraction(1, 10 ** 24)


@dataclass(frozen=True)
class Atom:
    """One atom of a discrete area measure.

    direction: primitive integer vector (outward normal direction).
    weight: positive rational; the atom's mass is weight * |direction|.
    """

    direction: tuple
    weight: Fraction

    @property
    def mass(self) -> float:
        return float(self.weight) * math.sqrt(dot(self.direction, self.direction))

    def unit_direction(self):
        norm = math.sqrt(dot(self.direction, self.direction))
        return tuple(c / norm for c in self.direction)


class AreaMeasure:
    """Finite list of (direction, mass) atoms on the sphere."""

    def __init__(self, dim, atoms, mode=pt.EXACT):
        self.dim = dim
        self.atoms = tuple(atoms)
        self.mode = mode

    def __len__(self):
        return len(self.atoms)

    def masses(self):
        return [a.mass for a in self.atoms]

    def total_mass(self):
        return sum(self.masses())

    def center_vector(self):
        """Exact value of the first moment sum(mass * unit direction)."""
        total = [Fraction(0)] * self.dim
        for a in self.atoms:
            for i, c in enumerate(a.direction):
                total[i] += a.weight * c
        return tuple(total)

    def scaled(self, factor):
        lam = parse_rational(factor)
        if lam <= 0:
            raise ValueError("measure scale factor must be positive")
        return AreaMeasure(
            self.dim, [Atom(a.direction, a.weight * lam) for a in self.atoms], self.mode
        )

    def to_json_dict(self):
        atoms = []
        for a in self.atoms:
            entry = {
                "dir": [float(c) for c in a.unit_direction()],
                "mass": a.mass,
            }
            if self.mode == pt.EXACT:
                entry["direction"] = [int(c) for c in a.direction]
                entry["weight"] = f"{a.weight.numerator}/{a.weight.denominator}"
            atoms.append(entry)
        return {"dim": self.dim, "mode": self.mode, "atoms": atoms}

    @classmethod
    def from_json_dict(cls, data):
        dim = int(data["dim"])
        mode = data.get("mode", pt.APPROX)
        atoms = []
        for entry in data["atoms"]:
            if "direction" in entry and "weight" in entry:
                direction = reduce_int_vector(tuple(int(c) for c in entry["direction"]))
                weight = parse_rational(entry["weight"])
            else:
                direction = _snap_direction(tuple(float(c) for c in entry["dir"]))
                norm = math.sqrt(dot(direction, direction))
                weight = Fraction(float(entry["mass"]) / norm)
                mode = pt.APPROX
            if len(direction) != dim:
                raise DimensionMismatch("atom dimension disagrees with dim field")
            if weight <= 0:
                raise ValueError("atom masses must be positive")
            atoms.append(Atom(direction, weight))
        return cls(dim, _merge_atoms(atoms, mode), mode)

    def __repr__(self):
        return f"AreaMeasure(dim={self.dim}, atoms={len(self.atoms)}, mode={self.mode})"


def _snap_direction(unit, max_den=1 << 30):
    """Rationalize a float unit vector to a primitive integer direction."""
    fracs = [Fraction(c).limit_denominator(max_den) for c in unit]
    den = 1
    for f in fracs:
        den = den * f.denominator // math.gcd(den, f.denominator)
    return reduce_int_vector(tuple(int(f * den) for f in fracs))


def _same_direction(u, v):
    d = dot(u, v)
    if d <= 0:
        return False
    return d * d * Fraction(1) >= _MERGE_COS2 * dot(u, u) * dot(v, v)


def _merge_atoms(atoms, mode):
    """Combine atoms with equal directions; angular tolerance in approx mode."""
    merged = []
    for atom in atoms:
        if atom.weight == 0:
            continue
        hit = None
        for i, existing in enumerate(merged):
            if existing.direction == atom.direction:
                hit = (i, True)
                break
            if mode == pt.APPROX and _same_direction(existing.direction, atom.direction):
                hit = (i, False)
                break
        if hit is None:
            merged.append(atom)
            continue
        i, exact = hit
        rep = merged[i]
        if exact:
            merged[i] = Atom(rep.direction, rep.weight + atom.weight)
        else:
            ratio = sqrt_rational(
                Fraction(dot(atom.direction, atom.direction), dot(rep.direction, rep.direction))
            )
            merged[i] = Atom(rep.direction, rep.weight + atom.weight * ratio)
    return sorted(merged, key=lambda a: a.direction)


def area_measure(p: pt.Polytope) -> AreaMeasure:
    """Discrete surface area measure of a full-dimensional polytope."""
    if p.is_empty or p.affine_dim < p.dim:
        raise DegenerateBody(f"affine dimension {p.affine_dim} < {p.dim}")
    atoms = []
    for i, f in enumerate(p.facets):
        w = p.facet_weight(i)
        direction = f.direction
        if p.mode == pt.APPROX and max(abs(c) for c in direction) > (1 << 20):
            # normals rationalized from float data: snap to a short direction
            norm = math.sqrt(dot(direction, direction))
            snapped = _snap_direction(tuple(c / norm for c in direction))
            mass = float(w) * norm
            direction = snapped
            w = Fraction(mass / math.sqrt(dot(snapped, snapped)))
        atoms.append(Atom(direction, w))
    return AreaMeasure(p.dim, _merge_atoms(atoms, p.mode), p.mode)


def add(m1: AreaMeasure, m2: AreaMeasure) -> AreaMeasure:
    """Atom-wise sum of two measures."""
    if m1.dim != m2.dim:
        raise DimensionMismatch(f"{m1.dim} != {m2.dim}")
    mode = pt.combine_modes(m1.mode, m2.mode)
    return AreaMeasure(m1.dim, _merge_atoms(list(m1.atoms) + list(m2.atoms), mode), mode)


@dataclass
class MinkowskiReport:
    centered: bool
    spanning: bool
    center_norm: float
    rank: int
    dim: int

    @property
    def ok(self):
        return self.centered and self.spanning


def check_minkowski_conditions(measure: AreaMeasure, tol=DEFAULT_TOL) -> MinkowskiReport:
    """Check the two existence conditions for the Minkowski problem.

    centered: |sum mass * direction| <= tol (exact sum, float norm).
    spanning: directions span R^n and are not contained in a closed
    halfspace, i.e. no nonzero y has <u, y> >= 0 for every atom direction.
    """
    center = measure.center_vector()
    norm2 = sum(c * c for c in center)
    centered = norm2 <= Fraction(tol) ** 2
    rows = [a.direction for a in measure.atoms]
    from .linalg import int_rank

    rank = int_rank(rows, measure.dim) if rows else 0
    spanning = rank == measure.dim
    if spanning:
        rays, lineality = dd_cone([tuple(-c for c in u) for u in rows], measure.dim)
        if rays or lineality:
            spanning = False
    return MinkowskiReport(
        centered=bool(centered),
        spanning=spanning,
        center_norm=math.sqrt(float(norm2)),
        rank=rank,
        dim=measure.dim,
    )


@dataclass
class SolveResult:
    body: pt.Polytope
    iterations: int
    residual: float
    restarts: int


def _quantize(values, bits=_QUANT_BITS):
    """Round offsets to dyadic rationals on a 2**-bits relative grid.

    Keeping offsets on a coarse dyadic grid bounds the integer growth inside
    the exact geometry; the grid is refined only when Newton needs to push
    the residual below the grid's resolution.  Accepts floats or Fractions;
    Fraction inputs are rounded exactly, so refinement is meaningful beyond
    float precision.
    """
    scale = max(abs(float(v)) for v in values)
    if scale == 0:
        scale = 1.0
    step = Fraction(2) ** (math.frexp(scale)[1] - bits)
    out = []
    for v in values:
        if isinstance(v, Fraction):
            out.append(round(v / step) * step)
        else:
            out.append(Fraction(round(v / float(step))) * step)
    return tuple(out)


def _evaluate(directions, offsets, dim):
    """Body for offsets g and exact facet weights per input direction."""
    body = pt.from_halfspaces(list(zip(directions, offsets)), dim, pt.APPROX)
    weights = {f.direction: body.facet_weight(i) for i, f in enumerate(body.facets)}
    index = {f.direction: i for i, f in enumerate(body.facets)}
    w = [weights.get(u, Fraction(0)) for u in directions]
    return body, w, index


def _residual(w, targets):
    return max(float(abs(wi - ti) / ti) for wi, ti in zip(w, targets))


def _jacobian(body, directions, index, dim):
    n = len(directions)
    jac = np.zeros((n, n))
    udots = [dot(u, u) for u in directions]
    for a in range(n):
        ia = index.get(directions[a])
        if ia is None:
            continue
        row_sum = 0.0
        for b in range(n):
            if a == b:
                continue
            ib = index.get(directions[b])
            if ib is None:
                continue
            val = body.ridge_weight(ia, ib)
            if val:
                v = float(val)
                jac[a, b] = v
                row_sum += v * dot(directions[a], directions[b])
        jac[a, a] = -row_sum / udots[a]
    return jac


def _pull_to_touching(directions, offsets, dim, rounds=40):
    """Cheap presence fix: planes missing the body are re-seated together at a
    geometrically decaying depth.  Raises NoConvergence when it cycles, in
    which case the caller falls back to the ascent globalizer."""
    problem = set()
    depth = 0.02
    for _ in range(rounds):
        body, w, index = _evaluate(directions, offsets, dim)
        missing = [i for i, wi in enumerate(w) if wi == 0]
        if not missing:
            return offsets, body, w, index
        problem.update(missing)
        out = [float(x) for x in offsets]
        for i in sorted(problem):
            u = directions[i]
            hi = float(body.support(u))
            lo = min(float(sum(a * b for a, b in zip(u, v))) for v in body.vertices)
            out[i] = hi - depth * (hi - lo)
        offsets = _quantize(out)
        depth *= 0.75
    raise NoConvergence(rounds, 1.0, "could not realize all prescribed facets")


def _ascend_to_feasible(directions, targets, start, dim, rounds=400):
    """Globalization phase: projected gradient ascent on vol(P(g)) / L(g)^n.

    L(g) = sum(target_i * g_i) is the mixed-volume pairing with the target
    measure; the merit function is scale invariant and its maximizers are
    exactly the bodies solving the Minkowski problem, so ascent drives every
    prescribed facet to positive area.  The volume oracle is exact, making
    the ascent strictly monotone.  Returns offsets rescaled so facet weights
    roughly match the targets, ready for Newton refinement.
    """
    n = dim
    tf = [float(t) for t in targets]
    tt = sum(t * t for t in tf)

    def merit(offsets):
        body, w, index = _evaluate(directions, offsets, dim)
        vol = body.volume()
        lg = sum(t * Fraction(g) for t, g in zip(targets, offsets))
        if lg <= 0:
            return body, w, index, Fraction(-1)
        return body, w, index, vol / lg ** n

    offsets = _quantize(start)
    body, w, index, score = merit(offsets)
    for _ in range(rounds):
        wf = [float(x) for x in w]
        missing = [i for i, wi in enumerate(w) if wi == 0]
        lam = sum(a * b for a, b in zip(wf, tf)) / tt
        if not missing and lam > 0:
            resid = max(abs(wi - lam * ti) / (lam * ti) for wi, ti in zip(wf, tf))
            if resid <= 0.5:
                break
        grad = [wi - lam * ti for wi, ti in zip(wf, tf)]
        gnorm = max(abs(x) for x in grad)
        if gnorm == 0:
            break
        scale = max(abs(float(x)) for x in offsets) or 1.0
        eta = 0.5 * scale / gnorm
        improved = False
        for _ in range(40):
            trial = _quantize([float(g) + eta * d for g, d in zip(offsets, grad)])
            t_body, t_w, t_index, t_score = merit(trial)
            if t_score > score:
                offsets, body, w, index, score = trial, t_body, t_w, t_index, t_score
                improved = True
                break
            eta *= 0.5
        if not improved:
            break
    missing = [i for i, wi in enumerate(w) if wi == 0]
    if missing:
        raise NoConvergence(rounds, 1.0, "could not realize all prescribed facets")
    wf = [float(x) for x in w]
    lam = sum(a * b for a, b in zip(wf, tf)) / tt
    factor = lam ** (-1.0 / (n - 1))
    offsets = _quantize([float(g) * factor for g in offsets])
    body, w, index = _evaluate(directions, offsets, dim)
    return offsets, body, w, index


def solve_minkowski(measure: AreaMeasure, tol=DEFAULT_TOL, max_iterations=MAX_ITERATIONS) -> SolveResult:
    """Reconstruct the polytope with prescribed facet masses (Minkowski problem).

    Newton iteration on the support offsets with the exact facet-area oracle;
    the step is damped by a halving line search that enforces monotone
    decrease of the max relative facet residual and keeps every prescribed
    facet present.  A stalled search restarts from a rounder body; after
    MAX_RESTARTS restarts the solve is abandoned.
    """
    report = check_minkowski_conditions(measure, tol)
    if not report.centered:
        raise NotCentered(f"center norm {report.center_norm:.3e} exceeds {tol}")
    if not report.spanning:
        raise NotSpanning("directions lie in a closed halfspace or do not span")
    n = measure.dim
    if n < 2:
        raise DimensionMismatch("reconstruction needs dimension >= 2")
    directions = [a.direction for a in measure.atoms]
    targets = [a.weight for a in measure.atoms]
    norms = [math.sqrt(dot(u, u)) for u in directions]
    masses = [float(t) * nm for t, nm in zip(targets, norms)]
    total = sum(masses)
    count = len(masses)
    guess = [
        (m * count / total) ** (1.0 / (n - 1)) * nm
        for m, nm in zip(masses, norms)
    ]
    mean_radius = sum(guess) / sum(norms)

    def _globalize(start):
        try:
            return _pull_to_touching(directions, _quantize(start), n)
        except NoConvergence:
            return _ascend_to_feasible(directions, targets, start, n)

    offsets, body, w, index = _globalize(guess)
    res = _residual(w, targets)
    restarts = 0
    iterations = 0
    bits = _QUANT_BITS

    while iterations < max_iterations:
        if res <= tol:
            return SolveResult(body.canonical_position(), iterations, res, restarts)
        jac = _jacobian(body, directions, index, n)
        rhs = np.array([float(ti - wi) for wi, ti in zip(w, targets)])
        delta, *_ = np.linalg.lstsq(jac, rhs, rcond=None)
        step = 1.0
        accepted = False
        while step >= 2.0 ** -30:
            # exact addition of the float correction keeps refinement
            # meaningful past float precision
            trial = _quantize(
                [o + Fraction(step * d) for o, d in zip(offsets, delta)], bits
            )
            t_body, t_w, t_index = _evaluate(directions, trial, n)
            t_res = _residual(t_w, targets)
            if t_res < res and all(wi > 0 for wi in t_w):
                offsets, body, w, index, res = trial, t_body, t_w, t_index, t_res
                accepted = True
                break
            step *= 0.5
        iterations += 1
        if not accepted:
            if bits < 112:
                # residual has hit the offset grid's resolution: refine it
                bits += 16
                continue
            # inflate toward a ball of matching scale and re-globalize
            restarts += 1
            if restarts > MAX_RESTARTS:
                raise NoConvergence(iterations, res, "line search stalled")
            bits = _QUANT_BITS
            blended = [
                0.5 * float(x) + 0.5 * mean_radius * nm for x, nm in zip(offsets, norms)
            ]
            if restarts == 1:
                offsets, body, w, index = _globalize(blended)
            else:
                offsets, body, w, index = _ascend_to_feasible(directions, targets, blended, n)
            res = _residual(w, targets)
    raise NoConvergence(max_iterations, res)


def reconstruct(measure: AreaMeasure, tol=DEFAULT_TOL, max_iterations=MAX_ITERATIONS) -> pt.Polytope:
    """Polytope whose area measure matches the input within tol, canonically placed."""
    return solve_minkowski(measure, tol, max_iterations).body


def blaschke_sum(p: pt.Polytope, q: pt.Polytope, tol=DEFAULT_TOL) -> pt.Polytope:
    """Body whose area measure is the sum of the two input measures."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"{p.dim} != {q.dim}")
    total = add(area_measure(p), area_measure(q))
    return reconstruct(total, tol)


@dataclass
class StabilityProbe:
    eps: float
    distance: float
    diameter: float

    @property
    def ratio(self):
        return self.distance / (self.eps * self.diameter) if self.eps else float("inf")


def stability_probe(measure: AreaMeasure, eps, seed=0, tol=DEFAULT_TOL) -> StabilityProbe:
    """Empirical sensitivity of reconstruction to mass perturbations.

    Every mass is perturbed by at most a relative eps while keeping the
    measure centered; the probe reports the Hausdorff displacement of the
    reconstructed body.  Reported, never asserted: continuity of the
    reconstruction in this discrete setting is an open point.
    """
    rng = np.random.default_rng(seed)
    units = np.array([a.unit_direction() for a in measure.atoms], dtype=float)
    masses = np.array(measure.masses())
    # basis of mass perturbations that keep the measure centered
    _, s, vt = np.linalg.svd(units.T * masses, full_matrices=True)
    null = vt[np.sum(s > 1e-12) :]
    if null.size == 0:
        return StabilityProbe(eps, 0.0, reconstruct(measure, tol).diameter())
    combo = null.T @ rng.standard_normal(null.shape[0])
    combo /= np.max(np.abs(combo))
    perturbed = []
    for atom, delta in zip(measure.atoms, combo):
        factor = Fraction(1) + Fraction(float(eps * delta))
        perturbed.append(Atom(atom.direction, atom.weight * factor))
    m2 = AreaMeasure(measure.dim, perturbed, pt.APPROX)
    b1 = reconstruct(measure, tol)
    b2 = reconstruct(m2, tol)
    return StabilityProbe(eps, pt.hausdorff_distance(b1, b2), b1.diameter())
