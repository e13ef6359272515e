"""Named verification suites over randomized inputs.

Each suite checks one of the package's governing identities or inequalities
on a seeded random corpus and reports per-case pass/fail with residuals.
Cases are independent pure computations, so a suite can fan them out to a
process pool; ordering is fixed by case index regardless of worker count.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from . import bundle as bd
from . import measure as ms
from . import polytope as pt
from . import toric as tc
from .errors import NotEffective, UnknownSuite
from .rational import sqrt_rational

F = Fraction


@dataclass
class CaseResult:
    index: int
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    seed: int
    tol: float
    cases: list

    @property
    def ok(self):
        return all(c.passed for c in self.cases)

    @property
    def worst(self):
        return max((c.residual for c in self.cases), default=0.0)

    def lines(self):
        out = []
        for c in self.cases:
            status = "PASS" if c.passed else "FAIL"
            line = f"[{c.index:4d}] {status}  {c.name}  residual={c.residual:.3e}"
            if c.detail:
                line += f"  {c.detail}"
            out.append(line)
        out.append(
            f"suite {self.suite}: {'PASS' if self.ok else 'FAIL'} "
            f"({sum(c.passed for c in self.cases)}/{len(self.cases)} cases, "
            f"worst residual {self.worst:.3e})"
        )
        return out


def random_hn(rng, r):
    """Random Harder-Narasimhan numerics of total rank r, rational slopes."""
    parts = []
    remaining = r
    slope = F(rng.randint(-4, 0), rng.randint(1, 4))
    while remaining > 0:
        k = rng.randint(1, remaining)
        parts.append((k, slope))
        slope += F(rng.randint(1, 8), rng.randint(1, 4))
        remaining -= k
    return bd.HNData(tuple(parts))


def random_polytope(rng, dim, npoints, denom=8, spread=16):
    while True:
        pts = [
            tuple(F(rng.randint(-spread, spread), denom) for _ in range(dim))
            for _ in range(npoints)
        ]
        p = pt.hull_from_vertices(pts)
        if p.affine_dim == dim:
            return p


def _hn_args(x):
    return tuple(x.quotients)


# -- case workers (module level for process pools) ---------------------


def _case_volume_ring(quotients, t, index):
    x = bd.HNData(quotients)
    vol = bd.divisor_volume(bd.DivisorClass(1, -t), x)
    expected = x.degree - x.rank * t
    passed = vol == expected
    return (
        f"r={x.rank} t={t}",
        passed,
        abs(float(vol - expected)),
        "exact" if passed else f"{vol} != {expected}",
    )


def _case_mthm(quotients, a1, t1, a2, t2, tol, index):
    x = bd.HNData(quotients)
    d1 = bd.DivisorClass(a1, -a1 * t1)
    d2 = bd.DivisorClass(a2, -a2 * t2)
    alpha = bd.divisor_power(d1, x)
    beta = bd.divisor_power(d2, x)
    pa = bd.body_of_curve(alpha, x)
    pb = bd.body_of_curve(beta, x)
    pc = bd.body_of_curve(alpha + beta, x).canonical_position()
    summed = ms.blaschke_sum(pa, pb, min(tol * 1e-3, 1e-9))
    closed = bd.blaschke_closed_form(d1, d2, x).body.canonical_position()
    diam = max(pc.diameter(), 1.0)
    d_sum = pt.hausdorff_distance(summed, pc)
    d_closed = pt.hausdorff_distance(closed, pc)
    residual = max(d_sum, d_closed) / diam
    return (
        f"r={x.rank} a={a2}/{a1} t=({t1},{t2})",
        residual <= tol,
        residual,
        f"dH(sum)={d_sum:.2e} dH(closed)={d_closed:.2e}",
    )


def _case_roundtrip(dim, points, tol, index):
    body = pt.hull_from_vertices(points)
    result = ms.solve_minkowski(ms.area_measure(body), 1e-10)
    d = pt.hausdorff_distance(result.body, body.canonical_position())
    rel = d / body.diameter()
    passed = result.residual <= tol and rel <= 1e-6
    return (
        f"dim={dim} facets={len(body.facets)}",
        passed,
        max(result.residual, rel),
        f"area_res={result.residual:.2e} dH/diam={rel:.2e}",
    )


def _case_cube_law(n, tol, index):
    atoms = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        atoms.append(ms.Atom(tuple(e), F(2)))
        atoms.append(ms.Atom(tuple(-c for c in e), F(2)))
    body = ms.reconstruct(ms.AreaMeasure(n, atoms), 1e-11)
    side = 2 ** (1 / (n - 1))
    err = 0.0
    for i in range(n):
        e = [0] * n
        e[i] = 1
        err = max(err, abs(float(body.support(tuple(e))) - side))
        err = max(err, abs(min(float(v[i]) for v in body.vertices)))
    return (f"n={n}", err <= tol, err, f"side={side:.12f}")


def _case_blaschke_2d(points_a, points_b, tol, index):
    a = pt.hull_from_vertices(points_a)
    b = pt.hull_from_vertices(points_b)
    summed = ms.blaschke_sum(a, b, 1e-12)
    mink = pt.minkowski_sum(a, b).canonical_position()
    d = pt.hausdorff_distance(summed, mink)
    rel = d / mink.diameter()
    return ("polygon pair", rel <= tol, rel, f"dH={d:.2e}")


def _case_log_concavity(quotients, s1, c1, s2, c2, homothetic, tol, index):
    x = bd.HNData(quotients)
    r = x.rank
    alpha = bd.CurveClass(c1, -c1 * s1)
    beta = (
        alpha * (F(c2) ** (r - 1))
        if homothetic
        else bd.CurveClass(c2, -c2 * s2)
    )
    exp = (r - 1) / r
    ma = bd.dual_volume(alpha, x).value
    mb = bd.dual_volume(beta, x).value
    mab = bd.dual_volume(alpha + beta, x).value
    slack = mab ** exp - ma ** exp - mb ** exp
    if homothetic:
        passed = abs(slack) <= tol
        kind = "homothetic-equality"
    else:
        passed = slack >= -tol
        kind = "log-concavity"
    return (f"{kind} r={r}", passed, abs(min(slack, 0.0)) + (abs(slack) if homothetic else 0.0), f"slack={slack:.2e}")


def _case_blaschke_volume(dim, points_a, points_b, tol, index):
    a = pt.hull_from_vertices(points_a)
    b = pt.hull_from_vertices(points_b)
    s = ms.blaschke_sum(a, b, 1e-10)
    exp = (dim - 1) / dim
    slack = (
        float(s.volume()) ** exp
        - float(a.volume()) ** exp
        - float(b.volume()) ** exp
    )
    return (f"volume-superadditivity dim={dim}", slack >= -tol, abs(min(slack, 0.0)), f"slack={slack:.2e}")


def _case_dual_volume(quotients, s, c1, tol, index):
    x = bd.HNData(quotients)
    r = x.rank
    alpha = bd.CurveClass(c1, -c1 * s)
    dv = bd.dual_volume(alpha, x)
    u_ok = dv.u_star == s / (r - 1)
    vol = factorial(r) * bd.body_of_curve(alpha, x).volume()
    rel = abs(float(vol) - dv.value) / dv.value
    passed = u_ok and rel <= tol
    return (
        f"r={x.rank} s={s}",
        passed,
        rel,
        f"u*={dv.u_star} M={dv.value:.9g} r!vol={float(vol):.9g}",
    )


def _case_cone_body(quotients, t, index):
    x = bd.HNData(quotients)
    d = bd.DivisorClass(1, -t)
    label = bd.classify_divisor(d, x)
    try:
        body = bd.body_of_divisor(d, x)
        from_body = bd.positivity_from_body(body, bd.breakpoints(d, x))
    except NotEffective:
        from_body = "none"
    passed = from_body == label
    return (f"t={t} r={x.rank}", passed, 0.0 if passed else 1.0, f"{label} vs {from_body}")


def _case_toric_equality(dim, rays, alpha, beta, tol, index):
    fan = tc.FanData(dim, tuple(tuple(u) for u in rays))
    rep = tc.toric_blaschke_check(fan, alpha, beta, tol)
    rel = rep.distance / max(rep.diameter, 1.0)
    return (f"fan({len(rays)} rays dim {dim})", rel <= tol, rel, f"dH={rep.distance:.2e}")


def _case_bridge(twists, c1, c2, index):
    split = tc.splitting_bundle_fan(twists)
    x = split.bundle
    alpha = bd.CurveClass(c1, c2)
    inters = tc.bundle_curve_intersections(split, alpha)
    toric_body = tc.toric_curve_polytope(split.fan, inters)
    bundle_body = bd.body_of_curve(alpha, x)
    vol_rel = abs(float(toric_body.volume()) - float(bundle_body.volume())) / float(
        bundle_body.volume()
    )
    mt = sorted(a.mass for a in ms.area_measure(toric_body).atoms)
    mb = sorted(a.mass for a in ms.area_measure(bundle_body).atoms)
    if len(mt) != len(mb):
        return (f"bridge {twists}", False, 1.0, "facet counts differ")
    facet_rel = max(
        (abs(u - v) / max(v, 1e-12) for u, v in zip(mt, mb)), default=0.0
    )
    residual = max(vol_rel, facet_rel)
    return (f"bridge {twists} curve=({c1},{c2})", residual <= 1e-6, residual, "")


def _case_counterexample(index):
    simplex = pt.hull_from_vertices([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    doubled = pt.minkowski_sum(simplex, simplex)
    dilated = simplex.scale(sqrt_rational(2))
    minkowski_contained = dilated.contains_polytope(doubled, tol=1e-9)
    blaschke = ms.blaschke_sum(simplex, simplex, 1e-10)
    blaschke_contained = dilated.contains_polytope(blaschke, tol=1e-6)
    passed = (not minkowski_contained) and blaschke_contained
    return (
        "projective-space counterexample",
        passed,
        0.0 if passed else 1.0,
        f"minkowski in dilate: {minkowski_contained}; blaschke in dilate: {blaschke_contained}",
    )


def _case_continuity(quotients, s, c1, sign, index):
    x = bd.HNData(quotients)
    alpha = bd.CurveClass(c1, -c1 * s)
    base = bd.body_of_curve(alpha, x).canonical_position()
    diam = max(base.diameter(), 1.0)
    dists = []
    for eps in (F(1, 10), F(1, 100), F(1, 1000), F(1, 10000)):
        # perturb along the slope coordinate; the class stays interior since
        # the margin to every cone boundary exceeds the largest step
        nearby = bd.CurveClass(alpha.c1, alpha.c2 + sign * eps)
        body = bd.body_of_curve(nearby, x).canonical_position()
        dists.append(pt.hausdorff_distance(base, body))
    monotone = all(a >= b - 1e-12 * diam for a, b in zip(dists, dists[1:]))
    final_ok = dists[-1] < 1e-3 * diam
    passed = monotone and final_ok
    return (
        f"r={x.rank} s={s}",
        passed,
        dists[-1] / diam,
        "distances " + ", ".join(f"{v:.2e}" for v in dists),
    )


# -- suite builders -----------------------------------------------------


def _nef_t(rng, x, strict=False):
    gap = F(rng.randint(1 if strict else 0, 6), rng.randint(1, 4))
    if strict and gap == 0:
        gap = F(1, 2)
    return x.sigma[-1] - gap


def _suite_volume_ring(samples, tol, seed):
    rng = random.Random(seed)
    cases = []
    for i in range(samples):
        x = random_hn(rng, rng.choice([2, 3, 4, 5, 6]))
        cases.append((_case_volume_ring, (_hn_args(x), _nef_t(rng, x), i)))
    return cases


def _suite_mthm(samples, tol, seed):
    rng = random.Random(seed)
    cases = []
    per_rank = max(1, samples // 3)
    i = 0
    for r in (2, 3, 4):
        for _ in range(per_rank):
            x = random_hn(rng, r)
            a1 = F(1)
            a2 = F(rng.randint(1, 3), rng.randint(1, 2))
            cases.append(
                (
                    _case_mthm,
                    (
                        _hn_args(x),
                        a1,
                        _nef_t(rng, x, strict=True),
                        a2,
                        _nef_t(rng, x, strict=True),
                        tol,
                        i,
                    ),
                )
            )
            i += 1
    return cases


def _suite_roundtrip(samples, tol, seed):
    rng = random.Random(seed)
    cases = []
    for i in range(samples):
        dim = 3 if i % 5 < 3 else 4
        npoints = 8 if dim == 3 else 7
        body = random_polytope(rng, dim, npoints)
        cases.append((_case_roundtrip, (dim, body.vertices, tol, i)))
    return cases


def _suite_cube_law(samples, tol, seed):
    return [(_case_cube_law, (n, tol, i)) for i, n in enumerate((2, 3, 4, 5))]


def _suite_blaschke_2d(samples, tol, seed):
    rng = random.Random(seed)
    cases = []
    for i in range(samples):
        a = random_polytope(rng, 2, rng.randint(5, 8), denom=4, spread=12)
        b = random_polytope(rng, 2, rng.randint(5, 8), denom=4, spread=12)
        cases.append((_case_blaschke_2d, (a.vertices, b.vertices, tol, i)))
    return cases


def _interior_cx_class(rng, x):
    r = x.rank
    bound = min((r - 1) * x.sigma[-1], x.degree - x.sigma[1])
    return bound - F(rng.randint(1, 8), rng.randint(1, 3))


def _suite_log_concavity(samples, tol, seed):
    rng = random.Random(seed)
    cases = []
    for i in range(samples):
        x = random_hn(rng, rng.choice([2, 3, 4]))
        s1 = _interior_cx_class(rng, x)
        s2 = _interior_cx_class(rng, x)
        c1 = F(rng.randint(1, 3))
        homothetic = i % 3 == 2
        c2 = F(rng.randint(1, 2)) if homothetic else F(rng.randint(1, 3))
        cases.append(
            (_case_log_concavity, (_hn_args(x), s1, c1, s2, c2, homothetic, tol, i))
        )
    extra = []
    for i in range(max(2, samples // 4)):
        dim = rng.choice([2, 3])
        a = random_polytope(rng, dim, dim + 4)
        b = random_polytope(rng, dim, dim + 4)
        extra.append(
            (_case_blaschke_volume, (dim, a.vertices, b.vertices, tol, samples + i))
        )
    return cases + extra


def _suite_dual_volume(samples, tol, seed):
    rng = random.Random(seed)
    cases = []
    for i in range(samples):
        x = random_hn(rng, rng.choice([2, 3, 4]))
        s = _interior_cx_class(rng, x)
        c1 = F(rng.choice([1, 1, 1, 4])) if x.rank == 3 else F(1)
        cases.append((_case_dual_volume, (_hn_args(x), s, c1, tol, i)))
    return cases


def _suite_cone_body(samples, tol, seed):
    rng = random.Random(seed)
    cases = []
    i = 0
    while len(cases) < samples:
        x = random_hn(rng, rng.choice([2, 3, 4, 5]))
        thresholds = sorted(set(x.sigma))
        probes = []
        for s in thresholds:
            probes.extend([s - F(1, 3), s, s + F(1, 3)])
        probes.append(x.sigma[0] + 1)
        probes.append((x.sigma[0] + x.sigma[1]) / 2)
        for t in probes:
            cases.append((_case_cone_body, (_hn_args(x), t, i)))
            i += 1
    return cases[:samples] if samples < len(cases) else cases


def _suite_toricm(samples, tol, seed):
    rng = random.Random(seed)
    cases = []
    i = 0
    per_fan = max(1, samples // 3)
    p2 = ((1, 0), (0, 1), (-1, -1))
    p3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1))
    for _ in range(per_fan):
        k = F(rng.randint(1, 8), rng.randint(1, 4))
        m = F(rng.randint(1, 8), rng.randint(1, 4))
        cases.append((_case_toric_equality, (2, p2, [k] * 3, [m] * 3, tol, i)))
        i += 1
    for _ in range(per_fan):
        k = F(rng.randint(1, 6), rng.randint(1, 3))
        m = F(rng.randint(1, 6), rng.randint(1, 3))
        cases.append((_case_toric_equality, (3, p3, [k] * 4, [m] * 4, tol, i)))
        i += 1
    split = tc.splitting_bundle_fan((0, 1))
    for _ in range(per_fan):
        c1 = F(rng.randint(1, 4))
        c2 = F(rng.randint(0, 4))  # s = -c2/c1 <= 0 keeps the class movable
        d1 = F(rng.randint(1, 4))
        d2 = F(rng.randint(0, 4))
        alpha = tc.bundle_curve_intersections(split, bd.CurveClass(c1, c2))
        beta = tc.bundle_curve_intersections(split, bd.CurveClass(d1, d2))
        cases.append(
            (_case_toric_equality, (2, split.fan.rays, alpha, beta, tol, i))
        )
        i += 1
    for twists in ((0, 0), (0, 1)):
        for _ in range(3):
            c1 = F(rng.randint(1, 3))
            c2 = F(rng.randint(1, 3))
            cases.append((_case_bridge, (twists, c1, c2, i)))
            i += 1
    return cases


def _suite_counterexample(samples, tol, seed):
    return [(_case_counterexample, (0,))]


def _suite_continuity(samples, tol, seed):
    rng = random.Random(seed)
    cases = []
    for i in range(samples):
        x = random_hn(rng, rng.choice([3, 4]))
        r = x.rank
        bound = min((r - 1) * x.sigma[-1], x.degree - x.sigma[1])
        s = bound - F(rng.randint(2, 6))
        cases.append((_case_continuity, (_hn_args(x), s, F(1), rng.choice([-1, 1]), i)))
    return cases


SUITES = {
    "volume-ring": (_suite_volume_ring, 200, 0.0),
    "mthm": (_suite_mthm, 150, 1e-6),
    "minkowski-roundtrip": (_suite_roundtrip, 100, 1e-9),
    "cube-law": (_suite_cube_law, 4, 1e-9),
    "blaschke-2d": (_suite_blaschke_2d, 200, 1e-9),
    "log-concavity": (_suite_log_concavity, 24, 1e-9),
    "dual-volume": (_suite_dual_volume, 40, 1e-9),
    "cone-body": (_suite_cone_body, 500, 0.0),
    "toricm": (_suite_toricm, 150, 1e-6),
    "counterexample-p3": (_suite_counterexample, 1, 1e-9),
    "continuity": (_suite_continuity, 20, 1e-3),
}


def run_suite(name, samples=None, tol=None, seed=0, jobs=1) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuite(f"{name}; available: {', '.join(sorted(SUITES))}")
    builder, default_samples, default_tol = SUITES[name]
    samples = default_samples if samples is None else samples
    tol = default_tol if tol is None else tol
    cases = builder(samples, tol, seed)
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(fn, *args) for fn, args in cases]
            raw = [f.result() for f in futures]
    else:
        raw = [fn(*args) for fn, args in cases]
    results = [CaseResult(i, *row) for i, row in enumerate(raw)]
    return SuiteReport(name, seed, tol, results)
