"""Uniform semiclassical approximation to the 6j symbol.

A symbol with D allowed values of j12 maps onto a single Wigner matrix
element d^j_{m m'}(beta) with 2j + 1 = D: m and m' measure j12 and j23
from the centers of their ranges, and beta is fixed by matching the
Ponzano-Regge phase to the d-matrix phase.  The amplitudes match at a
common caustic, so the approximation stays finite there and reduces to
the primitive forms deep in each region.
"""

import math
from dataclasses import dataclass, replace

from . import dasym, prasym, tetra
from .core import (HalfInt, InvariantError, SolverError, bounds,
                   exact_wigner_d, lengths, phase, require_valid)

BETA_GEOM_EPS = 1e-12    # keep d_geometry off beta = 0, pi during solves
NEAR_CAUSTIC_VOL = 1e-6  # |V|/(J1 J12 J4) below this switches the ratio
NEAR_CAUSTIC_STEP = 1e-4 # J23 offset for the averaged amplitude ratio
_SOLVE_TOL = 1e-12
_MAX_NEWTON = 60


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    residual: float
    bracket: tuple
    region: str


@dataclass(frozen=True)
class UniformMap:
    """Quantum-number side of the 6j -> d-matrix correspondence."""

    j: HalfInt
    m: HalfInt
    mp: HalfInt
    nu_ex: int
    Phi0: float
    beta: float | None
    solver: SolveReport | None


@dataclass(frozen=True)
class UniformResult:
    value: float
    map: UniformMap
    pr_amp: float        # 1/sqrt(12 pi |V|), unsigned
    d_amp: float         # 1/sqrt((pi/2) J |V_d|), unsigned
    near_caustic: bool


def map_quantum(labels, bnds=None):
    """(j, m, m') and the phase offset Phi0 for the d-matrix picture."""
    require_valid(labels)
    if bnds is None:
        bnds = bounds(labels.j1, labels.j2, labels.j3, labels.j4)
    tj = bnds.D - 1
    tm = labels.j12.twice - bnds.j12_avg.twice
    tmp = bnds.j23_avg.twice - labels.j23.twice
    if (tj - tm) % 2 or (tj - tmp) % 2:
        raise InvariantError(
            f"(m, m') = ({tm}/2, {tmp}/2) off the lattice of j = {tj}/2")
    if abs(tm) > tj or abs(tmp) > tj:
        raise InvariantError(
            f"(m, m') = ({tm}/2, {tmp}/2) outside |m| <= j = {tj}/2")
    tnu = (labels.j1.twice + labels.j2.twice + labels.j3.twice
           + labels.j4.twice + labels.j12.twice - bnds.j12_max.twice)
    if tnu % 2:
        raise InvariantError(f"nu_ex = {tnu}/2 is not an integer")
    nu_ex = tnu // 2
    return UniformMap(j=HalfInt(tj), m=HalfInt(tm), mp=HalfInt(tmp),
                      nu_ex=nu_ex, Phi0=(nu_ex + 1.5) * math.pi,
                      beta=None, solver=None)


def _geom(umap, beta):
    beta = min(max(beta, BETA_GEOM_EPS), math.pi - BETA_GEOM_EPS)
    return dasym.d_geometry(umap.j, umap.m, umap.mp, beta)


def _newton(umap, target, lo, hi, seed, scale):
    """Find beta in [lo, hi] with f(beta) = target, f the (continued)
    d-matrix phase, monotone decreasing; safeguarded Newton."""
    tol = _SOLVE_TOL * scale

    def f(beta):
        g = _geom(umap, beta)
        val = (dasym.phi_d(g) if g.region in (dasym.ALLOWED, dasym.CAUSTIC)
               else dasym.phi_d_bar(g))
        return val - target, dasym.dphi_d_dbeta(g)

    x = min(max(seed, lo), hi)
    for it in range(1, _MAX_NEWTON + 1):
        fx, fpx = f(x)
        if abs(fx) <= tol:
            return x, it, abs(fx)
        if fx > 0.0:
            lo = x
        else:
            hi = x
        xn = x - fx / fpx if fpx != 0.0 else lo
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if xn == x:
            return x, it, abs(fx)
        x = xn
    raise SolverError(
        f"beta solve stalled after {_MAX_NEWTON} iterations; "
        f"residual {fx} against tolerance {tol}")


def _phi_d_at(umap, beta):
    g = _geom(umap, beta)
    return (dasym.phi_d(g) if g.region in (dasym.ALLOWED, dasym.CAUSTIC)
            else dasym.phi_d_bar(g))


def _phibar_d_at(umap, beta):
    return dasym.phi_d_bar(_geom(umap, beta))


def _solve_for_lengths(J, umap, region):
    """beta matching the PR phase of the lengths J, plus a report."""
    t = tetra.construct(J)
    dih = tetra.dihedrals(t)
    beta1, beta2 = dasym.turning_points(umap.j, umap.m, umap.mp)
    if region.is_forbidden:
        return _solve_forbidden(J, dih, umap, region.kind, beta1, beta2)
    if region.is_caustic and region.segment is not None:
        # on the caustic the matched beta is the turning point itself
        beta = (beta1 if region.segment in (tetra.REGION_B, tetra.REGION_C)
                else beta2)
        res = abs(prasym.phi_pr(J, dih) - umap.Phi0 - _phi_d_at(umap, beta))
        return beta, SolveReport(iterations=0, residual=res,
                                 bracket=(beta, beta), region=region.kind)
    target = prasym.phi_pr(J, dih) - umap.Phi0
    a_hi = (float(umap.j) + 0.5 - max(float(umap.m), float(umap.mp))) * math.pi
    a_lo = max(0.0, -(float(umap.m) + float(umap.mp))) * math.pi
    scale = max(1.0, abs(target))
    if target >= a_hi - 1e-9 * scale:
        if target > a_hi + 1e-6 * scale:
            raise InvariantError(
                f"PR phase {target} above the d-matrix range [{a_lo}, {a_hi}]")
        return beta1, SolveReport(iterations=0, residual=abs(target - a_hi),
                                  bracket=(beta1, beta1), region=region.kind)
    if target <= a_lo + 1e-9 * scale:
        if target < a_lo - 1e-6 * scale:
            raise InvariantError(
                f"PR phase {target} below the d-matrix range [{a_lo}, {a_hi}]")
        return beta2, SolveReport(iterations=0, residual=abs(target - a_lo),
                                  bracket=(beta2, beta2), region=region.kind)
    seed = beta1 + (a_hi - target) / (a_hi - a_lo) * (beta2 - beta1)
    lo = max(beta1, BETA_GEOM_EPS)
    hi = min(beta2, math.pi - BETA_GEOM_EPS)
    beta, its, res = _newton(umap, target, lo, hi, seed, scale)
    return beta, SolveReport(iterations=its, residual=res,
                             bracket=(lo, hi), region=region.kind)


def _solve_forbidden(J, dih, umap, kind, beta1, beta2):
    target = prasym.phi_pr_bar(J, dih)
    scale = max(1.0, abs(target))
    if kind in (tetra.REGION_B, tetra.REGION_C):
        # Phi_bar_d falls from +inf at beta = 0 to zero at beta1
        if beta1 <= BETA_GEOM_EPS:
            raise SolverError(f"region {kind} has no beta window: "
                              f"beta1 = {beta1}")
        hi = beta1
        if _phibar_d_at(umap, hi) - target > 0.0:
            # target at or below the caustic value zero (roundoff)
            return hi, SolveReport(iterations=0, residual=abs(target),
                                   bracket=(hi, hi), region=kind)
        lo = beta1 / 2.0
        for _ in range(200):
            if _phibar_d_at(umap, lo) - target >= 0.0:
                break
            lo /= 2.0
        else:
            raise SolverError(f"no bracket below beta1 for target {target}")
        seed = beta1 / 2.0
    else:
        # regions A, D: Phi_bar_d falls from zero at beta2 toward -inf
        if beta2 >= math.pi - BETA_GEOM_EPS:
            raise SolverError(f"region {kind} has no beta window: "
                              f"beta2 = {beta2}")
        lo = beta2
        if _phibar_d_at(umap, lo) - target < 0.0:
            return lo, SolveReport(iterations=0, residual=abs(target),
                                   bracket=(lo, lo), region=kind)
        hi = math.pi - (math.pi - beta2) / 2.0
        for _ in range(200):
            if _phibar_d_at(umap, hi) - target <= 0.0:
                break
            hi = math.pi - (math.pi - hi) / 2.0
        else:
            raise SolverError(f"no bracket above beta2 for target {target}")
        seed = (beta2 + math.pi) / 2.0
    beta, its, res = _newton(umap, target, lo, hi, seed, scale)
    return beta, SolveReport(iterations=its, residual=res,
                             bracket=(lo, hi), region=kind)


def beta_field(j1, j2, j3, j4, J12, J23):
    """beta at a continuous point of the (J12, J23) square; returns
    (beta, SolveReport).  The map's m, m' and nu_ex extend linearly off
    the lattice, so beta is continuous across caustics."""
    js = tuple(HalfInt.of(x) for x in (j1, j2, j3, j4))
    b = bounds(*js)
    J = tuple(float(x) + 0.5 for x in js) + (float(J12), float(J23))
    region = tetra.classify(J, b)
    m = float(J12) - b.J12_avg
    mp = b.J23_avg - float(J23)
    nu_ex = (sum(float(x) for x in js) + float(J12) - 0.5
             - float(b.j12_max))
    umap = UniformMap(j=HalfInt(b.D - 1), m=m, mp=mp, nu_ex=nu_ex,
                      Phi0=(nu_ex + 1.5) * math.pi, beta=None, solver=None)
    return _solve_for_lengths(J, umap, region)


def solve_beta(labels, umap=None, region=None):
    """beta for a quantized symbol; returns (beta, SolveReport)."""
    require_valid(labels)
    b = bounds(labels.j1, labels.j2, labels.j3, labels.j4)
    if umap is None:
        umap = map_quantum(labels, b)
    J = lengths(labels)
    if region is None:
        region = tetra.classify(J, b)
    return _solve_for_lengths(J, umap, region)


def _near_caustic_ratio(labels, bnds, umap):
    """|V_d|/|V| averaged over J23 +- step, where both vanish together."""
    J = lengths(labels)
    s = J[5]
    num = den = 0.0
    for ds in (NEAR_CAUSTIC_STEP, -NEAR_CAUSTIC_STEP):
        j23s = s + ds
        if not bnds.J23_min < j23s < bnds.J23_max:
            continue
        Js = J[:5] + (j23s,)
        region_s = tetra.classify(Js)
        ts = tetra.construct(Js)
        beta_s, _ = _solve_for_lengths(Js, umap, region_s)
        g = _geom(umap, beta_s)
        num += math.sqrt(abs(g.Vd_sq))
        den += ts.vol_abs
    if den == 0.0:
        raise InvariantError(
            f"amplitude ratio undefined at {labels}: no usable neighbors")
    return num / den


def _canonical_updown(labels):
    """Representative of the up-down swap orbit.  The approximation is
    invariant under the three pair swaps in exact arithmetic; computing
    every member through one representative makes it bit-identical."""
    best = labels
    for i, k in ((0, 1), (0, 2), (1, 2)):
        cand = labels.swapped_updown(i, k)
        if cand.as_tuple() < best.as_tuple():
            best = cand
    return best


def uniform_6j(labels):
    """The uniform approximation, valid in all regions and on caustics."""
    require_valid(labels)
    labels = _canonical_updown(labels)
    b = bounds(labels.j1, labels.j2, labels.j3, labels.j4)
    umap = map_quantum(labels, b)
    J = lengths(labels)
    region = tetra.classify(J, b)
    beta, rep = _solve_for_lengths(J, umap, region)
    umap = replace(umap, beta=beta, solver=rep)
    if region.is_forbidden:
        nu6 = prasym.nu_6j(region, labels)
        nud = dasym.nu_d(region.kind, umap.j, umap.m, umap.mp)
        if (umap.nu_ex + nu6 + nud) % 2:
            raise InvariantError(
                f"parity mismatch in region {region.kind}: nu_ex={umap.nu_ex} "
                f"nu_6j={nu6} nu_d={nud} do not cancel")
    t = tetra.construct(J)
    g = _geom(umap, beta)
    vd = math.sqrt(abs(g.Vd_sq))
    vol = t.vol_abs
    near = region.is_caustic or vol / (J[0] * J[4] * J[3]) < NEAR_CAUSTIC_VOL
    ratio = _near_caustic_ratio(labels, b, umap) if near else vd / vol
    Jd = b.D / 2.0
    dval = exact_wigner_d(umap.j, umap.m, umap.mp, beta)
    sgn = phase(umap.nu_ex + (umap.j.twice - umap.mp.twice) // 2)
    value = sgn * math.sqrt(Jd * ratio / 24.0) * dval
    pr_amp = 1.0 / math.sqrt(12.0 * math.pi * vol) if vol > 0.0 else math.inf
    d_amp = (1.0 / math.sqrt((math.pi / 2.0) * Jd * vd) if vd > 0.0
             else math.inf)
    return UniformResult(value=value, map=umap, pr_amp=pr_amp, d_amp=d_amp,
                         near_caustic=near)


def permute_columns_for_accuracy(labels):
    """Move the column with the largest smaller entry into the (j12, j23)
    slot, where the uniform approximation is most accurate.  Returns the
    permuted labels and the column permutation applied."""
    cols = labels.columns()
    mins = [min(a.twice, c.twice) for a, c in cols]
    k = max(range(3), key=lambda i: (mins[i], i))
    perm = tuple(i for i in range(3) if i != k) + (k,)
    return labels.permuted(perm), perm
