"""Semiclassical geometry of the Wigner d-matrix.

The classical model: a spin vector of length J = j + 1/2 with fixed
projections m on the z axis and m' on an axis tilted by beta.  The two
projection cones intersect when Vd_sq > 0 (allowed region); the phase
Phi_d is a spherical lune area.  Beyond the turning points the cosines
of the lune angles leave [-1, 1] and the phase continues via arccosh.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import tetra
from .core import (HalfInt, InvariantError, OnCausticError, ValidationError,
                   WrongRegionError, phase)

ALLOWED = tetra.ALLOWED
CAUSTIC = tetra.CAUSTIC

VD_CAUSTIC_TOL = 1e-10

# Forbidden-region patterns for the lune angles, in the order
# (kappa, phi, eta); 1 means the principal angle pins at pi, 0 at zero.
PIN_PATTERNS = (
    (tetra.REGION_A, (0, 0, 0)),
    (tetra.REGION_B, (1, 0, 1)),
    (tetra.REGION_C, (1, 1, 0)),
    (tetra.REGION_D, (0, 1, 1)),
)
_PATTERN_TO_REGION = {pat: kind for kind, pat in PIN_PATTERNS}


@dataclass(frozen=True)
class DAngles:
    kappa: float
    phi: float
    eta: float
    kappa_bar: float
    phi_bar: float
    eta_bar: float


@dataclass(frozen=True)
class DGeometry:
    j: HalfInt
    m: HalfInt
    mp: HalfInt
    beta: float
    J: float
    theta: float
    theta_p: float
    cos_kappa: float
    cos_phi: float
    cos_eta: float
    angles: DAngles
    Vd_sq: float
    region: str


@dataclass(frozen=True)
class DAsymResult:
    """value = amplitude*cos(phase - pi/4) in the allowed region,
    amplitude*exp(-|phase|) in forbidden regions (amplitude signed)."""

    value: float
    phase: float
    amplitude: float
    nu_d: int | None
    region: str


def _principal(c):
    return math.acos(min(1.0, max(-1.0, c)))


def _bar(c):
    return math.copysign(math.acosh(max(abs(c), 1.0)), c)


def _coerce(j, m, mp):
    j, m, mp = HalfInt.of(j), HalfInt.of(m), HalfInt.of(mp)
    if abs(m) > j or abs(mp) > j:
        raise ValidationError(f"projections ({m}, {mp}) exceed j = {j}")
    if not (j - m).is_integer or not (j - mp).is_integer:
        raise ValidationError(
            f"projections ({m}, {mp}) are off the lattice of j = {j}")
    return j, m, mp


def _soft_coerce(j, m, mp):
    """Like _coerce, but m and m' may be continuous (floats); the
    uniform map evaluates the geometry between lattice points."""
    if not isinstance(m, float) and not isinstance(mp, float):
        return _coerce(j, m, mp)
    j = HalfInt.of(j)
    J = (j.twice + 1) / 2.0
    m, mp = float(m), float(mp)
    if abs(m) >= J or abs(mp) >= J:
        raise ValidationError(
            f"projections ({m}, {mp}) reach the poles of J = {J}")
    return j, m, mp


def d_geometry(j, m, mp, beta):
    """Cone geometry of d^j_{m m'}(beta) for 0 < beta < pi."""
    j, m, mp = _soft_coerce(j, m, mp)
    beta = float(beta)
    if not 0.0 < beta < math.pi:
        raise ValidationError(f"beta = {beta} is outside (0, pi)")
    J = (j.twice + 1) / 2.0
    ct, ctp = float(m) / J, float(mp) / J
    st, stp = math.sqrt(1.0 - ct * ct), math.sqrt(1.0 - ctp * ctp)
    cb, sb = math.cos(beta), math.sin(beta)
    cos_phi = (ctp - cb * ct) / (sb * st)
    cos_eta = (ct - cb * ctp) / (sb * stp)
    cos_kappa = (ct * ctp - cb) / (st * stp)
    vd_sq = 1.0 + 2.0 * cb * ct * ctp - cb * cb - ct * ct - ctp * ctp
    if abs(vd_sq) <= VD_CAUSTIC_TOL:
        region = CAUSTIC
    elif vd_sq > 0.0:
        region = ALLOWED
    else:
        pat = tuple(0 if c > 0.0 else 1
                    for c in (cos_kappa, cos_phi, cos_eta))
        region = _PATTERN_TO_REGION.get(pat)
        if region is None:
            raise InvariantError(
                f"sign pattern {pat} matches no forbidden region at "
                f"(j={j}, m={m}, m'={mp}, beta={beta})")
    angles = DAngles(kappa=_principal(cos_kappa), phi=_principal(cos_phi),
                     eta=_principal(cos_eta), kappa_bar=_bar(cos_kappa),
                     phi_bar=_bar(cos_phi), eta_bar=_bar(cos_eta))
    return DGeometry(j=j, m=m, mp=mp, beta=beta, J=J,
                     theta=math.acos(ct), theta_p=math.acos(ctp),
                     cos_kappa=cos_kappa, cos_phi=cos_phi, cos_eta=cos_eta,
                     angles=angles, Vd_sq=vd_sq, region=region)


def turning_points(j, m, mp):
    """(beta1, beta2): the caustic colatitudes bounding the allowed region."""
    j, m, mp = _soft_coerce(j, m, mp)
    J = (j.twice + 1) / 2.0
    theta = math.acos(float(m) / J)
    theta_p = math.acos(float(mp) / J)
    return (abs(theta - theta_p),
            min(theta + theta_p, 2.0 * math.pi - theta - theta_p))


def phi_d(g):
    """Phi_d = J kappa - m phi - m' eta (allowed region and caustic)."""
    if g.region not in (ALLOWED, CAUSTIC):
        raise WrongRegionError(
            f"phi_d is defined in the allowed region, not {g.region}")
    a = g.angles
    return g.J * a.kappa - float(g.m) * a.phi - float(g.mp) * a.eta


def phi_d_bar(g):
    """Continued phase J kappa_bar - m phi_bar - m' eta_bar; zero in the
    allowed region and on the caustic."""
    a = g.angles
    return (g.J * a.kappa_bar - float(g.m) * a.phi_bar
            - float(g.mp) * a.eta_bar)


def dphi_d_dbeta(g):
    """d(Phi_d)/d(beta) = -J |V_d| / sin(beta); the same formula
    differentiates phi_d_bar in the forbidden regions."""
    return -g.J * math.sqrt(abs(g.Vd_sq)) / math.sin(g.beta)


def nu_d(kind, j, m, mp):
    """Integer parity for the forbidden-region sign of d_asym."""
    j, m, mp = _coerce(j, m, mp)
    twice = {
        tetra.REGION_A: 0,
        tetra.REGION_B: j.twice - mp.twice,
        tetra.REGION_C: j.twice - m.twice,
        tetra.REGION_D: -m.twice - mp.twice,
    }.get(kind)
    if twice is None:
        raise WrongRegionError(f"nu_d is defined per forbidden region, "
                               f"not {kind!r}")
    if twice % 2:
        raise InvariantError(
            f"nu_d parity sum {twice}/2 is not an integer in region {kind}")
    return twice // 2


def _phibar_sign_ok(kind, ph, scale):
    tol = 1e-8 * scale
    if kind in (tetra.REGION_A, tetra.REGION_D):
        return ph <= tol
    return ph >= -tol


def d_asym(j, m, mp, beta):
    """One-term asymptotic approximation to d^j_{m m'}(beta)."""
    j, m, mp = _coerce(j, m, mp)
    g = d_geometry(j, m, mp, beta)
    if g.region == CAUSTIC:
        raise OnCausticError(
            f"(j={g.j}, m={g.m}, m'={g.mp}, beta={beta}) is on a caustic")
    amp = 1.0 / math.sqrt((math.pi / 2.0) * g.J
                          * math.sqrt(abs(g.Vd_sq)))
    lead = (g.j.twice - g.mp.twice) // 2
    if g.region == ALLOWED:
        ph = phi_d(g)
        samp = phase(lead) * amp
        return DAsymResult(value=samp * math.cos(ph - math.pi / 4.0),
                           phase=ph, amplitude=samp, nu_d=None,
                           region=g.region)
    nu = nu_d(g.region, g.j, g.m, g.mp)
    ph = phi_d_bar(g)
    if not _phibar_sign_ok(g.region, ph, 1.0 + g.J):
        raise InvariantError(
            f"Phi_bar_d = {ph} has the wrong sign for region {g.region}")
    samp = phase(lead + nu) * amp / 2.0
    return DAsymResult(value=samp * math.exp(-abs(ph)), phase=ph,
                       amplitude=samp, nu_d=nu, region=g.region)


def _rodrigues(n, v, ang):
    c, s = math.cos(ang), math.sin(ang)
    return v * c + np.cross(n, v) * s + n * np.dot(n, v) * (1.0 - c)


def solid_angle_polygon(vertices, axes, arc_angles):
    """Solid angle of a spherical polygon whose side i runs from vertex i
    to vertex i+1 along the small circle about axes[i], swept by
    arc_angles[i].  Sides oriented counterclockwise seen from inside."""
    v = np.asarray(vertices, float)
    n = np.asarray(axes, float)
    ang = np.asarray(arc_angles, float)
    if v.ndim != 2 or v.shape[1] != 3 or n.shape != v.shape \
            or ang.shape != (len(v),):
        raise ValidationError("need matching lists of vertices, axes and "
                              "arc angles")
    norms = np.linalg.norm(v, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6) \
            or np.any(np.abs(np.linalg.norm(n, axis=1) - 1.0) > 1e-6):
        raise ValidationError("vertices and axes must be unit vectors")
    v = v / norms[:, None]
    n = n / np.linalg.norm(n, axis=1)[:, None]
    k = len(v)
    for i in range(k):
        reached = _rodrigues(n[i], v[i], ang[i])
        if np.linalg.norm(reached - v[(i + 1) % k]) > 1e-9:
            raise ValidationError(
                f"polygon does not close: side {i} ends {reached}, "
                f"vertex {(i + 1) % k} is {v[(i + 1) % k]}")
    total = 0.0
    for i in range(k):
        t_in = np.cross(n[i - 1], v[i])
        t_out = np.cross(n[i], v[i])
        if np.linalg.norm(t_in) < 1e-12 or np.linalg.norm(t_out) < 1e-12:
            raise ValidationError(f"vertex {i} sits on a side's axis")
        kappa = math.pi - math.atan2(
            float(np.dot(v[i], np.cross(t_in, t_out))),
            float(np.dot(t_in, t_out)))
        total += (math.pi - kappa) + float(np.dot(v[i], n[i])) * ang[i]
    return 2.0 * math.pi - total
