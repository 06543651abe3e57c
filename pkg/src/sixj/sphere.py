"""Phase space of the 6j symbol: the sphere of radius D/2.

At fixed (j1..j4) the intermediate coupling lives on a sphere: the
vertical coordinate is J12 measured from the center of its range, the
conjugate angle is the dihedral angle phi12 about the J12 edge, and the
area form is dJ12 ^ dphi12.  The butterfly construction realizes a point
of the chart as an explicit tetrahedron; J23 is then a function on the
sphere whose level curves are the quantization orbits.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import tetra
from .core import (HalfInt, ValidationError, WrongRegionError, bounds,
                   lengths)

_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class SpherePoint:
    """A point of the 6j sphere: the vector K and its chart coordinates."""

    K: np.ndarray
    J12: float
    phi12: float


def sphere_point(bnds, J12, phi12):
    """Chart coordinates -> the vector K with |K| = D/2."""
    R = bnds.D / 2.0
    Kz = float(J12) - bnds.J12_avg
    if abs(Kz) > R + _EDGE_TOL:
        raise ValidationError(
            f"J12 = {J12} is outside the sphere [{bnds.J12_avg - R}, "
            f"{bnds.J12_avg + R}]")
    Kperp = math.sqrt(max(R * R - Kz * Kz, 0.0))
    phi12 = float(phi12)
    return SpherePoint(K=np.array([Kperp * math.cos(phi12),
                                   Kperp * math.sin(phi12), Kz]),
                       J12=float(J12), phi12=phi12)


def _butterfly_heights(four, J12):
    J1, J2, J3, J4 = (float(x) for x in four)
    J12 = float(J12)
    lo = max(abs(J1 - J2), abs(J3 - J4))
    hi = min(J1 + J2, J3 + J4)
    if not lo - _EDGE_TOL <= J12 <= hi + _EDGE_TOL:
        raise ValidationError(
            f"J12 = {J12} is outside the classical window [{lo}, {hi}]")
    J2z = (J12 * J12 + J2 * J2 - J1 * J1) / (2.0 * J12)
    J3z = (J4 * J4 - J3 * J3 - J12 * J12) / (2.0 * J12)
    h2 = math.sqrt(max(J2 * J2 - J2z * J2z, 0.0))
    h3 = math.sqrt(max(J3 * J3 - J3z * J3z, 0.0))
    return J2z, J3z, h2, h3


def butterfly(four, J12, phi12):
    """Tetrahedron with the given (J1, J2, J3, J4), intermediate J12, and
    dihedral angle phi12 about the J12 edge.  Volume > 0 for
    phi12 in (0, pi); J23 is read off t.lengths[5]."""
    J2z, J3z, h2, h3 = _butterfly_heights(four, J12)
    J12 = float(J12)
    c, s = math.cos(phi12), math.sin(phi12)
    a1 = np.array([-h2 * c, -h2 * s, J12 - J2z])
    a2 = np.array([0.0, 0.0, J12])
    a3 = np.array([-h3, 0.0, J12 + J3z])
    return tetra.from_vectors(np.column_stack([a1, a2, a3]))


def butterfly_j23(four, J12, phi12):
    """J23 on the chart; J12 and phi12 broadcast as numpy arrays."""
    J1, J2, J3, J4 = (float(x) for x in four)
    J12 = np.asarray(J12, float)
    J2z = (J12 * J12 + J2 * J2 - J1 * J1) / (2.0 * J12)
    J3z = (J4 * J4 - J3 * J3 - J12 * J12) / (2.0 * J12)
    h2sq = np.maximum(J2 * J2 - J2z * J2z, 0.0)
    h3sq = np.maximum(J3 * J3 - J3z * J3z, 0.0)
    h2h3 = np.sqrt(h2sq * h3sq)
    zz = (J2z + J3z) ** 2
    return np.sqrt(h2sq + h3sq - 2.0 * h2h3 * np.cos(phi12) + zz)


# Marching squares: segments per corner-sign index; corners are indexed
# b00 + 2*b10 + 4*b11 + 8*b01, edges named bottom/right/top/left.
_MS_CASES = {
    0: (), 15: (),
    1: (("bottom", "left"),),
    2: (("bottom", "right"),),
    4: (("right", "top"),),
    8: (("top", "left"),),
    3: (("left", "right"),),
    6: (("bottom", "top"),),
    12: (("left", "right"),),
    9: (("bottom", "top"),),
    7: (("top", "left"),),
    14: (("bottom", "left"),),
    13: (("bottom", "right"),),
    11: (("right", "top"),),
}


def _cell_segments(index, center_high):
    if index == 5:
        return ((("bottom", "right"), ("top", "left")) if center_high
                else (("bottom", "left"), ("right", "top")))
    if index == 10:
        return ((("bottom", "left"), ("right", "top")) if center_high
                else (("bottom", "right"), ("top", "left")))
    return _MS_CASES[index]


def _marching_squares(x, y, Z, level, wrap_y=True):
    """Contour polylines of Z (shape (len(x), len(y))) at the given
    level.  With wrap_y the y axis is periodic (period 2 pi) and
    polylines are unwrapped continuously.  Returns a list of (n, 2)
    arrays of (x, y) points."""
    nx, ny = Z.shape
    dx = x[1] - x[0]
    dy = y[1] - y[0]
    nodes = {}
    segments = []

    def crossing(kind, i, k):
        key = (kind, i, k % ny if wrap_y else k)
        if key in nodes:
            return key
        if kind == "x":
            za, zb = Z[i, k % ny], Z[i + 1, k % ny]
            t = 0.5 if zb == za else (level - za) / (zb - za)
            nodes[key] = (x[i] + t * dx, y[k % ny])
        else:
            za, zb = Z[i, k % ny], Z[i, (k + 1) % ny]
            t = 0.5 if zb == za else (level - za) / (zb - za)
            nodes[key] = (x[i], y[k % ny] + t * dy)
        return key

    edge_key = {
        "bottom": lambda i, k: crossing("x", i, k),
        "top": lambda i, k: crossing("x", i, k + 1),
        "left": lambda i, k: crossing("y", i, k),
        "right": lambda i, k: crossing("y", i + 1, k),
    }
    for i in range(nx - 1):
        for k in range(ny if wrap_y else ny - 1):
            kn = (k + 1) % ny
            z00, z10 = Z[i, k], Z[i + 1, k]
            z01, z11 = Z[i, kn], Z[i + 1, kn]
            index = ((z00 > level) + 2 * (z10 > level) + 4 * (z11 > level)
                     + 8 * (z01 > level))
            if index in (0, 15):
                continue
            center_high = (z00 + z10 + z01 + z11) / 4.0 > level
            for ea, eb in _cell_segments(index, center_high):
                segments.append((edge_key[ea](i, k), edge_key[eb](i, k)))

    adj = {}
    for a, b in segments:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen = set()
    polylines = []
    for start in adj:
        if start in seen:
            continue
        # walk to one end (or all the way around a loop)
        chain = [start]
        seen.add(start)
        grew = True
        while grew:
            grew = False
            for nb in adj[chain[-1]]:
                if nb not in seen:
                    chain.append(nb)
                    seen.add(nb)
                    grew = True
                    break
        head_grew = True
        while head_grew:
            head_grew = False
            for nb in adj[chain[0]]:
                if nb not in seen:
                    chain.insert(0, nb)
                    seen.add(nb)
                    head_grew = True
                    break
        closed = len(chain) > 2 and chain[0] in adj[chain[-1]]
        if closed:
            chain.append(chain[0])
        pts = np.empty((len(chain), 2))
        prev = None
        for idx, key in enumerate(chain):
            px, py = nodes[key]
            if wrap_y and prev is not None:
                while py - prev > math.pi:
                    py -= 2.0 * math.pi
                while py - prev < -math.pi:
                    py += 2.0 * math.pi
            pts[idx] = (px, py)
            prev = py
        polylines.append(pts)
    return polylines


def contour_polylines(x, y, Z, level, wrap_y=False):
    """Marching-squares contours of a sampled function of two variables."""
    return _marching_squares(np.asarray(x, float), np.asarray(y, float),
                             np.asarray(Z, float), float(level), wrap_y)


def j23_contour_grid(j1, j2, j3, j4, n_J12=201, n_phi=256, levels=None):
    """J23 sampled on the chart, with contour polylines at the quantized
    levels J23 = j23 + 1/2 (or at the given levels)."""
    b = bounds(j1, j2, j3, j4)
    four = tuple(float(HalfInt.of(x)) + 0.5 for x in (j1, j2, j3, j4))
    x = np.linspace(b.J12_min, b.J12_max, n_J12)
    y = -math.pi + 2.0 * math.pi * np.arange(n_phi) / n_phi
    Z = butterfly_j23(four, x[:, None], y[None, :])
    if levels is None:
        levels = [t / 2.0 + 0.5 for t in
                  range(b.j23_min.twice, b.j23_max.twice + 1, 2)]
    contours = {lev: _marching_squares(x, y, Z, lev) for lev in levels}
    return x, y, Z, contours


def _phi_star(four, J, level):
    """Half-width in phi12 of the region {J23 <= level} at height J."""
    J1, J2, J3, J4 = four
    J = np.asarray(J, float)
    J2z = (J * J + J2 * J2 - J1 * J1) / (2.0 * J)
    J3z = (J4 * J4 - J3 * J3 - J * J) / (2.0 * J)
    h2sq = np.maximum(J2 * J2 - J2z * J2z, 0.0)
    h3sq = np.maximum(J3 * J3 - J3z * J3z, 0.0)
    den = 2.0 * np.sqrt(h2sq * h3sq)
    num = h2sq + h3sq + (J2z + J3z) ** 2 - level * level
    c = np.where(den > 1e-300, num / np.maximum(den, 1e-300),
                 np.where(num >= 0.0, np.inf, -np.inf))
    return np.arccos(np.clip(c, -1.0, 1.0))


def _simpson(f, lo, hi, n):
    if n % 2 == 0:
        n += 1
    x = np.linspace(lo, hi, n)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((f(x) * w).sum() * (hi - lo) / (n - 1) / 3.0)


def orbit_area(four, level, n=10001):
    """Area of {J23 <= level} on the 6j sphere, in the dJ12 ^ dphi12
    chart.  Quantized levels j23 + 1/2 enclose (n + 1/2) * 2 pi."""
    four = tuple(float(x) for x in four)
    J1, J2, J3, J4 = four
    lo = max(abs(J1 - J2), abs(J3 - J4))
    hi = min(J1 + J2, J3 + J4)
    return _simpson(lambda J: 2.0 * _phi_star(four, J, float(level)),
                    lo, hi, n)


def lune_area_6j(labels, n=10001):
    """Area of the lune {J12 >= j12 + 1/2} and {J23 <= j23 + 1/2}; equals
    twice the matched Ponzano-Regge phase Phi_PR - Phi0 in the allowed
    region."""
    b = bounds(labels.j1, labels.j2, labels.j3, labels.j4)
    J = lengths(labels)
    region = tetra.classify(J, b)
    if not region.is_allowed:
        raise WrongRegionError(
            f"lune area needs an allowed point, got {region.kind}")
    four = J[:4]
    return _simpson(lambda x: 2.0 * _phi_star(four, x, J[5]),
                    J[4], min(four[0] + four[1], four[2] + four[3]), n)
