"""Ponzano-Regge approximation to the 6j symbol.

Allowed region: cos(Phi_PR + pi/4)/sqrt(12 pi V) with Phi_PR the sum of
J_i times the exterior dihedral angles.  Forbidden regions: the phase
continues to sum of J_i psi_bar_i and the value decays like
exp(-|Phi_bar|), with a sign given by the integer parity nu_6j read off
the caustic table column for the region.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import tetra
from .core import (InvariantError, OnCausticError, WrongRegionError, bounds,
                   lengths, phase, require_valid)

# Table-1 pattern entries are in tetra.EDGE_ORDER; the parity sum wants
# the matching quantum numbers.
_EDGE_LABELS = ("j1", "j2", "j3", "j4", "j12", "j23")


@dataclass(frozen=True)
class PRResult:
    """value = amplitude*cos(phase + pi/4) in the allowed region,
    amplitude*exp(-|phase|) in forbidden regions (amplitude signed)."""

    value: float
    region: tetra.RegionClass
    phase: float
    amplitude: float
    nu6j: int | None


def phi_pr(J, dih):
    """Phi_PR = sum_i J_i psi_i; allowed region, continuous up to and on
    the caustic."""
    if np.any(np.abs(dih.cos_psi) > 1.0 + 1e-8):
        raise WrongRegionError("phi_pr is defined in the allowed region; "
                               "use phi_pr_bar beyond the caustic")
    return float(np.asarray(J, float) @ dih.psi)


def phi_pr_bar(J, dih):
    """Continued phase sum_i J_i psi_bar_i; zero on the caustic,
    nonzero in forbidden regions."""
    return float(np.asarray(J, float) @ dih.psi_bar)


def nu_6j(region, labels):
    """Integer parity: sum of j_i over edges whose Table-1 entry is pi."""
    pat = region.pattern
    if pat is None:
        raise WrongRegionError(
            "nu_6j needs a forbidden region with an identified table column")
    twice = sum(getattr(labels, name).twice
                for entry, name in zip(pat, _EDGE_LABELS) if entry)
    if twice % 2:
        raise InvariantError(
            f"nu_6j parity sum {twice}/2 is not an integer for {labels}")
    return twice // 2


def _phibar_sign_ok(kind, ph, scale):
    tol = 1e-8 * scale
    if kind in (tetra.REGION_A, tetra.REGION_D):
        return ph <= tol
    return ph >= -tol


def pr_value(labels):
    """The Ponzano-Regge value with diagnostics."""
    require_valid(labels)
    b = bounds(labels.j1, labels.j2, labels.j3, labels.j4)
    J = lengths(labels)
    region = tetra.classify(J, b)
    if region.is_caustic:
        raise OnCausticError(
            f"{labels} lies on a caustic; the PR amplitude diverges there")
    t = tetra.construct(J)
    dih = tetra.dihedrals(t)
    amp = 1.0 / math.sqrt(12.0 * math.pi * t.vol_abs)
    if region.is_allowed:
        ph = phi_pr(J, dih)
        return PRResult(value=amp * math.cos(ph + math.pi / 4),
                        region=region, phase=ph, amplitude=amp, nu6j=None)
    nu = nu_6j(region, labels)
    ph = phi_pr_bar(J, dih)
    if not _phibar_sign_ok(region.kind, ph, 1.0 + sum(J)):
        raise InvariantError(
            f"Phi_bar_PR = {ph} has the wrong sign for region {region.kind}")
    samp = phase(nu) * amp / 2.0
    return PRResult(value=samp * math.exp(-abs(ph)),
                    region=region, phase=ph, amplitude=samp, nu6j=nu)
