"""Exact half-integer arithmetic and exact reference values.

Quantum numbers are stored as twice their value so triangle and parity
checks stay in integer arithmetic.  The 6j symbol is the Racah single
sum carried over exact rationals, with the square-root prefactor
applied once at emission time (50 significant digits).  The Wigner
d-matrix element is a compensated double-precision sum over exact
rational term coefficients, escalated to adaptive-precision mpmath when
cancellation or matrix size would otherwise eat into the 12th digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath

MP_DPS = 50            # emission precision for exact 6j values
CANCEL_LIMIT = 1.0e3   # max sum(|term|)/|sum| tolerated in the double path
_F64_MAX_TWICE_J = 120 # double path only below j = 60; see _wigner_d_f64


class SixJError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(SixJError, ValueError):
    """Invalid quantum numbers, lengths, or arguments (CLI exit 2)."""


class WrongRegionError(SixJError):
    """Operation applied in a region where it is not defined."""


class OnCausticError(WrongRegionError):
    """Primitive asymptotic form requested exactly on a caustic."""


class InvariantError(SixJError):
    """Internal invariant violated; indicates a bug (CLI exit 3)."""


class SolverError(InvariantError):
    """Root finder failed to converge within its iteration budget."""


def _mp(dps):
    """Fresh mpmath context at the given precision (thread-safe)."""
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    return ctx


class HalfInt:
    """Integer or half-odd-integer, stored as twice its value."""

    __slots__ = ("twice",)

    def __init__(self, twice):
        if not isinstance(twice, int):
            raise ValidationError(f"HalfInt stores 2j as int, got {twice!r}")
        self.twice = twice

    @classmethod
    def of(cls, x):
        """Coerce an int, string like '39/2' or '3.5', Fraction, or HalfInt."""
        if isinstance(x, HalfInt):
            return x
        if isinstance(x, int):
            return cls(2 * x)
        if isinstance(x, (str, Fraction)):
            try:
                f = Fraction(x)
            except ValueError:
                raise ValidationError(f"not a half-integer: {x!r}") from None
            if f.denominator not in (1, 2):
                raise ValidationError(f"not a half-integer: {x!r}")
            return cls(f.numerator * (2 // f.denominator))
        raise ValidationError(f"cannot interpret {x!r} as a half-integer")

    @property
    def is_integer(self):
        return self.twice % 2 == 0

    def as_fraction(self):
        return Fraction(self.twice, 2)

    def __float__(self):
        return self.twice / 2

    def __int__(self):
        if self.twice % 2:
            raise ValidationError(f"{self} is not an integer")
        return self.twice // 2

    def __str__(self):
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self):
        return f"HalfInt.of('{self}')"

    @staticmethod
    def _twice_of(other):
        if isinstance(other, HalfInt):
            return other.twice
        if isinstance(other, int):
            return 2 * other
        return None

    def __eq__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is None else self.twice == t

    def __hash__(self):
        return hash(self.as_fraction())

    def __lt__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is None else self.twice < t

    def __le__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is None else self.twice <= t

    def __gt__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is None else self.twice > t

    def __ge__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is None else self.twice >= t

    def __add__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is None else HalfInt(self.twice + t)

    __radd__ = __add__

    def __sub__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is None else HalfInt(self.twice - t)

    def __rsub__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is None else HalfInt(t - self.twice)

    def __mul__(self, other):
        if isinstance(other, int):
            return HalfInt(self.twice * other)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return HalfInt(-self.twice)

    def __abs__(self):
        return HalfInt(abs(self.twice))


def phase(k):
    """(-1)**k for an integer-valued k (int or integral HalfInt)."""
    if isinstance(k, HalfInt):
        if k.twice % 2:
            raise InvariantError(f"(-1)**k needs integer k, got {k}")
        k = k.twice // 2
    return -1 if k % 2 else 1


# Triangle triples of the 6j layout {j1 j2 j12; j3 j4 j23}.
TRIANGLES = (
    ("j1", "j2", "j12"),
    ("j2", "j3", "j23"),
    ("j3", "j4", "j12"),
    ("j1", "j4", "j23"),
)

LABEL_NAMES = ("j1", "j2", "j12", "j3", "j4", "j23")


@dataclass(frozen=True)
class SixJLabels:
    """The six quantum numbers of {j1 j2 j12; j3 j4 j23}."""

    j1: HalfInt
    j2: HalfInt
    j12: HalfInt
    j3: HalfInt
    j4: HalfInt
    j23: HalfInt

    @classmethod
    def of(cls, j1, j2, j12, j3, j4, j23):
        return cls(*(HalfInt.of(x) for x in (j1, j2, j12, j3, j4, j23)))

    def as_tuple(self):
        return (self.j1, self.j2, self.j12, self.j3, self.j4, self.j23)

    def columns(self):
        """The three columns ((j1,j3), (j2,j4), (j12,j23))."""
        return ((self.j1, self.j3), (self.j2, self.j4), (self.j12, self.j23))

    def with_columns(self, cols):
        (a, d), (b, e), (c, f) = cols
        return SixJLabels(a, b, c, d, e, f)

    def permuted(self, perm):
        """Reorder columns by perm, a permutation of (0, 1, 2)."""
        cols = self.columns()
        return self.with_columns(tuple(cols[p] for p in perm))

    def swapped_updown(self, i, k):
        """Swap upper and lower entries in columns i and k (a 6j symmetry)."""
        cols = [list(c) for c in self.columns()]
        for c in (i, k):
            cols[c][0], cols[c][1] = cols[c][1], cols[c][0]
        return self.with_columns(tuple(tuple(c) for c in cols))

    def __str__(self):
        t = self.as_tuple()
        return ("{%s %s %s; %s %s %s}" % tuple(str(x) for x in t))


def validate(labels):
    """None if labels form a valid 6j symbol, else a report naming the
    first violated triple."""
    for x, name in zip(labels.as_tuple(), LABEL_NAMES):
        if x.twice < 0:
            return f"{name} = {x} is negative"
    for names in TRIANGLES:
        ta, tb, tc = (getattr(labels, n).twice for n in names)
        if (ta + tb + tc) % 2:
            return ("triangle (%s,%s,%s): perimeter %s/2 is not an integer"
                    % (*names, ta + tb + tc))
        if not abs(ta - tb) <= tc <= ta + tb:
            return ("triangle (%s,%s,%s): |%s - %s| <= %s <= %s + %s fails"
                    % (*names, *(getattr(labels, n) for n in
                                 (names[0], names[1], names[2], names[0], names[1]))))
    return None


def require_valid(labels):
    report = validate(labels)
    if report is not None:
        raise ValidationError(report)


@dataclass(frozen=True)
class Bounds:
    """Quantum and classical limits of j12 and j23 at fixed (j1..j4).

    The classical window of the continuous length J12 is
    [J12_min, J12_max] = [j12_min, j12_max + 1]; quantized values
    J = j + 1/2 sit half a unit inside it.
    """

    j12_min: HalfInt
    j12_max: HalfInt
    j23_min: HalfInt
    j23_max: HalfInt
    D: int
    j12_avg: HalfInt
    j23_avg: HalfInt

    @property
    def J12_min(self):
        return float(self.j12_min)

    @property
    def J12_max(self):
        return float(self.j12_max) + 1.0

    @property
    def J23_min(self):
        return float(self.j23_min)

    @property
    def J23_max(self):
        return float(self.j23_max) + 1.0

    @property
    def J12_avg(self):
        return float(self.j12_avg) + 0.5

    @property
    def J23_avg(self):
        return float(self.j23_avg) + 0.5


def bounds(j1, j2, j3, j4):
    """Classical and quantum bounds of the (j12, j23) lattice."""
    t1, t2, t3, t4 = (HalfInt.of(x).twice for x in (j1, j2, j3, j4))
    for t, name in ((t1, "j1"), (t2, "j2"), (t3, "j3"), (t4, "j4")):
        if t < 0:
            raise ValidationError(f"{name} is negative")
    if (t1 + t2 - t3 - t4) % 2:
        raise ValidationError(
            "degenerate range: j1+j2 and j3+j4 differ in integer/half-integer "
            "character, no valid j12 exists")
    t12min = max(abs(t1 - t2), abs(t3 - t4))
    t12max = min(t1 + t2, t3 + t4)
    t23min = max(abs(t2 - t3), abs(t1 - t4))
    t23max = min(t2 + t3, t1 + t4)
    if t12max < t12min:
        raise ValidationError("degenerate range: j12_max < j12_min")
    if t23max < t23min:
        raise ValidationError("degenerate range: j23_max < j23_min")
    d12 = (t12max - t12min) // 2 + 1
    d23 = (t23max - t23min) // 2 + 1
    if d12 != d23:
        raise InvariantError(f"D mismatch: {d12} on j12 axis, {d23} on j23 axis")
    # The two bound theorems: which pair limits one axis fixes the other.
    if t23min in (t1 - t4, t2 - t3):
        expect_12max = t3 + t4
    else:
        expect_12max = t1 + t2
    if t12min in (t1 - t2, t4 - t3):
        expect_23max = t2 + t3
    else:
        expect_23max = t1 + t4
    if t12max != expect_12max or t23max != expect_23max:
        raise InvariantError("bound theorems violated for "
                             f"({j1},{j2},{j3},{j4})")
    return Bounds(
        j12_min=HalfInt(t12min), j12_max=HalfInt(t12max),
        j23_min=HalfInt(t23min), j23_max=HalfInt(t23max),
        D=d12,
        j12_avg=HalfInt((t12min + t12max) // 2),
        j23_avg=HalfInt((t23min + t23max) // 2),
    )


def lengths(labels):
    """The six classical edge lengths J_i = j_i + 1/2, in the order
    (J1, J2, J3, J4, J12, J23)."""
    return tuple(x.twice / 2 + 0.5 for x in
                 (labels.j1, labels.j2, labels.j3, labels.j4,
                  labels.j12, labels.j23))


@dataclass(frozen=True)
class ExactValue:
    """Exact 6j value R*sqrt(P) with R, P rational."""

    rational: Fraction   # R, the Racah k-sum
    radicand: Fraction   # P, product of the four triangle coefficients
    value: object        # mpmath.mpf at MP_DPS significant digits

    @property
    def sign(self):
        r = self.rational
        return (r > 0) - (r < 0)

    def key(self):
        """Hashable exact representation: (sign, R^2 * P)."""
        return (self.sign, self.rational * self.rational * self.radicand)

    def __float__(self):
        return float(self.value)


def _delta_sq(ta, tb, tc):
    """Triangle coefficient Delta^2(a,b,c) as an exact Fraction."""
    return Fraction(
        factorial((ta + tb - tc) // 2)
        * factorial((ta - tb + tc) // 2)
        * factorial((-ta + tb + tc) // 2),
        factorial((ta + tb + tc) // 2 + 1),
    )


def exact_sixj(labels):
    """The 6j symbol by the Racah single sum, exactly."""
    require_valid(labels)
    ta, tb, tc = labels.j1.twice, labels.j2.twice, labels.j12.twice
    td, te, tf = labels.j3.twice, labels.j4.twice, labels.j23.twice
    s1 = (ta + tb + tc) // 2
    s2 = (ta + te + tf) // 2
    s3 = (td + tb + tf) // 2
    s4 = (td + te + tc) // 2
    q1 = (ta + tb + td + te) // 2
    q2 = (tb + tc + te + tf) // 2
    q3 = (ta + tc + td + tf) // 2
    total = Fraction(0)
    for k in range(max(s1, s2, s3, s4), min(q1, q2, q3) + 1):
        den = (factorial(k - s1) * factorial(k - s2) * factorial(k - s3)
               * factorial(k - s4) * factorial(q1 - k) * factorial(q2 - k)
               * factorial(q3 - k))
        term = Fraction(factorial(k + 1), den)
        total = total - term if k % 2 else total + term
    radicand = (_delta_sq(ta, tb, tc) * _delta_sq(ta, te, tf)
                * _delta_sq(td, tb, tf) * _delta_sq(td, te, tc))
    ctx = _mp(MP_DPS)
    val = (ctx.mpf(total.numerator) / total.denominator
           * ctx.sqrt(ctx.mpf(radicand.numerator) / radicand.denominator))
    return ExactValue(rational=total, radicand=radicand, value=val)


def _d_sum_range(tj, tm, tmp):
    """Shared index bookkeeping for the d-matrix sum; twice-valued args."""
    jpm = (tj + tm) // 2
    jm = (tj - tm) // 2
    jpmp = (tj + tmp) // 2
    jmmp = (tj - tmp) // 2
    mm = (tm - tmp) // 2
    smin = max(0, -mm)
    smax = min(jpmp, jm)
    N = (factorial(jpm) * factorial(jm) * factorial(jpmp) * factorial(jmmp))
    return jpm, jm, jpmp, jmmp, mm, smin, smax, N


def _wigner_d_f64(tj, tm, tmp, beta):
    """Double-precision pass.  Returns (value, cancellation, ok); ok is
    False when a term coefficient underflows double range."""
    _, jm, jpmp, _, mm, smin, smax, N = _d_sum_range(tj, tm, tmp)
    c = math.cos(beta / 2)
    s = math.sin(beta / 2)
    total = comp = absum = 0.0
    for k in range(smin, smax + 1):
        den = (factorial(jpmp - k) * factorial(k) * factorial(mm + k)
               * factorial(jm - k))
        r = float(Fraction(N, den * den))
        if r == 0.0:
            return 0.0, math.inf, False
        t = math.sqrt(r) * c ** (tj - 2 * k - mm) * s ** (mm + 2 * k)
        if (mm + k) % 2:
            t = -t
        absum += abs(t)
        # Kahan update
        y = t - comp
        hi = total + y
        comp = (hi - total) - y
        total = hi
    if total == 0.0:
        return 0.0, math.inf, absum == 0.0
    return total, absum / abs(total), True


def _wigner_d_mp(tj, tm, tmp, beta, dps0):
    """Adaptive-precision pass with exact rational term coefficients."""
    _, jm, jpmp, _, mm, smin, smax, N = _d_sum_range(tj, tm, tmp)
    dps = max(30, dps0)
    for _ in range(8):
        ctx = _mp(dps)
        half = ctx.mpf(beta) / 2
        c = ctx.cos(half)
        s = ctx.sin(half)
        pref = ctx.sqrt(ctx.mpf(N))
        total = ctx.mpf(0)
        absum = ctx.mpf(0)
        for k in range(smin, smax + 1):
            den = (factorial(jpmp - k) * factorial(k) * factorial(mm + k)
                   * factorial(jm - k))
            t = pref / den * c ** (tj - 2 * k - mm) * s ** (mm + 2 * k)
            if (mm + k) % 2:
                t = -t
            total += t
            absum += abs(t)
        if total == 0:
            lost = dps
        else:
            lost = max(0.0, float(ctx.log10(absum / abs(total))))
        if dps - lost >= 17:
            return float(total)
        if total != 0 and abs(total) < ctx.mpf("1e-330") and dps - lost >= 3:
            return float(total)  # underflows double anyway
        dps = int(lost) + 30
    raise InvariantError(
        f"wigner d escalation did not stabilize at dps={dps}")


def exact_wigner_d(j, m, mp, beta):
    """d^j_{mm'}(beta) = <jm| exp(-i beta Jy) |jm'>, as a double.

    Accurate to at least 12 significant digits for j <= 200.
    """
    j, m, mp = HalfInt.of(j), HalfInt.of(m), HalfInt.of(mp)
    tj, tm, tmp = j.twice, m.twice, mp.twice
    if tj < 0 or abs(tm) > tj or abs(tmp) > tj:
        raise ValidationError(f"need |m|, |m'| <= j, got j={j} m={m} m'={mp}")
    if (tj - tm) % 2 or (tj - tmp) % 2:
        raise ValidationError(f"j-m and j-m' must be integers: j={j} m={m} m'={mp}")
    beta = float(beta)
    if not 0.0 <= beta <= math.pi:
        raise ValidationError(f"beta must be in [0, pi], got {beta}")
    if beta == 0.0:
        return 1.0 if tm == tmp else 0.0
    if beta == math.pi:
        return float(phase((tj - tmp) // 2)) if tm == -tmp else 0.0
    dps0 = 40 + tj // 4
    if tj <= _F64_MAX_TWICE_J:
        val, cancel, ok = _wigner_d_f64(tj, tm, tmp, beta)
        if ok and cancel <= CANCEL_LIMIT:
            return val
        if math.isfinite(cancel) and cancel > 0:
            dps0 = 25 + int(math.log10(cancel))
    return _wigner_d_mp(tj, tm, tmp, beta, dps0)
