"""Truncated power-series (jet) arithmetic and small complex determinants.

Jets carry the lambda-derivative information that the generalized Darboux
rows consume: a jet of order n is the tuple of coefficients of
eps^0 .. eps^n, and every operation is exact modulo eps^(n+1).  The
determinant kernel factors small dense complex matrices by partially
pivoted LU after power-of-two equilibration, with an optional compensated
(double-double) mode for ill-conditioned systems.
"""
from __future__ import annotations

import cmath
import math

from .errors import JetDomainError, JetOrderError, OverflowRangeError, TruncationError

# relative floor under which low-index coefficients are treated as exact zeros
# when locating the leading term of a series
ZERO_COEFF_RATIO = 1e-12

# cmath.exp overflows just above exp(709.78)
_EXP_ARG_LIMIT = 709.0


class Jet:
    """Complex truncated power series in one formal perturbation variable.

    ``coeffs[k]`` multiplies eps^k.  Jets of different order never mix
    implicitly; callers align orders first (a mismatch raises
    JetOrderError).  Plain numbers promote to constant jets of the
    partner's order.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = tuple(complex(c) for c in coeffs)
        if not cs:
            raise JetOrderError("a jet needs at least the eps^0 coefficient")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        return cls((complex(value),) + (0j,) * order)

    @classmethod
    def variable(cls, center, order: int, power: int = 1) -> "Jet":
        """The jet of center + eps**power truncated at ``order``."""
        cs = [0j] * (order + 1)
        cs[0] = complex(center)
        if power <= order:
            cs[power] += 1.0
        return cls(cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r})"

    def __eq__(self, other):
        return isinstance(other, Jet) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise JetOrderError(
                    f"jet order mismatch: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, float, complex)):
            return Jet.constant(other, self.order)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(tuple(b - a for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self):
        return Jet(tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            z = complex(other)
            return Jet(tuple(a * z for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return jet_mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            z = complex(other)
            return Jet(tuple(a / z for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return jet_div(self, o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return jet_div(o, self)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return jet_div(Jet.constant(1.0, self.order), self.__pow__(-n))
        out = Jet.constant(1.0, self.order)
        base = self
        k = n
        while k:
            if k & 1:
                out = jet_mul(out, base)
            base_needed = k >> 1
            if base_needed:
                base = jet_mul(base, base)
            k = base_needed
        return out

    def conjugate(self) -> "Jet":
        """Coefficientwise conjugate; equals the jet at the conjugate center
        because the perturbation variable is real."""
        return Jet(tuple(a.conjugate() for a in self.coeffs))

    # -- series utilities ---------------------------------------------------

    def truncated(self, order: int) -> "Jet":
        if order > self.order:
            raise TruncationError(
                f"cannot extend a jet of order {self.order} to {order}")
        return Jet(self.coeffs[: order + 1])

    def shifted_up(self, k: int) -> "Jet":
        """Multiply by eps^k, keeping the order (top coefficients drop off)."""
        if k == 0:
            return self
        cs = (0j,) * k + self.coeffs
        return Jet(cs[: len(self.coeffs)])

    def shifted_down(self, k: int) -> "Jet":
        """Divide by eps^k.  The k lowest coefficients must be zero up to the
        relative floor; the result is k orders shorter."""
        if k == 0:
            return self
        if k > self.order:
            raise TruncationError(
                f"cannot shift a jet of order {self.order} down by {k}")
        scale = max(abs(c) for c in self.coeffs)
        tol = ZERO_COEFF_RATIO * scale
        for c in self.coeffs[:k]:
            if abs(c) > tol:
                raise JetDomainError(
                    f"shift down by {k} hits a nonzero coefficient {c!r}")
        return Jet(self.coeffs[k:])


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Cauchy product truncated at the shared order."""
    if a.order != b.order:
        raise JetOrderError(f"jet order mismatch: {a.order} vs {b.order}")
    ac, bc = a.coeffs, b.coeffs
    n = len(ac)
    out = [0j] * n
    for i, ai in enumerate(ac):
        if ai == 0:
            continue
        for j in range(n - i):
            out[i + j] += ai * bc[j]
    return Jet(out)


def jet_div(a: Jet, b: Jet) -> Jet:
    """Series division; b must have a nonzero eps^0 coefficient."""
    if a.order != b.order:
        raise JetOrderError(f"jet order mismatch: {a.order} vs {b.order}")
    b0 = b.coeffs[0]
    if b0 == 0:
        raise JetDomainError("division by a jet with zero constant term")
    n = len(a.coeffs)
    q = [0j] * n
    for k in range(n):
        s = a.coeffs[k]
        for j in range(k):
            s -= q[j] * b.coeffs[k - j]
        q[k] = s / b0
    return Jet(q)


def jet_exp(a: Jet) -> Jet:
    """exp of a jet: scalar exp of the constant term times the Maclaurin
    series of the nilpotent tail, via the recurrence e' = e * a'."""
    a0 = a.coeffs[0]
    if a0.real > _EXP_ARG_LIMIT:
        raise OverflowRangeError(
            f"exp argument real part {a0.real:.6g} overflows", a0.real)
    e0 = cmath.exp(a0)
    n = len(a.coeffs)
    e = [0j] * n
    e[0] = e0
    for k in range(1, n):
        s = 0j
        for j in range(1, k + 1):
            s += j * a.coeffs[j] * e[k - j]
        e[k] = s / k
    return Jet(e)


def jet_sqrt_even(a: Jet) -> Jet:
    """Principal square root of a jet whose leading term sits at an even
    index 2m; the result leads at index m.

    Coefficients below the leading index smaller than ZERO_COEFF_RATIO
    times the largest coefficient count as zero.  An odd leading index or
    an identically zero jet has no square root in the truncated ring.
    """
    scale = max(abs(c) for c in a.coeffs)
    if scale == 0.0:
        raise JetDomainError("square root of the zero jet is degenerate")
    tol = ZERO_COEFF_RATIO * scale
    lead = None
    for i, c in enumerate(a.coeffs):
        if abs(c) > tol:
            lead = i
            break
    if lead is None:
        raise JetDomainError("square root of the zero jet is degenerate")
    if lead % 2 != 0:
        raise JetDomainError(
            f"square root needs an even leading index, got {lead}")
    m = lead // 2
    n = len(a.coeffs)
    # unit-leading part, padded with zeros at the top
    ah = list(a.coeffs[lead:]) + [0j] * lead
    r = [0j] * n
    r[0] = cmath.sqrt(ah[0])
    for k in range(1, n):
        s = ah[k]
        for j in range(1, k):
            s -= r[j] * r[k - j]
        r[k] = s / (2 * r[0])
    out = [0j] * n
    for k in range(n - m):
        out[k + m] = r[k]
    return Jet(out)


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------


class SquareMatrix:
    """Small dense complex matrix, row-major."""

    __slots__ = ("dim", "rows")

    def __init__(self, rows):
        rows = [list(map(complex, r)) for r in rows]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square and non-empty")
        self.dim = n
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> "SquareMatrix":
        return cls([[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)])

    def replaced_column(self, col: int, vec) -> "SquareMatrix":
        rows = [list(r) for r in self.rows]
        for i, v in enumerate(vec):
            rows[i][col] = complex(v)
        return SquareMatrix(rows)

    def matmul(self, other: "SquareMatrix") -> "SquareMatrix":
        n = self.dim
        a, b = self.rows, other.rows
        return SquareMatrix(
            [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
             for i in range(n)])


def _nearest_pow2_exponent(m: float) -> int:
    # m > 0; pick p with 2^p closest to m (ties toward the larger power)
    f, e = math.frexp(m)  # m = f * 2^e, f in [0.5, 1)
    return e if f >= 0.75 else e - 1


def _equilibrate(rows):
    """Scale rows then columns by powers of two near their max magnitude.

    Returns the scaled copy and the integer k with
    det(original) = det(scaled) * 2**k.  Powers of two make the scaling
    exact, so dividing it back out loses nothing.
    """
    n = len(rows)
    work = [list(r) for r in rows]
    expo = 0
    for i in range(n):
        m = max(abs(c) for c in work[i])
        if m == 0.0 or not math.isfinite(m):
            continue
        p = _nearest_pow2_exponent(m)
        if p:
            work[i] = [complex(math.ldexp(c.real, -p), math.ldexp(c.imag, -p))
                       for c in work[i]]
            expo += p
    for j in range(n):
        m = max(abs(work[i][j]) for i in range(n))
        if m == 0.0 or not math.isfinite(m):
            continue
        p = _nearest_pow2_exponent(m)
        if p:
            for i in range(n):
                c = work[i][j]
                work[i][j] = complex(math.ldexp(c.real, -p),
                                     math.ldexp(c.imag, -p))
            expo += p
    return work, expo


def _lu_det(work) -> complex:
    """Determinant by LU with partial pivoting on a mutable row list.

    The pivot is the largest-magnitude candidate; ties keep the lowest row
    index, so the factorization is deterministic.
    """
    n = len(work)
    sign = 1.0
    det = 1.0 + 0j
    for k in range(n):
        piv, pmag = k, abs(work[k][k])
        for i in range(k + 1, n):
            m = abs(work[i][k])
            if m > pmag:
                piv, pmag = i, m
        if pmag == 0.0:
            return 0j
        if piv != k:
            work[k], work[piv] = work[piv], work[k]
            sign = -sign
        pivot = work[k][k]
        det *= pivot
        for i in range(k + 1, n):
            f = work[i][k] / pivot
            if f == 0:
                continue
            row_i, row_k = work[i], work[k]
            for j in range(k + 1, n):
                row_i[j] -= f * row_k[j]
    return sign * det


def det_with_exponent(m: SquareMatrix, precision: str = "std"):
    """Determinant as (d, k) with det = d * 2**k, robust to huge entry scales."""
    work, expo = _equilibrate(m.rows)
    if precision == "std":
        d = _lu_det(work)
    elif precision == "dd":
        d = _lu_det_dd(work)
    else:
        raise ValueError(f"unknown precision mode {precision!r}")
    if d == 0:
        return 0j, 0
    return d, expo


def det(m: SquareMatrix, precision: str = "std") -> complex:
    """Determinant of a small complex matrix.  Singular input returns 0."""
    d, k = det_with_exponent(m, precision)
    return complex(math.ldexp(d.real, k), math.ldexp(d.imag, k))


# ---------------------------------------------------------------------------
# double-double (compensated) arithmetic for the "dd" determinant mode
# ---------------------------------------------------------------------------
# A dd number is a pair (hi, lo) of floats with |lo| <= ulp(hi)/2; the pair
# represents hi + lo to roughly 32 significant digits.  Complex dd values
# are ((re_hi, re_lo), (im_hi, im_lo)).

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a: float, b: float):
    s = a + b
    return s, b - (s - a)


def _two_prod(a: float, b: float):
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _dd_add(x, y):
    s1, e1 = _two_sum(x[0], y[0])
    s2, e2 = _two_sum(x[1], y[1])
    e1 += s2
    s1, e1 = _quick_two_sum(s1, e1)
    e1 += e2
    return _quick_two_sum(s1, e1)


def _dd_neg(x):
    return (-x[0], -x[1])

def _dd_sub(x, y):
    return _dd_add(x, _dd_neg(y))


def _dd_mul(x, y):
    p, e = _two_prod(x[0], y[0])
    e += x[0] * y[1] + x[1] * y[0]
    return _quick_two_sum(p, e)


def _dd_div(x, y):
    q0 = x[0] / y[0]
    r = _dd_sub(x, _dd_mul(y, (q0, 0.0)))
    q1 = (r[0] + r[1]) / y[0]
    r = _dd_sub(r, _dd_mul(y, (q1, 0.0)))
    q2 = (r[0] + r[1]) / y[0]
    s, e = _quick_two_sum(q0, q1)
    return _quick_two_sum(s, e + q2)


def _cdd(z: complex):
    return ((z.real, 0.0), (z.imag, 0.0))


def _cdd_add(x, y):
    return (_dd_add(x[0], y[0]), _dd_add(x[1], y[1]))

def _cdd_sub(x, y):
    return (_dd_sub(x[0], y[0]), _dd_sub(x[1], y[1]))


def _cdd_mul(x, y):
    re = _dd_sub(_dd_mul(x[0], y[0]), _dd_mul(x[1], y[1]))
    im = _dd_add(_dd_mul(x[0], y[1]), _dd_mul(x[1], y[0]))
    return (re, im)


def _cdd_div(x, y):
    den = _dd_add(_dd_mul(y[0], y[0]), _dd_mul(y[1], y[1]))
    re = _dd_div(_dd_add(_dd_mul(x[0], y[0]), _dd_mul(x[1], y[1])), den)
    im = _dd_div(_dd_sub(_dd_mul(x[1], y[0]), _dd_mul(x[0], y[1])), den)
    return (re, im)


def _cdd_mag2(x) -> float:
    return x[0][0] * x[0][0] + x[1][0] * x[1][0]


def _cdd_is_zero(x) -> bool:
    return x[0][0] == 0.0 and x[0][1] == 0.0 and x[1][0] == 0.0 and x[1][1] == 0.0


def _lu_det_dd(rows) -> complex:
    """Same pivoting discipline as _lu_det, in double-double arithmetic.

    Pivot comparisons use the leading components only; the tie-break is
    therefore identical to the standard path.
    """
    n = len(rows)
    work = [[_cdd(c) for c in r] for r in rows]
    sign = 1.0
    det_dd = ((1.0, 0.0), (0.0, 0.0))
    for k in range(n):
        piv, pmag = k, _cdd_mag2(work[k][k])
        for i in range(k + 1, n):
            m = _cdd_mag2(work[i][k])
            if m > pmag:
                piv, pmag = i, m
        if pmag == 0.0 and _cdd_is_zero(work[piv][k]):
            return 0j
        if piv != k:
            work[k], work[piv] = work[piv], work[k]
            sign = -sign
        pivot = work[k][k]
        det_dd = _cdd_mul(det_dd, pivot)
        for i in range(k + 1, n):
            if _cdd_is_zero(work[i][k]):
                continue
            f = _cdd_div(work[i][k], pivot)
            row_i, row_k = work[i], work[k]
            for j in range(k + 1, n):
                row_i[j] = _cdd_sub(row_i[j], _cdd_mul(f, row_k[j]))
    re = det_dd[0][0] + det_dd[0][1]
    im = det_dd[1][0] + det_dd[1][1]
    return sign * complex(re, im)
