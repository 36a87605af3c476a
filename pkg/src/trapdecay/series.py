"""Arithmetic on truncated power series in one variable.

A :class:`TruncatedSeries` stores coefficients for powers ``base .. order`` of
the expansion variable; coefficients beyond ``order`` are *unknown*, not zero.
Arithmetic tracks how far results remain trustworthy: sums are valid to the
smaller order, products to ``min(o1 + b2, o2 + b1)``.  Known zeros inside the
window stay exact, which is what lets determinants over this ring cancel
rank-deficient leading orders symbolically.

The expansion variable is real and positive in all uses here (u = tau^{-1/2}),
so complex conjugation acts on coefficients alone.
"""

import cmath
import math
from itertools import permutations

from .errors import AccuracyError, CapacityError, DomainError, InconclusiveError


class TruncatedSeries:
    """Series  sum_{m=base}^{order} c[m-base] * u^m  + O(u^{order+1})."""

    __slots__ = ("base", "coeffs", "order")

    def __init__(self, coeffs, base=0, order=None):
        coeffs = [complex(c) if not _is_mp(c) else c for c in coeffs]
        if order is None:
            order = base + len(coeffs) - 1
        if order < base:
            raise ValueError("order must be >= base")
        want = order - base + 1
        if len(coeffs) < want:
            coeffs = coeffs + [_zero_like(coeffs)] * (want - len(coeffs))
        elif len(coeffs) > want:
            coeffs = coeffs[:want]
        self.base = base
        self.order = order
        self.coeffs = coeffs

    # -- constructors ------------------------------------------------------

    @classmethod
    def variable(cls, order):
        """The series of the bare expansion variable, known through u^order."""
        return cls([1.0 + 0.0j], base=1, order=order)

    @classmethod
    def constant(cls, value, order):
        return cls([value], base=0, order=order)

    # -- queries -----------------------------------------------------------

    def coeff(self, power):
        """Coefficient of u^power (0 for known-zero slots inside the window)."""
        if power < self.base or power > self.order:
            return 0.0 + 0.0j
        return self.coeffs[power - self.base]

    def is_zero(self, tol=0.0):
        return all(abs(c) <= tol for c in self.coeffs)

    def leading(self, tol=0.0):
        """(power, coeff) of the first coefficient with |c| > tol."""
        for i, c in enumerate(self.coeffs):
            if abs(c) > tol:
                return self.base + i, c
        return None

    def __call__(self, u):
        acc = 0.0j
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc * u ** self.base

    def __repr__(self):
        terms = ", ".join(f"u^{self.base + i}:{c:.6g}"
                          for i, c in enumerate(self.coeffs) if abs(c) > 0)
        return f"TruncatedSeries({terms or '0'}; order={self.order})"

    # -- ring operations ---------------------------------------------------

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.base, self.order)

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries([other], base=0, order=self.order)
        base = min(self.base, other.base)
        order = min(self.order, other.order)
        if order < base:
            raise ValueError("incompatible truncation windows")
        out = [0.0 + 0.0j] * (order - base + 1)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                p = s.base + i
                if p <= order:
                    out[p - base] += c
        return TruncatedSeries(out, base, order)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncatedSeries)
                       else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries([c * other for c in self.coeffs],
                                   self.base, self.order)
        base = self.base + other.base
        order = min(self.order + other.base, other.order + self.base)
        out = [0.0 + 0.0j] * (order - base + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            pa = self.base + i
            jmax = min(len(other.coeffs), order - pa - other.base + 1)
            for j in range(max(0, jmax)):
                out[pa + other.base + j - base] += a * other.coeffs[j]
        return TruncatedSeries(out, base, order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries([c / other for c in self.coeffs],
                                   self.base, self.order)
        return self.trimmed() * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if not isinstance(n, int) or n < 1:
            raise ValueError("series power requires integer n >= 1")
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def inverse(self):
        """Multiplicative inverse; leading exact zeros shift the base."""
        lead = self.leading(tol=0.0)
        if lead is None:
            raise DomainError("cannot invert the zero series")
        p0, c0 = lead
        rel = self.order - p0          # relative orders retained
        d = [self.coeff(p0 + m) for m in range(rel + 1)]
        inv = [1.0 / c0] + [0.0 + 0.0j] * rel
        for m in range(1, rel + 1):
            s = 0.0 + 0.0j
            for j in range(1, m + 1):
                s += d[j] * inv[m - j]
            inv[m] = -s / c0
        return TruncatedSeries(inv, base=-p0, order=-p0 + rel)

    def conjugate(self):
        return TruncatedSeries([c.conjugate() for c in self.coeffs],
                               self.base, self.order)

    def abs_sq(self):
        """|series|^2 as a series (valid because u is real and positive)."""
        return self * self.conjugate()

    def shifted(self, k):
        """Multiply by u^k (k may be negative)."""
        return TruncatedSeries(list(self.coeffs), self.base + k, self.order + k)

    def trimmed(self):
        """Drop exact-zero leading coefficients (keeps at least one slot)."""
        i = 0
        while i < len(self.coeffs) - 1 and self.coeffs[i] == 0:
            i += 1
        if i == 0:
            return self
        return TruncatedSeries(self.coeffs[i:], self.base + i, self.order)

    def truncated(self, order):
        if order >= self.order:
            return self
        return TruncatedSeries(self.coeffs[:order - self.base + 1],
                               self.base, order)


def _is_mp(c):
    return c.__class__.__module__.startswith("mpmath")


def _zero_like(coeffs):
    return 0.0 + 0.0j


def _compose(series, outer_coeffs):
    """Sum outer_coeffs[m] * t^m for t = series with zero constant term."""
    if series.base < 0:
        raise DomainError("composition requires a series analytic at 0")
    t = series
    if t.base == 0:
        if abs(t.coeffs[0]) != 0:
            raise ValueError("_compose needs zero constant term")
    rel = series.order
    acc = TruncatedSeries.constant(outer_coeffs[-1], order=series.order)
    for c in reversed(outer_coeffs[:-1]):
        acc = acc * t + c
    return acc


def _split_const(s):
    c0 = s.coeff(0)
    t = s - c0
    return c0, t


def series_exp(s):
    """exp of a series analytic at 0."""
    c0, t = _split_const(s)
    n = s.order + 1
    coeffs = [1.0 / math.factorial(m) for m in range(n)]
    return _compose(t, coeffs) * cmath.exp(c0)


def series_sin(s):
    c0, t = _split_const(s)
    n = s.order + 1
    sin_t = _compose(t, [_sin_coeff(m) for m in range(n)])
    cos_t = _compose(t, [_cos_coeff(m) for m in range(n)])
    return sin_t * cmath.cos(c0) + cos_t * cmath.sin(c0)


def series_cos(s):
    c0, t = _split_const(s)
    n = s.order + 1
    sin_t = _compose(t, [_sin_coeff(m) for m in range(n)])
    cos_t = _compose(t, [_cos_coeff(m) for m in range(n)])
    return cos_t * cmath.cos(c0) - sin_t * cmath.sin(c0)


def _sin_coeff(m):
    if m % 2 == 0:
        return 0.0
    return (-1.0) ** ((m - 1) // 2) / math.factorial(m)


def _cos_coeff(m):
    if m % 2 == 1:
        return 0.0
    return (-1.0) ** (m // 2) / math.factorial(m)


_DET_GUARD = 6


def series_det(mat, track_noise=False):
    """Determinant of a square matrix of TruncatedSeries (Leibniz sum).

    With ``track_noise`` also returns a dict mapping u-power to the summed
    magnitude of all permutation contributions at that power, the yardstick
    for classifying cancelled orders.
    """
    return _leibniz(mat, signed=True, track_noise=track_noise)


def series_per(mat, track_noise=False):
    """Permanent of a square matrix of TruncatedSeries."""
    return _leibniz(mat, signed=False, track_noise=track_noise)


def _leibniz(mat, signed, track_noise):
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix must be square")
    if n > _DET_GUARD:
        raise CapacityError(f"series determinant guard is N <= {_DET_GUARD}")
    acc = None
    noise = {}
    for perm in permutations(range(n)):
        prod = mat[0][perm[0]]
        for i in range(1, n):
            prod = prod * mat[i][perm[i]]
        if signed and _parity(perm) < 0:
            term = -prod
        else:
            term = prod
        acc = term if acc is None else acc + term
        if track_noise:
            for i, c in enumerate(prod.coeffs):
                p = prod.base + i
                noise[p] = noise.get(p, 0.0) + abs(c)
    if track_noise:
        return acc, noise
    return acc


def _parity(perm):
    perm = list(perm)
    visited = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if visited[i]:
            continue
        j = i
        length = 0
        while not visited[j]:
            visited[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


SURVIVOR_RELATIVE_FLOOR = 1e-8


def leading_surviving(series, noise, floor=SURVIVOR_RELATIVE_FLOOR):
    """First (power, coeff) whose magnitude beats the cancellation noise.

    A coefficient counts as surviving when it exceeds ``floor`` times the
    summed magnitude of the Leibniz contributions at its power; smaller
    residues are rounding debris from symbolic cancellations.
    """
    for i, c in enumerate(series.coeffs):
        p = series.base + i
        if abs(c) > floor * noise.get(p, 0.0) and abs(c) > 0.0:
            return p, c
    raise InconclusiveError(
        "all retained orders cancel below the noise floor; raise the "
        "truncation order")


def taylor_coeffs(f, order):
    """Taylor coefficients of ``f`` about 0 through the requested order.

    ``f`` receives a TruncatedSeries and must be built from the arithmetic
    this module provides (ring operations, series_exp/sin/cos), i.e. the
    truncated-Taylor-mode route.  Returns coefficients of k^0 .. k^order.

    Evaluation runs with extra headroom because divisions by series with a
    zero constant term consume trustworthy orders.
    """
    res = None
    for pad in (8, 16, 32):
        var = TruncatedSeries.variable(order + pad)
        res = f(var)
        if not isinstance(res, TruncatedSeries):
            res = TruncatedSeries.constant(res, order + pad)
        res = res.trimmed()
        if res.base < 0:
            raise DomainError("function is not analytic at 0 (pole detected)")
        if res.order >= order:
            return [res.coeff(m) for m in range(order + 1)]
    raise AccuracyError(
        f"composition only determined coefficients to order {res.order}, "
        f"needed {order}")
