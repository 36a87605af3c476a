"""The leaky-trap model: a particle on the half line, hard wall at the
origin, initially confined to a box [0, a] whose right wall is replaced at
t = 0 by a delta barrier of dimensionless strength eta at x = d >= a.

Natural units hbar = m = 1 throughout; a is the length unit (default 1) and
tau = t/a^2 the time variable.  The delta barrier imposes the jump condition
psi'(d+) - psi'(d-) = eta * psi(d).
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (CompletenessError, ConfigError, ConvergenceError,
                     DomainError)
from .series import TruncatedSeries, series_exp
from .special import cexpm1_over, csinc


@dataclass(frozen=True)
class ModelParams:
    """Trap geometry and barrier strength.

    region_choice selects the observation region Delta = (0, delta_end):
    "d" (default) extends it to the barrier, "a" keeps the initial box.
    The two coincide unless the barrier is shifted (d > a).
    """

    a: float = 1.0
    d: float = None
    eta: float = 0.0
    region_choice: str = "d"

    def __post_init__(self):
        if self.d is None:
            object.__setattr__(self, "d", self.a)
        if not self.a > 0:
            raise ConfigError("box width a must be positive")
        if self.d < self.a:
            raise ConfigError("barrier position d must satisfy d >= a")
        if self.eta < 0:
            raise ConfigError("barrier strength eta must be >= 0")
        if self.region_choice not in ("a", "d"):
            raise ConfigError("region_choice must be 'a' or 'd'")

    @property
    def delta_end(self):
        return self.a if self.region_choice == "a" else self.d


@dataclass(frozen=True)
class Pole:
    """One resonance: S-matrix pole k in the fourth quadrant.

    epsilon and gamma come from the complex energy k^2/2 = epsilon - i*gamma/2;
    residual is the final Newton step |f/f'|, a distance in the k plane.
    """

    j: int
    k: complex
    epsilon: float
    gamma: float
    residual: float

    @property
    def lifetime(self):
        return 1.0 / self.gamma


def box_eigenstate(n, x, p=None):
    """Initial-box eigenstate sqrt(2/a) sin(n pi x / a) on [0, a], 0 outside."""
    if n < 1:
        raise DomainError("mode index n must be >= 1")
    p = p or ModelParams()
    x = np.asarray(x, dtype=float)
    inside = (x >= 0.0) & (x <= p.a)
    val = np.where(inside, np.sqrt(2.0 / p.a) * np.sin(n * np.pi * x / p.a),
                   0.0)
    return val if val.ndim else float(val)


def pole_equation(k, p):
    """f(k) = k cos(kd) + (eta - ik) sin(kd); zeros are the S-matrix poles."""
    d, eta = p.d, p.eta
    k = np.asarray(k, dtype=complex)
    out = k * np.cos(k * d) + (eta - 1j * k) * np.sin(k * d)
    return out if out.ndim else complex(out)


def pole_equation_deriv(k, p):
    d, eta = p.d, p.eta
    k = np.asarray(k, dtype=complex)
    out = (np.cos(k * d) - k * d * np.sin(k * d)
           + (eta - 1j * k) * d * np.cos(k * d) - 1j * np.sin(k * d))
    return out if out.ndim else complex(out)


def _newton_pole(p, seed, max_iter=80):
    k = complex(seed)
    for _ in range(max_iter):
        f = pole_equation(k, p)
        fp = pole_equation_deriv(k, p)
        if fp == 0:
            break
        step = f / fp
        k -= step
        if abs(step) < 1e-15 * (1.0 + abs(k)):
            resid = abs(pole_equation(k, p) / pole_equation_deriv(k, p))
            return k, resid
    raise ConvergenceError(f"Newton stalled from seed {seed:.6g}")


def find_poles(p, count):
    """First ``count`` proper poles (fourth quadrant, Re k > |Im k|),
    sorted by Re k, Newton-refined, with argument-principle completeness
    verified over a rectangle covering them.

    Seeds start from the hard-wall perturbative estimate
    (j pi/d)(1 - 1/(1 + eta d)); for higher modes, where resonances drift
    toward j pi/d with logarithmically growing widths, continuation from the
    previous pole takes over.  Converging onto an already-found pole triggers
    a perturbed re-seed.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    if p.eta <= 0:
        raise ConfigError("pole finding requires eta > 0 (no resonances "
                          "for the free half line)")
    d, eta = p.d, p.eta
    spacing = (math.pi / d) * (1.0 - 1.0 / (1.0 + eta * d))
    poles = []
    for j in range(1, count + 1):
        im_pert = -min(0.5 / d, 0.35 * spacing / (1.0 + eta * d) + 0.02 / d)
        im_free = -math.log(max(2.0 * j * math.pi / max(eta * d, 1e-12),
                                1.05)) / (2.0 * d)
        seeds = []
        if poles:
            seeds.append(poles[-1].k + spacing)
            seeds.append(poles[-1].k + math.pi / d)
        seeds.append(complex(j * spacing, im_pert))
        seeds.append(complex(j * math.pi / d, min(im_pert, im_free)))
        seeds.append(complex(j * spacing, 4 * im_pert - 0.2 / d))

        k = resid = None
        for attempt, seed in enumerate(seeds + [
                complex(j * spacing * (1 + 0.05 * m), im_pert * (1 + m))
                for m in range(1, 5)]):
            try:
                cand, res = _newton_pole(p, seed)
            except ConvergenceError:
                continue
            if any(abs(cand - q.k) < 1e-8 * (1 + abs(cand)) for q in poles):
                continue      # deflated: already found, try next seed
            if not (cand.real > abs(cand.imag) > 0.0):
                continue
            if abs(cand.real * d / math.pi - j) > 1.2:
                continue      # wrong basin
            k, resid = cand, res
            break
        if k is None:
            raise ConvergenceError(f"could not isolate pole j={j}")
        e = 0.5 * (k * k)
        poles.append(Pole(j=j, k=k, epsilon=e.real, gamma=-2.0 * e.imag,
                          residual=resid))
    poles.sort(key=lambda q: q.k.real)
    poles = [Pole(j=i + 1, k=q.k, epsilon=q.epsilon, gamma=q.gamma,
                  residual=q.residual) for i, q in enumerate(poles)]

    re_lo = poles[0].k.real - 0.45 * spacing
    re_hi = poles[-1].k.real + 0.5 * spacing
    im_bot = 2.0 * min(q.k.imag for q in poles) - 0.2 / d
    nz = count_zeros_rectangle(lambda k: pole_equation(k, p),
                               re_lo, re_hi, im_bot, 0.0,
                               feature_scale=math.pi / d)
    if nz != count:
        raise CompletenessError(
            f"argument principle counts {nz} zeros where {count} poles "
            f"were found")
    return poles


def count_zeros_rectangle(fn, re_lo, re_hi, im_lo, im_hi, max_evals=400000,
                          feature_scale=None):
    """Number of zeros of an analytic function inside a rectangle, by
    winding of the phase along the boundary with adaptive refinement.

    ``feature_scale`` is the shortest length over which the phase may swing
    by order pi; boundary edges are pre-sampled a few points per feature so
    that whole turns cannot alias between samples.
    """
    if feature_scale is None:
        feature_scale = max(re_hi - re_lo, im_hi - im_lo) / 16.0
    corners = [complex(re_lo, im_lo), complex(re_hi, im_lo),
               complex(re_hi, im_hi), complex(re_lo, im_hi),
               complex(re_lo, im_lo)]
    total = 0.0
    evals = [0]

    def phase_change(z0, z1, f0, f1, depth):
        dphi = cmath.phase(f1 / f0)
        if abs(dphi) <= 0.5 * math.pi:
            return dphi
        if depth > 48:
            raise CompletenessError(
                "winding refinement exhausted (zero on or near the boundary)")
        zm = 0.5 * (z0 + z1)
        fm = fn(zm)
        evals[0] += 1
        if evals[0] > max_evals:
            raise CompletenessError("winding evaluation budget exhausted")
        if fm == 0:
            raise CompletenessError("zero lies on the counting boundary")
        return (phase_change(z0, zm, f0, fm, depth + 1)
                + phase_change(zm, z1, fm, f1, depth + 1))

    for c0, c1 in zip(corners[:-1], corners[1:]):
        n0 = max(24, int(math.ceil(4.0 * abs(c1 - c0) / feature_scale)))
        zs = [c0 + (c1 - c0) * t / n0 for t in range(n0 + 1)]
        fs = [fn(z) for z in zs]
        evals[0] += n0 + 1
        for i in range(n0):
            total += phase_change(zs[i], zs[i + 1], fs[i], fs[i + 1], 0)
    winding = total / (2.0 * math.pi)
    nearest = round(winding)
    if abs(winding - nearest) > 0.25:
        raise CompletenessError(f"non-integer winding {winding:.3f}")
    return int(nearest)


@lru_cache(maxsize=64)
def _cached_poles(a, d, eta, region_choice, count):
    return tuple(find_poles(ModelParams(a, d, eta, region_choice), count))


def cached_poles(p, count):
    return _cached_poles(p.a, p.d, p.eta, p.region_choice, count)


def mode_norm_sq(pole_k, p):
    """C_j^2 of the resonant mode u_j(x) = C_j sin(k_j x) on [0, d], under
    the outgoing-mode normalization  int_0^d u^2 dx + i u(d)^2/(2k) = 1.

    At a pole the boundary term collapses and
    C^2 = 1 / (d/2 + eta sin^2(k d) / (2 k^2)).
    """
    k = pole_k
    s = cmath.sin(k * p.d)
    return 1.0 / (0.5 * p.d + 0.5 * p.eta * s * s / (k * k))


def box_mode_overlap(k, n, p):
    """int_0^a sin(k x) sqrt(2/a) sin(n pi x/a) dx for complex k."""
    kappa = k * p.a
    half = 0.5 * (csinc(kappa - n * np.pi) - csinc(kappa + n * np.pi))
    return math.sqrt(2.0 * p.a) * complex(half) if np.ndim(k) == 0 \
        else np.sqrt(2.0 * p.a) * half


def outgoing_green(x, xp, k, p):
    """Outgoing-wave Green function G+(x, x'; k) for the delta-barrier half
    line, valid for 0 <= x, x' <= delta_end.

    Built from the regular solution sin(k x)/k and the outgoing solution
    matched across the barrier; symmetric in (x, x') and analytic at k = 0.
    Exponentials are grouped by the sign of Im k so that the evaluation
    stays within double range for |Im k| d up to ~350.

    ``k`` may also be a TruncatedSeries, in which case the Taylor expansion
    about k = 0 is produced by the same formula over the series ring.
    """
    if isinstance(k, TruncatedSeries):
        return _green_series(x, xp, k, p)

    x_arr = np.asarray(x, dtype=float)
    xp_arr = np.asarray(xp, dtype=float)
    de = p.delta_end
    if np.any(x_arr < 0) or np.any(x_arr > de + 1e-12) or \
       np.any(xp_arr < 0) or np.any(xp_arr > de + 1e-12):
        raise DomainError("Green function arguments must lie in [0, delta_end]")
    lo = np.minimum(x_arr, xp_arr)
    hi = np.maximum(x_arr, xp_arr)
    d, eta = p.d, p.eta
    k = complex(k)

    reg = lo * csinc(k * lo)
    if k.imag >= 0.0:
        out = (np.exp(1j * k * hi)
               + eta * (d - hi) * np.exp(1j * k * (2 * d - hi))
               * cexpm1_over(2j * k * (hi - d)))
        denom = -1.0 - eta * d * cexpm1_over(2j * k * d)
    else:
        # rescaled by exp(-2ikd): every exponent has a nonpositive growth rate
        out = (np.exp(1j * k * (hi - 2 * d))
               + eta * (d - hi) * np.exp(-1j * k * hi)
               * cexpm1_over(2j * k * (hi - d)))
        denom = -np.exp(-2j * k * d) - eta * d * cexpm1_over(-2j * k * d)
    g = reg * out / denom
    return g if g.ndim else complex(g)


def _green_series(x, xp, k_series, p):
    lo, hi = (x, xp) if x <= xp else (xp, x)
    de = p.delta_end
    if not (0 <= lo and hi <= de + 1e-12):
        raise DomainError("Green function arguments must lie in [0, delta_end]")
    d, eta = p.d, p.eta
    reg = lo * _series_sinc(k_series * lo)
    out = (series_exp(1j * k_series * hi)
           + eta * (d - hi) * series_exp(1j * k_series * (2 * d - hi))
           * _series_expm1_over(2j * k_series * (hi - d)))
    denom = -1.0 - eta * d * _series_expm1_over(2j * k_series * d)
    return reg * out / denom


def _series_sinc(s):
    from .series import _compose, _split_const
    c0, t = _split_const(s)
    if abs(c0) != 0:
        raise DomainError("series sinc requires zero constant term")
    n = s.order + 1
    coeffs = [0.0 if m % 2 else (-1.0) ** (m // 2) / math.factorial(m + 1)
              for m in range(n)]
    return _compose(t, coeffs)


def _series_expm1_over(s):
    from .series import _compose, _split_const
    c0, t = _split_const(s)
    if abs(c0) != 0:
        raise DomainError("series expm1_over requires zero constant term")
    n = s.order + 1
    coeffs = [1.0 / math.factorial(m + 1) for m in range(n)]
    return _compose(t, coeffs)
