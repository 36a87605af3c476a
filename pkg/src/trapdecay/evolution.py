"""Time evolution of the initial box eigenstates.

Three independent routes compute phi_n(x, tau):

* ``EXACT_FREE`` (eta = 0): closed form from the image propagator, a signed
  combination of eight Moshinsky kernels.  At late times the plane-wave
  parts of the reflected kernels cancel identically; they are dropped
  analytically so the small power-law remainder is not buried under their
  rounding noise.
* ``CONTINUUM``: expansion over the exact delta-barrier scattering states,
  integrated over momentum with an oscillation-aware contour (real-axis
  panels plus a 45-degree rotated tail once the Gaussian evolution factor
  can absorb the analytic growth of the integrand).
* ``RSE``: resonance poles plus the background integral along the rotated
  momentum line Im k = -Re k, where the evolution factor becomes the
  Gaussian exp(-s^2 tau / 2).

The long-time leading form is available as ``ASYMPTOTIC``.
"""

import math
from enum import Enum

import numpy as np

from .errors import AccuracyError, ConfigError, DomainError
from .model import (ModelParams, box_eigenstate, box_mode_overlap,
                    cached_poles, mode_norm_sq, outgoing_green)
from .quadrature import integrate_batch
from .special import csinc, faddeeva

_GL16 = np.polynomial.legendre.leggauss(16)


class EvolutionMethod(Enum):
    EXACT_FREE = "exact_free"
    RSE = "rse"
    CONTINUUM = "continuum"
    ASYMPTOTIC = "asymptotic"

    @classmethod
    def parse(cls, name):
        try:
            return cls(name)
        except ValueError:
            raise ConfigError(f"unknown evolution method '{name}'") from None


def validate_method(method, p):
    if method == EvolutionMethod.EXACT_FREE and p.eta != 0.0:
        raise ConfigError("exact_free requires eta = 0 (free half line)")
    if method == EvolutionMethod.RSE and p.eta <= 0.0:
        raise ConfigError("rse requires eta > 0 (there are no resonances)")


def wavefunction(n, x, tau, p, method, **kw):
    """phi_n(x, tau) by the selected method."""
    validate_method(method, p)
    if method == EvolutionMethod.EXACT_FREE:
        return evolve_free(n, x, tau, p, **kw)
    if method == EvolutionMethod.RSE:
        return rse_propagate(n, x, tau, p, **kw)
    if method == EvolutionMethod.CONTINUUM:
        return continuum_propagate(n, x, tau, p, **kw)
    return asymptotic_wavefunction(n, x, tau, p)


# ---------------------------------------------------------------------------
# exact free evolution (eta = 0)

def evolve_free(n, x, tau, p=None):
    """Free half-line evolution of box mode n via the image construction.

    phi_n(x,tau) = (i/sqrt(2a)) sum_{alpha,beta} alpha beta
                   [ M(beta x, alpha k_n, tau)
                     - (-1)^n M(beta x - a, alpha k_n, tau) ].

    Each Moshinsky kernel whose Faddeeva argument falls in the lower half
    plane is rewritten through the reflection identity; the split-off
    plane waves cancel exactly in the full combination once tau k_n > x + a
    and are omitted there instead of being summed to rounding noise.
    """
    p = p or ModelParams()
    if p.eta != 0.0:
        raise ConfigError("evolve_free requires eta = 0")
    if tau <= 0.0:
        raise DomainError("evolve_free requires tau > 0")
    if n < 1:
        raise DomainError("mode index n must be >= 1")

    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    a = p.a
    kn = n * math.pi / a
    pref = 1j / math.sqrt(2.0 * a)
    drop_pw = (x_arr + a) < kn * tau      # all reflected plane waves cancel

    phi = np.zeros_like(x_arr, dtype=complex)
    for alpha in (1.0, -1.0):
        kappa = alpha * kn
        for beta in (1.0, -1.0):
            for shift, sgn in ((0.0, 1.0), (a, -((-1.0) ** n))):
                xi = beta * x_arr - shift
                coef = alpha * beta * sgn
                z = 0.5 * (1 + 1j) * math.sqrt(tau) * (kappa - xi / tau)
                refl = z.imag > 0.0       # means Im(-z) < 0
                quad_phase = np.exp(0.5j * xi * xi / tau)
                m_val = np.empty_like(phi)
                if np.any(refl):
                    m_val[refl] = -0.5 * quad_phase[refl] * faddeeva(z[refl])
                if np.any(~refl):
                    m_val[~refl] = 0.5 * quad_phase[~refl] * \
                        faddeeva(-z[~refl])
                phi += coef * m_val
                # plane-wave part of the reflected kernels
                pw_mask = refl & ~drop_pw
                if np.any(pw_mask):
                    pw = np.exp(1j * (kappa * xi[pw_mask]
                                      - 0.5 * kappa * kappa * tau))
                    phi[pw_mask] += coef * pw
    phi *= pref
    return phi if np.ndim(x) else complex(phi[0])


# ---------------------------------------------------------------------------
# continuum (scattering-state) expansion

def continuum_propagate(n, x, tau, p=None, tol=1e-9):
    """Spectral evolution over exact scattering eigenstates.

    Independent of both the image construction and the resonance expansion;
    works for any eta >= 0 and any x >= 0.
    """
    p = p or ModelParams()
    if tau <= 0.0:
        raise DomainError("continuum_propagate requires tau > 0")
    if n < 1:
        raise DomainError("mode index n must be >= 1")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0):
        raise DomainError("x must be >= 0")
    a, d, eta = p.a, p.d, p.eta
    x_col = x_arr[:, None]
    outside = x_col > d

    def integrand(k_nodes):
        k = np.asarray(k_nodes, dtype=complex)[None, :]
        kd = k * d
        etad = eta * d * csinc(kd)
        r2 = np.sin(kd) ** 2 + (np.cos(kd) + etad) ** 2
        shape = np.sin(k * x_col)
        if np.any(outside):
            shape = shape + np.where(
                outside, etad * np.sin(k * (x_col - d)), 0.0)
        ovl = box_mode_overlap(k[0], n, p)[None, :]
        return (2.0 / math.pi) * ovl * shape * \
            np.exp(-0.5j * k * k * tau) / r2

    def integrand_scaled(k_nodes):
        # Im k < 0 branch: every sin/cos is written as exp(ikc) times a
        # bounded factor and the growing exponentials are absorbed into the
        # Gaussian evolution factor, so nothing overflows on the tail ray.
        k = np.asarray(k_nodes, dtype=complex)[None, :]

        def sin_hat(c):
            return (1.0 - np.exp(-2j * k * c)) / 2j

        def cos_hat(c):
            return (1.0 + np.exp(-2j * k * c)) / 2.0

        r2_hat = sin_hat(d) ** 2 + (cos_hat(d) + (eta / k) * sin_hat(d)) ** 2
        ovl_hat = (math.sqrt(2.0 * a) * (-1.0) ** n * sin_hat(a)
                   * n * math.pi / ((k * a) ** 2 - (n * math.pi) ** 2))
        shape_hat = sin_hat(x_col)
        if np.any(outside):
            shape_hat = shape_hat + np.where(
                outside, (eta / k) * sin_hat(d) * sin_hat(x_col - d), 0.0)
        expo = -0.5j * k * k * tau + 1j * k * (a + x_col - 2 * d)
        return (2.0 / math.pi) * ovl_hat * shape_hat * np.exp(expo) / r2_hat

    k_core = n * math.pi / a + (25.0 + 8.0 / math.sqrt(tau)) / a
    rho = float(np.max(x_arr)) + a + 2 * d
    k_rot = (rho + 8.0) / tau
    k_cap = 4.0e4

    if k_rot <= max(k_core, k_cap):
        k_turn = max(k_core, k_rot)
        if eta > 0:
            gap = (math.pi / d) * (1.0 - 1.0 / (1.0 + eta * d))
            m = math.ceil(k_turn / gap - 0.5)
            k_turn = (m + 0.5) * gap
        val = integrate_batch(integrand, 0.0, k_turn, tol=tol,
                              max_panels=40000)
        # rotated tail: k = k_turn + s e^{-i pi/4}
        rate = tau * k_turn / math.sqrt(2.0) - rho / math.sqrt(2.0)
        s_max = 50.0 / max(rate, 1.0) + 8.0 / math.sqrt(tau)
        rot = np.exp(-0.25j * math.pi)

        def tail(s_nodes):
            k = k_turn + rot * np.asarray(s_nodes, dtype=complex)
            return integrand_scaled(k) * rot

        val = val + integrate_batch(tail, 1e-12, s_max, tol=tol,
                                    max_panels=20000)
    else:
        # tau too small to rotate: extend along the real axis in blocks and
        # stop once three successive blocks are negligible (the integrand
        # tail decays like 1/k^2 under trigonometric averaging)
        val = integrate_batch(integrand, 0.0, k_core, tol=tol,
                              max_panels=40000)
        block = 40.0 * math.pi
        k0 = k_core
        quiet = 0
        converged = False
        for _ in range(4000):
            b = integrate_batch(integrand, k0, k0 + block, tol=tol * 10,
                                max_panels=4000)
            val = val + b
            k0 += block
            if np.max(np.abs(b)) < 0.2 * tol:
                quiet += 1
                if quiet >= 3:
                    converged = True
                    break
            else:
                quiet = 0
        if not converged:
            raise AccuracyError("continuum momentum cutoff not reached",
                                estimate=val)
    return val if np.ndim(x) else complex(val[0])


# ---------------------------------------------------------------------------
# resonant-state expansion

def rse_propagate(n, x, tau, p, pole_count=None, tol=1e-9):
    """Resonance sum plus background contour along Im k = -Re k.

    Valid for x inside [0, d].  The contour integrand carries the Gaussian
    damping exp(-s^2 tau/2); it is cut at s_max = 9/sqrt(tau), beyond which
    the neglected mass is below 1e-17.

    With the default ``pole_count=None`` the resonance sum is extended until
    its truncation estimate drops below tolerance; an explicit count is
    honored and raises AccuracyError when insufficient.
    """
    if p.eta <= 0.0:
        raise ConfigError("rse_propagate requires eta > 0")
    if tau <= 0.0:
        raise DomainError("rse_propagate requires tau > 0")
    if n < 1:
        raise DomainError("mode index n must be >= 1")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0) or np.any(x_arr > p.d + 1e-12):
        raise DomainError("rse_propagate needs x in [0, d]")

    auto = pole_count is None
    count = 24 if auto else pole_count
    while True:
        poles = cached_poles(p, count)
        phi = np.zeros_like(x_arr, dtype=complex)
        last_mag = 0.0
        for q in poles:
            term = (mode_norm_sq(q.k, p) * box_mode_overlap(q.k, n, p)
                    * np.sin(q.k * x_arr)
                    * np.exp(-0.5j * q.k * q.k * tau))
            phi += term
            last_mag = float(np.max(np.abs(term)))
        scale = max(float(np.max(np.abs(phi))), 1e-2)
        if 3.0 * last_mag <= max(tol * scale, 1e-15):
            break
        if not auto:
            raise AccuracyError(
                f"resonance-sum truncation estimate {3 * last_mag:.2e} too "
                f"large; increase pole_count (> {pole_count})", estimate=phi)
        if count >= 192:
            raise AccuracyError(
                "resonance sum not converged with 192 poles (tau too small "
                "for the expansion)", estimate=phi)
        count *= 2

    s_max = 9.0 / math.sqrt(tau)
    rot = np.exp(-0.25j * math.pi)

    def contour(s_nodes):
        s = np.asarray(s_nodes, dtype=float)
        out = np.empty((x_arr.size, s.size), dtype=complex)
        for i, sv in enumerate(s):
            k = rot * sv
            gp = _green_applied(x_arr, k, n, p)
            gm = _green_applied(x_arr, -k, n, p)
            out[:, i] = (gp - gm) * sv * math.exp(-0.5 * sv * sv * tau) \
                / math.pi
        return out

    phi = phi + integrate_batch(contour, 1e-9, s_max, tol=tol,
                                max_panels=8000)
    return phi if np.ndim(x) else complex(phi[0])


def _green_applied(x_arr, k, n, p):
    """int_0^a G+(x, x'; k) phi_n(x') dx' by composite Gauss-Legendre."""
    a = p.a
    panels = max(2, int(math.ceil((abs(k) * a + n * math.pi) / 4.0)))
    edges = np.linspace(0.0, a, panels + 1)
    xg, wg = _GL16
    acc = np.zeros(x_arr.size, dtype=complex)
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        xq = mid + half * xg
        phi0 = box_eigenstate(n, xq, p)
        g = outgoing_green(x_arr[:, None], xq[None, :], k, p)
        acc += half * (g * phi0[None, :]) @ wg
    return acc


# ---------------------------------------------------------------------------
# long-time leading form

def asymptotic_wavefunction(n, x, tau, p=None):
    """Leading long-time term: linear in x, ~ tau^{-3/2}, with the
    (1 + eta d)^{-2} barrier suppression and 1/n mode scaling."""
    p = p or ModelParams()
    if tau <= 0.0:
        raise DomainError("asymptotic_wavefunction requires tau > 0")
    if n < 1:
        raise DomainError("mode index n must be >= 1")
    x_arr = np.asarray(x, dtype=float)
    coef = (2.0 * np.exp(0.25j * np.pi) / math.pi ** 1.5
            * ((-1.0) ** n) / n / (1.0 + p.eta * p.d) ** 2)
    val = coef * x_arr * p.a ** (-1.5) * tau ** (-1.5)
    return val if val.ndim else complex(val)


def norm_squared(n, tau, p, method, x_max, tol=1e-9, **kw):
    """int_0^{x_max} |phi_n(x, tau)|^2 dx for the chosen method."""
    validate_method(method, p)

    def f(x_nodes):
        phi = wavefunction(n, np.asarray(x_nodes), tau, p, method, **kw)
        return (np.abs(phi) ** 2)[None, :]

    val = integrate_batch(f, 0.0, x_max, tol=tol, max_panels=20000)
    return float(val[0].real)
