"""Adaptive panel quadrature for complex-valued integrands.

Each panel is integrated with nested Gauss-Legendre rules (8 and 16 nodes);
the difference serves as the panel error estimate and the worst panel is
bisected until the combined estimate meets ``tol`` in the absolute-or-relative
sense.  A batch variant integrates a family of integrands sharing the same
abscissas, which is how overlap-matrix entries reuse wavefunction samples.
"""

import heapq

import numpy as np

from .errors import AccuracyError

_X8, _W8 = np.polynomial.legendre.leggauss(8)
_X16, _W16 = np.polynomial.legendre.leggauss(16)


def _panel(f, lo, hi):
    """Return (value16, error_estimate) for one panel."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    y16 = f(mid + half * _X16)
    v16 = half * (y16 @ _W16)
    y8 = f(mid + half * _X8)
    v8 = half * (y8 @ _W8)
    return v16, abs(v16 - v8)


def integrate(f, lo, hi, tol=1e-10, max_panels=2000, min_width=1e-14):
    """Integrate ``f`` (real -> complex, vectorized over an array argument)
    over [lo, hi] to absolute-or-relative accuracy ``tol``.

    Raises AccuracyError (carrying the best estimate) if the panel budget is
    exhausted first.
    """
    if not lo < hi:
        raise ValueError("integrate requires lo < hi")

    val, err = _panel(f, lo, hi)
    heap = [(-err, lo, hi, val, err)]
    total = val
    total_err = err
    n_panels = 1
    tick = 0
    while total_err > max(tol, tol * abs(total)) and n_panels < max_panels:
        neg_err, plo, phi, pval, perr = heapq.heappop(heap)
        if phi - plo < min_width * max(1.0, abs(phi) + abs(plo)):
            heapq.heappush(heap, (0.0, plo, phi, pval, 0.0))
            total_err -= perr
            continue
        mid = 0.5 * (plo + phi)
        v1, e1 = _panel(f, plo, mid)
        v2, e2 = _panel(f, mid, phi)
        total += v1 + v2 - pval
        total_err += e1 + e2 - perr
        heapq.heappush(heap, (-e1, plo, mid, v1, e1))
        # tick breaks heap ties without comparing complex values
        tick += 1
        heapq.heappush(heap, (-e2 - tick * 1e-300, mid, phi, v2, e2))
        n_panels += 1
    if total_err > max(tol, tol * abs(total)):
        raise AccuracyError(
            f"quadrature stalled at error {total_err:.3e} after "
            f"{n_panels} panels", estimate=total, error=total_err)
    return total


def integrate_batch(f, lo, hi, tol=1e-10, max_panels=2000):
    """Integrate a family of integrands sharing abscissas.

    ``f(x_array)`` must return an array of shape (..., len(x_array)); the
    result has shape (...).  Panels adapt on the worst component.
    """
    if not lo < hi:
        raise ValueError("integrate_batch requires lo < hi")

    def panel(plo, phi):
        mid = 0.5 * (plo + phi)
        half = 0.5 * (phi - plo)
        y16 = f(mid + half * _X16)
        v16 = half * (y16 @ _W16)
        y8 = f(mid + half * _X8)
        v8 = half * (y8 @ _W8)
        return v16, np.max(np.abs(v16 - v8))

    val, err = panel(lo, hi)
    heap = [(-err, lo, hi, val, err)]
    total = np.array(val, dtype=complex)
    total_err = err
    n_panels = 1
    tick = 0
    scale = np.max(np.abs(total))
    while total_err > max(tol, tol * scale) and n_panels < max_panels:
        neg_err, plo, phi, pval, perr = heapq.heappop(heap)
        mid = 0.5 * (plo + phi)
        v1, e1 = panel(plo, mid)
        v2, e2 = panel(mid, phi)
        total += v1 + v2 - pval
        total_err += e1 + e2 - perr
        tick += 1
        heapq.heappush(heap, (-e1 - tick * 1e-300, plo, mid, v1, e1))
        tick += 1
        heapq.heappush(heap, (-e2 - tick * 1e-300, mid, phi, v2, e2))
        n_panels += 1
        scale = np.max(np.abs(total))
    if total_err > max(tol, tol * scale):
        raise AccuracyError(
            f"batch quadrature stalled at error {total_err:.3e}",
            estimate=total, error=total_err)
    return total
