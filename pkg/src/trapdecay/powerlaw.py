"""Power-law extraction from decay curves by log-log least squares."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class PowerLawFit:
    """Result of fitting value = coefficient * tau**exponent."""

    exponent: float
    coefficient: float
    r_squared: float
    window: tuple

    def model(self, tau):
        return self.coefficient * np.asarray(tau) ** self.exponent


def fit_power_law(curve_or_taus, values=None, window=None):
    """Unweighted least squares on (log tau, log value).

    Accepts either a DecayCurve-like object (with .taus and .values) or two
    arrays.  ``window`` restricts the fit to tau_min <= tau <= tau_max.
    Requires at least 8 strictly positive samples inside the window;
    nonpositive values there raise DomainError, since they signal a curve
    that has not reached its asymptotic regime or is cancellation noise.
    """
    if values is None:
        taus = np.asarray(curve_or_taus.taus, dtype=float)
        vals = np.asarray(curve_or_taus.values, dtype=float)
    else:
        taus = np.asarray(curve_or_taus, dtype=float)
        vals = np.asarray(values, dtype=float)

    if window is None:
        window = (float(taus.min()), float(taus.max()))
    lo, hi = window
    if not lo < hi:
        raise DomainError("fit window must be nonempty")
    mask = (taus >= lo) & (taus <= hi)
    taus = taus[mask]
    vals = vals[mask]
    if np.any(vals <= 0.0):
        raise DomainError(
            "nonpositive values inside the fit window (pre-asymptotic or "
            "cancellation-dominated curve)")
    if taus.size < 8:
        raise DomainError("need at least 8 samples inside the window")

    lt = np.log(taus)
    lv = np.log(vals)
    slope, intercept = np.polyfit(lt, lv, 1)
    resid = lv - (slope * lt + intercept)
    ss_res = float(resid @ resid)
    centered = lv - lv.mean()
    ss_tot = float(centered @ centered)
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-24 else 0.0
    else:
        r2 = max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return PowerLawFit(exponent=float(slope),
                       coefficient=float(np.exp(intercept)),
                       r_squared=r2,
                       window=(float(lo), float(hi)))
