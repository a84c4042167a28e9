"""First-order Debye function and the Frank copula's tau map."""

import math

import numpy as np
from scipy import integrate


def _integrand(t):
    return 1.0 if t == 0.0 else t / math.expm1(t)


def debye1(x: float) -> float:
    """``D1(x) = (1/x) * integral_0^x t / (e^t - 1) dt``, with ``D1(0) = 1``.

    Valid for negative ``x`` as well (``D1(-x) = D1(x) + x/2``).
    """
    x = float(x)
    if abs(x) < 1e-6:
        return 1.0 - x / 4.0 + x * x / 36.0
    val, _ = integrate.quad(_integrand, 0.0, x, epsabs=1e-15, epsrel=1e-13, limit=200)
    return val / x


def frank_tau(alpha: float) -> float:
    a = float(alpha)
    if abs(a) < 1e-4:
        # series tau = a/9 - a^3/900 + ...
        return a / 9.0 - a**3 / 900.0
    return 1.0 - 4.0 / a * (1.0 - debye1(a))


def frank_dtau(alpha: float) -> float:
    a = float(alpha)
    if abs(a) < 1e-4:
        return 1.0 / 9.0 - a * a / 300.0
    d1 = debye1(a)
    dd1 = 1.0 / math.expm1(a) - d1 / a
    return 4.0 / a**2 * (1.0 - d1) + 4.0 / a * dd1


def frank_alpha(tau: float, tol: float = 1e-13) -> float:
    """Invert ``frank_tau`` by Newton steps safeguarded with bisection."""
    tau = float(tau)
    if tau == 0.0:
        return 0.0
    sign = 1.0 if tau > 0 else -1.0
    target = abs(tau)
    lo, hi = 0.0, 10.0
    while frank_tau(hi) < target:
        lo, hi = hi, hi * 2.0
        if hi > 1e6:
            raise ValueError("tau too close to 1 for Frank inversion")
    a = 9.0 * target if 9.0 * target < hi else 0.5 * (lo + hi)
    for _ in range(200):
        f = frank_tau(a) - target
        if abs(f) < tol:
            break
        if f > 0:
            hi = a
        else:
            lo = a
        step = f / frank_dtau(a)
        nxt = a - step
        if not (lo < nxt < hi) or not np.isfinite(nxt):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - a) <= 1e-15 * max(1.0, abs(a)):
            a = nxt
            break
        a = nxt
    return sign * a
