"""Truncated Taylor-series arithmetic.

A series is an array ``a`` of shape ``(K + 1, ...)`` holding the coefficients
of ``a[0] + a[1] h + ... + a[K] h^K``; trailing axes broadcast elementwise.
Used to get high-order derivatives of Archimedean generators exactly (up to
rounding) instead of by nested differencing. Works in complex arithmetic, so
complex-step differentiation passes through unchanged.
"""

import numpy as np


def variable(t0, order):
    """Series of ``t0 + h``."""
    t0 = np.asarray(t0)
    out = np.zeros((order + 1,) + t0.shape, dtype=np.result_type(t0, float))
    out[0] = t0
    if order >= 1:
        out[1] = 1.0
    return out


def exp(a):
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, a.shape[0]):
        j = np.arange(1, k + 1).reshape((-1,) + (1,) * (a.ndim - 1))
        out[k] = np.sum(j * a[1:k + 1] * out[k - 1::-1][:k], axis=0) / k
    return out


def log(a):
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for k in range(1, a.shape[0]):
        acc = a[k].copy()
        for j in range(1, k):
            acc = acc - j * out[j] * a[k - j] / k
        out[k] = acc / a[0]
    return out


def power(a, r):
    """Series of ``a ** r`` for a series with nonzero constant term."""
    out = np.zeros_like(a)
    out[0] = a[0] ** r
    for k in range(1, a.shape[0]):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc = acc + ((r + 1) * j - k) * a[j] * out[k - j]
        out[k] = acc / (k * a[0])
    return out


def derivative(a, k):
    """k-th derivative at h = 0."""
    return a[k] * float(np.prod(np.arange(1, k + 1)))
