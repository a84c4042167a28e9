"""Rank transforms: pseudo-observations and Kendall's tau."""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch, RowCountTooSmall, TiesDetected, NonFiniteValue


def _count_ties(col: np.ndarray) -> int:
    s = np.sort(col)
    return int(np.count_nonzero(s[1:] == s[:-1]))


def check_no_ties(values: np.ndarray) -> None:
    values = np.asarray(values)
    cols = values[:, None] if values.ndim == 1 else values
    for j in range(cols.shape[1]):
        ties = _count_ties(cols[:, j])
        if ties:
            raise TiesDetected(ties, column=j if values.ndim > 1 else None)


def column_ranks(col: np.ndarray) -> np.ndarray:
    """1-based ranks of a tie-free vector."""
    order = np.argsort(col, kind="stable")
    ranks = np.empty(col.shape[0], dtype=np.int64)
    ranks[order] = np.arange(1, col.shape[0] + 1)
    return ranks


def pseudo_observations(residuals) -> np.ndarray:
    """Rescaled ranks ``rank / (n + 1)`` of each column.

    Equals ``n/(n+1)`` times the right-continuous empirical CDF evaluated at
    the data, so every column is a permutation of ``k/(n+1)``, k = 1..n.
    """
    e = np.asarray(residuals, dtype=np.float64)
    if e.ndim == 1:
        e = e[:, None]
    n = e.shape[0]
    if n < 2:
        raise RowCountTooSmall(f"need n >= 2 rows, got {n}")
    if not np.all(np.isfinite(e)):
        raise NonFiniteValue("residuals contain NaN or infinite values")
    check_no_ties(e)
    u = np.empty_like(e)
    for j in range(e.shape[1]):
        u[:, j] = column_ranks(e[:, j]) / (n + 1.0)
    return u


def count_inversions(seq) -> int:
    """Number of pairs ``i < k`` with ``seq[i] > seq[k]`` for distinct integers.

    Bottom-up merge sort: at each level adjacent sorted runs of width ``w``
    are merged and, for every element of a right run, the elements of its
    left run that exceed it are counted. The merge of all run pairs at one
    level is done at once with a block-offset key.
    """
    a = np.asarray(seq, dtype=np.int64)
    n = a.shape[0]
    if n < 2:
        return 0
    # compress to 0..n-1 so block offsets cannot collide
    a = column_ranks(a) - 1
    span = np.int64(n)
    total = 0
    w = 1
    idx = np.arange(n, dtype=np.int64)
    while w < n:
        block = idx // (2 * w)
        in_right = (idx // w) % 2 == 1
        keys = block * span + a
        left_keys = keys[~in_right]
        left_block = block[~in_right]
        right_keys = keys[in_right]
        right_block = block[in_right]
        # left runs are sorted within blocks and blocks are ordered, so
        # left_keys is globally sorted
        start = np.searchsorted(left_block, right_block, side="left")
        stop = np.searchsorted(left_block, right_block, side="right")
        not_greater = np.searchsorted(left_keys, right_keys, side="right") - start
        total += int(np.sum(stop - start - not_greater))
        a = np.sort(keys) - block * span  # keys of a block pair are contiguous
        w *= 2
    return total


def kendall_tau(u, v) -> float:
    """Sample Kendall's tau, ``(concordant - discordant) / (n choose 2)``.

    Runs in O(n log^2 n) worst case; ties are rejected.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise LengthMismatch(f"lengths differ: {u.shape[0]} vs {v.shape[0]}")
    n = u.shape[0]
    if n < 2:
        raise RowCountTooSmall("kendall_tau needs n >= 2")
    check_no_ties(u)
    check_no_ties(v)
    order = np.argsort(u, kind="stable")
    discordant = count_inversions(column_ranks(v)[order])
    pairs = n * (n - 1) // 2
    return (pairs - 2 * discordant) / pairs


def kendall_tau_bruteforce(u, v) -> float:
    """O(n^2) pair count; reference implementation for testing."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    n = u.shape[0]
    s = 0
    for i in range(n - 1):
        s += int(np.sum(np.sign(u[i + 1:] - u[i]) * np.sign(v[i + 1:] - v[i])))
    return s / (n * (n - 1) // 2)


def mean_pairwise_tau(u) -> float:
    """Average Kendall's tau over all column pairs of ``u``."""
    u = np.asarray(u)
    d = u.shape[1]
    taus = [kendall_tau(u[:, i], u[:, k]) for i in range(d) for k in range(i + 1, d)]
    return float(np.mean(taus))
