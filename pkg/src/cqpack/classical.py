"""Classical reference computations for diagonal channels.

When every state is diagonal the pinched tests become likelihood-ratio
tests, and everything can be enumerated over ``(x^n, y^n)`` with plain
probability vectors.  Nothing here touches an eigensolver, so these serve
as an independent route for cross-checking the operator code.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def _log(v):
    with np.errstate(divide="ignore"):
        return np.log(v)


def product_rows(w: np.ndarray, n: int):
    """Yield ``(x^n index tuple, w^n(.|x^n))`` with ``y^n`` in lexicographic order."""
    for xs in itertools.product(range(w.shape[0]), repeat=n):
        row = np.ones(1)
        for x in xs:
            row = np.kron(row, w[x])
        yield xs, row


def power_vector(v: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(1)
    for _ in range(n):
        out = np.kron(out, v)
    return out


def information_spectrum(w: np.ndarray, p: np.ndarray, n: int, a: float) -> float:
    """``Pr{(1/n) log(w^n(Y|X) / q^n(Y)) <= a}`` under ``p^n(x) w^n(y|x)``."""
    q = p @ w
    log_qn = _log(power_vector(q, n))
    total = 0.0
    for xs, row in product_rows(w, n):
        px = math.prod(p[x] for x in xs)
        if px == 0:
            continue
        pos = row > 0
        llr = _log(row[pos]) - log_qn[pos]
        total += px * row[pos][llr <= n * a].sum()
    return float(total)


def likelihood_ratio_errors(r: np.ndarray, q: np.ndarray, n: int, a: float) -> tuple[float, float]:
    """Errors of the test accepting ``y^n`` when ``log r^n - log q^n > na``."""
    rn = power_vector(r, n)
    qn = power_vector(q, n)
    with np.errstate(invalid="ignore"):
        accept = (_log(rn) - _log(qn)) > n * a
    accept &= rn > 0
    return float(rn[~accept].sum()), float(qn[accept].sum())


def greedy_code(w: np.ndarray, p: np.ndarray, n: int, a: float, delta: float, gamma: float, eta: float):
    """The greedy packing with diagonal operators held as vectors.

    Returns ``(codebook, decoder vectors, average error)``; codewords are
    index tuples in lexicographic order.
    """
    q = p @ w
    log_qn = _log(power_vector(q, n))
    rows, tests, words = [], [], []
    for xs, row in product_rows(w, n):
        with np.errstate(invalid="ignore"):
            test = ((_log(row) - log_qn) > n * a) & (row > 0)
        if row[test].sum() >= 1 - delta - gamma:
            rows.append(row)
            tests.append(test.astype(float))
            words.append(xs)
    s = np.zeros_like(log_qn)
    used = [False] * len(rows)
    codebook, decoder = [], []
    while True:
        pick = next((j for j in range(len(rows)) if not used[j] and rows[j] @ s <= eta), None)
        if pick is None:
            break
        x = (1 - s) * tests[pick]
        used[pick] = True
        codebook.append(words[pick])
        decoder.append(x)
        s = s + x
    if not codebook:
        return codebook, decoder, math.nan
    errs = []
    for xs, x in zip(codebook, decoder):
        row = np.ones(1)
        for i in xs:
            row = np.kron(row, w[i])
        errs.append(1 - row @ x)
    return codebook, decoder, float(np.mean(errs))
