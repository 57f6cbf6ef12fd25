"""Vectorized double-double arithmetic.

A value is a pair ``(hi, lo)`` of float64 arrays with ``|lo| <= ulp(hi)/2``,
giving about 32 significant digits.  The building blocks are the
error-free transformations two-sum (Knuth) and two-product (Dekker split).
"""

from __future__ import annotations

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLIT * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd(x, lo=None):
    """Promote float data to a double-double pair."""
    x = np.asarray(x, dtype=float)
    return x, np.zeros_like(x) if lo is None else np.asarray(lo, dtype=float)


def add(x, y):
    s, e = two_sum(x[0], y[0])
    t, f = two_sum(x[1], y[1])
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def neg(x):
    return -x[0], -x[1]


def sub(x, y):
    return add(x, neg(y))


def mul(x, y):
    p, e = two_prod(x[0], y[0])
    e = e + (x[0] * y[1] + x[1] * y[0])
    return quick_two_sum(p, e)


def mul_f(x, b):
    """Double-double times plain float."""
    p, e = two_prod(x[0], b)
    e = e + x[1] * b
    return quick_two_sum(p, e)


def div(x, y):
    q1 = x[0] / y[0]
    r = sub(x, mul_f(y, q1))
    q2 = r[0] / y[0]
    r = sub(r, mul_f(y, q2))
    q3 = r[0] / y[0]
    q1, q2 = quick_two_sum(q1, q2)
    return add((q1, q2), dd(q3))


def sqrt(x):
    """Square root by one Newton correction of the float estimate."""
    s = np.sqrt(x[0])
    r = sub(x, dd(*two_prod(s, s)))
    corr = r[0] / (2 * s)
    return quick_two_sum(s, corr)


def total(x):
    """Sum of all entries by pairwise double-double folding."""
    hi = np.ravel(np.asarray(x[0], dtype=float))
    lo = np.ravel(np.asarray(x[1], dtype=float))
    if hi.size == 0:
        return 0.0, 0.0
    while hi.size > 1:
        if hi.size % 2:
            hi = np.append(hi, 0.0)
            lo = np.append(lo, 0.0)
        h = hi.size // 2
        hi, lo = add((hi[:h], lo[:h]), (hi[h:], lo[h:]))
    return float(hi[0]), float(lo[0])


def to_float(x):
    return x[0] + x[1]
