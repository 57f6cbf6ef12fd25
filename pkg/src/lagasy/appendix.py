"""Closed-form pole coefficients of the first orders.

Orders one and two hold for any field through the Taylor coefficients
``c_0, c_1, c_2`` (at 1) and ``d_0`` (at 0) of ``h_n``; order three is only
available for the classical weight (``c_0 = d_0 = 4``, ``c_1 = c_2 = 0``).
"""

from __future__ import annotations

import numpy as np

from .errors import NotTabulated


def _mat(a11, a12, a21, a22, alpha):
    return np.array([[a11, a12 * 4.0 ** (-alpha) * 1j],
                     [a21 * 4.0 ** alpha * 1j, a22]], dtype=complex)


def _sha(b, c0, c1, d0):
    return 12 * b * b * c0 * d0 - 24 * b * c0 ** 2 + 12 * b * c0 * d0 - c0 * d0 - 3 * c1 * d0


def _hard(b, c0, c1, d0):
    return (12 * b * b * c0 ** 2 + 12 * b * b * c0 * d0 - 24 * b * c0 ** 2 + 12 * b * c0 * d0
            - 27 * c0 ** 2 - c0 * d0 - 3 * c1 * d0)


def _el(b, c0, c1, c2, d0):
    return (48 * b ** 4 * c0 ** 3 - 48 * b ** 3 * c0 ** 3 - 96 * b ** 3 * c0 * c1 * d0
            - 16 * b ** 2 * c0 ** 3 - 12 * b ** 2 * c0 ** 2 * c1 + 12 * b * c0 ** 3
            + 24 * b * c0 * c1 * d0 + 144 * b * c1 ** 2 * d0 - 120 * b * c0 * c2 * d0
            + c0 ** 3 + 3 * c0 ** 2 * c1)


def _be(b, c0, c1, c2, d0):
    return (144 * b ** 4 * c0 ** 3 + 144 * b ** 4 * c0 ** 2 * d0 - 144 * b ** 3 * c0 ** 3
            - 384 * b ** 3 * c0 ** 2 * d0 + 288 * b ** 3 * c0 * c1 * d0 - 48 * b ** 2 * c0 ** 3
            - 36 * b ** 2 * c0 ** 2 * c1 + 264 * b ** 2 * c0 ** 2 * d0 - 936 * b ** 2 * c0 * c1 * d0
            + 36 * b * c0 ** 3 + 936 * b * c0 * c1 * d0 - 432 * b * c1 ** 2 * d0
            + 360 * b * c0 * c2 * d0 + 3 * c0 ** 3 + 9 * c0 ** 2 * c1 - 23 * c0 ** 2 * d0
            - 282 * c0 * c1 * d0 + 441 * c1 ** 2 * d0 - 360 * c0 * c2 * d0)


def _ef(b, c0, c1, d0):
    return (240 * b ** 3 * c0 * d0 - 60 * b ** 2 * c0 ** 2 + 60 * b ** 2 * c0 * d0
            - 36 * b * c0 * d0 - 468 * b * c1 * d0 + 15 * c0 ** 2 - 28 * c0 * d0 + 21 * c1 * d0)


def _soft(b, c0, c1, d0):
    return (240 * b ** 3 * c0 * d0 + 60 * b ** 2 * c0 ** 2 + 780 * b ** 2 * c0 * d0
            + 804 * b * c0 * d0 - 468 * b * c1 * d0 - 15 * c0 ** 2 + 259 * c0 * d0 - 483 * c1 * d0)


def _ya(b):
    return 288 * b ** 4 - 960 * b ** 3 + 444 * b ** 2 + 768 * b - 305


def _ee(b):
    return 768 * b ** 4 - 1824 * b ** 3 - 1284 * b ** 2 + 2712 * b + 1153


def _de(b):
    return (138240 * b ** 6 + 51840 * b ** 5 - 287280 * b ** 4 - 109440 * b ** 3
            + 103320 * b ** 2 + 29880 * b - 11603)


def _tse(b):
    return (4320 * b ** 6 - 51840 * b ** 5 - 64800 * b ** 4 + 33120 * b ** 3 + 13590 * b ** 2
            - 5760 * b + 389)


def _yery(b):
    return (2160 * b ** 6 + 56160 * b ** 5 + 156600 * b ** 4 + 119520 * b ** 3 + 20655 * b ** 2
            - 7470 * b - 1109)


def _ze(b):
    return 226800 * b ** 4 - 100800 * b ** 3 + 78120 * b ** 2 - 19633


def _yu(b):
    return 75600 * b ** 4 + 403200 * b ** 3 + 626640 * b ** 2 + 434280 * b + 114089


def appendix_u(side: str, k: int, q: int, alpha: float, c=(4.0, 0.0, 0.0), d0: float = 4.0,
               classical: bool = None) -> np.ndarray:
    """Closed form of ``U^{side}_{k,q}`` for ``k <= 3``.

    ``c`` holds ``(c_0, c_1, c_2)``.  Order three requires the classical
    values; anything else raises :class:`NotTabulated`.
    """
    a = float(alpha)
    c0, c1, c2 = (tuple(float(x) for x in c) + (0.0, 0.0, 0.0))[:3]
    side = side.lower()[0]
    if classical is None:
        classical = (c0, c1, c2, d0) == (4.0, 0.0, 0.0, 4.0)
    if side == "l":
        if k == 1 and q == 1:
            return (4 * a * a - 1) / (16 * d0) * _mat(1, 1, 1, -1, a)
        if k == 2 and q == 1:
            f = (4 * a * a - 1) / (2 ** 7 * 3 * c0 ** 2 * d0 ** 2)
            return f * _mat(_sha(a, c0, c1, d0), _hard(a, c0, c1, d0),
                            -_hard(-a, c0, c1, d0), _sha(-a, c0, c1, d0), a)
        if k == 3 and classical:
            if q == 1:
                f = (4 * a * a - 1) / (2 ** 17 * 3 ** 2)
                return f * _mat(_ya(a), _ee(a), _ee(-a), -_ya(-a), a)
            if q == 2:
                f = (4 * a * a - 1) * (4 * a * a - 9) * (4 * a * a - 25) / (2 ** 17 * 3)
                return f * _mat(-1, -1, -1, 1, a)
    else:
        if k == 1 and q == 1:
            g = 4 * a * a * c0 - c0 - c1
            return 1 / (48 * c0 ** 2) * _mat(
                -3 * g, 12 * a * a * c0 + 24 * a * c0 + 11 * c0 - 3 * c1,
                12 * a * a * c0 - 24 * a * c0 + 11 * c0 - 3 * c1, 3 * g, a)
        if k == 1 and q == 2:
            return 5 / (48 * c0) * _mat(-1, 1, 1, 1, a)
        if k == 2 and q == 1:
            f = 1 / (2 ** 7 * 3 ** 2 * c0 ** 4 * d0)
            return f * _mat(-3 * _el(a, c0, c1, c2, d0), _be(-a, c0, c1, c2, d0),
                            -_be(a, c0, c1, c2, d0), -3 * _el(-a, c0, c1, c2, d0), a)
        if k == 2 and q == 2:
            f = 1 / (2 ** 7 * 3 ** 2 * c0 ** 3 * d0)
            return f * _mat(_ef(-a, c0, c1, d0), _soft(a, c0, c1, d0),
                            -_soft(-a, c0, c1, d0), _ef(a, c0, c1, d0), a)
        if k == 2 and q == 3:
            f = 35 / (2 ** 7 * 3 ** 2 * c0 ** 2)
            return f * _mat(-12 * a - 1, 3 * (a + 1) * 4, 3 * (a - 1) * 4, 12 * a - 1, a)
        if k == 3 and classical:
            if q == 1:
                f = 1 / (2 ** 17 * 3 ** 4 * 5)
                sh = lambda b: 45 * _ya(b) * (4 * a * a - 1)
                return f * _mat(-sh(a), _de(a), _de(-a), sh(-a), a)
            if q == 2:
                f = 1 / (2 ** 16 * 3 ** 4 * 5)
                return f * _mat(-_tse(-a), 2 * _yery(a), 2 * _yery(-a), _tse(a), a)
            if q == 3:
                f = 1 / (2 ** 17 * 3 ** 4 * 5)
                return f * _mat(-_ze(-a), 3 * _yu(a), 3 * _yu(-a), _ze(a), a)
            if q == 4:
                f = 1 / (2 ** 16 * 3 ** 4)
                return f * _mat(-90090 * a * a - 12012, 1001 * (90 * a * a + 180 * a + 107),
                                1001 * (90 * a * a - 180 * a + 107), 90090 * a * a + 12012, a)
            if q == 5:
                f = 5 * 7 * 11 * 13 * 17 / (2 ** 17 * 3 ** 4)
                return f * _mat(-1, 1, 1, 1, a)
    raise NotTabulated(f"no closed form for side={side}, k={k}, q={q}")
