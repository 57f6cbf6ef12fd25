"""Asymptotic expansion of the correction matrix ``R``.

The jump matrices ``Delta_k`` on the two disk boundaries are expanded as
Laurent series about the disk centres, the pole parts ``U^{side}_{k,q}`` of
the outer correction ``R^O_k(z) = sum_q U^right_{k,q}/(z-1)^q + U^left_{k,q}/z^q``
are extracted order by order, and the Taylor coefficients ``Q^{side}_{k,i}``
of the disk corrections are kept for evaluation near the endpoints.

All series live in the local variable ``z`` (left disk) or ``w = z - 1``
(right disk).  Internally they are built from truncated series in
``t = sqrt(z)`` resp. ``t = sqrt(w)``; odd powers of ``t`` cancel and the
size of what remains is reported as ``parity_residual``.

Two regimes are supported.  ``fixed``: the expansion variable is ``1/n`` and
the field data is frozen (exactly n-independent for monomial fields).
``polynomial``: the variable is ``eps = n^{-1/m}`` and the field data itself
is expanded in ``eps``; order ``p`` in ``eps`` corresponds to ``1/n`` order
``k = p - m + 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from . import _series as S
from .auxfun import (PhaseContext, p_inf, phibar_left_coeffs, theta,
                     phibar_n, xi_n, xi_right_coeffs)
from .constants import nu_k, poch_airy_bessel
from .errors import (MalformedSpec, OrderOutOfRange, TruncationTooSmall,
                     WrongRegime)
from .mrs import field_data, h_eps_series, taylor_shift
from .weight import WeightSpec

SIDES = ("left", "right")
_I2 = np.eye(2, dtype=complex)
DISK_SWITCH = 0.05


# ---------------------------------------------------------------------------
# expansion set-up
# ---------------------------------------------------------------------------

@dataclass
class SeriesSetup:
    """Everything the series engine needs about the weight.

    ``F`` and ``Xi`` are bivariate arrays ``[l, j]`` (``eps**l z**j``) of the
    left phase ``phibar = -i sqrt(z) F(z)`` and the right phase
    ``-xi = w**(3/2) Xi(w)``.
    """

    weight: WeightSpec
    n: Optional[float]
    regime: str
    K: int
    step: int
    F: np.ndarray
    Xi: np.ndarray

    @property
    def alpha(self) -> float:
        return self.weight.alpha

    @property
    def P(self) -> int:
        """Largest expansion power kept."""
        return self.K + self.step - 1

    @property
    def L(self) -> int:
        return self.F.shape[0]

    @property
    def kmax(self) -> int:
        return self.P // self.step

    def order_of(self, p: int) -> int:
        """``1/n`` order ``k`` carried by expansion power ``p``."""
        return p - self.step + 1


def make_setup(w: WeightSpec, n: Optional[float] = None, regime: str = "fixed",
               K: int = 8, J: int = 160) -> SeriesSetup:
    if K < 1:
        raise TruncationTooSmall("need K >= 1")
    if regime == "fixed":
        if n is None:
            if not w.monomial_like:
                raise WrongRegime("fixed regime needs n unless the field is monomial")
            n = 1.0
        fd = field_data(w, n, L=J)
        F = phibar_left_coeffs(fd.d)[None, :]
        Xi = xi_right_coeffs(fd.c)[None, :]
        return SeriesSetup(w, float(n), regime, K, 1, F.astype(complex), Xi.astype(complex))
    if regime == "polynomial":
        if not w.is_polynomial:
            raise WrongRegime("polynomial regime needs a polynomial field")
        m = w.m
        L = K
        h = h_eps_series(w, max(L, 2))[:, :L]
        d = np.zeros((L, J))
        c = np.zeros((L, J))
        for l in range(L):
            d[l, :m] = h[:, l]
            c[l, :m] = taylor_shift(h[:, l], 1.0)
        F = np.array([phibar_left_coeffs(row) for row in d])
        Xi = np.array([xi_right_coeffs(row) for row in c])
        return SeriesSetup(w, None if n is None else float(n), regime, K, m,
                           F.astype(complex), Xi.astype(complex))
    raise WrongRegime(f"unknown regime {regime!r}")


def pole_bound(side: str, k: int) -> int:
    if k <= 0:
        return 0
    return (k + 1) // 2 if side == "left" else (3 * k + 1) // 2


def _m_left(alpha, k):
    g = alpha * alpha + k / 2 - 0.25
    return np.array([[(-1) ** k / k * g, (k - 0.5) * 1j],
                     [(-1) ** (k + 1) * (k - 0.5) * 1j, g / k]])


def _m_right(k):
    v = nu_k(k)
    return np.array([[(-1) ** k * v, -6j * k * v], [6j * k * (-1) ** k * v, v]])


def _trace_scalar(side, alpha, k):
    """``tr(Delta_k)`` divided by the scalar ``(4 phibar)^{-k}`` resp. ``(-xi)^{-k}``."""
    if k % 2:
        return 0.0
    if side == "left":
        return (4 * alpha * alpha + 2 * k - 1) * poch_airy_bessel(alpha, k - 1) / (2 * k)
    return nu_k(k)


# ---------------------------------------------------------------------------
# Laurent tableaux of Delta_k and s_k
# ---------------------------------------------------------------------------

@dataclass
class SeriesTableau:
    """Laurent coefficients ``data[k][l, i + off]`` of ``Delta_k`` or ``s_k``.

    ``i`` is the power of the local variable and ``l`` the power of ``eps``
    in the ``eps``-dependence of the field data (always 0 in the fixed
    regime).
    """

    side: str
    regime: str
    alpha: float
    weight: dict
    K: int
    off: int
    data: Dict[int, np.ndarray]
    parity_residual: float = 0.0
    kind: str = "delta"

    def coeff(self, k: int, i: int, l: int = 0) -> np.ndarray:
        return self.data[k][l, i + self.off]

    def eval(self, k: int, z, l: int = 0):
        loc = complex(z) - (1.0 if self.side == "right" else 0.0)
        arr = self.data[k][l]
        pw = loc ** (np.arange(arr.shape[0]) - self.off)
        return np.einsum("i,iab->ab", pw, arr)

    def to_json(self) -> dict:
        entries = []
        for k in sorted(self.data):
            arr = self.data[k]
            for l in range(arr.shape[0]):
                for idx in range(arr.shape[1]):
                    mat = arr[l, idx]
                    if not np.any(mat):
                        continue
                    entries.append({"k": k, "i": idx - self.off, "l": l, "m": _mat_json(mat)})
        return {"side": self.side, "regime": self.regime, "alpha": self.alpha, "Q": self.weight,
                "K": self.K, "kind": self.kind, "off": self.off, "entries": entries}

    @classmethod
    def from_json(cls, obj) -> "SeriesTableau":
        obj = _load(obj)
        try:
            off = int(obj["off"])
            K = int(obj["K"])
            ents = obj["entries"]
            L = 1 + max((e.get("l", 0) for e in ents), default=0)
            top = max((e["i"] for e in ents), default=0)
            data = {}
            for e in ents:
                k = int(e["k"])
                if k not in data:
                    data[k] = np.zeros((L, off + top + 1, 2, 2), dtype=complex)
                data[k][e.get("l", 0), e["i"] + off] = _mat_from_json(e["m"])
            return cls(obj["side"], obj["regime"], float(obj["alpha"]), obj["Q"], K, off, data,
                       kind=obj.get("kind", "delta"))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedSpec(f"bad series tableau: {exc}") from exc


def _mat_json(m):
    return [[float(x.real), float(x.imag)] for x in np.asarray(m).ravel()]


def _mat_from_json(rows):
    if len(rows) != 4:
        raise MalformedSpec("matrix entries need four [re, im] pairs")
    return np.array([complex(r[0], r[1]) for r in rows]).reshape(2, 2)


def _load(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise MalformedSpec("tableau must be a JSON object")
    return obj


def _edge_functions(side, alpha, Nt):
    """Univariate t-series of phi, 1/phi, E, 1/E and the regular part of 1/det."""
    if side == "left":
        a = S.arcsin_coeffs(Nt)
        phi = -S.exp_series(-2j * a)
        phinv = -S.exp_series(2j * a)
        E = S.exp_series(-2j * alpha * a)
        Einv = S.exp_series(2j * alpha * a)
        invdet = S.inv_sqrt_coeffs(Nt, -1) / 4j
    else:
        a = S.arcsinh_coeffs(Nt)
        phi = S.exp_series(2 * a)
        phinv = S.exp_series(-2 * a)
        E = S.exp_series(2 * alpha * a)
        Einv = S.exp_series(-2 * alpha * a)
        invdet = S.inv_sqrt_coeffs(Nt, 1) / 4
    return phi, phinv, E, Einv, invdet


def _conjugated(M, phi, phinv, E, Einv, invdet, alpha):
    """t-series of ``t * N X N^{-1}`` with ``X = D M D^{-1}``, ``D^2 = E``, then ``2^{-alpha sigma3}``."""
    Nt = len(phi)
    a = M[0, 0] * np.eye(1, Nt)[0]
    b = M[0, 1] * E
    c = M[1, 0] * Einv
    d = M[1, 1] * np.eye(1, Nt)[0]
    pa, pd = S.mul(phi, a), S.mul(phinv, d)
    g11 = pa + 1j * c + 1j * b - pd
    g12 = -1j * a + S.mul(phinv, c) + S.mul(phi, b) + 1j * d
    g21 = -1j * a + S.mul(phi, c) + S.mul(phinv, b) + 1j * d
    g22 = -S.mul(phinv, a) - 1j * c - 1j * b + S.mul(phi, d)
    G = np.empty((Nt, 2, 2), dtype=complex)
    G[:, 0, 0] = S.mul(invdet, g11)
    G[:, 0, 1] = S.mul(invdet, g12) * 4.0 ** (-alpha)
    G[:, 1, 0] = S.mul(invdet, g21) * 4.0 ** alpha
    G[:, 1, 1] = S.mul(invdet, g22)
    return G


def _series_core(setup: SeriesSetup, side: str, nz: int, simplify: bool):
    alpha = setup.alpha
    kmax = setup.kmax
    L = setup.L
    off = pole_bound("right", setup.K) + 1
    shift = (lambda k: k + 1) if side == "left" else (lambda k: 3 * k + 1)
    Nt = 2 * nz + shift(kmax) + 2
    Jz = Nt // 2 + 1
    base = setup.F if side == "left" else setup.Xi
    if base.shape[1] < Jz:
        raise TruncationTooSmall("field data too short for the requested series length")
    inv = S.bi_inv(base[:, :Jz])
    edge = _edge_functions(side, alpha, Nt)
    out, parity = {}, 0.0
    power = np.zeros((L, Jz), dtype=complex)
    power[0, 0] = 1.0
    for k in range(1, kmax + 1):
        power = S.bi_mul(power, inv)
        if side == "left":
            pref = poch_airy_bessel(alpha, k - 1) * (0.25j) ** k
            M = _m_left(alpha, k)
        else:
            pref = 0.5
            M = _m_right(k)
        G = _conjugated(M, *edge, alpha)
        pt = S.spread_even(power, Nt)
        reg = np.empty((L, Nt, 2, 2), dtype=complex)
        for a in range(2):
            for b in range(2):
                reg[:, :, a, b] = pref * S.bi_scale(pt, G[:, a, b])
        # total t-power of reg[:, j] is j - shift(k)
        sh = shift(k)
        odd_idx = [j for j in range(Nt) if (j - sh) % 2 and j - sh <= 2 * nz]
        even_mag = np.max(np.abs(reg))
        if odd_idx and even_mag > 0:
            parity = max(parity, float(np.max(np.abs(reg[:, odd_idx])) / even_mag))
        arr = np.zeros((L, off + nz + 1, 2, 2), dtype=complex)
        for i in range(-off, nz + 1):
            j = 2 * i + sh
            if 0 <= j < Nt:
                arr[:, i + off] = reg[:, j]
        if simplify and k % 2 == 0:
            ts = _trace_scalar(side, alpha, k)
            # (4 phibar)^{-k} = (i/4)^k z^{-k/2} F^{-k};  (-xi)^{-k} = w^{-3k/2} Xi^{-k}
            sc = ts * ((0.25j) ** k if side == "left" else 1.0)
            lo = k // 2 if side == "left" else 3 * k // 2
            for i in range(-lo, nz + 1):
                j = i + lo
                if j < Jz:
                    arr[:, i + off] -= sc * power[:, j][:, None, None] * _I2
        out[k] = arr
    return out, off, parity


def delta_series(w: WeightSpec, side: str, n: Optional[float] = None, regime: str = "fixed",
                 K: int = 8, nz: int = 30, setup: Optional[SeriesSetup] = None) -> SeriesTableau:
    """Laurent tableau of the jump corrections ``Delta_k`` about one disk centre."""
    side = _side(side)
    setup = setup or make_setup(w, n, regime, K)
    data, off, par = _series_core(setup, side, nz, simplify=False)
    return SeriesTableau(side, setup.regime, setup.alpha, setup.weight.to_json(), setup.K, off,
                         data, par, "delta")


def s_series(w: WeightSpec, side: str, n: Optional[float] = None, regime: str = "fixed",
             K: int = 8, nz: int = 30, setup: Optional[SeriesSetup] = None) -> SeriesTableau:
    """Laurent tableau of ``s_k = Delta_k - tr(Delta_k) I``.

    ``(I + sum Delta_k)^{-1} = I - sum s_k`` because the jump has unit
    determinant; the trace only survives for even ``k``.
    """
    side = _side(side)
    setup = setup or make_setup(w, n, regime, K)
    data, off, par = _series_core(setup, side, nz, simplify=True)
    return SeriesTableau(side, setup.regime, setup.alpha, setup.weight.to_json(), setup.K, off,
                         data, par, "s")


def simplify_s(side: str, k: int, delta_at_z, phase_value: complex, alpha: float = 0.0) -> np.ndarray:
    """Pointwise ``s_k(z)`` from ``Delta_k(z)``.

    ``phase_value`` is ``phibar_n(z)`` on the left and ``xi_n(z)`` on the
    right.  Odd ``k`` returns the input unchanged.
    """
    side = _side(side)
    d = np.asarray(delta_at_z, dtype=complex)
    if k % 2:
        return d.copy()
    if side == "left":
        sc = _trace_scalar(side, alpha, k) / (4 * phase_value) ** k
    else:
        sc = _trace_scalar(side, alpha, k) / (-phase_value) ** k
    return d - sc * _I2


def _side(side: str) -> str:
    s = side.lower()
    if s in ("l", "left"):
        return "left"
    if s in ("r", "right"):
        return "right"
    raise MalformedSpec(f"side must be left or right, got {side!r}")


# ---------------------------------------------------------------------------
# U and Q tableaux
# ---------------------------------------------------------------------------

def _lconv(A, B, off):
    """Product of two Laurent arrays (lowest stored power ``-off``), same window."""
    n = A.shape[0]
    out = np.zeros_like(A)
    for i in range(2):
        for l in range(2):
            acc = np.zeros(2 * n - 1, dtype=complex)
            for j in range(2):
                acc += np.convolve(A[:, i, j], B[:, j, l])
            out[:, i, l] = acc[off:off + n]
    return out


def _regroup(tab: SeriesTableau, setup: SeriesSetup):
    """``tilde_p = sum_{q * step <= p} X_q[l = p - q step]`` for p = 1..P."""
    out = {}
    shape = next(iter(tab.data.values())).shape[1:]
    for p in range(1, setup.P + 1):
        acc = np.zeros(shape, dtype=complex)
        for q in range(1, p // setup.step + 1):
            l = p - q * setup.step
            if l < tab.data[q].shape[0]:
                acc += tab.data[q][l]
        out[p] = acc
    return out


@dataclass
class QTableau:
    """Taylor coefficients ``Q[side][p, i]`` of the disk corrections ``R^side_p``."""

    weight: dict
    regime: str
    alpha: float
    K: int
    step: int
    Q: Dict[str, np.ndarray]

    def coeff(self, side, p, i):
        return self.Q[_side(side)][p, i]

    def to_json(self) -> dict:
        entries = []
        for side in SIDES:
            arr = self.Q[side]
            for p in range(1, arr.shape[0]):
                for i in range(arr.shape[1]):
                    entries.append({"k": p, "i": i, "s": side, "m": _mat_json(arr[p, i])})
        return {"side": "both", "regime": self.regime, "alpha": self.alpha, "Q": self.weight,
                "K": self.K, "step": self.step, "entries": entries}

    @classmethod
    def from_json(cls, obj) -> "QTableau":
        obj = _load(obj)
        try:
            ents = obj["entries"]
            P = max(e["k"] for e in ents)
            N = max(e["i"] for e in ents)
            Q = {s: np.zeros((P + 1, N + 1, 2, 2), dtype=complex) for s in SIDES}
            for s in SIDES:
                Q[s][0, 0] = _I2
            for e in ents:
                Q[e["s"]][e["k"], e["i"]] = _mat_from_json(e["m"])
            return cls(obj["Q"], obj["regime"], float(obj["alpha"]), int(obj["K"]),
                       int(obj.get("step", 1)), Q)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedSpec(f"bad Q tableau: {exc}") from exc


@dataclass
class UTableau:
    """Pole coefficients ``U[side][p, q]`` of ``R^O_p``, plus the disk Taylor data.

    ``p`` is the power of the expansion variable (``1/n`` in the fixed regime,
    ``n^{-1/m}`` in the polynomial one) and ``q`` the pole order.
    """

    weight: dict
    regime: str
    alpha: float
    K: int
    step: int
    n: Optional[float]
    U: Dict[str, np.ndarray]
    Qtab: Optional[QTableau] = None
    method: str = "EUW"
    pole_residual: float = 0.0
    parity_residual: float = 0.0

    @property
    def P(self) -> int:
        return self.K + self.step - 1

    def u(self, side: str, k: int, q: int) -> np.ndarray:
        side = _side(side)
        arr = self.U[side]
        if not (1 <= k < arr.shape[0]) or not (1 <= q < arr.shape[1]):
            return np.zeros((2, 2), dtype=complex)
        return arr[k, q]

    def expansion_variable(self, n: float) -> float:
        return 1.0 / n if self.step == 1 else n ** (-1.0 / self.step)

    def order_count(self, T: Optional[int]) -> int:
        """Highest expansion power kept when truncating after ``T`` terms.

        ``T`` counts terms including the identity, so the truncation is
        ``R = I + sum_{p=1}^{T-1} R_p eps^p`` with error ``O(eps^T)``.
        ``None`` uses every stored power.
        """
        P = self.U["left"].shape[0] - 1
        if T is None:
            return P
        if T < 1:
            raise OrderOutOfRange("T counts terms including the identity and must be >= 1")
        if T - 1 > P:
            raise TruncationTooSmall(f"tableau holds {P + 1} terms, {T} requested")
        return T - 1

    def to_json(self) -> dict:
        entries = []
        for side in SIDES:
            arr = self.U[side]
            for p in range(1, arr.shape[0]):
                for q in range(1, arr.shape[1]):
                    if np.any(arr[p, q]):
                        entries.append({"k": p, "p": q, "s": side, "m": _mat_json(arr[p, q])})
        return {"side": "both", "regime": self.regime, "alpha": self.alpha, "Q": self.weight,
                "K": self.K, "step": self.step, "n": self.n, "method": self.method,
                "entries": entries}

    @classmethod
    def from_json(cls, obj) -> "UTableau":
        obj = _load(obj)
        try:
            K, step = int(obj["K"]), int(obj.get("step", 1))
            P = K + step - 1
            qmax = pole_bound("right", K)
            U = {s: np.zeros((P + 1, qmax + 1, 2, 2), dtype=complex) for s in SIDES}
            for e in obj["entries"]:
                U[e["s"]][e["k"], e["p"]] = _mat_from_json(e["m"])
            n = obj.get("n")
            return cls(obj["Q"], obj["regime"], float(obj["alpha"]), K, step,
                       None if n is None else float(n), U, method=obj.get("method", "EUW"))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise MalformedSpec(f"bad U tableau: {exc}") from exc


def _other_taylor(side, q, nz):
    """Taylor coefficients in the local variable of the other centre's pole of order q."""
    idx = np.arange(nz + 1)
    from scipy.special import binom as _b
    if side == "left":
        # (z-1)^{-q} = (-1)^q sum binom(q+n-1, n) z^n
        return (-1) ** q * _b(q + idx - 1, idx)
    # z^{-q} = (1+w)^{-q} = sum binom(-q, n) w^n
    return np.array([_binom_neg(q, n) for n in idx])


def _binom_neg(q, n):
    out = 1.0
    for j in range(n):
        out *= (-q - j) / (j + 1)
    return out


def build_u(w: WeightSpec, n: Optional[float] = None, regime: str = "fixed", K: int = 8,
            N: int = 20, method: str = "EUW") -> UTableau:
    """Compute the pole coefficients ``U`` (and Taylor data ``Q``) up to order ``K``.

    ``method='EUW'`` extracts poles from ``sum R^O_{p-j} s_j`` with the
    simplified jumps; ``'EUpole'`` uses ``sum R^side_{p-j} Delta_j`` with the
    disk Taylor series.  Both must agree.
    """
    if method not in ("EUW", "EUpole"):
        raise MalformedSpec(f"unknown method {method!r}")
    setup = make_setup(w, n, regime, K)
    P, step = setup.P, setup.step
    qmax = pole_bound("right", K)
    off = qmax + 1
    if method == "EUW":
        nz = N + off + 2
    else:
        nz = N + setup.kmax * (pole_bound("right", setup.kmax) + 1) + 2
    tabs, par = {}, 0.0
    for side in SIDES:
        tab = (s_series if method == "EUW" else delta_series)(w, side, setup=setup, nz=nz)
        assert tab.off == off
        tabs[side] = _regroup(tab, setup)
        par = max(par, tab.parity_residual)
    ntot = off + nz + 1
    taylors = {s: {q: _other_taylor(s, q, nz) for q in range(1, qmax + 1)} for s in SIDES}
    U = {s: np.zeros((P + 1, qmax + 1, 2, 2), dtype=complex) for s in SIDES}
    Qs = {s: np.zeros((P + 1, ntot, 2, 2), dtype=complex) for s in SIDES}
    ident = np.zeros((ntot, 2, 2), dtype=complex)
    ident[off] = _I2
    RO = {s: [ident] for s in SIDES}
    for s in SIDES:
        Qs[s][0] = ident
    pole_res = 0.0
    for p in range(1, P + 1):
        T = {}
        for s in SIDES:
            acc = np.zeros((ntot, 2, 2), dtype=complex)
            for j in range(1, p + 1):
                left = RO[s][p - j] if method == "EUW" else Qs[s][p - j]
                if np.any(tabs[s][j]) and np.any(left):
                    acc += _lconv(left, tabs[s][j], off)
            T[s] = acc
            b = pole_bound(s, setup.order_of(p))
            for q in range(1, qmax + 1):
                if q <= b:
                    U[s][p, q] = acc[off - q]
                else:
                    pole_res = max(pole_res, float(np.max(np.abs(acc[off - q]))))
        for s in SIDES:
            other = "right" if s == "left" else "left"
            lau = np.zeros((ntot, 2, 2), dtype=complex)
            for q in range(1, qmax + 1):
                lau[off - q] = U[s][p, q]
                if np.any(U[other][p, q]):
                    lau[off:] += taylors[s][q][:, None, None] * U[other][p, q]
            RO[s].append(lau)
            Qs[s][p, off:] = lau[off:] - T[s][off:]
    Qt = QTableau(setup.weight.to_json(), setup.regime, setup.alpha, K, step,
                  {s: Qs[s][:, off:off + N + 1].copy() for s in SIDES})
    return UTableau(setup.weight.to_json(), setup.regime, setup.alpha, K, step, setup.n, U, Qt,
                    method, pole_res, par)


def build_q(w: WeightSpec, n: Optional[float] = None, regime: str = "fixed", K: int = 8,
            N: int = 20, method: str = "EUW") -> QTableau:
    """Taylor coefficients of ``R^left_p`` about 0 and ``R^right_p`` about 1."""
    return build_u(w, n, regime, K, N, method).Qtab


# ---------------------------------------------------------------------------
# evaluation of R
# ---------------------------------------------------------------------------

def _powers(x, p_count):
    return x[:, None] ** np.arange(p_count + 1)[None, :]


def r_outer(tab: UTableau, z, n: float, T: Optional[int] = None) -> np.ndarray:
    """``R^O(z) = I + sum_p eps^p sum_q (U^right_{p,q} (z-1)^{-q} + U^left_{p,q} z^{-q})``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    pc = tab.order_count(T)
    eps = tab.expansion_variable(n)
    qmax = tab.U["left"].shape[1] - 1
    zl = z[:, None] ** -np.arange(qmax + 1)[None, :]
    zr = (z - 1)[:, None] ** -np.arange(qmax + 1)[None, :]
    ep = eps ** np.arange(pc + 1)
    UL = np.einsum("p,pqab->qab", ep[1:], tab.U["left"][1:pc + 1])
    UR = np.einsum("p,pqab->qab", ep[1:], tab.U["right"][1:pc + 1])
    out = np.einsum("zq,qab->zab", zl[:, 1:], UL[1:]) + np.einsum("zq,qab->zab", zr[:, 1:], UR[1:])
    return out + _I2


def r_disk(tab: UTableau, side: str, z, n: float, T: Optional[int] = None) -> np.ndarray:
    """``R^side(z)`` from the Taylor tableau."""
    side = _side(side)
    if tab.Qtab is None:
        raise WrongRegime("tableau carries no Taylor data; rebuild with build_u")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    loc = z - (1.0 if side == "right" else 0.0)
    pc = tab.order_count(T)
    eps = tab.expansion_variable(n)
    Q = tab.Qtab.Q[side]
    ep = eps ** np.arange(pc + 1)
    coeff = np.einsum("p,piab->iab", ep[1:], Q[1:pc + 1])
    pw = loc[:, None] ** np.arange(Q.shape[1])[None, :]
    return np.einsum("zi,iab->zab", pw, coeff) + _I2


def r_eval(tab: UTableau, z, n: float, T: Optional[int] = None, region: Optional[str] = None,
           r_left: float = 0.3, r_right: float = 0.3):
    """Evaluate the correction matrix ``R`` at ``z``.

    ``region`` is ``'outer'`` (also used in the lens), ``'left'`` or
    ``'right'``; by default it is picked from the disk radii.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if region is None:
        out = np.empty((len(z), 2, 2), dtype=complex)
        lm = np.abs(z) < r_left
        rm = np.abs(z - 1) < r_right
        om = ~(lm | rm)
        if np.any(lm):
            out[lm] = r_disk(tab, "left", z[lm], n, T)
        if np.any(rm):
            out[rm] = r_disk(tab, "right", z[rm], n, T)
        if np.any(om):
            out[om] = r_outer(tab, z[om], n, T)
    elif region in ("outer", "lens"):
        out = r_outer(tab, z, n, T)
    else:
        out = r_disk(tab, region, z, n, T)
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# pointwise closed forms (independent route used for checking)
# ---------------------------------------------------------------------------

def delta_direct(ctx: PhaseContext, side: str, k: int, z: complex) -> np.ndarray:
    """``Delta_k(z)`` from the global parametrix with principal branches (off the real axis).

    The phase enters with the factor ``theta(z)``, which is -1 below the real
    axis; this makes the result the meromorphic continuation of the upper
    half plane values.
    """
    side = _side(side)
    alpha = ctx.alpha
    z = complex(z)
    sgn = theta(z) ** k
    P = p_inf(alpha, z)
    Pinv = np.linalg.inv(P)
    if side == "right":
        D = np.diag([z ** (alpha / 2), z ** (-alpha / 2)])
        M = _m_right(k)
        sc = 1.0 / (2 * (-xi_n(ctx, z)) ** k)
    else:
        D = np.diag([(-z) ** (alpha / 2), (-z) ** (-alpha / 2)])
        M = _m_left(alpha, k)
        sc = poch_airy_bessel(alpha, k - 1) / (4 * phibar_n(ctx, z)) ** k
    return sgn * sc * P @ D @ M @ np.linalg.inv(D) @ Pinv


def s_recursive(deltas):
    """Terms of ``(I + sum_k Delta_k x^k)^{-1} = I - sum_k s_k x^k`` by direct inversion."""
    K = len(deltas)
    inv = [_I2]
    for k in range(1, K + 1):
        acc = np.zeros((2, 2), dtype=complex)
        for j in range(1, k + 1):
            acc -= deltas[j - 1] @ inv[k - j]
        inv.append(acc)
    return [-x for x in inv[1:]]


# ---------------------------------------------------------------------------
# tableau cache
# ---------------------------------------------------------------------------

_MEMO: Dict[tuple, UTableau] = {}
TABLE_ENV = "LAGASY_TABLE_DIR"


def table_key(w: WeightSpec, n: Optional[float], regime: str, K: int) -> tuple:
    """Cache key; ``n`` only matters when the field data depends on it."""
    needs_n = regime == "fixed" and not w.monomial_like
    return (w.render(), float(n) if needs_n else None, regime, int(K))


def table_filename(key: tuple) -> str:
    import hashlib
    return "u_" + hashlib.sha1(repr(key).encode()).hexdigest()[:16] + ".json"


def save_tables(tab: UTableau, path) -> None:
    with open(path, "w") as fh:
        json.dump({"u": tab.to_json(), "q": tab.Qtab.to_json() if tab.Qtab else None}, fh)


def load_tables(path) -> UTableau:
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict) or "u" not in obj:
        raise MalformedSpec(f"{path} is not a tableau file")
    tab = UTableau.from_json(obj["u"])
    if obj.get("q"):
        tab.Qtab = QTableau.from_json(obj["q"])
    return tab


def cached_u(w: WeightSpec, n: Optional[float] = None, regime: str = "fixed", K: int = 8) -> UTableau:
    """:func:`build_u` with an in-memory cache and an optional on-disk cache.

    When the environment variable ``LAGASY_TABLE_DIR`` names a directory,
    tableaux are read from and written to it.
    """
    import os
    if regime == "fixed" and w.monomial_like:
        n = None
    key = table_key(w, n, regime, K)
    if key in _MEMO:
        return _MEMO[key]
    d = os.environ.get(TABLE_ENV)
    path = os.path.join(d, table_filename(key)) if d else None
    tab = None
    if path and os.path.exists(path):
        try:
            tab = load_tables(path)
        except (MalformedSpec, OSError, ValueError):
            tab = None
    if tab is None:
        tab = build_u(w, n, regime, K)
        if path and os.path.isdir(d):
            save_tables(tab, path)
    _MEMO[key] = tab
    return tab
