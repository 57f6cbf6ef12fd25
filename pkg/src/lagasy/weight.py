"""Laguerre-type weights ``x**alpha * exp(-Q(x))`` on the half line."""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (AlphaOutOfRange, EvaluatorFailure, MalformedSpec,
                     NonPositiveLeading)


class QKind(enum.Enum):
    MONOMIAL = "mono"
    POLYNOMIAL = "poly"
    GENERAL = "general"


def _exp_evaluator(z):
    v = np.exp(z)
    return v, v


@dataclass(frozen=True)
class WeightSpec:
    """Immutable description of ``w(x) = x**alpha exp(-Q(x))``.

    ``coeffs`` holds ``q_0 .. q_m`` for monomial and polynomial fields.  For a
    general field ``general_q`` maps a complex argument to ``(Q(z), Q'(z))``;
    the derivative may be ``None``, in which case a central difference is
    used.  ``name`` identifies built-in general fields for serialization.

    ``formal=True`` admits ``alpha <= -1``: such a weight is not integrable,
    but the asymptotic expansions remain defined and can be built and
    evaluated.  Anything that integrates the weight rejects it.
    """

    alpha: float
    qkind: QKind
    coeffs: tuple = ()
    general_q: Optional[Callable] = field(default=None, compare=False)
    general_q_inverse: Optional[Callable] = field(default=None, compare=False)
    name: str = ""
    formal: bool = False

    def __post_init__(self):
        if not math.isfinite(self.alpha) or (self.alpha <= -1 and not self.formal):
            raise AlphaOutOfRange(f"alpha must exceed -1, got {self.alpha}")
        if self.qkind is QKind.GENERAL:
            if self.general_q is None:
                raise MalformedSpec("general field requires an evaluator")
            return
        c = tuple(float(x) for x in self.coeffs)
        if len(c) < 2:
            raise MalformedSpec("field polynomial must have degree >= 1")
        if c[-1] <= 0:
            raise NonPositiveLeading(f"leading coefficient must be positive, got {c[-1]}")
        if self.qkind is QKind.MONOMIAL and any(x != 0 for x in c[1:-1]):
            raise MalformedSpec("monomial field has nonzero intermediate coefficients")
        object.__setattr__(self, "coeffs", c)

    # -- basic properties -------------------------------------------------
    @property
    def m(self) -> Optional[int]:
        if self.qkind is QKind.GENERAL:
            return None
        return len(self.coeffs) - 1

    @property
    def is_polynomial(self) -> bool:
        return self.qkind is not QKind.GENERAL

    @property
    def monomial_like(self) -> bool:
        """True when ``Q = q_m x**m + q_0`` whatever the declared kind."""
        return self.is_polynomial and all(x == 0 for x in self.coeffs[1:-1])

    @property
    def q0(self) -> float:
        if self.is_polynomial:
            return self.coeffs[0]
        return 0.0

    @property
    def is_classical_type(self) -> bool:
        """``Q`` linear, so the Laguerre derivative identity applies."""
        return self.is_polynomial and self.m == 1

    # -- field evaluation -------------------------------------------------
    def Q(self, x):
        if self.is_polynomial:
            return np.polynomial.polynomial.polyval(x, self.coeffs)
        return self._general(x)[0]

    def dQ(self, x):
        if self.is_polynomial:
            d = np.polynomial.polynomial.polyder(self.coeffs)
            return np.polynomial.polynomial.polyval(x, d)
        v, dv = self._general(x)
        if dv is None:
            x = np.asarray(x)
            h = 1e-7 * (1 + np.abs(x))
            dv = (self._general(x + h)[0] - self._general(x - h)[0]) / (2 * h)
        return dv

    def d2Q(self, x):
        if self.is_polynomial:
            d = np.polynomial.polynomial.polyder(self.coeffs, 2)
            return np.polynomial.polynomial.polyval(x, d)
        x = np.asarray(x)
        h = 1e-5 * (1 + np.abs(x))
        return (self.dQ(x + h) - self.dQ(x - h)) / (2 * h)

    def Q_inverse(self, y: float) -> float:
        """Solve ``Q(x) = y`` for the largest real ``x`` (used as an initial guess)."""
        if self.general_q_inverse is not None:
            return float(self.general_q_inverse(y))
        if self.is_polynomial:
            c = list(self.coeffs)
            c[0] -= y
            roots = np.roots(c[::-1])
            real = [r.real for r in roots if abs(r.imag) <= 1e-9 * (1 + abs(r)) and r.real > 0]
            if real:
                return max(real)
            return (y / self.coeffs[-1]) ** (1.0 / self.m)
        lo, hi = 0.0, 1.0
        while float(np.real(self.Q(hi))) < y:
            hi *= 2
            if hi > 1e300:
                raise EvaluatorFailure("cannot bracket Q^{-1}")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if float(np.real(self.Q(mid))) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def _general(self, z):
        try:
            out = self.general_q(z)
        except Exception as exc:  # evaluator handles are user supplied
            raise EvaluatorFailure(f"field evaluator raised: {exc}") from exc
        if isinstance(out, tuple):
            val, der = out
        else:
            val, der = out, None
        if not np.all(np.isfinite(val)):
            raise EvaluatorFailure("field evaluator returned a non-finite value")
        return val, der

    def log_weight(self, x):
        """``log w(x)`` for positive real ``x``."""
        x = np.asarray(x, dtype=float)
        return self.alpha * np.log(x) - np.real(self.Q(x))

    # -- serialization ----------------------------------------------------
    def render(self) -> str:
        a = repr(float(self.alpha))
        if self.qkind is QKind.GENERAL:
            return f"alpha={a};Q={self.name or 'general'}"
        if self.qkind is QKind.MONOMIAL:
            return f"alpha={a};Q=mono:{self.m},{self.coeffs[-1]!r},{self.coeffs[0]!r}"
        return f"alpha={a};Q=poly:" + ",".join(repr(c) for c in self.coeffs)

    def to_json(self) -> dict:
        if self.qkind is QKind.GENERAL:
            q = {"type": self.name or "general", "coeffs": []}
        else:
            q = {"type": self.qkind.value, "coeffs": list(self.coeffs)}
        return {"alpha": float(self.alpha), "Q": q}

    @classmethod
    def from_json(cls, obj) -> "WeightSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            alpha = float(obj["alpha"])
            q = obj["Q"]
            kind = q["type"]
            coeffs = [float(c) for c in q.get("coeffs", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedSpec(f"bad weight object: {obj!r}") from exc
        if kind == "exp":
            return exp_weight(alpha)
        if kind == "poly":
            return cls(alpha, QKind.POLYNOMIAL, tuple(coeffs))
        if kind == "mono":
            return cls(alpha, QKind.MONOMIAL, tuple(coeffs))
        raise MalformedSpec(f"unknown field type {kind!r}")


def exp_weight(alpha: float) -> WeightSpec:
    return WeightSpec(alpha, QKind.GENERAL, (), _exp_evaluator,
                      lambda y: math.log(y) if y > 0 else 0.0, name="exp")


def classical(alpha: float = 0.0, q0: float = 0.0) -> WeightSpec:
    return WeightSpec(alpha, QKind.POLYNOMIAL, (q0, 1.0))


def monomial(alpha: float, m: int, qm: float, q0: float = 0.0) -> WeightSpec:
    return WeightSpec(alpha, QKind.MONOMIAL, (q0,) + (0.0,) * (m - 1) + (qm,))


def polynomial(alpha: float, coeffs: Sequence[float]) -> WeightSpec:
    return WeightSpec(alpha, QKind.POLYNOMIAL, tuple(coeffs))


def formal_weight(alpha: float, coeffs: Sequence[float]) -> WeightSpec:
    """Polynomial field with any real ``alpha``, for expansion-only use."""
    return WeightSpec(alpha, QKind.POLYNOMIAL, tuple(coeffs), formal=True)


def require_integrable(w: WeightSpec) -> None:
    if w.alpha <= -1:
        raise AlphaOutOfRange(f"weight with alpha={w.alpha} is not integrable")


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_SPEC_RE = re.compile(r"^\s*alpha\s*=\s*(?P<alpha>\S+?)\s*;\s*Q\s*=\s*(?P<q>.+?)\s*$")


def _num(s: str) -> float:
    s = s.strip()
    if not re.fullmatch(_NUM, s):
        raise MalformedSpec(f"not a number: {s!r}")
    return float(s)


def parse_weight(spec: str) -> WeightSpec:
    """Parse ``alpha=<a>;Q=poly:q0,..,qm`` / ``mono:m,qm[,q0]`` / ``exp`` / ``classical``.

    A JSON object in the documented schema is accepted as well.
    """
    s = spec.strip()
    if s.startswith("{"):
        return WeightSpec.from_json(s)
    mt = _SPEC_RE.match(s)
    if not mt:
        raise MalformedSpec(f"cannot parse weight spec {spec!r}")
    alpha = _num(mt.group("alpha"))
    if alpha <= -1:
        raise AlphaOutOfRange(f"alpha must exceed -1, got {alpha}")
    q = mt.group("q")
    if q == "classical":
        return classical(alpha)
    if q == "exp":
        return exp_weight(alpha)
    kind, _, rest = q.partition(":")
    parts = [p for p in rest.split(",")] if rest else []
    if kind == "poly":
        if len(parts) < 2:
            raise MalformedSpec("poly needs at least q0,q1")
        return polynomial(alpha, [_num(p) for p in parts])
    if kind == "mono":
        if len(parts) not in (2, 3):
            raise MalformedSpec("mono expects m,qm[,q0]")
        try:
            m = int(parts[0])
        except ValueError as exc:
            raise MalformedSpec(f"bad monomial degree {parts[0]!r}") from exc
        if m < 1:
            raise MalformedSpec("monomial degree must be >= 1")
        qm = _num(parts[1])
        q0 = _num(parts[2]) if len(parts) == 3 else 0.0
        if qm <= 0:
            raise NonPositiveLeading(f"leading coefficient must be positive, got {qm}")
        return monomial(alpha, m, qm, q0)
    raise MalformedSpec(f"unknown field {q!r}")


def rescaled_field(w: WeightSpec, n: int, beta: float, z):
    """``V_n(z) = Q(beta z) / n``."""
    if n < 1 or beta <= 0:
        raise ValueError("need n >= 1 and beta > 0")
    return w.Q(beta * np.asarray(z)) / n


def rescaled_field_derivative(w: WeightSpec, n: int, beta: float, z):
    """``V_n'(z) = beta Q'(beta z) / n``."""
    return beta * w.dQ(beta * np.asarray(z)) / n


def hermite_to_laguerre(coeffs: Sequence[float], odd: bool) -> WeightSpec:
    """Map the Hermite-type weight ``exp(-sum q_k x**(2k))`` to its Laguerre partner.

    Even degrees use ``alpha = -1/2`` and odd degrees ``alpha = 1/2``; in both
    cases ``Q(y) = sum q_k y**k``.
    """
    return polynomial(0.5 if odd else -0.5, coeffs)
