"""Degree-2 jet arithmetic.

A :class:`Jet2` carries the exact value, gradient, and Hessian of a smooth
scalar expression at a chart point.  Arithmetic and the elementary
functions (exp, log, sin, cos, sqrt, real powers) propagate all three
channels through the exact first- and second-order chain rule, so any
composition of supported operations yields exact first and second partial
derivatives, with no truncation error beyond floating-point rounding.

Only smooth operations are supported; there is deliberately no abs, sign,
or comparison inside jets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Jet2", "JetDomainError", "constant", "coordinate", "lift", "apply"]


class JetDomainError(ArithmeticError):
    """Raised when an operation leaves its smooth domain (1/0, log(-1), ...)."""


def _as_jet(x, dim: int) -> "Jet2":
    if isinstance(x, Jet2):
        if x.dimension != dim:
            raise ValueError(f"jet dimension mismatch: {x.dimension} != {dim}")
        return x
    return constant(float(x), dim)


@dataclass(frozen=True)
class Jet2:
    """Value, gradient, and symmetric Hessian of a scalar at a point.

    The Hessian is stored as a full symmetric matrix; symmetry is
    guaranteed by construction for every supported operation.
    """

    value: float
    gradient: np.ndarray  # shape (n,)
    hessian: np.ndarray   # shape (n, n), symmetric

    @property
    def dimension(self) -> int:
        return self.gradient.shape[0]

    @property
    def is_constant(self) -> bool:
        return not (self.gradient.any() or self.hessian.any())

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "Jet2":
        o = _as_jet(other, self.dimension)
        return Jet2(self.value + o.value, self.gradient + o.gradient,
                    self.hessian + o.hessian)

    __radd__ = __add__

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.gradient, -self.hessian)

    def __sub__(self, other) -> "Jet2":
        o = _as_jet(other, self.dimension)
        return Jet2(self.value - o.value, self.gradient - o.gradient,
                    self.hessian - o.hessian)

    def __rsub__(self, other) -> "Jet2":
        return _as_jet(other, self.dimension) - self

    def __mul__(self, other) -> "Jet2":
        o = _as_jet(other, self.dimension)
        cross = np.outer(self.gradient, o.gradient)
        # (cross + cross.T) first: summing the transposes in one step keeps
        # the Hessian bitwise symmetric
        return Jet2(
            self.value * o.value,
            self.value * o.gradient + o.value * self.gradient,
            self.value * o.hessian + o.value * self.hessian + (cross + cross.T),
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet2":
        return self * _as_jet(other, self.dimension)._reciprocal()

    def __rtruediv__(self, other) -> "Jet2":
        return _as_jet(other, self.dimension) * self._reciprocal()

    def __pow__(self, exponent) -> "Jet2":
        if isinstance(exponent, Jet2):
            if exponent.is_constant:
                return self._real_power(exponent.value)
            # general exponent: b^e = exp(e * log(b)), needs b > 0
            return exp(exponent * log(self))
        return self._real_power(float(exponent))

    # -- chain-rule helpers --------------------------------------------------

    def _compose(self, f0: float, f1: float, f2: float) -> "Jet2":
        """Chain rule for a scalar function with derivatives f0, f1, f2 here."""
        g = self.gradient
        return Jet2(f0, f1 * g, f1 * self.hessian + f2 * np.outer(g, g))

    def _reciprocal(self) -> "Jet2":
        v = self.value
        if v == 0.0:
            raise JetDomainError("division by zero")
        inv = 1.0 / v
        return self._compose(inv, -inv * inv, 2.0 * inv ** 3)

    def _real_power(self, p: float) -> "Jet2":
        v = self.value
        if p == round(p):
            k = int(round(p))
            if k == 0:
                return constant(1.0, self.dimension)
            if v == 0.0 and k < 2:
                if k < 0:
                    raise JetDomainError("zero raised to a negative power")
                # k == 1: identity
                return self
            f0 = v ** k
            f1 = k * v ** (k - 1)
            f2 = k * (k - 1) * v ** (k - 2) if k != 1 else 0.0
            return self._compose(f0, f1, f2)
        if v <= 0.0:
            raise JetDomainError(
                f"non-integer power of non-positive value {v!r}")
        f0 = v ** p
        return self._compose(f0, p * f0 / v, p * (p - 1.0) * f0 / (v * v))


def constant(value: float, dim: int) -> Jet2:
    """Lift a constant: zero gradient and Hessian."""
    return Jet2(float(value), np.zeros(dim), np.zeros((dim, dim)))


def coordinate(value: float, index: int, dim: int) -> Jet2:
    """Lift the ``index``-th chart coordinate: unit gradient, zero Hessian."""
    if not 0 <= index < dim:
        raise IndexError(f"coordinate index {index} out of range for n={dim}")
    grad = np.zeros(dim)
    grad[index] = 1.0
    return Jet2(float(value), grad, np.zeros((dim, dim)))


def exp(x: Jet2) -> Jet2:
    e = math.exp(x.value)
    return x._compose(e, e, e)


def log(x: Jet2) -> Jet2:
    if x.value <= 0.0:
        raise JetDomainError(f"log of non-positive value {x.value!r}")
    v = x.value
    return x._compose(math.log(v), 1.0 / v, -1.0 / (v * v))


def sin(x: Jet2) -> Jet2:
    s, c = math.sin(x.value), math.cos(x.value)
    return x._compose(s, c, -s)


def cos(x: Jet2) -> Jet2:
    s, c = math.sin(x.value), math.cos(x.value)
    return x._compose(c, -s, -c)


def sqrt(x: Jet2) -> Jet2:
    if x.value <= 0.0:
        raise JetDomainError(f"sqrt of non-positive value {x.value!r}")
    r = math.sqrt(x.value)
    return x._compose(r, 0.5 / r, -0.25 / (r * x.value))


FUNCTIONS = {"exp": exp, "log": log, "sin": sin, "cos": cos, "sqrt": sqrt}

_BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "^": lambda a, b: a ** b,
}


def lift(value: float, coord_index: int | None = None, dim: int = 1) -> Jet2:
    """Lift a real number into a jet: constant if ``coord_index`` is None,
    otherwise the value of that chart coordinate."""
    if coord_index is None:
        return constant(value, dim)
    return coordinate(value, coord_index, dim)


def apply(fn: str, args: list[Jet2]) -> Jet2:
    """Apply a named elementary function or arithmetic operator to jets.

    ``fn`` is one of ``+ - * / ^ neg exp log sin cos sqrt``; all arguments
    must share one chart dimension.
    """
    if fn in _BINARY:
        if len(args) != 2:
            raise ValueError(f"operator {fn!r} takes 2 arguments")
        a, b = args
        _as_jet(b, a.dimension)  # dimension check
        return _BINARY[fn](a, b)
    if fn == "neg":
        (a,) = args
        return -a
    if fn in FUNCTIONS:
        (a,) = args
        return FUNCTIONS[fn](a)
    raise ValueError(f"unsupported jet function {fn!r}")
