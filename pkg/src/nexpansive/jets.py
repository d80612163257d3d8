"""Truncated bivariate Taylor arithmetic.

A :class:`Jet` stores the Taylor coefficients ``c[i, j]`` of a function of
two variables ``(x, y)`` about a base point, so that

    f(x0 + dx, y0 + dy) = sum_{i + j <= order} c[i, j] dx**i dy**j + ...

Coefficients may carry trailing batch dimensions, which lets one jet
object describe the expansion at many base points at once.  Map formulas in
:mod:`nexpansive.dynamics` are written against the module level functions
below (``exp``, ``sqrt``, ``sin``, ...) so the same code evaluates plain
numpy arrays and jets.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


class Jet:
    __array_ufunc__ = None

    def __init__(self, coeffs: np.ndarray, order: int):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.order = int(order)

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1, order + 1) + value.shape)
        c[0, 0] = value
        return cls(c, order)

    @classmethod
    def variable(cls, value, index: int, order: int) -> "Jet":
        j = cls.constant(value, order)
        if order >= 1:
            if index == 0:
                j.coeffs[1, 0] = 1.0
            else:
                j.coeffs[0, 1] = 1.0
        return j

    @classmethod
    def variables(cls, point, order: int) -> tuple["Jet", "Jet"]:
        point = np.asarray(point, dtype=float)
        return (cls.variable(point[..., 0], 0, order),
                cls.variable(point[..., 1], 1, order))

    # access -----------------------------------------------------------
    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0, 0]

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[2:]

    def partial(self, i: int, j: int) -> np.ndarray:
        """d^{i+j} f / dx^i dy^j at the base point."""
        if i + j > self.order:
            raise ValueError("derivative order exceeds jet order")
        return self.coeffs[i, j] * math.factorial(i) * math.factorial(j)

    def gradient(self) -> np.ndarray:
        return np.stack([self.coeffs[1, 0], self.coeffs[0, 1]], axis=-1)

    def copy(self) -> "Jet":
        return Jet(self.coeffs.copy(), self.order)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, value={self.value!r})"

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("jets of different order")
            return other
        return Jet.constant(other, self.order)

    def __neg__(self):
        return Jet(-self.coeffs, self.order)

    def __pos__(self):
        return self

    def __add__(self, other):
        if not isinstance(other, Jet) and np.ndim(other) == 0:
            c = self.coeffs.copy()
            c[0, 0] = c[0, 0] + other
            return Jet(c, self.order)
        other = self._coerce(other)
        return Jet(self.coeffs + other.coeffs, self.order)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * np.asarray(other, dtype=float), self.order)
        other = self._coerce(other)
        n = self.order
        a, b = self.coeffs, other.coeffs
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for i in range(n + 1):
            for j in range(n + 1 - i):
                acc = 0.0
                for k in range(i + 1):
                    for m in range(j + 1):
                        acc = acc + a[k, m] * b[i - k, j - m]
                out[i, j] = acc
        return Jet(out, n)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        v = self.value
        derivs = [(-1) ** k * math.factorial(k) / v ** (k + 1)
                  for k in range(self.order + 1)]
        return compose(self, derivs)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs / np.asarray(other, dtype=float), self.order)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = Jet.constant(np.ones(self.batch_shape), self.order)
            base = self
            while p:
                if p & 1:
                    out = out * base
                base = base * base
                p >>= 1
            return out
        v = self.value
        derivs = []
        coef = 1.0
        for k in range(self.order + 1):
            derivs.append(coef * v ** (p - k))
            coef *= p - k
        return compose(self, derivs)


def compose(inner: Jet, derivs: Sequence) -> Jet:
    """Jet of ``g(inner)`` given ``derivs[k] = g^{(k)}(inner.value)``."""
    n = inner.order
    h = inner.copy()
    h.coeffs[0, 0] = 0.0
    out = Jet.constant(derivs[0], n)
    power = Jet.constant(np.ones(inner.batch_shape), n)
    for k in range(1, n + 1):
        power = power * h
        out = out + power * (np.asarray(derivs[k]) / math.factorial(k))
    return out


def is_jet(x) -> bool:
    return isinstance(x, Jet)


def value_of(x):
    return x.value if isinstance(x, Jet) else x


def exp(x):
    if isinstance(x, Jet):
        e = np.exp(x.value)
        return compose(x, [e] * (x.order + 1))
    return np.exp(x)


def log(x):
    if isinstance(x, Jet):
        v = x.value
        derivs = [np.log(v)] + [(-1) ** (k - 1) * math.factorial(k - 1) / v ** k
                                for k in range(1, x.order + 1)]
        return compose(x, derivs)
    return np.log(x)


def sqrt(x):
    if isinstance(x, Jet):
        return x ** 0.5
    return np.sqrt(x)


def sin(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.value), np.cos(x.value)
        cycle = [s, c, -s, -c]
        return compose(x, [cycle[k % 4] for k in range(x.order + 1)])
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.value), np.cos(x.value)
        cycle = [c, -s, -c, s]
        return compose(x, [cycle[k % 4] for k in range(x.order + 1)])
    return np.cos(x)


def where(mask, a, b):
    """Elementwise select that also works when either branch is a jet."""
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return np.where(mask, a, b)
    order = a.order if isinstance(a, Jet) else b.order
    mask = np.asarray(mask, dtype=bool)
    shapes = [mask.shape]
    for z in (a, b):
        shapes.append(z.batch_shape if isinstance(z, Jet) else np.shape(z))
    batch = np.broadcast_shapes(*shapes)

    def full(z):
        if isinstance(z, Jet):
            return np.broadcast_to(z.coeffs, z.coeffs.shape[:2] + batch)
        return Jet.constant(np.broadcast_to(z, batch), order).coeffs

    return Jet(np.where(mask, full(a), full(b)), order)


def substitute(x, mask, safe_value):
    """Replace masked base values by ``safe_value`` (used before evaluating
    functions whose derivatives blow up outside the branch that is kept)."""
    if isinstance(x, Jet):
        c = x.coeffs.copy()
        c[0, 0] = np.where(mask, safe_value, c[0, 0])
        return Jet(c, x.order)
    return np.where(mask, safe_value, x)


def jet_of(fn: Callable, point, order: int):
    """Evaluate a two-argument map ``fn(x, y) -> (u, v)`` on jets at ``point``."""
    x, y = Jet.variables(point, order)
    return fn(x, y)


def derivative_tensor(j: Jet, order: int) -> dict[tuple[int, int], np.ndarray]:
    """All partial derivatives of total order ``<= order`` keyed by (i, j)."""
    return {(i, k): j.partial(i, k)
            for i in range(order + 1) for k in range(order + 1 - i)}
