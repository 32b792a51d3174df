"""Forward-mode dual numbers over numpy arrays.

A :class:`Dual` carries a value array and a derivative array of the same
shape, i.e. ``val + eps * der`` with ``eps**2 = 0``.  One derivative
direction is propagated per evaluation.  The derivative array may be
complex even when the value is real; every rule below is linear in
``der``, so a complex seed yields the complex-linear extension of the
real directional derivative.
"""

from __future__ import annotations

import numpy as np


class Dual:
    __slots__ = ("val", "der")
    __array_priority__ = 1000  # make ndarray <op> Dual defer to Dual

    def __init__(self, val, der=None):
        self.val = np.asarray(val)
        if der is None:
            der = np.zeros(self.val.shape)
        self.der = np.asarray(der)

    @classmethod
    def variable(cls, x, direction) -> "Dual":
        """Seed ``x`` with tangent ``direction``."""
        return cls(np.asarray(x, dtype=float), np.asarray(direction))

    @property
    def shape(self):
        return self.val.shape

    @property
    def T(self) -> "Dual":
        return Dual(self.val.T, self.der.T)

    def __len__(self):
        return len(self.val)

    def __getitem__(self, idx) -> "Dual":
        return Dual(self.val[idx], self.der[idx])

    def __repr__(self):
        return f"Dual({self.val!r}, {self.der!r})"

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.der + other.der)
        return Dual(self.val + other, self.der + np.zeros(np.shape(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val, self.der * other.val + self.val * other.der)
        return Dual(self.val * other, self.der * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            val = self.val / other.val
            return Dual(val, (self.der - val * other.der) / other.val)
        return Dual(self.val / other, self.der / other)

    def __rtruediv__(self, other):
        val = other / self.val
        return Dual(val, -val * self.der / self.val)

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("only integer powers are supported")
        if n == 0:
            return Dual(np.ones_like(self.val), np.zeros_like(self.der))
        return Dual(self.val**n, n * self.val ** (n - 1) * self.der)

    def __matmul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val @ other.val, self.der @ other.val + self.val @ other.der)
        return Dual(self.val @ other, self.der @ other)

    def __rmatmul__(self, other):
        return Dual(other @ self.val, other @ self.der)


def lift(x) -> Dual:
    return x if isinstance(x, Dual) else Dual(x)


def value(x):
    return x.val if isinstance(x, Dual) else np.asarray(x)


def derivative(x):
    return x.der if isinstance(x, Dual) else np.zeros(np.shape(x))


def sin(x):
    if isinstance(x, Dual):
        return Dual(np.sin(x.val), np.cos(x.val) * x.der)
    return np.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(np.cos(x.val), -np.sin(x.val) * x.der)
    return np.cos(x)


def exp(x):
    if isinstance(x, Dual):
        e = np.exp(x.val)
        return Dual(e, e * x.der)
    return np.exp(x)


def sqrt(x):
    if isinstance(x, Dual):
        r = np.sqrt(x.val)
        return Dual(r, x.der / (2.0 * r))
    return np.sqrt(x)


def inv(a):
    """Matrix inverse; d(A^-1) = -A^-1 dA A^-1."""
    if isinstance(a, Dual):
        ai = np.linalg.inv(a.val)
        return Dual(ai, -ai @ a.der @ ai)
    return np.linalg.inv(a)


def array(rows) -> Dual:
    """Assemble a Dual array from a nested list of scalars (Dual or plain)."""
    if isinstance(rows, (list, tuple)):
        return stack([array(r) for r in rows])
    return lift(rows)


def stack(items, axis: int = 0) -> Dual:
    items = [lift(i) for i in items]
    return Dual(np.stack([i.val for i in items], axis), np.stack([i.der for i in items], axis))


def block_diag(*blocks) -> Dual:
    blocks = [lift(b) for b in blocks]
    n = sum(b.shape[0] for b in blocks)
    dtype = np.result_type(*(b.der.dtype for b in blocks))
    val = np.zeros((n, n))
    der = np.zeros((n, n), dtype=dtype)
    k = 0
    for b in blocks:
        m = b.shape[0]
        val[k : k + m, k : k + m] = b.val
        der[k : k + m, k : k + m] = b.der
        k += m
    return Dual(val, der)


def jvp(f, x, direction):
    """Value and directional derivative of ``f`` at ``x`` along ``direction``."""
    out = f(Dual.variable(x, direction))
    if isinstance(out, tuple):
        return tuple(value(o) for o in out), tuple(derivative(o) for o in out)
    return value(out), derivative(out)
