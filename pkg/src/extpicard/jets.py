"""Truncated power series ("jets") for automatic Taylor coefficients.

A :class:`Jet` holds the coefficients ``c[0..p]`` of ``sum c_k t**k``.
Arithmetic, integer and real powers, ``exp``, ``log``, ``sin``, ``cos`` and
``sqrt`` are propagated with the usual recurrences, and the NumPy ufuncs of the
same names dispatch here, so a right-hand side written with ``np.cos`` works
unchanged on jets.
"""
from __future__ import annotations

import numbers

import numpy as np

from .errors import UnsupportedOperationError


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    @classmethod
    def constant(cls, value, order):
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, value, order):
        c = np.zeros(order + 1)
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @property
    def order(self):
        return len(self.c) - 1

    def __repr__(self):
        return f"Jet({self.c.tolist()})"

    def _lift(self, other):
        if isinstance(other, Jet):
            if other.order != self.order:
                p = min(self.order, other.order)
                return Jet(other.c[:p + 1]), p
            return other, self.order
        if isinstance(other, numbers.Real) or (isinstance(other, np.ndarray) and other.ndim == 0):
            return None, self.order
        return NotImplemented, None

    def __add__(self, other):
        o, p = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = self.c.copy()
            c[0] += float(other)
            return Jet(c)
        return Jet(self.c[:p + 1] + o.c[:p + 1])

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o, p = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.c * float(other))
        return Jet(np.convolve(self.c[:p + 1], o.c[:p + 1])[:p + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        o, p = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.c / float(other))
        return _divide(self.c[:p + 1], o.c[:p + 1])

    def __rtruediv__(self, other):
        o, p = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return _divide(Jet.constant(float(other), self.order).c, self.c)

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            return (self.log() * exponent).exp()
        if isinstance(exponent, numbers.Integral) or float(exponent).is_integer():
            e = int(exponent)
            if e < 0:
                return 1.0 / (self ** (-e))
            result = Jet.constant(1.0, self.order)
            base = self
            while e:
                if e & 1:
                    result = result * base
                e >>= 1
                if e:
                    base = base * base
            return result
        return _real_power(self.c, float(exponent))

    def __rpow__(self, base):
        return (self * np.log(float(base))).exp()

    def exp(self):
        a = self.c
        p = self.order
        e = np.zeros(p + 1)
        e[0] = np.exp(a[0])
        for k in range(1, p + 1):
            j = np.arange(1, k + 1)
            e[k] = np.dot(j * a[1:k + 1], e[k - 1::-1][:k]) / k
        return Jet(e)

    def log(self):
        a = self.c
        p = self.order
        out = np.zeros(p + 1)
        out[0] = np.log(a[0])
        for k in range(1, p + 1):
            j = np.arange(1, k)
            acc = np.dot(j * out[1:k], a[k - 1:0:-1]) if k > 1 else 0.0
            out[k] = (a[k] - acc / k) / a[0]
        return Jet(out)

    def _sincos(self):
        a = self.c
        p = self.order
        s = np.zeros(p + 1)
        co = np.zeros(p + 1)
        s[0], co[0] = np.sin(a[0]), np.cos(a[0])
        for k in range(1, p + 1):
            ja = np.arange(1, k + 1) * a[1:k + 1]
            s[k] = np.dot(ja, co[k - 1::-1][:k]) / k
            co[k] = -np.dot(ja, s[k - 1::-1][:k]) / k
        return Jet(s), Jet(co)

    def sin(self):
        return self._sincos()[0]

    def cos(self):
        return self._sincos()[1]

    def sqrt(self):
        return _real_power(self.c, 0.5)

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs:
            return NotImplemented
        name = ufunc.__name__
        if name in _UNARY and len(inputs) == 1:
            return _UNARY[name](inputs[0])
        if name in _BINARY and len(inputs) == 2:
            return _BINARY[name](*inputs)
        raise UnsupportedOperationError(f"ufunc {name!r} is not supported on Taylor jets")

    def _unsupported(self, *args, **kwargs):
        raise UnsupportedOperationError("operation is not supported on Taylor jets")

    tan = arctan = sinh = cosh = tanh = __floordiv__ = __mod__ = _unsupported


def _divide(a, b):
    p = len(a) - 1
    q = np.zeros(p + 1)
    for k in range(p + 1):
        acc = np.dot(b[1:k + 1], q[k - 1::-1][:k]) if k else 0.0
        q[k] = (a[k] - acc) / b[0]
    return Jet(q)


def _real_power(a, alpha):
    p = len(a) - 1
    out = np.zeros(p + 1)
    out[0] = a[0] ** alpha
    for k in range(1, p + 1):
        j = np.arange(1, k + 1)
        out[k] = np.dot((alpha * j - (k - j)) * a[1:k + 1], out[k - 1::-1][:k]) / (k * a[0])
    return Jet(out)


def _as_jet_op(fn):
    def op(x):
        if isinstance(x, Jet):
            return fn(x)
        raise UnsupportedOperationError("unexpected operand")
    return op


_UNARY = {
    "sin": _as_jet_op(Jet.sin),
    "cos": _as_jet_op(Jet.cos),
    "exp": _as_jet_op(Jet.exp),
    "log": _as_jet_op(Jet.log),
    "sqrt": _as_jet_op(Jet.sqrt),
    "negative": lambda x: -x,
    "positive": lambda x: x,
    "square": lambda x: x * x,
}

_BINARY = {
    "add": lambda a, b: a + b if isinstance(a, Jet) else b + a,
    "subtract": lambda a, b: a - b if isinstance(a, Jet) else (-b) + a,
    "multiply": lambda a, b: a * b if isinstance(a, Jet) else b * a,
    "true_divide": lambda a, b: a / b if isinstance(a, Jet) else b.__rtruediv__(a),
    "power": lambda a, b: a ** b if isinstance(a, Jet) else b.__rpow__(a),
}


def coefficient(value, k):
    """Coefficient ``k`` of a jet, or of a plain constant."""
    if isinstance(value, Jet):
        return value.c[k] if k <= value.order else 0.0
    return float(value) if k == 0 else 0.0
