"""Dense complex polynomials and Laurent polynomials on an exponent window.

A Laurent polynomial is stored as ``(low, coeffs)`` where ``coeffs[j]`` is
the coefficient of ``z**(low + j)``.  Only exact zeros are trimmed, so a
coefficient that is merely tiny never shrinks the window.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import DomainError, DuplicateNode


def _as_coeffs(coeffs) -> np.ndarray:
    arr = np.array(coeffs, dtype=np.complex128).ravel()
    if not np.all(np.isfinite(arr)):
        raise DomainError("coefficients must be finite")
    return arr


class LaurentPoly:
    """sum_j c_j z**j over the exponents low .. low+len(coeffs)-1."""

    __slots__ = ("_low", "_coeffs")

    def __init__(self, low: int, coeffs):
        arr = _as_coeffs(coeffs)
        nz = np.nonzero(arr)[0]
        if nz.size == 0:
            self._low, self._coeffs = 0, np.zeros(0, dtype=np.complex128)
        else:
            self._low = int(low) + int(nz[0])
            self._coeffs = arr[nz[0]:nz[-1] + 1].copy()
        self._coeffs.setflags(write=False)

    @property
    def low(self) -> int:
        return self._low

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def high(self) -> int:
        """Largest exponent present (``low - 1`` for the zero element)."""
        return self._low + len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return len(self._coeffs) == 0

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "LaurentPoly":
        return cls(k, [c])

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls(0, [])

    def coeff(self, k: int) -> complex:
        j = k - self._low
        if 0 <= j < len(self._coeffs):
            return complex(self._coeffs[j])
        return 0j

    def window_coeffs(self, a: int, b: int) -> np.ndarray:
        """Coefficients for exponents a..b, zero padded; raises if f is not inside."""
        if not self.in_window(a, b):
            raise DomainError(f"exponents [{self.low}, {self.high}] not inside [{a}, {b}]")
        out = np.zeros(b - a + 1, dtype=np.complex128)
        if not self.is_zero():
            out[self._low - a:self._low - a + len(self._coeffs)] = self._coeffs
        return out

    def in_window(self, a: int, b: int) -> bool:
        if self.is_zero():
            return True
        return a <= self._low and self.high <= b

    def __call__(self, z):
        return evaluate(self, z)

    def derivative(self, order: int = 1) -> "LaurentPoly":
        return derivative(self, order)

    def _binary(self, other):
        if isinstance(other, LaurentPoly):
            return other
        return LaurentPoly(0, [complex(other)])

    def __add__(self, other):
        return add(self, self._binary(other))

    __radd__ = __add__

    def __neg__(self):
        return scale(self, -1.0)

    def __sub__(self, other):
        return add(self, scale(self._binary(other), -1.0))

    def __rsub__(self, other):
        return add(self._binary(other), scale(self, -1.0))

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self._trimmed(), other._trimmed()
        return a._low == b._low and np.array_equal(a._coeffs, b._coeffs)

    def __hash__(self):
        t = self._trimmed()
        return hash((t._low, t._coeffs.tobytes()))

    def _trimmed(self) -> "LaurentPoly":
        return LaurentPoly(self._low, self._coeffs)

    def __repr__(self):
        return f"LaurentPoly(low={self._low}, coeffs={self._coeffs.tolist()})"


class Poly(LaurentPoly):
    """Ordinary polynomial; ``coeffs[j]`` multiplies ``z**j``."""

    __slots__ = ()

    def __init__(self, coeffs, low: int = 0):
        arr = _as_coeffs(coeffs)
        if low < 0 and np.any(arr[:-low] != 0):
            raise DomainError("Poly cannot hold negative exponents")
        if low > 0:
            arr = np.concatenate([np.zeros(low, dtype=np.complex128), arr])
        elif low < 0:
            arr = arr[-low:]
        nz = np.nonzero(arr)[0]
        arr = arr[:nz[-1] + 1] if nz.size else arr[:0]
        # keep low at 0 so coeffs[j] is always the z**j coefficient
        object.__setattr__(self, "_low", 0)
        object.__setattr__(self, "_coeffs", arr.copy())
        self._coeffs.setflags(write=False)

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    @property
    def high(self) -> int:
        return self.degree

    def in_window(self, a: int, b: int) -> bool:
        return LaurentPoly(0, self._coeffs).in_window(a, b)

    def window_coeffs(self, a: int, b: int) -> np.ndarray:
        return LaurentPoly(0, self._coeffs).window_coeffs(a, b)

    def __repr__(self):
        return f"Poly({self._coeffs.tolist()})"


def _wrap(low: int, coeffs) -> LaurentPoly:
    f = LaurentPoly(low, coeffs)
    if f.is_zero() or f.low >= 0:
        return Poly(f.coeffs, low=f.low)
    return f


def evaluate(f: LaurentPoly, z):
    """Value of ``f`` at ``z`` (scalar or array)."""
    scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=np.complex128)
    if f.is_zero():
        out = np.zeros_like(zz)
        return complex(out) if scalar else out
    low = f.low
    if low < 0 and np.any(zz == 0):
        raise DomainError("cannot evaluate negative powers at z = 0")
    out = _kernels.horner(f.coeffs, np.atleast_1d(zz)).reshape(zz.shape)
    if low != 0:
        out = out * zz ** low
    return complex(out) if scalar else out


def derivative(f: LaurentPoly, order: int = 1) -> LaurentPoly:
    if order < 0:
        raise DomainError("derivative order must be non-negative")
    if order == 0 or f.is_zero():
        return f
    low = f.low
    exps = np.arange(low, low + len(f.coeffs), dtype=np.float64)
    c = f.coeffs.copy()
    for s in range(order):
        c = c * (exps - s)
    return _wrap(low - order, c)


def add(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    a = min(f.low, g.low)
    b = max(f.high, g.high)
    return _wrap(a, f.window_coeffs(a, b) + g.window_coeffs(a, b))


def scale(f: LaurentPoly, c) -> LaurentPoly:
    if f.is_zero():
        return f
    return _wrap(f.low, f.coeffs * complex(c))


def mul(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    if f.is_zero() or g.is_zero():
        return Poly([])
    return _wrap(f.low + g.low, np.convolve(f.coeffs, g.coeffs))


def shift(f: LaurentPoly, k: int) -> LaurentPoly:
    """Multiply by ``z**k``."""
    if f.is_zero():
        return f
    return _wrap(f.low + k, f.coeffs)


def reciprocal(p: Poly, n: int) -> Poly:
    """z**n * conj(p(1/conj(z))): the conjugated degree-n reversal."""
    if n < 0:
        raise DomainError("n must be non-negative")
    if not isinstance(p, Poly):
        if p.low < 0:
            raise DomainError("reciprocal needs an ordinary polynomial")
        p = Poly(p.coeffs, low=p.low)
    if p.degree > n:
        raise DomainError(f"degree {p.degree} exceeds n = {n}")
    c = np.zeros(n + 1, dtype=np.complex128)
    c[:p.degree + 1] = p.coeffs
    return Poly(np.conj(c[::-1]))


def nodal_poly(nodes) -> Poly:
    """Monic prod (z - s) over the nodes; nodes must be pairwise distinct."""
    s = np.asarray(nodes, dtype=np.complex128).ravel()
    if len(np.unique(s)) != len(s):
        raise DuplicateNode("nodal polynomial needs pairwise distinct nodes")
    c = np.ones(1, dtype=np.complex128)
    for x in s:
        c = np.concatenate([[0.0], c]) - x * np.concatenate([c, [0.0]])
    c[-1] = 1.0
    return Poly(c)


def deflate(p: Poly, root: complex) -> Poly:
    """Quotient of synthetic division of ``p`` by ``z - root``."""
    c = p.coeffs[::-1]
    out = np.empty(len(c) - 1, dtype=np.complex128)
    acc = 0j
    for i in range(len(c) - 1):
        acc = acc * root + c[i]
        out[i] = acc
    return Poly(out[::-1])
