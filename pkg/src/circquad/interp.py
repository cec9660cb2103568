"""Lagrange-Laurent and Hermite-Laurent interpolation on the unit circle.

Interpolants live in the window Lambda_{-p, r-p-1}, with r the number of
conditions.  Production paths solve the (confluent) Laurent-Vandermonde
system; the closed constructions are kept as independent checks.  The
Hermite fundamentals satisfy the downward recursion

    L_{k,nu_k-1} = l_{k,nu_k-1}
    L_{k,l}      = l_{k,l} - sum_{s>l} l_{k,l}^{(s)}(z_k) L_{k,s}

where l_{k,l}(z) = (z-z_k)^l / l! (z_k/z)^p prod_{j!=k} ((z-z_j)/(z_k-z_j))^{nu_j}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, DuplicateNode, NearDuplicateNode
from .laurent import LaurentPoly, Poly, add, deflate, evaluate, mul, nodal_poly, scale, shift

# Relative size of omega'(z_k) below which two nodes are treated as colliding.
NEAR_DUP = 1e-13


def default_shift(n: int) -> int:
    """Balanced window shift floor(n/2): Lambda_{-l,l} for n=2l+1, Lambda_{-l,l-1} for n=2l."""
    return n // 2


def _check_nodes(nodes) -> np.ndarray:
    z = np.asarray(nodes, dtype=np.complex128).ravel()
    if len(z) == 0:
        raise DomainError("need at least one node")
    if len(np.unique(z)) != len(z):
        raise DuplicateNode("interpolation nodes must be pairwise distinct")
    if len(z) > 1:
        d = np.abs(z[:, None] - z[None, :]) + np.eye(len(z))
        if d.min() < NEAR_DUP:
            raise NearDuplicateNode("two nodes closer than 1e-13")
    return z


@dataclass(frozen=True)
class HermiteData:
    """Nodes with multiplicities nu_k and jets values[k][l] = F^{(l)}(z_k)."""

    nodes: tuple
    multiplicities: tuple
    values: tuple
    p: int

    def __post_init__(self):
        z = tuple(complex(v) for v in np.asarray(self.nodes, dtype=np.complex128).ravel())
        nu = tuple(int(v) for v in self.multiplicities)
        vals = tuple(tuple(complex(x) for x in row) for row in self.values)
        if len(z) != len(nu) or len(z) != len(vals):
            raise DomainError("nodes, multiplicities and values must have equal length")
        for k, (n, row) in enumerate(zip(nu, vals)):
            if n < 1:
                raise DomainError(f"multiplicity of node {k} must be positive")
            if len(row) != n:
                raise DomainError(f"node {k} has {len(row)} values but multiplicity {n}")
        r = sum(nu)
        if not 0 <= self.p <= r - 1:
            raise DomainError(f"shift p={self.p} outside [0, {r - 1}]")
        object.__setattr__(self, "nodes", z)
        object.__setattr__(self, "multiplicities", nu)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "p", int(self.p))

    @property
    def r(self) -> int:
        return sum(self.multiplicities)

    @classmethod
    def from_function(cls, nodes, multiplicities, func, p: int | None = None) -> "HermiteData":
        """Sample ``func(z, order)`` for every jet entry."""
        nu = [int(v) for v in multiplicities]
        vals = [[func(complex(z), l) for l in range(n)] for z, n in zip(np.ravel(nodes), nu)]
        r = sum(nu)
        return cls(tuple(np.ravel(nodes)), tuple(nu), tuple(vals), default_shift(r) if p is None else p)


@dataclass(frozen=True)
class FundamentalSet:
    """L[k][l] for every node k and derivative order l < nu_k."""

    L: tuple
    nodes: tuple
    multiplicities: tuple
    p: int

    @property
    def r(self) -> int:
        return sum(self.multiplicities)

    @property
    def window(self) -> tuple:
        return (-self.p, self.r - self.p - 1)

    def flat(self) -> list:
        return [f for row in self.L for f in row]


def laurent_vandermonde(nodes, p: int, r: int | None = None) -> np.ndarray:
    """V[k, i] = z_k ** (i - p) for the window Lambda_{-p, r-p-1}."""
    z = np.asarray(nodes, dtype=np.complex128).ravel()
    r = len(z) if r is None else r
    return z[:, None] ** np.arange(-p, r - p)[None, :].astype(np.float64)


def _lagrange_setup(nodes, p_tilde):
    z = _check_nodes(nodes)
    m = len(z)
    pt = default_shift(m) if p_tilde is None else int(p_tilde)
    if not 0 <= pt <= m - 1:
        raise DomainError(f"p_tilde={pt} outside [0, {m - 1}]")
    if m > 1:
        # omega'(z_k) = prod_{j != k} (z_k - z_j), evaluated as a product of differences
        d = z[:, None] - z[None, :] + np.eye(m)
        dw = np.abs(np.prod(d, axis=1))
        if dw.min() < NEAR_DUP * dw.max():
            raise NearDuplicateNode("omega'(z_k) is numerically zero")
    return z, pt


def lagrange_fundamentals(nodes, p_tilde: int | None = None) -> FundamentalSet:
    """Fundamental polynomials l_k with l_k(z_j) = delta_kj in Lambda_{-p_tilde, m-p_tilde-1}.

    Coefficients come from solving the Laurent-Vandermonde system, which on
    clustered nodes keeps about two more digits than expanding
    omega(z) / ((z - z_k) omega'(z_k)) in monomials (see
    ``lagrange_fundamentals_product``).
    """
    z, pt = _lagrange_setup(nodes, p_tilde)
    m = len(z)
    coef = np.linalg.solve(laurent_vandermonde(z, pt), np.eye(m, dtype=np.complex128))
    L = tuple((LaurentPoly(-pt, coef[:, k]),) for k in range(m))
    return FundamentalSet(L, tuple(z), (1,) * m, pt)


def lagrange_fundamentals_product(nodes, p_tilde: int | None = None) -> FundamentalSet:
    """l_k(z) = omega(z) / ((z - z_k) omega'(z_k)) (z_k / z)^p_tilde, expanded in monomials."""
    z, pt = _lagrange_setup(nodes, p_tilde)
    omega = nodal_poly(z)
    quot = [deflate(omega, zk) for zk in z]
    dw = np.array([evaluate(qk, zk) for qk, zk in zip(quot, z)])
    L = tuple((shift(scale(qk, zk ** pt / dk), -pt),) for qk, zk, dk in zip(quot, z, dw))
    return FundamentalSet(L, tuple(z), (1,) * len(z), pt)


def lagrange_laurent(nodes, values, p_tilde: int | None = None) -> LaurentPoly:
    """Interpolant in Lambda_{-p_tilde, m-p_tilde-1} through (nodes, values)."""
    z, pt = _lagrange_setup(nodes, p_tilde)
    vals = np.asarray(values, dtype=np.complex128).ravel()
    if len(vals) != len(z):
        raise DomainError("one value per node is required")
    return LaurentPoly(-pt, np.linalg.solve(laurent_vandermonde(z, pt), vals))


def _power(base: Poly, e: int) -> LaurentPoly:
    out: LaurentPoly = Poly([1.0])
    for _ in range(e):
        out = mul(out, base)
    return out


def _hermite_setup(nodes, multiplicities, p):
    z = _check_nodes(nodes)
    nu = [int(v) for v in multiplicities]
    if len(nu) != len(z) or min(nu) < 1:
        raise DomainError("one positive multiplicity per node is required")
    r = sum(nu)
    if not 0 <= p <= r - 1:
        raise DomainError(f"shift p={p} outside [0, {r - 1}]")
    return z, nu, r


def hermite_fundamentals(nodes, multiplicities, p: int) -> FundamentalSet:
    """Generalized fundamental Lagrange-Laurent polynomials L_{k,l}.

    Column (k,l) of the inverse confluent matrix holds the coefficients of
    L_{k,l}.  The downward recursion (``hermite_fundamentals_recursive``)
    gives the same functions but loses a few digits on clustered nodes.
    """
    z, nu, r = _hermite_setup(nodes, multiplicities, p)
    inv = np.linalg.solve(confluent_matrix(z, nu, p), np.eye(r, dtype=np.complex128))
    rows, col = [], 0
    for n in nu:
        rows.append(tuple(LaurentPoly(-p, inv[:, col + l]) for l in range(n)))
        col += n
    return FundamentalSet(tuple(rows), tuple(z), tuple(nu), int(p))


def hermite_fundamentals_recursive(nodes, multiplicities, p: int) -> FundamentalSet:
    """L_{k,l} from the downward recursion on the auxiliary functions l_{k,l}."""
    z, nu, r = _hermite_setup(nodes, multiplicities, p)
    rows = []
    for k, zk in enumerate(z):
        g: LaurentPoly = Poly([zk ** p])
        for j, zj in enumerate(z):
            if j != k:
                g = mul(g, _power(Poly([-zj / (zk - zj), 1.0 / (zk - zj)]), nu[j]))
        g = shift(g, -p)
        lin = Poly([-zk, 1.0])
        aux = [scale(mul(_power(lin, l), g), 1.0 / math.factorial(l)) for l in range(nu[k])]
        L = [None] * nu[k]
        for l in range(nu[k] - 1, -1, -1):
            f = aux[l]
            for s in range(l + 1, nu[k]):
                c = evaluate(aux[l].derivative(s), zk)
                f = add(f, scale(L[s], -c))
            L[l] = f
        rows.append(tuple(L))
    return FundamentalSet(tuple(rows), tuple(z), tuple(nu), int(p))


def combine(fs: FundamentalSet, values) -> LaurentPoly:
    """sum_k sum_l values[k][l] L_{k,l} as one Laurent polynomial."""
    a, b = fs.window
    c = np.zeros(b - a + 1, dtype=np.complex128)
    for row, vrow in zip(fs.L, values):
        if len(vrow) != len(row):
            raise DomainError("values do not match the multiplicities")
        for f, v in zip(row, vrow):
            c += complex(v) * f.window_coeffs(a, b)
    return LaurentPoly(a, c)


def hermite_laurent(data: HermiteData) -> LaurentPoly:
    """The unique P in Lambda_{-p, r-p-1} with P^{(l)}(z_k) = values[k][l]."""
    _hermite_setup(data.nodes, data.multiplicities, data.p)
    A = confluent_matrix(data.nodes, data.multiplicities, data.p)
    rhs = np.array([v for row in data.values for v in row], dtype=np.complex128)
    return LaurentPoly(-data.p, np.linalg.solve(A, rhs))


def confluent_matrix(nodes, multiplicities, p: int) -> np.ndarray:
    """Rows: derivative functionals at the nodes applied to z^{-p} .. z^{r-p-1}."""
    nu = [int(v) for v in multiplicities]
    r = sum(nu)
    ex = np.arange(-p, r - p)
    rows = []
    for zk, n in zip(np.ravel(nodes), nu):
        for l in range(n):
            fall = np.ones(r)
            for s in range(l):
                fall = fall * (ex - s)
            rows.append(fall * complex(zk) ** (ex - l).astype(np.float64))
    return np.array(rows, dtype=np.complex128)


def hermite_laurent_recursive(data: HermiteData) -> LaurentPoly:
    """Same interpolant assembled from the recursive fundamentals (cross-check)."""
    fs = hermite_fundamentals_recursive(data.nodes, data.multiplicities, data.p)
    return combine(fs, data.values)


def duality_matrix(fs: FundamentalSet) -> np.ndarray:
    """[L_{k,l}^{(sigma)}(z_j)] with rows (k,l) and columns (j,sigma)."""
    cols = [(zj, s) for zj, n in zip(fs.nodes, fs.multiplicities) for s in range(n)]
    out = np.empty((fs.r, fs.r), dtype=np.complex128)
    for i, f in enumerate(fs.flat()):
        for c, (zj, s) in enumerate(cols):
            out[i, c] = evaluate(f.derivative(s), zj)
    return out


def jets(values_fn, nodes: Sequence[complex], multiplicities) -> list:
    """Helper: [[F^{(l)}(z_k) for l < nu_k] for k] from values_fn(z, order)."""
    return [[values_fn(complex(z), l) for l in range(int(n))] for z, n in zip(nodes, multiplicities)]
