"""Mixed interpolation-regression approximant L = P + (omega / z^p) Q.

P interpolates F on the mimic nodes.  Q, of degree r - m - 1, is the least
squares fit of G = (F - P) z^p / omega on the discarded grid nodes.  The
regression dimension r - m comes from the most uniform subset of the
discarded nodes, scored by the ratio of largest to smallest circular gap.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np
from scipy.linalg import solve_triangular

from . import _kernels
from .errors import ConfigError, DomainError, RankDeficiency, TooFewNodes
from .interp import HermiteData, default_shift, hermite_laurent, lagrange_laurent
from .laurent import LaurentPoly, Poly, add, evaluate, mul, nodal_poly, shift
from .paraorth import TWO_PI, NodeConfiguration, UnitNode

WEIGHTINGS = ("omega", "none")


def transformed_residual_target(F_values, P: LaurentPoly, omega: Poly, p: int, discarded) -> np.ndarray:
    """G(z_s) = (F(z_s) - P(z_s)) z_s^p / omega(z_s) on the discarded nodes."""
    z = np.asarray(discarded, dtype=np.complex128).ravel()
    w = evaluate(omega, z)
    if np.any(np.abs(w) < 1e-13):
        raise DomainError("a discarded node is a root of omega")
    return (np.asarray(F_values, dtype=np.complex128) - evaluate(P, z)) * z ** p / w


def _design(discarded, omega, p, degree, weighting):
    z = np.asarray(discarded, dtype=np.complex128).ravel()
    H = z[:, None] ** np.arange(degree + 1)[None, :]
    if weighting == "omega":
        W = evaluate(omega, z) / z ** p
    elif weighting == "none":
        W = np.ones(len(z), dtype=np.complex128)
    else:
        raise ConfigError(f"weighting must be one of {WEIGHTINGS}")
    return H, W


def weighted_least_squares(G_values, discarded, omega: Poly, p: int, degree: int,
                           weighting: str = "omega") -> np.ndarray:
    """Coefficients C_0..C_degree of Q minimizing the weighted residual on the discarded nodes.

    With ``weighting="omega"`` row s is scaled by omega(z_s)/z_s^p, so the
    objective is sum |F - L|^2.  ``"none"`` fits G itself.
    """
    if degree < 0:
        return np.zeros(0, dtype=np.complex128)
    G = np.asarray(G_values, dtype=np.complex128).ravel()
    if degree + 1 > len(G):
        raise DomainError(f"degree {degree} needs at least {degree + 1} discarded nodes")
    H, W = _design(discarded, omega, p, degree, weighting)
    A = H * W[:, None]
    b = G * W
    Qm, R = np.linalg.qr(A, mode="reduced")
    d = np.abs(np.diag(R))
    if d.min() <= np.finfo(float).eps * len(G) * d.max():
        raise RankDeficiency("least-squares design matrix is rank deficient")
    return solve_triangular(R, Qm.conj().T @ b)


def normal_equations(G_values, discarded, omega: Poly, p: int, degree: int,
                     weighting: str = "omega") -> np.ndarray:
    """C = (H^* H)^{-1} H^* G with the same row weighting (cross-check path)."""
    if degree < 0:
        return np.zeros(0, dtype=np.complex128)
    H, W = _design(discarded, omega, p, degree, weighting)
    A = H * W[:, None]
    b = np.asarray(G_values, dtype=np.complex128) * W
    AH = A.conj().T
    return np.linalg.solve(AH @ A, AH @ b)


def uniformity_score(angles) -> float:
    """Largest over smallest circular gap of the given angles (1 for a regular polygon)."""
    a = np.sort(np.mod(np.asarray(angles, dtype=np.float64), TWO_PI))
    if len(a) < 3:
        raise TooFewNodes("the uniformity score needs at least three nodes")
    gaps = np.diff(np.concatenate([a, [a[0] + TWO_PI]]))
    if gaps.min() <= 0.0:
        raise DomainError("repeated angle in uniformity score")
    return float(gaps.max() / gaps.min())


@dataclass(frozen=True)
class SubpartitionResult:
    """Chosen positions within the discarded list, their K and size."""

    indices: tuple
    K: float
    cardinality: int
    greedy: bool = False
    per_cardinality: dict = field(default_factory=dict, compare=False)


def _angles_of(nodes) -> np.ndarray:
    if len(nodes) and isinstance(nodes[0], UnitNode):
        return np.array([n.theta for n in nodes])
    arr = np.asarray(nodes)
    if np.iscomplexobj(arr):
        return np.mod(np.angle(arr), TWO_PI)
    return np.mod(arr.astype(np.float64), TWO_PI)


R_SELECTIONS = ("min_k", "max_card_under_k_threshold")


def _pick(per_card: dict, rule: str, k_threshold: float) -> int:
    cards = sorted(per_card)
    if rule == "min_k":
        best = None
        for c in cards:
            k = per_card[c][0]
            if best is None or k < per_card[best][0] * (1 - _kernels.K_RTOL):
                best = c
            elif k <= per_card[best][0] * (1 + _kernels.K_RTOL):
                best = c  # equal K: larger cardinality wins
        return best
    if rule == "max_card_under_k_threshold":
        ok = [c for c in cards if per_card[c][0] <= k_threshold]
        if not ok:
            return _pick(per_card, "min_k", k_threshold)
        return max(ok)
    raise ConfigError(f"unknown r_selection rule {rule!r}")


def best_subpartition(discarded, budget: int = 1 << 20, max_size: int | None = 5,
                      r_selection: str = "min_k", k_threshold: float = 1.5) -> SubpartitionResult:
    """Most uniform subset (size 3..max_size) of the discarded nodes.

    Ordering is: smallest K, then larger cardinality, then lexicographically
    smallest positions.  When the number of candidate subsets exceeds
    ``budget`` a greedy search is used and the result is flagged.
    """
    ang = _angles_of(discarded)
    n = len(ang)
    if n < 3:
        raise TooFewNodes("need at least three discarded nodes")
    order = np.argsort(ang, kind="stable")
    srt = ang[order]
    top = n if max_size is None else min(int(max_size), n)
    if top < 3:
        raise ConfigError("max_size must be at least 3")
    work = sum(comb(n, c) for c in range(3, top + 1))
    if work > budget:
        warnings.warn(f"{work} subsets exceed the budget {budget}; using greedy search", RuntimeWarning)
        return _greedy(srt, order, top, r_selection, k_threshold)
    per_card = {}
    for c in range(3, top + 1):
        k, idx = _kernels.subset_search(srt, c, TWO_PI)
        if np.isfinite(k):
            per_card[c] = (k, tuple(sorted(int(order[i]) for i in idx)))
    c = _pick(per_card, r_selection, k_threshold)
    return SubpartitionResult(per_card[c][1], per_card[c][0], c, False, per_card)


def _greedy(srt, order, top, r_selection, k_threshold) -> SubpartitionResult:
    n = len(srt)
    k3, seed = _kernels.subset_search(srt, 3, TWO_PI)
    chosen = [int(i) for i in seed]
    per_card = {3: (k3, tuple(sorted(int(order[i]) for i in chosen)))}
    while len(chosen) < top:
        best = None
        for j in range(n):
            if j in chosen:
                continue
            k = uniformity_score(srt[sorted(chosen + [j])])
            if best is None or k < best[0] * (1 - _kernels.K_RTOL):
                best = (k, j)
        if best is None:
            break
        chosen.append(best[1])
        per_card[len(chosen)] = (best[0], tuple(sorted(int(order[i]) for i in chosen)))
    c = _pick(per_card, r_selection, k_threshold)
    return SubpartitionResult(per_card[c][1], per_card[c][0], c, True, per_card)


def choose_r(config: NodeConfiguration, **kwargs) -> tuple:
    """(r, subpartition) for a configuration; r = N when fewer than three nodes are discarded."""
    n_disc = config.N - config.m
    if n_disc < 3:
        warnings.warn("fewer than three discarded nodes; using r = N", RuntimeWarning)
        return config.N, None
    sub = best_subpartition(config.discarded_z, **kwargs)
    return config.m + sub.cardinality, sub


@dataclass(frozen=True)
class MixedApproximant:
    """L(z) = P(z) + omega(z)/z^p Q(z)."""

    P: LaurentPoly
    omega: Poly
    p: int
    Q: Poly
    r: int
    m: int
    weighting: str = "omega"
    basis: str = "monomial"

    def laurent(self) -> LaurentPoly:
        return add(self.P, shift(mul(self.omega, self.Q), -self.p))

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        zz = np.asarray(z, dtype=np.complex128)
        out = evaluate(self.P, zz)
        if not self.Q.is_zero():
            out = out + evaluate(self.omega, zz) * zz ** (-self.p) * evaluate(self.Q, zz)
        return out

    @property
    def window(self) -> tuple:
        return (-self.p, self.r - self.p - 1)

    def integrate(self, mu) -> complex:
        from .quad import integrate_laurent
        return integrate_laurent(mu, self.laurent())

    def to_json(self) -> str:
        def pair(c):
            return [[float(v.real), float(v.imag)] for v in c]
        return json.dumps({
            "P": {"low": self.P.low, "coeffs": pair(self.P.coeffs)},
            "omega": pair(self.omega.coeffs),
            "p": self.p,
            "Q": pair(self.Q.coeffs),
            "r": self.r,
            "m": self.m,
            "weighting": self.weighting,
            "basis": self.basis,
        })

    @classmethod
    def from_json(cls, text: str) -> "MixedApproximant":
        d = json.loads(text)

        def cx(rows):
            return np.array([complex(a, b) for a, b in rows], dtype=np.complex128)
        return cls(LaurentPoly(d["P"]["low"], cx(d["P"]["coeffs"])), Poly(cx(d["omega"])), int(d["p"]),
                   Poly(cx(d["Q"])), int(d["r"]), int(d["m"]), d.get("weighting", "omega"),
                   d.get("basis", "monomial"))


def build_mixed(values, config: NodeConfiguration, r: int | None = None, p: int | None = None,
                p_tilde: int | None = None, hermite: HermiteData | None = None,
                weighting: str = "omega", **subpartition_kw) -> MixedApproximant:
    """Assemble L from grid samples ``values`` (length N, grid order) or a callable F(z).

    ``r`` defaults to the subpartition choice; ``p`` to floor(r/2) and
    ``p_tilde`` to floor(m/2).
    """
    if callable(values):
        values = values(config.grid_z)
    vals = np.asarray(values, dtype=np.complex128).ravel()
    if len(vals) != config.N:
        raise DomainError(f"expected {config.N} grid samples, got {len(vals)}")
    m = config.m
    if r is None:
        r, _ = choose_r(config, **subpartition_kw)
    if not m <= r <= config.N:
        raise DomainError(f"need m <= r <= N, got m={m}, r={r}, N={config.N}")
    p = default_shift(r) if p is None else int(p)
    zs = config.selected_z
    if hermite is None:
        P = lagrange_laurent(zs, vals[list(config.selected_index)], p_tilde)
    else:
        P = hermite_laurent(hermite)
    omega = nodal_poly(zs)
    zd = config.discarded_z
    deg = r - m - 1
    if deg >= 0:
        G = transformed_residual_target(vals[list(config.discarded_index)], P, omega, p, zd)
        C = weighted_least_squares(G, zd, omega, p, deg, weighting)
    else:
        C = np.zeros(0, dtype=np.complex128)
    return MixedApproximant(P, omega, p, Poly(C), r, m, weighting)


def discrete_error(values_at, approx: Callable, nodes) -> float:
    """Root-sum-of-squares of F - approx over ``nodes``."""
    z = np.asarray(nodes, dtype=np.complex128)
    return float(np.linalg.norm(np.asarray(values_at, dtype=np.complex128) - approx(z)))


def weighted_q_norm(approx: MixedApproximant, nodes) -> float:
    """||Q||_{2,omega}: the size of the correction term on the given nodes."""
    z = np.asarray(nodes, dtype=np.complex128)
    if approx.Q.is_zero():
        return 0.0
    return float(np.linalg.norm(evaluate(approx.omega, z) * z ** (-approx.p) * evaluate(approx.Q, z)))


__all__ = [
    "MixedApproximant", "SubpartitionResult", "best_subpartition", "build_mixed", "choose_r",
    "discrete_error", "normal_equations", "transformed_residual_target", "uniformity_score",
    "weighted_least_squares", "weighted_q_norm", "WEIGHTINGS",
]
