"""Quadrature rules on the unit circle and reference integrals.

Convention: mu_k is the integral of exp(-i k theta), so the integral of z**j
against mu is mu_{-j}.  For Rogers-Szego both are q**(j*j/2).
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate as _integrate
from scipy.special import roots_hermite

from . import measure as _measure
from .errors import DerivativeUnavailable, DomainError, MomentOutOfRange, NoConvergence
from .interp import FundamentalSet, confluent_matrix, default_shift, lagrange_fundamentals, laurent_vandermonde
from .laurent import LaurentPoly
from .paraorth import TWO_PI, NodeConfiguration, grid_angles
from .regress import MixedApproximant


@dataclass(frozen=True)
class QuadratureRule:
    """sum_k sum_l w[k][l] F^{(l)}(z_k) + sum_l C_l eta_l.

    ``weights`` holds the order-0 weights; ``derivative_weights`` the
    higher-order ones when the rule uses derivatives.
    """

    nodes: np.ndarray
    weights: np.ndarray
    window: tuple
    derivative_weights: Optional[tuple] = None
    regression_terms: Optional[tuple] = None

    def apply(self, values, derivatives=None) -> complex:
        s = complex(np.dot(self.weights, np.asarray(values, dtype=np.complex128)))
        if self.derivative_weights is not None:
            if derivatives is None:
                raise DerivativeUnavailable("this rule needs derivative values")
            for wrow, drow in zip(self.derivative_weights, derivatives):
                s += sum(complex(w) * complex(d) for w, d in zip(wrow, drow))
        if self.regression_terms is not None:
            C, eta = self.regression_terms
            s += complex(np.dot(C, eta))
        return s

    def weight_sum(self) -> complex:
        return complex(np.sum(self.weights))

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["theta", "weight_re", "weight_im"])
        for z, lam in zip(self.nodes, self.weights):
            w.writerow(["%.15g" % np.mod(np.angle(z), TWO_PI), "%.15g" % lam.real, "%.15g" % lam.imag])
        return out.getvalue()


@dataclass(frozen=True)
class Integrand:
    """A test function on the circle.

    ``derivative(z, order)`` gives analytic derivatives in z.  ``theta_func``,
    when present, defines the function through its angle, which pins values
    at a jump; ``breakpoints`` lists such jumps in [0, 2 pi).
    """

    name: str
    value: Callable
    derivative: Optional[Callable] = None
    theta_func: Optional[Callable] = None
    breakpoints: tuple = field(default=())

    @property
    def smooth(self) -> bool:
        return self.theta_func is None

    def at_angles(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=np.float64)
        if self.theta_func is not None:
            return np.asarray(self.theta_func(th), dtype=np.complex128)
        return np.asarray(self.value(np.exp(1j * th)), dtype=np.complex128)

    def sample(self, config: NodeConfiguration) -> np.ndarray:
        return self.at_angles(config.grid_theta)

    def jet(self, z: complex, order: int) -> complex:
        if order == 0:
            return complex(self.value(complex(z)))
        if self.derivative is None:
            raise DerivativeUnavailable(f"{self.name} has no derivatives")
        return complex(self.derivative(complex(z), order))


def integrate_laurent(mu, f: LaurentPoly) -> complex:
    """Exact integral of a Laurent polynomial: sum_j c_j mu_{-j}."""
    if f.is_zero():
        return 0j
    ex = np.arange(f.low, f.low + len(f.coeffs))
    try:
        mom = _measure.moments(mu, -ex)
    except (KeyError, MomentOutOfRange) as exc:
        raise MomentOutOfRange(str(exc)) from exc
    return complex(np.dot(f.coeffs, mom))


def _require_rs(mu):
    if not isinstance(mu, _measure.RogersSzego):
        raise DomainError("this closed form holds for the Rogers-Szego weight only")


def interpolatory_weights_uniform(mu, N: int, r_exp: int, s_exp: int, theta0: float) -> np.ndarray:
    """lambda_j = z_j^r / (N tau) sum_{k=1}^N q^{(k-s-1)^2/2} z_j^k, tau = e^{i N theta0}.

    The rule on z_j = e^{i(theta0 + 2 pi j/N)} is exact on Lambda_{-r, s}.
    """
    _require_rs(mu)
    if r_exp + s_exp + 1 != N or r_exp < 0 or s_exp < 0:
        raise DomainError(f"need r + s + 1 = N, got r={r_exp}, s={s_exp}, N={N}")
    th = grid_angles(N, theta0)
    z = np.exp(1j * th)
    tau = np.exp(1j * N * theta0)
    k = np.arange(1, N + 1)
    c = np.exp(0.5 * (k - s_exp - 1) ** 2 * math.log(mu.q))
    zk = np.exp(1j * np.outer(th, k))
    return z ** r_exp / (N * tau) * (zk @ c)


def cmv_weights_closed(mu, N: int, theta0: float, epsilon: int = 1) -> np.ndarray:
    """Cosine-sum weights of the balanced uniform rule.

    N = 2l+1: exact on Lambda_{-l,l}.  N = 2l: epsilon=+1 gives Lambda_{-l,l-1},
    epsilon=-1 gives Lambda_{-(l-1),l}.
    """
    _require_rs(mu)
    if epsilon not in (1, -1):
        raise DomainError("epsilon must be +1 or -1")
    j = np.arange(N)
    th = grid_angles(N, theta0)
    lq = math.log(mu.q)
    ell = N // 2
    kmax = ell if N % 2 else ell - 1
    k = np.arange(1, kmax + 1)
    s = 1.0 + 2.0 * (np.cos(np.outer(th, k)) @ np.exp(0.5 * k ** 2 * lq)) + 0j
    if N % 2 == 0:
        extra = math.exp(0.5 * ell * ell * lq) * (math.cos(ell * theta0) + 1j * epsilon * math.sin(ell * theta0))
        s = s + (-1.0) ** j * extra
    return s / N


def uniform_window(N: int, epsilon: int = 1) -> tuple:
    """Exactness window of the balanced uniform rule."""
    ell = N // 2
    if N % 2:
        return (-ell, ell)
    return (-ell, ell - 1) if epsilon == 1 else (-(ell - 1), ell)


def uniform_rule(mu, N: int, theta0: float, epsilon: int = 1) -> QuadratureRule:
    """Interpolatory rule on Z_N with the balanced window."""
    a, b = uniform_window(N, epsilon)
    z = np.exp(1j * grid_angles(N, theta0))
    if isinstance(mu, _measure.RogersSzego):
        w = interpolatory_weights_uniform(mu, N, -a, b, theta0)
    else:
        w = interpolatory_rule(mu, z, -a).weights
    return QuadratureRule(z, w, (a, b))


def interpolatory_rule(mu, nodes, p_tilde: int | None = None) -> QuadratureRule:
    """Weights lambda_k = I_mu(l_k) of the Lagrange-Laurent fundamentals.

    Integrating l_k = sum_i (V^{-1})_{ik} z^{i-p} against mu gives
    lambda = V^{-T} m with m_i = mu_{p-i}; the transposed system is solved
    directly.
    """
    z = np.asarray(nodes, dtype=np.complex128).ravel()
    m = len(z)
    pt = default_shift(m) if p_tilde is None else int(p_tilde)
    fs_window = (-pt, m - pt - 1)
    lagrange_fundamentals(z, pt)  # validates nodes and shift
    ex = np.arange(-pt, m - pt)
    w = np.linalg.solve(laurent_vandermonde(z, pt).T, _measure.moments(mu, -ex))
    return QuadratureRule(z, w, fs_window)


def rule_on_mimic_nodes(mu, config: NodeConfiguration, p_tilde: int | None = None) -> QuadratureRule:
    """Interpolatory rule on the mimic nodes Upsilon_m, in selection order."""
    return interpolatory_rule(mu, config.selected_z, p_tilde)


def mixed_rule(mu, approx: MixedApproximant, fundamentals: FundamentalSet) -> QuadratureRule:
    """omega_{k,l} = I(L_{k,l}) for the interpolatory part, eta_l = I(omega z^{l-p}) for Q.

    The omega_{k,l} come from the transposed confluent system against the
    moments rather than from integrating each L_{k,l}: same values, but the
    rule stays exact to roundoff on clustered nodes.
    """
    nu = fundamentals.multiplicities
    pf = fundamentals.p
    ex = np.arange(-pf, sum(nu) - pf)
    flat = np.linalg.solve(confluent_matrix(fundamentals.nodes, nu, pf).T, _measure.moments(mu, -ex))
    w, col = [], 0
    for n in nu:
        w.append(tuple(complex(x) for x in flat[col:col + n]))
        col += n
    base = np.array([row[0] for row in w])
    higher = tuple(tuple(row[1:]) for row in w) if max(nu) > 1 else None
    deg = len(approx.Q.coeffs)
    oc = approx.omega.coeffs
    eta = np.array([integrate_laurent(mu, LaurentPoly(l - approx.p, oc)) for l in range(deg)])
    C = np.zeros(deg, dtype=np.complex128)
    C[:len(approx.Q.coeffs)] = approx.Q.coeffs
    return QuadratureRule(np.asarray(fundamentals.nodes), base, approx.window, higher, (C, eta))


def _theta_density_integral(mu, F: Integrand, accuracy: float) -> complex:
    q = mu.q
    cuts = sorted({0.0, *[float(np.mod(b, TWO_PI)) for b in F.breakpoints], TWO_PI})

    def part(fn):
        total = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a <= 0:
                continue
            # integrate strictly inside so jump values do not matter
            with warnings.catch_warnings():
                # the imaginary part of a real integrand triggers a spurious roundoff warning
                warnings.simplefilter("ignore", _integrate.IntegrationWarning)
                val, _ = _integrate.quad(fn, a, b, epsabs=accuracy * 1e-2, epsrel=1e-14, limit=400)
            total += val
        return total

    def re(t):
        return float(np.real(F.at_angles(np.array([t]))[0])) * _measure.weight_density(q, t)

    def im(t):
        return float(np.imag(F.at_angles(np.array([t]))[0])) * _measure.weight_density(q, t)

    return complex(part(re), part(im))


def _gauss_hermite(mu, F: Integrand, accuracy: float, n0: int, cap: int):
    s = math.sqrt(2.0 * math.log(1.0 / mu.q))
    prev = None
    n = n0
    gap = math.inf
    while n <= cap:
        t, w = roots_hermite(n)
        cur = complex(np.dot(w, F.at_angles(s * t)) / math.sqrt(math.pi))
        if prev is not None:
            gap = abs(cur - prev)
            if gap < accuracy:
                return cur
        prev = cur
        n *= 2
    raise NoConvergence(f"Gauss-Hermite did not settle below {accuracy:g}", best=prev, gap=gap)


def _trapezoid(mu, F: Integrand, accuracy: float, n0: int = 64, cap: int = 1 << 16) -> complex:
    prev = None
    n = n0
    gap = math.inf
    while n <= cap:
        th = TWO_PI * np.arange(n) / n
        cur = complex(np.mean(F.at_angles(th) * _measure.weight_density(mu.q, th)) * TWO_PI)
        if prev is not None:
            gap = abs(cur - prev)
            if gap < accuracy:
                return cur
        prev = cur
        n *= 2
    raise NoConvergence(f"trapezoid rule did not settle below {accuracy:g}", best=prev, gap=gap)


def reference_integral(mu, F: Integrand, accuracy: float = 1e-14, method: str = "auto",
                       n0: int = 64, cap: int = 4096) -> complex:
    """High-accuracy value of the integral of F against the Rogers-Szego weight.

    ``auto`` uses Gauss-Hermite on the real-line (unwrapped Gaussian) form or
    the periodic trapezoid rule against the theta-series density for smooth
    F, whichever suits the width of the Gaussian, and adaptive integration of
    the density split at the jumps for piecewise F.
    """
    _require_rs(mu)
    if method == "auto":
        if not F.smooth:
            return _theta_density_integral(mu, F, accuracy)
        # a narrow Gaussian suits Gauss-Hermite; a wide one wraps many times
        # and the periodic trapezoid rule converges faster
        wide = math.log(1.0 / mu.q) > 0.5
        order = (_trapezoid, _gauss_hermite) if wide else (_gauss_hermite, _trapezoid)
        try:
            return order[0](mu, F, accuracy, n0, cap if order[0] is _gauss_hermite else 1 << 16)
        except NoConvergence:
            return order[1](mu, F, accuracy, n0, cap if order[1] is _gauss_hermite else 1 << 16)
    if method == "hermite":
        return _gauss_hermite(mu, F, accuracy, n0, cap)
    if method == "theta":
        return _theta_density_integral(mu, F, accuracy)
    if method == "trapezoid":
        return _trapezoid(mu, F, accuracy)
    raise DomainError(f"unknown method {method!r}")


def exp_series_integral(q: float, scale: float = 1.0, terms: int = 80) -> float:
    """Integral of exp(scale z) for Rogers-Szego: sum_k scale^k q^{k^2/2} / k!."""
    return float(sum(scale ** k * q ** (k * k / 2) / math.factorial(k) for k in range(terms)))


def pole_series_integral(q: float, alpha: complex, terms: int = 400) -> complex:
    """Integral of 1/(z - alpha) for |alpha| < 1: sum_k alpha^k q^{(k+1)^2/2}."""
    alpha = complex(alpha)
    if abs(alpha) >= 1:
        raise DomainError("series needs |alpha| < 1")
    k = np.arange(terms)
    return complex(np.sum(alpha ** k * np.exp(0.5 * (k + 1) ** 2 * math.log(q))))


def step_integral(q: float, height: float = 10.0) -> float:
    """Closed form for the step integrand: height * (2 P[0 <= theta < pi/2] - 1)."""
    from scipy.special import ndtr
    s = math.sqrt(math.log(1.0 / q))
    j = np.arange(-40, 41)
    prob = float(np.sum(ndtr((math.pi / 2 - TWO_PI * j) / s) - ndtr((-TWO_PI * j) / s)))
    return height * (2.0 * prob - 1.0)


# Tolerance used to pin the step function at its jumps.
ANGLE_SNAP = 1e-12


def step_theta(theta, height: float = 10.0, jump: float = math.pi / 2) -> np.ndarray:
    """height on [0, jump), 0 at jump, -height on (jump, 2 pi); periodic via mod."""
    t = np.mod(np.asarray(theta, dtype=np.float64), TWO_PI)
    t = np.where(np.abs(t - TWO_PI) <= ANGLE_SNAP, 0.0, t)
    at_jump = np.abs(t - jump) <= ANGLE_SNAP
    out = np.where(t < jump, height, -height)
    return np.where(at_jump, 0.0, out)


def _pole(alpha: complex, name: str) -> Integrand:
    def value(z):
        return 1.0 / (np.asarray(z) - alpha)

    def deriv(z, order):
        return (-1.0) ** order * math.factorial(order) / (z - alpha) ** (order + 1)
    return Integrand(name, value, deriv)


def builtin_integrands() -> dict:
    """Test functions: one, exp, exp_half, step, pole_near, pole_far."""
    return {
        "one": Integrand("one", lambda z: np.ones_like(np.asarray(z, dtype=np.complex128)),
                         lambda z, order: 0.0),
        "exp": Integrand("exp", np.exp, lambda z, order: np.exp(z)),
        "exp_half": Integrand("exp_half", lambda z: np.exp(np.asarray(z) / 2),
                              lambda z, order: 0.5 ** order * np.exp(z / 2)),
        "step": Integrand("step", lambda z: step_theta(np.angle(z)), None, step_theta,
                          (0.0, math.pi / 2)),
        "pole_near": _pole(0.8 + 0.5j, "pole_near"),
        "pole_far": _pole((1 + 1j) / 5, "pole_far"),
    }


def get_integrand(name: str) -> Integrand:
    table = builtin_integrands()
    if name not in table:
        raise DomainError(f"unknown integrand {name!r}; choose from {sorted(table)}")
    return table[name]


__all__ = [
    "Integrand", "QuadratureRule", "builtin_integrands", "cmv_weights_closed", "exp_series_integral",
    "get_integrand", "integrate_laurent", "interpolatory_rule", "interpolatory_weights_uniform",
    "mixed_rule", "pole_series_integral", "reference_integral", "rule_on_mimic_nodes", "step_integral",
    "step_theta", "uniform_rule", "uniform_window",
]
