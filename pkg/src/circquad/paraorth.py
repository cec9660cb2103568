"""Para-orthogonal polynomials, their zeros on the circle, and mimic-node selection.

The zeros of B_m(z, tau) = rho_m + tau rho_m^* are the points of the circle
where the Blaschke product F_m = -rho_m / rho_m^* equals tau.  The argument
of F_m(e^{i theta}) increases strictly by 2 pi m over one turn, so the zeros
are found by tracking that phase and bisecting every crossing.  This stays
accurate at large m and q near 1, where companion-matrix roots of the
expanded polynomial lose most of their digits.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import measure as _measure
from .errors import DomainError, InfeasibleSelection, NumericalError, ZeroFindingError
from .laurent import Poly, evaluate

TWO_PI = 2.0 * math.pi
# Two candidate grid nodes closer than this in distance count as a tie.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class UnitNode:
    z: complex
    theta: float

    @classmethod
    def from_theta(cls, theta: float) -> "UnitNode":
        return cls(complex(np.exp(1j * theta)), float(np.mod(theta, TWO_PI)))

    @classmethod
    def from_z(cls, z: complex) -> "UnitNode":
        r = abs(z)
        if abs(r - 1.0) > 1e-12:
            raise DomainError(f"|z| = {r} is not 1")
        z = complex(z) / r
        return cls(z, float(np.mod(np.angle(z), TWO_PI)))


@dataclass(frozen=True)
class NodeConfiguration:
    """Grid Z_N, zeros Xi_m, mimic set Upsilon_m and the discarded nodes.

    ``grid_theta`` keeps the unreduced angles theta0 + 2 pi j / N, which
    matter for integrands defined through mod(theta, 2 pi) at a jump.
    """

    N: int
    m: int
    theta0: float
    tau: complex
    grid_theta: np.ndarray
    zero_theta: np.ndarray
    selected_index: tuple
    discarded_index: tuple = field(default=())

    @property
    def grid_z(self) -> np.ndarray:
        return np.exp(1j * self.grid_theta)

    @property
    def zeros_z(self) -> np.ndarray:
        return np.exp(1j * self.zero_theta)

    @property
    def selected_z(self) -> np.ndarray:
        return self.grid_z[list(self.selected_index)]

    @property
    def discarded_z(self) -> np.ndarray:
        return self.grid_z[list(self.discarded_index)]

    @property
    def grid(self) -> list:
        return [UnitNode.from_theta(t) for t in self.grid_theta]

    @property
    def zeros(self) -> list:
        return [UnitNode.from_theta(t) for t in self.zero_theta]

    @property
    def selected(self) -> list:
        return [UnitNode.from_theta(self.grid_theta[j]) for j in self.selected_index]

    @property
    def discarded(self) -> list:
        return [UnitNode.from_theta(self.grid_theta[j]) for j in self.discarded_index]


def uniform_grid(N: int, theta0: float) -> list:
    """N nodes e^{i(theta0 + 2 pi j / N)}, counterclockwise from theta0."""
    return [UnitNode.from_theta(t) for t in grid_angles(N, theta0)]


def grid_angles(N: int, theta0: float) -> np.ndarray:
    if N < 1:
        raise DomainError("N must be at least 1")
    return theta0 + TWO_PI * np.arange(N) / N


def para_orthogonal(mu, m: int, tau: complex) -> Poly:
    """B_m(z, tau) = rho_m(z) + tau rho_m^*(z)."""
    if m < 1:
        raise DomainError("m must be positive")
    if abs(abs(tau) - 1.0) > 1e-12:
        raise DomainError(f"|tau| = {abs(tau)} is not 1")
    pair = _measure.szego_poly(mu, m)
    return Poly(pair.rho.coeffs) + Poly(pair.rho_star.coeffs) * complex(tau)


def blaschke(mu, m: int, theta) -> np.ndarray:
    """F_m(e^{i theta}) = -rho_m / rho_m^*, evaluated through the recurrence."""
    a, b = _measure.szego_eval(mu, m, np.exp(1j * np.asarray(theta, dtype=np.float64)))
    return -a / b


def anchored_tau(mu, m: int, z0) -> complex:
    """The unit-modulus tau that makes z0 a zero of B_m(z, tau)."""
    z0 = z0.z if isinstance(z0, UnitNode) else complex(z0)
    if abs(abs(z0) - 1.0) > 1e-12:
        raise DomainError("z0 must lie on the unit circle")
    a, b = _measure.szego_eval(mu, m, np.array([z0]))
    if abs(b[0]) < 1e-14:
        raise NumericalError("rho_m^* vanishes at z0")
    return complex(-a[0] / b[0])


def _phase(mu, m, tau, th):
    return np.angle(blaschke(mu, m, th) / tau)


def para_orthogonal_zeros(mu, m: int, theta0: float, tau: complex | None = None,
                          max_refine: int = 40) -> tuple:
    """Zeros of B_m(., tau) as angles in [theta0, theta0 + 2 pi).

    With ``tau=None`` the anchored value tau_m = F_m(e^{i theta0}) is used and
    theta0 itself is the first zero.  Returns (angles, tau).
    """
    if m < 1:
        raise DomainError("m must be positive")
    if tau is None:
        tau = complex(blaschke(mu, m, np.array([theta0]))[0])
    elif abs(abs(tau) - 1.0) > 1e-12:
        raise DomainError(f"|tau| = {abs(tau)} is not 1")
    tau = complex(tau)
    anchored = abs(_phase(mu, m, tau, np.array([theta0]))[0]) < 1e-13
    samples = max(64 * m, 256)
    for _ in range(4):
        th = theta0 + np.linspace(0.0, TWO_PI, samples + 1)
        h = _phase(mu, m, tau, th)
        for _ in range(max_refine):
            dh = np.angle(np.exp(1j * np.diff(h)))
            bad = np.abs(dh) > math.pi / 4
            if not bad.any():
                break
            mids = 0.5 * (th[:-1][bad] + th[1:][bad])
            th = np.sort(np.concatenate([th, mids]))
            h = _phase(mu, m, tau, th)
        if anchored:
            h[0] = 0.0
        lo_idx = np.nonzero((h[:-1] < 0.0) & (h[1:] >= 0.0))[0]
        if anchored:
            lo_idx = lo_idx[(lo_idx > 0) & (lo_idx < len(th) - 2)]
        roots = _bisect(mu, m, tau, th[lo_idx], th[lo_idx + 1])
        if anchored:
            roots = np.concatenate([[theta0], roots])
        if len(roots) == m:
            return roots, tau
        samples *= 4
    raise ZeroFindingError(f"found {len(roots)} zeros of B_{m}, expected {m}")


def _bisect(mu, m, tau, a, b, iters: int = 60) -> np.ndarray:
    """Vectorized bisection of h(theta) on brackets with h(a) < 0 <= h(b)."""
    a = a.copy()
    b = b.copy()
    for _ in range(iters):
        c = 0.5 * (a + b)
        neg = _phase(mu, m, tau, c) < 0.0
        a = np.where(neg, c, a)
        b = np.where(neg, b, c)
        if np.all(b - a <= 4e-16 * np.maximum(1.0, np.abs(b))):
            break
    return 0.5 * (a + b)


def zeros_on_circle(B: Poly, theta0: float, polish: int = 1) -> list:
    """Roots of B by companion eigenvalues plus Newton polishing, projected to |z| = 1.

    Sorted counterclockwise starting at the root nearest e^{i theta0}.
    """
    c = np.asarray(B.coeffs)
    if len(c) < 2:
        return []
    roots = np.roots(c[::-1])
    dB = B.derivative(1)
    for _ in range(polish):
        d = evaluate(dB, roots)
        ok = d != 0
        roots = np.where(ok, roots - evaluate(B, roots) / np.where(ok, d, 1.0), roots)
    dev = np.abs(np.abs(roots) - 1.0)
    if np.any(dev > 1e-6):
        raise ZeroFindingError(f"root off the circle by {dev.max():.3g}")
    rel = np.mod(np.angle(roots) - theta0 + math.pi / (4 * len(roots)), TWO_PI)
    order = np.argsort(rel)
    return [UnitNode.from_z(z / abs(z)) for z in roots[order]]


def _nearest(grid_z: np.ndarray, grid_theta: np.ndarray, theta: float) -> int:
    d = np.abs(grid_z - np.exp(1j * theta))
    dmin = d.min()
    cand = np.nonzero(d <= dmin + TIE_TOL)[0]
    if len(cand) == 1:
        return int(cand[0])
    # midway: pick the counterclockwise neighbour of the zero
    offs = np.mod(grid_theta[cand] - theta + math.pi, TWO_PI) - math.pi
    return int(cand[np.argmax(offs)])


def select_mimic_nodes(grid, zeros) -> list | None:
    """Assign each zero to its nearest grid node; None if two zeros share one.

    ``grid`` and ``zeros`` may be lists of UnitNode or arrays of angles.
    The first zero is identified with grid[0].
    """
    gt = _angles(grid)
    zt = _angles(zeros)
    gz = np.exp(1j * gt)
    picked = [0]
    seen = {0}
    for t in zt[1:]:
        j = _nearest(gz, gt, t)
        if j in seen:
            return None
        seen.add(j)
        picked.append(j)
    return picked


def _angles(nodes) -> np.ndarray:
    if len(nodes) and isinstance(nodes[0], UnitNode):
        return np.array([n.theta for n in nodes])
    return np.asarray(nodes, dtype=np.float64)


def configure(mu, N: int, theta0: float, m: int | None = None) -> NodeConfiguration:
    """Build the configuration for a fixed m, or the maximal feasible one if m is None."""
    if m is None:
        return max_m(mu, N, theta0)
    if not 1 <= m <= N:
        raise DomainError(f"need 1 <= m <= N, got m={m}, N={N}")
    cfg = _try_m(mu, N, theta0, m)
    if cfg is None:
        raise InfeasibleSelection(f"no injective mimic selection for m={m}, N={N}")
    return cfg


def _try_m(mu, N, theta0, m):
    gt = grid_angles(N, theta0)
    zt, tau = para_orthogonal_zeros(mu, m, theta0)
    picked = select_mimic_nodes(gt, zt)
    if picked is None:
        return None
    rest = tuple(j for j in range(N) if j not in set(picked))
    return NodeConfiguration(N=N, m=m, theta0=float(theta0), tau=tau, grid_theta=gt,
                             zero_theta=zt, selected_index=tuple(picked), discarded_index=rest)


def max_m(mu, N: int, theta0: float) -> NodeConfiguration:
    """Scan m = N, N-1, ..., 1 and return the first feasible configuration."""
    if N < 1:
        raise DomainError("N must be at least 1")
    for m in range(N, 0, -1):
        cfg = _try_m(mu, N, theta0, m)
        if cfg is not None:
            return cfg
    raise InfeasibleSelection("m = 1 failed; this cannot happen")  # pragma: no cover


def to_csv(cfg: NodeConfiguration, subset: Sequence[int] = ()) -> str:
    """Rows (theta, role, index); ``subset`` marks discarded nodes kept for regression."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["theta", "role", "index"])
    sel = set(cfg.selected_index)
    sub = set(subset)
    for j, t in enumerate(cfg.grid_theta):
        w.writerow(["%.15g" % np.mod(t, TWO_PI), "grid", j])
    for k, t in enumerate(cfg.zero_theta):
        w.writerow(["%.15g" % np.mod(t, TWO_PI), "zero", k])
    for j in cfg.selected_index:
        w.writerow(["%.15g" % np.mod(cfg.grid_theta[j], TWO_PI), "selected", j])
    for j in cfg.discarded_index:
        w.writerow(["%.15g" % np.mod(cfg.grid_theta[j], TWO_PI), "discarded", j])
    for j in sorted(sub):
        if j not in sel:
            w.writerow(["%.15g" % np.mod(cfg.grid_theta[j], TWO_PI), "subpartition", j])
    return out.getvalue()


def to_svg(cfg: NodeConfiguration, subset: Sequence[int] = (), size: int = 400) -> str:
    """Static scatter of the configuration; the subpartition is drawn as a polygon."""
    c = size / 2.0
    rad = 0.42 * size

    def xy(t):
        return c + rad * math.cos(t), c - rad * math.sin(t)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<circle cx="{c}" cy="{c}" r="{rad}" fill="none" stroke="#888"/>']
    if len(subset) >= 3:
        pts = " ".join("%.3f,%.3f" % xy(cfg.grid_theta[j]) for j in sorted(subset))
        parts.append(f'<polygon points="{pts}" fill="none" stroke="#1f5fbf"/>')
    sel = set(cfg.selected_index)
    for j, t in enumerate(cfg.grid_theta):
        x, y = xy(t)
        colour = "#000" if j in sel else ("#1f5fbf" if j in set(subset) else "#d22")
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="5" fill="{colour}"/>')
    for t in cfg.zero_theta:
        x, y = xy(t)
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="none" stroke="#2a2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
