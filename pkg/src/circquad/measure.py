"""Measures on the unit circle: moments, Verblunsky coefficients, Szego polynomials.

Moments follow mu_k = integral of exp(-i k theta) d mu, so that the integral
of z**j is mu_{-j}.  For the Rogers-Szego weight both are q**(j*j/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, InvalidMeasure, MomentOutOfRange
from .laurent import Poly, reciprocal


@dataclass(frozen=True)
class RogersSzego:
    """Wrapped Gaussian weight with moments q**(k**2/2), 0 < q < 1."""

    q: float

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise InvalidMeasure(f"Rogers-Szego needs 0 < q < 1, got {self.q}")

    @property
    def mu0(self) -> float:
        return 1.0

    def moment(self, k: int) -> complex:
        return complex(math.exp(0.5 * k * k * math.log(self.q)))

    def verblunsky(self, n: int) -> complex:
        if n < 1:
            raise DomainError("Verblunsky index starts at 1")
        return complex((-1) ** n * math.exp(0.5 * n * math.log(self.q)))

    def to_dict(self) -> dict:
        return {"measure": "rogers-szego", "q": self.q}


@dataclass(frozen=True)
class ExplicitMeasure:
    """Measure given by a finite window of moments and Verblunsky coefficients.

    ``moments`` maps k >= 0 to mu_k; negative indices follow from
    mu_{-k} = conj(mu_k).  ``verblunsky[n-1]`` is delta_n.
    """

    moments: Mapping[int, complex]
    verblunsky_coeffs: Sequence[complex] = field(default_factory=tuple)

    def __post_init__(self):
        mom = {int(k): complex(v) for k, v in dict(self.moments).items()}
        for k in list(mom):
            if k < 0:
                v = mom.pop(k)
                if -k in mom and abs(mom[-k] - np.conj(v)) > 1e-12 * max(1.0, abs(v)):
                    raise InvalidMeasure(f"moments {k} and {-k} are not conjugate")
                mom.setdefault(-k, complex(np.conj(v)))
        if 0 not in mom:
            raise InvalidMeasure("moment mu_0 is required")
        if mom[0].real <= 0 or abs(mom[0].imag) > 1e-12:
            raise InvalidMeasure("mu_0 must be real and positive")
        delta = tuple(complex(d) for d in self.verblunsky_coeffs)
        for n, d in enumerate(delta, start=1):
            if not abs(d) < 1.0:
                raise InvalidMeasure(f"|delta_{n}| = {abs(d)} is not < 1")
        object.__setattr__(self, "moments", mom)
        object.__setattr__(self, "verblunsky_coeffs", delta)

    def __hash__(self):
        return hash((tuple(sorted(self.moments.items(), key=lambda kv: kv[0])), self.verblunsky_coeffs))

    @property
    def mu0(self) -> float:
        return self.moments[0].real

    def moment(self, k: int) -> complex:
        if abs(k) not in self.moments:
            raise MomentOutOfRange(f"moment {k} outside the stored window")
        v = self.moments[abs(k)]
        return v if k >= 0 else complex(np.conj(v))

    def verblunsky(self, n: int) -> complex:
        if n < 1:
            raise DomainError("Verblunsky index starts at 1")
        if n > len(self.verblunsky_coeffs):
            raise MomentOutOfRange(f"delta_{n} not stored")
        return self.verblunsky_coeffs[n - 1]

    def to_dict(self) -> dict:
        ks = sorted(self.moments)
        return {
            "measure": "explicit",
            "moments": [[self.moments[k].real, self.moments[k].imag] for k in ks],
            "verblunsky": [[d.real, d.imag] for d in self.verblunsky_coeffs],
        }


MeasureSpec = RogersSzego | ExplicitMeasure


def from_config(cfg: Mapping) -> MeasureSpec:
    """Build a measure from ``{"measure": "rogers-szego", "q": ...}`` or explicit lists."""
    kind = str(cfg.get("measure", "rogers-szego")).lower().replace("_", "-")
    if kind in ("rogers-szego", "rogers-szegő", "rs"):
        if "q" not in cfg:
            raise InvalidMeasure("rogers-szego measure needs q")
        return RogersSzego(float(cfg["q"]))
    if kind == "explicit":
        def cplx(v):
            return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
        mom = {k: cplx(v) for k, v in enumerate(cfg.get("moments", []))}
        delta = [cplx(v) for v in cfg.get("verblunsky", [])]
        return ExplicitMeasure(mom, delta)
    raise InvalidMeasure(f"unknown measure kind {cfg.get('measure')!r}")


def moment(mu: MeasureSpec, k: int) -> complex:
    return mu.moment(int(k))


def moments(mu: MeasureSpec, ks) -> np.ndarray:
    ks = np.asarray(ks, dtype=np.int64)
    if isinstance(mu, RogersSzego):
        return np.exp(0.5 * ks.astype(np.float64) ** 2 * math.log(mu.q)).astype(np.complex128)
    return np.array([mu.moment(int(k)) for k in ks.ravel()], dtype=np.complex128).reshape(ks.shape)


def verblunsky(mu: MeasureSpec, n: int) -> complex:
    d = mu.verblunsky(int(n))
    if not abs(d) < 1.0:
        raise InvalidMeasure(f"|delta_{n}| >= 1")
    return d


def verblunsky_array(mu: MeasureSpec, n: int) -> np.ndarray:
    """delta_1 .. delta_n as a complex array."""
    return np.array([verblunsky(mu, k) for k in range(1, n + 1)], dtype=np.complex128)


class SzegoPair(NamedTuple):
    rho: Poly
    rho_star: Poly
    n: int


@lru_cache(maxsize=512)
def _szego_cached(mu: MeasureSpec, n: int) -> SzegoPair:
    rho = np.ones(1, dtype=np.complex128)
    star = np.ones(1, dtype=np.complex128)
    for k in range(1, n + 1):
        d = verblunsky(mu, k)
        zr = np.concatenate([[0.0], rho])
        st = np.concatenate([star, [0.0]])
        rho, star = zr + d * st, np.conj(d) * zr + st
    rho[-1] = 1.0
    return SzegoPair(Poly(rho), Poly(star), n)


def szego_poly(mu: MeasureSpec, n: int) -> SzegoPair:
    """Monic Szego polynomial rho_n and its reversal from the forward recurrence."""
    if n < 0:
        raise DomainError("n must be non-negative")
    return _szego_cached(mu, int(n))


def szego_eval(mu: MeasureSpec, n: int, z):
    """(rho_n(z), rho_n^*(z)) evaluated pointwise by running the recurrence at z."""
    zz = np.asarray(z, dtype=np.complex128)
    a, b = _kernels.szego_pair(verblunsky_array(mu, n), np.atleast_1d(zz).ravel())
    return a.reshape(zz.shape), b.reshape(zz.shape)


def q_binomial(n: int, j: int, q: float) -> float:
    """Gaussian binomial [n, j]_q in product form."""
    if j < 0 or j > n:
        raise DomainError(f"q-binomial needs 0 <= j <= n, got n={n}, j={j}")
    j = min(j, n - j)
    num = 1.0
    den = 1.0
    for i in range(1, j + 1):
        num *= 1.0 - q ** (n - i + 1)
        den *= 1.0 - q ** i
    return num / den


def rogers_szego_poly_closed(n: int, q: float) -> Poly:
    """rho_n(z) = sum_j (-1)**(n-j) [n, j]_q q**((n-j)/2) z**j."""
    if n < 0:
        raise DomainError("n must be non-negative")
    c = [(-1) ** (n - j) * q_binomial(n, j, q) * q ** ((n - j) / 2) for j in range(n + 1)]
    return Poly(c)


def weight_density(q: float, theta, terms: int | None = None):
    """Rogers-Szego density on [0, 2pi) as a wrapped Gaussian (theta series).

    ``terms`` caps |j|; by default it is chosen so the dropped tail is
    below 1e-16 relative to the peak.
    """
    if not (0.0 < q < 1.0):
        raise InvalidMeasure("0 < q < 1 required")
    var = math.log(1.0 / q)
    need = int(math.ceil((math.sqrt(2.0 * var * 40.0) + math.pi) / (2.0 * math.pi))) + 1
    terms = need if terms is None else max(1, int(terms))
    th = np.asarray(theta, dtype=np.float64)
    j = np.arange(-terms, terms + 1, dtype=np.float64)
    d = th[..., None] - 2.0 * math.pi * j
    out = np.exp(-d * d / (2.0 * var)).sum(axis=-1) / math.sqrt(2.0 * math.pi * var)
    return float(out) if np.ndim(theta) == 0 else out


def check_szego_pair(pair: SzegoPair) -> None:
    """Raise if rho_star is not the reversal of rho (used by tests and debug paths)."""
    expect = reciprocal(pair.rho, pair.n)
    if not np.allclose(expect.coeffs, pair.rho_star.coeffs, atol=1e-12):
        raise InvalidMeasure("rho_star is not the reciprocal of rho")
