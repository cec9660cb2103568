"""Hot inner loops, with a numba path and a pure-numpy path.

The numba path is used when numba imports cleanly and the environment
variable ``CIRCQUAD_DISABLE_NUMBA`` is unset (or ``0``).  Both paths are
always importable as ``numpy_impl`` / ``numba_impl`` so they can be
benchmarked and cross-checked against each other.
"""

import itertools
import os
import types

import numpy as np

_DISABLE = os.environ.get("CIRCQUAD_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

# Relative tolerance under which two uniformity scores count as equal.
K_RTOL = 1e-12


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _np_horner(coeffs, z):
    """Evaluate sum_j coeffs[j] z**j at every point of ``z``."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def _np_szego_pair(delta, z):
    """Run the forward Szego recurrence at the points ``z``.

    ``delta`` holds the Verblunsky coefficients delta_1..delta_n.  Returns
    (rho_n(z), rho_n^*(z)).
    """
    z = np.asarray(z, dtype=np.complex128)
    a = np.ones_like(z)
    b = np.ones_like(z)
    for d in delta:
        a, b = z * a + d * b, np.conj(d) * z * a + b
    return a, b


def _np_subset_search(angles, card, period):
    """Best ``card``-subset of sorted angles by the max/min circular gap ratio.

    Subsets are visited in lexicographic order and only a ratio smaller by
    more than K_RTOL replaces the incumbent, so ties resolve to the
    lexicographically smallest index set.  Returns (K, indices).
    """
    n = angles.shape[0]
    if card < 2 or card > n:
        return np.inf, np.zeros(0, dtype=np.int64)
    best_k = np.inf
    best = np.zeros(0, dtype=np.int64)
    it = itertools.combinations(range(n), card)
    while True:
        block = np.array(list(itertools.islice(it, 1 << 15)), dtype=np.int64)
        if block.size == 0:
            break
        a = angles[block]
        gaps = np.empty_like(a)
        gaps[:, :-1] = a[:, 1:] - a[:, :-1]
        gaps[:, -1] = a[:, 0] + period - a[:, -1]
        kval = gaps.max(axis=1) / gaps.min(axis=1)
        # first entry within tolerance of the block minimum
        cand = int(np.nonzero(kval <= kval.min() * (1.0 + K_RTOL))[0][0])
        if kval[cand] < best_k * (1.0 - K_RTOL):
            best_k = float(kval[cand])
            best = block[cand].copy()
    return best_k, best


numpy_impl = types.SimpleNamespace(
    horner=_np_horner,
    szego_pair=_np_szego_pair,
    subset_search=_np_subset_search,
    name="numpy",
)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

def _nb_horner_loop(coeffs, z):
    out = np.empty(z.shape[0], dtype=np.complex128)
    n = coeffs.shape[0]
    for i in range(z.shape[0]):
        acc = 0j
        zi = z[i]
        for j in range(n - 1, -1, -1):
            acc = acc * zi + coeffs[j]
        out[i] = acc
    return out


def _nb_szego_loop(delta, z):
    npts = z.shape[0]
    ra = np.empty(npts, dtype=np.complex128)
    rb = np.empty(npts, dtype=np.complex128)
    for i in range(npts):
        a = 1.0 + 0j
        b = 1.0 + 0j
        zi = z[i]
        for d in delta:
            a, b = zi * a + d * b, np.conj(d) * zi * a + b
        ra[i] = a
        rb[i] = b
    return ra, rb


def _nb_subset_loop(angles, card, period):
    n = angles.shape[0]
    best_k = np.inf
    best = np.zeros(card, dtype=np.int64)
    if card < 2 or card > n:
        return best_k, best[:0]
    idx = np.arange(card)
    while True:
        gmax = 0.0
        gmin = np.inf
        for t in range(card):
            if t + 1 < card:
                g = angles[idx[t + 1]] - angles[idx[t]]
            else:
                g = angles[idx[0]] + period - angles[idx[t]]
            if g > gmax:
                gmax = g
            if g < gmin:
                gmin = g
        kv = gmax / gmin
        if kv < best_k * (1.0 - K_RTOL):
            best_k = kv
            best[:] = idx
        # advance to the next combination in lexicographic order
        t = card - 1
        while t >= 0 and idx[t] == n - card + t:
            t -= 1
        if t < 0:
            break
        idx[t] += 1
        for u in range(t + 1, card):
            idx[u] = idx[u - 1] + 1
    return best_k, best


if numba is not None:
    _nb_horner = numba.njit(cache=True)(_nb_horner_loop)
    _nb_szego = numba.njit(cache=True)(_nb_szego_loop)
    _nb_subset = numba.njit(cache=True)(_nb_subset_loop)

    def _nb_horner_entry(coeffs, z):
        z = np.asarray(z, dtype=np.complex128)
        flat = np.ascontiguousarray(z.ravel())
        return _nb_horner(np.ascontiguousarray(coeffs, dtype=np.complex128), flat).reshape(z.shape)

    def _nb_szego_entry(delta, z):
        z = np.asarray(z, dtype=np.complex128)
        flat = np.ascontiguousarray(z.ravel())
        a, b = _nb_szego(np.ascontiguousarray(delta, dtype=np.complex128), flat)
        return a.reshape(z.shape), b.reshape(z.shape)

    def _nb_subset_entry(angles, card, period):
        k, idx = _nb_subset(np.ascontiguousarray(angles, dtype=np.float64), int(card), float(period))
        return float(k), idx

    numba_impl = types.SimpleNamespace(
        horner=_nb_horner_entry,
        szego_pair=_nb_szego_entry,
        subset_search=_nb_subset_entry,
        name="numba",
    )
else:  # pragma: no cover
    numba_impl = None


active = numpy_impl if (_DISABLE or numba_impl is None) else numba_impl
BACKEND = active.name

horner = active.horner
szego_pair = active.szego_pair
subset_search = active.subset_search
