"""Shared hypothesis strategies."""

import numpy as np
from hypothesis import strategies as st

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


@st.composite
def laurent_data(draw, max_len=6):
    low = draw(st.integers(-4, 4))
    coeffs = draw(st.lists(cplx, min_size=1, max_size=max_len))
    return low, coeffs


@st.composite
def circle_points(draw, min_size=1, max_size=8, min_gap=0.05):
    """Distinct points on the unit circle, pairwise angle gap >= min_gap."""
    n = draw(st.integers(min_size, max_size))
    base = draw(st.floats(0, 2 * np.pi))
    gaps = draw(st.lists(st.floats(min_gap, 1.0), min_size=n, max_size=n))
    ang = base + np.cumsum(gaps)
    ang = ang * min(1.0, (2 * np.pi - min_gap) / (ang[-1] - base + 1e-300))
    return np.exp(1j * ang)


qs = st.sampled_from([0.1, 0.3, 0.5, 0.7, 0.85])
