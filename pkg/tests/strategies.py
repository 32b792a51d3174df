"""Shared hypothesis strategies."""

import numpy as np
from hypothesis import strategies as st

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
quat_coeffs = st.tuples(finite, finite, finite, finite)


@st.composite
def unit_imaginary(draw):
    v = np.array(draw(st.tuples(finite, finite, finite)))
    if np.linalg.norm(v) < 1e-3:
        v = np.array([1.0, 0.0, 0.0])
    return v / np.linalg.norm(v)


@st.composite
def disc_point(draw, radius=0.95):
    r = draw(st.floats(0, radius))
    t = draw(st.floats(0, 2 * np.pi))
    return complex(r * np.cos(t), r * np.sin(t))
