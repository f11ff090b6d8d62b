"""Hypothesis strategies for digit maps."""
from hypothesis import strategies as st

from cantorlab import make_system


@st.composite
def scope_maps(draw, max_m=4, max_p=12):
    """Strictly increasing maps with f(0)=0 and f(m)=p, excluding the identity."""
    m = draw(st.integers(1, max_m))
    p = draw(st.integers(m + 1, max_p))
    inner = draw(st.lists(st.integers(1, p - 1), min_size=m - 1, max_size=m - 1, unique=True))
    return make_system([0] + sorted(inner) + [p])


@st.composite
def any_maps(draw, max_m=4, max_p=12):
    """Non-decreasing maps with m < p, not necessarily in theorem scope."""
    m = draw(st.integers(1, max_m))
    p = draw(st.integers(m + 1, max_p))
    vals = sorted(draw(st.lists(st.integers(0, p), min_size=m + 1, max_size=m + 1)))
    if vals[-1] == 0:
        vals[-1] = 1
    return make_system(vals, p)
