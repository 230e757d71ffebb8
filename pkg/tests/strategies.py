"""Hypothesis strategies shared across test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from morseflow.signals import Extension, SymbolicSignal

DWELLS = [Fraction(1), Fraction(1, 2), Fraction(3, 4)]


@st.composite
def signals(draw, h=None, n_symbols=3, max_len=6, eighths=True):
    h = h if h is not None else draw(st.sampled_from(DWELLS))
    word = draw(st.lists(st.integers(0, n_symbols - 1), min_size=1, max_size=max_len))
    if eighths:
        tau = Fraction(draw(st.integers(0, 7)), 8) * h
    else:
        tau = Fraction(draw(st.integers(0, 999)), 1000) * h
    anchor = draw(st.integers(-5, 5))
    ext = draw(st.sampled_from(list(Extension)))
    return SymbolicSignal(tuple(word), h, tau, anchor, ext)


@st.composite
def signal_pairs(draw, **kw):
    h = draw(st.sampled_from(DWELLS))
    return draw(signals(h=h, **kw)), draw(signals(h=h, **kw))


times = st.fractions(min_value=-30, max_value=30, max_denominator=64)
