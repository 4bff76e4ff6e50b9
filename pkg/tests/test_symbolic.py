from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hhorseshoe import symbolic as sy
from hhorseshoe.errors import LimitExceeded, NonAdmissible


def fib(n):
    a, b = 1, 1
    for _ in range(n - 1):
        a, b = b, a + b
    return a


def test_admissibility_examples():
    assert sy.is_admissible("0101")
    assert not sy.is_admissible("011")
    assert not sy.is_admissible("012")
    assert sy.is_admissible("")


def test_enumerate_small():
    assert sy.enumerate_words(1) == ["0", "1"]
    assert sy.enumerate_words(2) == ["00", "01", "10"]


def test_enumerate_counts(oracle):
    assert len(sy.enumerate_words(10)) == oracle["count_words_10"]
    for k in range(1, 18):
        words = sy.enumerate_words(k)
        assert len(words) == fib(k + 2)
        assert words == sorted(words)
        assert len(set(words)) == len(words)


def test_enumerate_cap():
    with pytest.raises(LimitExceeded):
        sy.enumerate_words(25)
    with pytest.raises(LimitExceeded):
        sy.enumerate_periodic(21)


def test_fibonacci_recursion():
    for k in range(2, 16):
        assert len(sy.enumerate_words(k + 1)) == len(sy.enumerate_words(k)) + len(sy.enumerate_words(k - 1))


def test_periodic_words(oracle):
    assert sy.enumerate_periodic(1) == ["0"]
    assert sy.enumerate_periodic(2) == ["00", "01", "10"]
    m = np.array([[1, 1], [1, 0]])
    trace = int(np.trace(np.linalg.matrix_power(m, 8)))
    assert len(sy.enumerate_periodic(8)) == trace == oracle["count_periodic_8"]
    for n in range(1, 12):
        words = set(sy.enumerate_words(n))
        assert all(w in words and sy.is_cyclically_admissible(w) for w in sy.enumerate_periodic(n))


def test_require_admissible():
    assert sy.require_admissible("010") == "010"
    with pytest.raises(NonAdmissible):
        sy.require_admissible("0110")
    with pytest.raises(NonAdmissible):
        sy.require_admissible("101", cyclic=True)


def test_frequency_examples():
    assert sy.frequency("000000", "01").count == 0
    rep = sy.frequency("010101", "01")
    assert (rep.count, rep.horizon, rep.lower_frequency) == (3, 5, Fraction(3, 5))
    freqs = [float(sy.frequency("001" * m, "001")) for m in (10, 100, 1000)]
    assert abs(freqs[-1] - 1 / 3) < 1e-3
    assert abs(freqs[-1] - 1 / 3) < abs(freqs[0] - 1 / 3)


def test_frequency_shift_consistency():
    for w in ["001", "01", "0100", "10010"]:
        cyc = sum((w * 2).startswith("01", i) for i in range(len(w)))
        for m in (1, 5, 20):
            count = sy.frequency(w * m, "01").count
            assert abs(count - m * cyc) <= m


words = st.text(alphabet="01", max_size=30).filter(sy.is_admissible)


@given(words)
def test_admissibility_hereditary(w):
    for i in range(len(w)):
        for j in range(i, len(w) + 1):
            assert sy.is_admissible(w[i:j])


def test_entropy():
    h = sy.sft_entropy()
    assert h == pytest.approx(0.4812118250596034, abs=1e-12)
    assert abs(h - np.log(2) / 2) > 0.1
    counts = [len(sy.enumerate_words(k)) for k in (18, 19)]
    assert np.log(counts[1] / counts[0]) == pytest.approx(h, abs=1e-6)
