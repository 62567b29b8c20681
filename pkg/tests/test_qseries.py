"""Pochhammer and basic hypergeometric building blocks."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from qbc.qseries import (
    TERMINATING,
    PhiSpec,
    phi_sum,
    power_of_base,
    qbinom_series,
    qpoch,
    qpoch_multi,
)
from qbc.errors import DivergentSpec, PoleInLower


class TestQPochhammer:
    def test_small_values(self):
        assert qpoch(F(1, 2), F(1, 3), 0) == 1
        assert qpoch(F(1, 2), F(1, 3), 2) == F(5, 12)
        assert qpoch_multi([F(1, 2), 2], F(1, 3), 1) == F(-1, 2)

    def test_negative_index_inversion(self):
        a, q = F(2, 3), F(1, 5)
        for n in range(1, 4):
            assert qpoch(a, q, -n) * qpoch(a * q ** -n, q, n) == 1

    def test_vanishing(self):
        # (q^-2; q)_n vanishes exactly for n >= 3
        q = F(1, 4)
        assert qpoch(q ** -2, q, 2) != 0
        assert qpoch(q ** -2, q, 3) == 0
        assert qpoch(q ** -2, q, 5) == 0


@settings(derandomize=True, max_examples=120)
@given(
    num=st.integers(-8, 8),
    den=st.integers(1, 8),
    qnum=st.integers(1, 6),
    qden=st.integers(2, 9),
    n=st.integers(0, 6),
)
def test_qpoch_recurrence_property(num, den, qnum, qden, n):
    # (a;q)_{n+1} = (a;q)_n * (1 - a q^n) and  = (1-a) * (aq;q)_n
    a, q = F(num, den), F(qnum, qden)
    if q == 1:
        return
    assert qpoch(a, q, n + 1) == qpoch(a, q, n) * (1 - a * q ** n)
    assert qpoch(a, q, n + 1) == (1 - a) * qpoch(a * q, q, n)


class TestTerminationDetection:
    def test_detects_powers(self):
        q = F(1, 3)
        assert power_of_base(1, q) == 0
        assert power_of_base(27, q) == 3
        assert power_of_base(F(1, 3), q) is None
        assert power_of_base(F(5, 7), q) is None

    def test_scan_cap(self):
        q = F(1, 2)
        assert power_of_base(2 ** 40, q, cap=39) is None
        assert power_of_base(2 ** 40, q, cap=40) == 40


class TestPhiSum:
    def test_terminating_matches_direct_sum(self):
        # 2phi1(q^-2, a; b; q, z) summed by hand
        q, a, b, z = F(1, 2), F(1, 3), F(1, 7), F(2, 5)
        spec = PhiSpec(uppers=(q ** -2, a), lowers=(b,), base=q, argument=z)
        direct = sum(
            qpoch(q ** -2, q, m) * qpoch(a, q, m) / (qpoch(q, q, m) * qpoch(b, q, m)) * z ** m
            for m in range(3)
        )
        assert phi_sum(spec, TERMINATING) == direct

    def test_partial_sum_mode(self):
        q, z = F(1, 2), F(1, 5)
        spec = PhiSpec(uppers=(F(1, 3),), lowers=(F(1, 7),), base=q, argument=z)
        two_terms = 1 + (1 - F(1, 3)) / ((1 - q) * (1 - F(1, 7))) * z
        assert phi_sum(spec, max_terms=2) == two_terms
        assert phi_sum(spec, max_terms=1) == 1
        assert phi_sum(spec, max_terms=0) == 0

    def test_divergent_spec(self):
        spec = PhiSpec(uppers=(F(1, 3),), lowers=(F(1, 7),), base=F(1, 2), argument=1)
        with pytest.raises(DivergentSpec):
            phi_sum(spec, TERMINATING)

    def test_pole_in_lower(self):
        # lower parameter q^-1 vanishes at the second term
        q = F(1, 2)
        spec = PhiSpec(uppers=(q ** -5,), lowers=(q ** -1,), base=q, argument=1)
        with pytest.raises(PoleInLower):
            phi_sum(spec, TERMINATING)

    def test_early_zero_cutoff_consistent(self):
        # an upper parameter q^-1 kills terms past m=1 even if another upper
        # would allow more; summing TERMINATING must equal the long partial sum
        q = F(1, 3)
        spec = PhiSpec(uppers=(q ** -1, q ** -4), lowers=(F(1, 5),), base=q, argument=F(1, 2))
        assert phi_sum(spec, TERMINATING) == phi_sum(spec, max_terms=12)


class TestQBinomSeries:
    def test_explicit_coefficient(self):
        cs = qbinom_series(F(1, 4), F(1, 2), 2)
        assert cs[0] == 1
        assert cs[2] == F(7, 4)

    def test_matches_qpoch_ratio(self):
        a, q = F(2, 7), F(1, 3)
        cs = qbinom_series(a, q, 6)
        for n, c in enumerate(cs):
            assert c == qpoch(a, q, n) / qpoch(q, q, n)


@settings(derandomize=True, max_examples=80)
@given(
    anum=st.integers(-6, 6),
    aden=st.integers(1, 6),
    qnum=st.integers(1, 5),
    qden=st.integers(2, 7),
    N=st.integers(1, 8),
)
def test_qbinom_recurrence_property(anum, aden, qnum, qden, N):
    # (1 - q^n) c_n = (1 - a q^{n-1}) c_{n-1}
    a, q = F(anum, aden), F(qnum, qden)
    if q == 1:
        return
    cs = qbinom_series(a, q, N)
    for n in range(1, N + 1):
        assert (1 - q ** n) * cs[n] == (1 - a * q ** (n - 1)) * cs[n - 1]
