import numpy as np
import pytest
from hypothesis import given, strategies as st

from hopnav.ackermann import (
    SaturatingNat,
    alpha_inv,
    alpha_k,
    alpha_prime,
    eval_A,
    eval_B,
    eval_P,
    eval_T,
    lambda_i,
)

from oracles import alpha_prime_tables, alpha_table, row_values

CAP = 10**9


@pytest.mark.parametrize("f,args,want", [
    (eval_A, (0, 5, CAP), 10),
    (eval_A, (3, 0, CAP), 1),
    (eval_A, (1, 3, CAP), 8),
    (eval_B, (0, 3, CAP), 9),
    (eval_B, (2, 0, CAP), 2),
    (eval_B, (1, 2, CAP), 16),
    (eval_T, (0, 4, CAP), 8),
    (eval_T, (3, 1, CAP), 2),
])
def test_forward_examples(f, args, want):
    assert f(*args) == SaturatingNat(want)


def test_saturation():
    v = eval_A(2, 5, CAP)  # a tower of five 2s
    assert v.saturated and v.value == CAP
    assert v > CAP - 1 and v > SaturatingNat(CAP)
    assert eval_A(3, 3, 100).saturated
    with pytest.raises(ValueError):
        eval_A(1, 1, 0)


@pytest.mark.parametrize("k,n,want", [(2, 1024, 10), (0, 7, 4), (4, 65536, 4), (0, 0, 0),
                                      (1, 10, 4), (3, 17, 3)])
def test_alpha_examples(k, n, want):
    assert alpha_k(k, n) == want


def test_alpha_prime_examples():
    assert alpha_prime(0, 9) == 5
    assert alpha_prime(3, 4) == alpha_k(3, 4)
    v = alpha_prime(2, 100)
    assert alpha_k(2, 100) <= v <= 2 * alpha_k(2, 100) + 4
    # frozen from the array oracle
    assert v == 13


def test_alpha_inv_examples():
    assert alpha_inv(0) == 0
    assert alpha_inv(1) == 1
    assert alpha_inv(4) == 2
    for n in [1, 5, 17, 1000, 2**20, 2**62]:
        assert alpha_k(2 * alpha_inv(n) + 2, n) <= 4


def test_lambda_examples():
    assert lambda_i(1, 8) == 3
    assert lambda_i(2, 1) == 0
    assert eval_P(1, 5) == SaturatingNat(32)
    assert eval_P(2, 0) == eval_P(1, 1)
    with pytest.raises(ValueError):
        lambda_i(0, 3)


def test_errors():
    for bad in [(-1, 3), (2, -1)]:
        with pytest.raises(ValueError):
            alpha_k(*bad)
        with pytest.raises(ValueError):
            alpha_prime(*bad)


def test_rows_match_oracle():
    for k in range(5):
        for j in range(6):
            want = row_values("A", k, CAP, smax=j + 1)
            if len(want) == j + 1:
                got = eval_A(k, j, CAP)
                assert (got.value if not got.saturated else CAP) == min(want[j], CAP)
    assert row_values("B", 1, CAP)[:4] == [2, 4, 16, 256]


def test_alpha_against_oracle_small_grid():
    nmax = 5000
    for k in range(7):
        table = alpha_table(k, nmax)
        assert [alpha_k(k, n) for n in range(nmax + 1)] == table.tolist()


def test_alpha_prime_against_oracle_sample():
    tabs = alpha_prime_tables(6, 1 << 16)
    rng = np.random.default_rng(3)
    for k in range(7):
        ns = list(range(2000)) + rng.integers(0, 1 << 16, 300).tolist()
        for n in ns:
            assert alpha_prime(k, n) == tabs[k][n], (k, n)


def test_T_equals_A():
    for i in range(5):
        for j in range(1, 7):
            assert eval_T(i, j, CAP) == eval_A(i, j, CAP), (i, j)


@given(st.integers(0, 8), st.integers(0, 10**7), st.integers(0, 10**7))
def test_alpha_monotone(k, a, b):
    a, b = sorted((a, b))
    assert alpha_k(k, a) <= alpha_k(k, b)
    assert alpha_prime(k, a) <= alpha_prime(k, b)


@given(st.integers(0, 8), st.integers(2, 2**40))
def test_alpha_decreases_in_k(k, n):
    assert alpha_k(k + 2, n) <= alpha_k(k, n)


@given(st.integers(0, 8), st.integers(0, 2**40))
def test_sandwich(k, n):
    a = alpha_k(k, n)
    assert a <= alpha_prime(k, n) <= 2 * a + 4


@given(st.integers(1, 4), st.integers(1, 2**40))
def test_lambda_upper_bound(i, n):
    assert lambda_i(i, n) <= alpha_k(2 * i, n)


def test_lambda_lower_bound_counterexample():
    # P(2, 1) = 2^16 while A(2, 3) = 16, so the factor-3 lower bound breaks
    assert eval_P(2, 1) == SaturatingNat(65536)
    assert eval_A(2, 3) == SaturatingNat(16)
    assert lambda_i(2, 17) == 1 and alpha_k(4, 17) == 4
    assert lambda_i(1, 17) * 3 >= alpha_k(2, 17)
