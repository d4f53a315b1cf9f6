"""Ackermann-style functions and their inverses.

All forward evaluations saturate at a cap so that the inverses never need to
materialise towers of twos. A saturated result means "strictly larger than
the cap"; the inverses only ever ask whether a value reaches ``n``, so any
cap ``>= n`` gives exact answers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, total_ordering

# Fixed cap used by the inverses. Any cap >= n is exact; a single shared cap
# keeps the memo tables warm across different arguments.
INVERSE_CAP = (1 << 63) - 1


@total_ordering
@dataclass(frozen=True)
class SaturatingNat:
    """Non-negative integer that may have been clipped at a cap.

    When ``saturated`` is set the true value exceeds ``value`` (which equals
    the cap), so it compares greater than an unsaturated number of the same
    magnitude.
    """

    value: int
    saturated: bool = False

    def _key(self):
        return (self.value, self.saturated)

    @staticmethod
    def _coerce(other):
        if isinstance(other, SaturatingNat):
            return other
        if isinstance(other, int):
            return SaturatingNat(other, False)
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self):
        return hash(self._key())

    def __int__(self):
        return self.value

    def __repr__(self):
        return f">{self.value}" if self.saturated else str(self.value)


def _sat(cap):
    return SaturatingNat(cap, True)


def _check_cap(cap):
    if cap < 1:
        raise ValueError("cap must be a positive integer")


@lru_cache(maxsize=None)
def _eval_A(k, n, cap):
    if k == 0:
        return 2 * n if 2 * n <= cap else -1
    if n == 0:
        return 1 if cap >= 1 else -1
    v = 1
    for _ in range(n):
        v = _eval_A(k - 1, v, cap)
        if v < 0:
            return -1
    return v


@lru_cache(maxsize=None)
def _eval_B(k, n, cap):
    if k == 0:
        return n * n if n * n <= cap else -1
    if n == 0:
        return 2 if cap >= 2 else -1
    v = 2
    for _ in range(n):
        v = _eval_B(k - 1, v, cap)
        if v < 0:
            return -1
    return v


def _wrap(raw, cap):
    return _sat(cap) if raw < 0 else SaturatingNat(raw)


def eval_A(k: int, n: int, cap: int = INVERSE_CAP) -> SaturatingNat:
    """A(0, n) = 2n; A(k, 0) = 1; A(k, n) = A(k-1, A(k, n-1))."""
    _check_cap(cap)
    return _wrap(_eval_A(k, n, cap), cap)


def eval_B(k: int, n: int, cap: int = INVERSE_CAP) -> SaturatingNat:
    """B(0, n) = n^2; B(k, 0) = 2; B(k, n) = B(k-1, B(k, n-1))."""
    _check_cap(cap)
    return _wrap(_eval_B(k, n, cap), cap)


def eval_T(i: int, j: int, cap: int = INVERSE_CAP) -> SaturatingNat:
    """Classic variant: T(0, j) = 2j, T(i, 0) = 0, T(i, 1) = 2."""
    _check_cap(cap)
    return _wrap(_eval_T(i, j, cap), cap)


@lru_cache(maxsize=None)
def _eval_T(i, j, cap):
    if i == 0:
        return 2 * j if 2 * j <= cap else -1
    if j == 0:
        return 0
    if j == 1:
        return 2 if cap >= 2 else -1
    v = 2
    for _ in range(j - 1):
        v = _eval_T(i - 1, v, cap)
        if v < 0:
            return -1
    return v


@lru_cache(maxsize=None)
def _eval_P(i, j, cap):
    if i == 1:
        if j >= cap.bit_length():
            return -1
        return 1 << j
    if j == 0:
        return _eval_P(i - 1, 1, cap)
    p = _eval_P(i, j - 1, cap)
    if p < 0 or p >= 64 or (1 << p) >= cap.bit_length():
        # 2^(2^p) already exceeds the cap, and P(i-1, x) >= x
        return -1
    arg = 1 << (1 << p)
    if arg > cap:
        return -1
    return _eval_P(i - 1, arg, cap)


def eval_P(i: int, j: int, cap: int = INVERSE_CAP) -> SaturatingNat:
    """Doubly exponential rows: P(1, j) = 2^j, P(i, 0) = P(i-1, 1),
    P(i, j) = P(i-1, 2^(2^P(i, j-1)))."""
    if i < 1:
        raise ValueError("P is defined for rows i >= 1")
    _check_cap(cap)
    return _wrap(_eval_P(i, j, cap), cap)


def _row_inverse(raw_eval, row, n):
    s = 0
    while True:
        v = raw_eval(row, s, INVERSE_CAP)
        if v < 0 or v >= n:
            return s
        s += 1


@lru_cache(maxsize=1 << 16)
def _alpha_k_small(k, n):
    return _alpha_k(k, n)


def _alpha_k(k, n):
    if n <= 0:
        return 0
    if n > INVERSE_CAP:
        raise ValueError("argument exceeds the evaluation cap")
    row = k // 2
    if k % 2 == 0:
        if row == 0:
            return (n + 1) // 2
        return _row_inverse(_eval_A, row, n)
    if row == 0:
        r = math.isqrt(n)
        return r if r * r >= n else r + 1
    return _row_inverse(_eval_B, row, n)


def alpha_k(k: int, n: int) -> int:
    """alpha_{2r}(n) = min{s : A(r, s) >= n}, alpha_{2r+1}(n) = min{s : B(r, s) >= n}."""
    if k < 0 or n < 0:
        raise ValueError("alpha_k needs k >= 0 and n >= 0")
    if n < 4096:
        return _alpha_k_small(k, n)
    return _alpha_k(k, n)


def alpha_prime(k: int, n: int) -> int:
    """The recursive variant used to pick cluster sizes in the spanner."""
    if k < 0 or n < 0:
        raise ValueError("alpha_prime needs k >= 0 and n >= 0")
    if n < 1 << 16:
        return _alpha_prime_small(k, n)
    return _alpha_prime(k, n)


def _alpha_prime(k, n):
    if k <= 1 or n <= k + 1:
        return alpha_k(k, n)
    return 2 + alpha_prime(k, alpha_prime(k - 2, n))


# only small arguments are memoised; large ones shrink fast under the recursion
_alpha_prime_small = lru_cache(maxsize=None)(_alpha_prime)


def alpha_inv(n: int) -> int:
    """min{s : A(s, s) >= n}; alpha_inv(0) is 0."""
    if n < 0:
        raise ValueError("alpha_inv needs n >= 0")
    s = 0
    while True:
        v = _eval_A(s, s, INVERSE_CAP)
        if v < 0 or v >= n:
            return s
        s += 1


def lambda_i(i: int, n: int) -> int:
    """min{j : P(i, j) >= n}."""
    if i < 1 or n < 1:
        raise ValueError("lambda_i needs i >= 1 and n >= 1")
    j = 0
    while True:
        v = _eval_P(i, j, INVERSE_CAP)
        if v < 0 or v >= n:
            return j
        j += 1
