"""Arithmetic in the binary extension field GF(2^n).

Elements are plain Python integers in ``[0, 2**n)``; bit ``i`` of the integer
is the coefficient of ``x**i`` in the polynomial representation. Addition is
XOR, multiplication is carry-less polynomial multiplication reduced modulo a
fixed monic irreducible polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

# Bit masks of the reduction polynomials, bit i <-> coefficient of x^i.
IRREDUCIBLE_POLYS = {
    1: 0b10,          # x  (F_2 itself: reduction leaves only the constant bit)
    2: 0b111,         # x^2 + x + 1
    3: 0b1011,        # x^3 + x + 1
    4: 0b10011,       # x^4 + x + 1
    5: 0b100101,      # x^5 + x^2 + 1
    6: 0b1000011,     # x^6 + x + 1
    7: 0b10000011,    # x^7 + x + 1
    8: 0b100011011,   # x^8 + x^4 + x^3 + x + 1
}

MAX_N = 8


class FieldConfigError(ValueError):
    """Raised for an unsupported field size."""


def degree(poly: int) -> int:
    """Degree of a polynomial given as a bit mask (``-1`` for the zero polynomial)."""
    return poly.bit_length() - 1


def clmul(a: int, b: int) -> int:
    """Carry-less (polynomial) product of two bit masks, no reduction."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, m: int) -> int:
    """Remainder of polynomial ``a`` divided by ``m`` over F_2."""
    dm = degree(m)
    while degree(a) >= dm:
        a ^= m << (degree(a) - dm)
    return a


def is_irreducible(poly: int) -> bool:
    """Brute-force irreducibility test over F_2.

    Tries every polynomial of degree 1..deg/2 as a divisor. Fine for the
    degrees used here (at most 8).
    """
    d = degree(poly)
    if d < 1:
        return False
    for cand in range(2, 1 << (d // 2 + 1)):
        if degree(cand) >= 1 and poly_mod(poly, cand) == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldContext:
    """The field GF(2^n) with a fixed reduction polynomial.

    ``n == 1`` is the prime field F_2 (add = XOR, mul = AND); the same code
    path covers it because reducing modulo ``x`` keeps only the constant bit.
    """

    n: int
    poly: int
    size: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 << self.n)

    @cached_property
    def mul_table(self) -> np.ndarray:
        """Full ``size x size`` multiplication table (int64)."""
        s = self.size
        table = np.empty((s, s), dtype=np.int64)
        for a in range(s):
            for b in range(a, s):
                table[a, b] = table[b, a] = gf_mul(self, a, b)
        table.setflags(write=False)
        return table

    @cached_property
    def mult_matrices(self) -> list[np.ndarray]:
        return mult_matrices(self)

    @cached_property
    def parity_table(self) -> np.ndarray:
        """``(-1) ** (a ⊙ b)`` for all pairs, as a +-1 integer matrix.

        The sign only depends on the lowest bit of the product.
        """
        signs = 1 - 2 * (self.mul_table & 1)
        signs.setflags(write=False)
        return signs


def field_new(n: int) -> FieldContext:
    """Build GF(2^n) for ``1 <= n <= 8`` from the fixed polynomial table."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_N:
        raise FieldConfigError(f"field size n must be an integer in [1, {MAX_N}], got {n!r}")
    n = int(n)
    poly = IRREDUCIBLE_POLYS[n]
    if degree(poly) != n or not is_irreducible(poly):
        raise FieldConfigError(f"polynomial {poly:#b} is not irreducible of degree {n}")
    return FieldContext(n, poly)


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(ctx: FieldContext, a: int, b: int) -> int:
    """Field product ``a ⊙ b``."""
    if not (0 <= a < ctx.size and 0 <= b < ctx.size):
        raise ValueError(f"elements must lie in [0, {ctx.size})")
    return poly_mod(clmul(a, b), ctx.poly)


def bits(a: int, n: int) -> np.ndarray:
    """Tuple representation ``(a_0, ..., a_{n-1})`` of an element."""
    return np.array([(a >> i) & 1 for i in range(n)], dtype=np.int64)


def from_bits(vec) -> int:
    return int(sum(int(v) << i for i, v in enumerate(vec)))


def mult_matrices(ctx: FieldContext) -> list[np.ndarray]:
    """Symmetric bit matrices ``M_i`` with ``(a ⊙ b)_i = a M_i b^T (mod 2)``.

    Entry ``(r, t)`` of ``M_i`` is bit ``i`` of ``2^r ⊙ 2^t``; bilinearity of
    the product does the rest.
    """
    n = ctx.n
    mats = [np.zeros((n, n), dtype=np.int64) for _ in range(n)]
    for r in range(n):
        for t in range(n):
            prod = gf_mul(ctx, 1 << r, 1 << t)
            for i in range(n):
                mats[i][r, t] = (prod >> i) & 1
    return mats


def inv_mod2(mat: np.ndarray) -> np.ndarray:
    """Inverse of a square bit matrix over F_2 (Gauss-Jordan)."""
    m = np.array(mat, dtype=np.int64) % 2
    size = m.shape[0]
    aug = np.concatenate([m, np.eye(size, dtype=np.int64)], axis=1)
    for col in range(size):
        pivots = np.nonzero(aug[col:, col])[0]
        if pivots.size == 0:
            raise np.linalg.LinAlgError("matrix is singular modulo 2")
        p = col + pivots[0]
        if p != col:
            aug[[col, p]] = aug[[p, col]]
        for row in range(size):
            if row != col and aug[row, col]:
                aug[row] ^= aug[col]
    return aug[:, size:]


def neg_one_power(a: int) -> int:
    """``(-1) ** a`` for a field element used as an integer exponent."""
    return -1 if a & 1 else 1
