"""Complete set of mutually unbiased bases for n qubits from GF(2^n).

Basis ``j`` for ``0 <= j < 2**n`` is the joint eigenbasis of the commuting
operators ``S_{j,k} = s_{j,k} Z_{j⊙k} X_k``; basis ``2**n`` is the
computational basis (eigenbasis of the phase operators ``Z_k``).

Matrices are indexed by field elements in their integer representation, i.e.
row ``l`` is the basis label ``|l>`` with qubit 0 as the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .gf import FieldContext, field_new, gf_mul, inv_mod2

_I_POWERS = np.array([1, 1j, -1, -1j])


def phase_op(ctx: FieldContext, k: int) -> np.ndarray:
    """``Z_k = sum_l (-1)^{l⊙k} |l><l|``."""
    return np.diag(ctx.parity_table[:, k].astype(complex))


def shift_op(ctx: FieldContext, k: int) -> np.ndarray:
    """``X_k = sum_l |l><l⊕k|``."""
    d = ctx.size
    out = np.zeros((d, d), dtype=complex)
    idx = np.arange(d)
    out[idx, idx ^ k] = 1
    return out


def phase_exponent(ctx: FieldContext, j: int, k: int) -> int:
    """Exponent ``e`` (mod 4) with ``s_{j,k} = i**e``.

    Sums the integer representations of ``j ⊙ (k_r 2^r) ⊙ (k_t 2^t)`` over all
    set bits ``r, t`` of ``k``.
    """
    set_bits = [1 << r for r in range(ctx.n) if (k >> r) & 1]
    total = 0
    for a in set_bits:
        ja = gf_mul(ctx, j, a)
        for b in set_bits:
            total += gf_mul(ctx, ja, b)
    return total % 4


def phase_factor(ctx: FieldContext, j: int, k: int) -> complex:
    return complex(_I_POWERS[phase_exponent(ctx, j, k)])


def s_operator(ctx: FieldContext, j: int, k: int) -> np.ndarray:
    """``S_{j,k} = s_{j,k} Z_{j⊙k} X_k``."""
    return phase_factor(ctx, j, k) * (phase_op(ctx, gf_mul(ctx, j, k)) @ shift_op(ctx, k))


def mub_unitary(ctx: FieldContext, j: int) -> np.ndarray:
    """``U_j`` whose column ``l`` is ``|e_l^j> = 2^{-n/2} sum_k (-1)^{l⊙k} conj(s_{j,k}) |k>``."""
    d = ctx.size
    conj_s = np.array([np.conj(phase_factor(ctx, j, k)) for k in range(d)])
    # rows indexed by k, columns by l
    return ctx.parity_table.T * conj_s[:, None] / np.sqrt(d)


def phase_op_paulis(ctx: FieldContext, k: int) -> str:
    """Pauli string of I/Z letters equal to ``Z_k``.

    ``(-1)^{l⊙k}`` only depends on bit 0 of the product, which is
    ``l M_0 k^T``; so ``Z_k`` flips the sign of qubit ``i`` where bit ``i`` of
    ``k' = M_0 k`` is set. Letter order follows the qubit order (bit
    ``n-1-q`` for qubit ``q``).
    """
    kb = np.array([(k >> i) & 1 for i in range(ctx.n)])
    kp = (ctx.mult_matrices[0] @ kb) % 2
    return "".join("Z" if kp[ctx.n - 1 - q] else "I" for q in range(ctx.n))


def phase_element_for_paulis(ctx: FieldContext, letters: str) -> int:
    """Inverse of :func:`phase_op_paulis`: the ``k`` with ``Z_k`` equal to an I/Z string."""
    n = ctx.n
    if len(letters) != n or any(c not in "IZ" for c in letters):
        raise ValueError(f"{letters!r} is not an I/Z string of length {n}")
    kp = np.array([1 if letters[n - 1 - i] == "Z" else 0 for i in range(n)])
    kb = (inv_mod2(ctx.mult_matrices[0]) @ kp) % 2
    return int(sum(int(b) << i for i, b in enumerate(kb)))


@dataclass(frozen=True, eq=False)
class MubFamily:
    """``U_0 .. U_{2^n - 1}``; the computational basis is implicit as index ``2^n``."""

    ctx: FieldContext
    unitaries: tuple = field(repr=False)

    @property
    def n(self) -> int:
        return self.ctx.n

    def basis(self, j: int) -> np.ndarray:
        """Columns are the elements of basis ``j`` (``j == 2**n`` is the identity)."""
        if j == self.ctx.size:
            return np.eye(self.ctx.size, dtype=complex)
        return self.unitaries[j]


@lru_cache(maxsize=None)
def mub_family(n: int) -> MubFamily:
    ctx = field_new(n)
    us = []
    for j in range(ctx.size):
        u = mub_unitary(ctx, j)
        u.setflags(write=False)
        us.append(u)
    return MubFamily(ctx, tuple(us))


def audit(n: int, atol: float = 1e-10) -> dict[str, float]:
    """Max deviations for every MUB invariant; all should be below ``atol``.

    Keys map to worst-case absolute errors.
    """
    fam = mub_family(n)
    ctx = fam.ctx
    d = ctx.size
    report = {}

    bases = [fam.basis(j) for j in range(d + 1)]
    report["unitarity"] = max(np.abs(u @ u.conj().T - np.eye(d)).max() for u in bases)
    worst = 0.0
    for a in range(d + 1):
        for b in range(a + 1, d + 1):
            overlaps = np.abs(bases[a].conj().T @ bases[b]) ** 2
            worst = max(worst, np.abs(overlaps - 1 / d).max())
    report["unbiasedness"] = worst

    comm = conj = eig = 0.0
    for j in range(d):
        u = fam.unitaries[j]
        for k in range(d):
            s = s_operator(ctx, j, k)
            conj = max(conj, np.abs(u @ phase_op(ctx, k) @ u.conj().T - s).max())
            spectral = (u * ctx.parity_table[:, k]) @ u.conj().T
            eig = max(eig, np.abs(spectral - s).max())
    for a in range(d):
        za = phase_op(ctx, a)
        for b in range(d):
            xb = shift_op(ctx, b)
            sign = ctx.parity_table[a, b]
            comm = max(comm, np.abs(za @ xb - sign * xb @ za).max())
    report["conjugation"] = conj
    report["s_eigendecomposition"] = eig
    report["commutation"] = comm

    sq = 0.0
    for j in range(d):
        for k in range(d):
            lhs = phase_factor(ctx, j, k) ** 2
            rhs = ctx.parity_table[gf_mul(ctx, j, k), k]
            sq = max(sq, abs(lhs - rhs))
    report["phase_factor_square"] = sq

    rng = np.random.default_rng(1234 + n)
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    deph = 0.0
    for k in range(1, d):
        lhs = sum(s_operator(ctx, j, k) @ rho @ s_operator(ctx, j, k) for j in range(d)) / d
        rhs = np.zeros((d, d), dtype=complex)
        for l in range(d):
            rhs[l ^ k, l ^ k] += rho[l, l]
        deph = max(deph, np.abs(lhs - rhs).max())
    report["dephasing"] = deph
    return report
