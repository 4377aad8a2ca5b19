"""Schmidt decomposition, pure-state robustness of entanglement and the
optimal wire-cut sampling overheads derived from it.

Only pure states are handled: their generalized robustness has the closed
form ``(sum_i alpha_i)^2 - 1``. Mixed-state robustness needs an SDP and is
not provided.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .qcore import PureState, num_qubits

SCHMIDT_CLAMP = 1e-12


@dataclass(frozen=True, eq=False)
class SchmidtVector:
    """Nonnegative coefficients with unit 2-norm and power-of-two length.

    Use :meth:`from_values` to normalize and sort arbitrary input; the plain
    constructor only validates.
    """

    alpha: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float).reshape(-1)
        num_qubits(a.size)
        if np.any(a < 0):
            raise ValueError("Schmidt coefficients must be nonnegative")
        if abs(np.dot(a, a) - 1) > 1e-10:
            raise ValueError(f"Schmidt vector is not normalized (sum a^2 = {np.dot(a, a)})")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @classmethod
    def from_values(cls, values, *, sort: bool = True) -> "SchmidtVector":
        """Renormalize (and by default sort descending, stable) arbitrary values."""
        a = np.abs(np.asarray(values, dtype=float).reshape(-1))
        norm = np.linalg.norm(a)
        if norm == 0:
            raise ValueError("Schmidt vector must be nonzero")
        a = a / norm
        if sort:
            a = a[np.argsort(-a, kind="stable")]
        return cls(a)

    @classmethod
    def maximal(cls, n: int) -> "SchmidtVector":
        d = 1 << n
        return cls(np.full(d, 1 / np.sqrt(d)))

    @classmethod
    def separable(cls, n: int) -> "SchmidtVector":
        a = np.zeros(1 << n)
        a[0] = 1
        return cls(a)

    @property
    def n(self) -> int:
        return num_qubits(self.alpha.size)

    @property
    def robustness(self) -> float:
        return robustness_pure(self)

    def __len__(self):
        return self.alpha.size


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``psi = (u_a ⊗ u_b) sum_i alpha_i |i>|i>``."""

    alpha: SchmidtVector
    u_a: np.ndarray
    u_b: np.ndarray

    def reconstruct(self) -> np.ndarray:
        a = self.alpha.alpha
        k = a.size
        return np.einsum("i,ai,bi->ab", a, self.u_a[:, :k], self.u_b[:, :k]).reshape(-1)


def _alpha(alpha) -> np.ndarray:
    return np.asarray(getattr(alpha, "alpha", alpha), dtype=float)


def schmidt_decompose(psi, n_a: int) -> SchmidtDecomposition:
    """Schmidt form of a bipartite pure state, A = the first ``n_a`` qubits.

    Computed by an SVD of the ``2^{n_a} x 2^{n_b}`` amplitude matrix. The
    Schmidt vector has length ``2^{min(n_a, n_b)}``; ``u_a`` and ``u_b`` are
    full square unitaries whose leading columns carry the Schmidt bases.
    Singular values below ``SCHMIDT_CLAMP`` are set to zero.
    """
    amp = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
    norm = np.vdot(amp, amp).real
    if abs(norm - 1) > 1e-10:
        raise ValueError(f"input state is not normalized (norm^2 = {norm})")
    m = num_qubits(amp.size)
    if not 0 < n_a < m:
        raise ValueError(f"bipartition n_a={n_a} invalid for {m} qubits")
    da, db = 1 << n_a, 1 << (m - n_a)
    # numpy returns singular values sorted descending
    u, s, vh = np.linalg.svd(amp.reshape(da, db))
    s = np.where(s < SCHMIDT_CLAMP, 0.0, s)
    return SchmidtDecomposition(SchmidtVector(s / np.linalg.norm(s)), u, vh.T)


def robustness_pure(alpha) -> float:
    """Generalized robustness ``(sum_i alpha_i)^2 - 1`` of a pure state."""
    return float(np.sum(_alpha(alpha)) ** 2 - 1)


def overhead_baseline(n: int) -> float:
    """Optimal overhead of an n-wire cut without entanglement, ``2^{n+1} - 1``."""
    return float(2 ** (n + 1) - 1)


def overhead_nme(n: int, r: float) -> float:
    """Optimal overhead ``2^{n+1}/(R+1) - 1`` of an n-wire cut with robustness ``R``."""
    if n < 1:
        raise ValueError("n must be positive")
    tol = 1e-9
    if not -tol <= r <= 2 ** n - 1 + tol:
        raise ValueError(f"robustness {r} outside [0, {2 ** n - 1}]")
    return 2 ** (n + 1) / (r + 1) - 1


def product_schmidt(alphas: Sequence) -> np.ndarray:
    """Schmidt vector of a tensor product of pure bipartite states (unsorted)."""
    return reduce(np.kron, (_alpha(a) for a in alphas))


def composite_robustness_pure(alphas: Sequence) -> float:
    """Robustness of the tensor product of pure factors.

    Evaluated on the outer-product Schmidt vector; equals
    ``prod_i (R_i + 1) - 1`` since the coefficient sum factorizes.
    """
    return robustness_pure(product_schmidt(alphas))


def advantage_separable_augment(n_e: int, n_s: int, r_e: float) -> float:
    """Overhead saved by one joint cut with ``rho_e ⊗ separable`` versus
    cutting the entangled and separable wires separately."""
    if n_e < 1 or n_s < 1:
        raise ValueError("n_e and n_s must be positive")
    return (overhead_nme(n_e, r_e) - 1) * (2 ** n_s - 1)


def overhead_table(ns: Sequence[int] = (1, 2, 3), rs: Sequence[float] = (0.0, 0.25, 0.5, 1.0)):
    """Rows ``(n, R, gamma_without_nme, gamma_with_nme)`` for the overhead comparison.

    ``R`` values that exceed ``2^n - 1`` for a given ``n`` are skipped.
    """
    rows = []
    for n in ns:
        for r in rs:
            if r <= 2 ** n - 1:
                rows.append((n, float(r), overhead_baseline(n), overhead_nme(n, r)))
    return rows
