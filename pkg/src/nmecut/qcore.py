"""Dense state-vector / density-matrix primitives.

Conventions used throughout the package:

* Qubit 0 is the most significant bit of a basis label, so ``|q0 q1 ... q_{m-1}>``
  has index ``sum(q_i * 2**(m-1-i))``. ``np.kron(a, b)`` puts ``a`` on the
  leading qubits.
* Superoperators act on column-stacked density matrices,
  ``vec(rho) = rho.reshape(-1, order="F")``, so that
  ``vec(A rho B) = (B^T ⊗ A) vec(rho)`` and a Kraus channel has superoperator
  ``sum_i conj(K_i) ⊗ K_i``.
* Everything is dense; the total register is capped at ``MAX_QUBITS``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

MAX_QUBITS = 12
ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


class DimensionError(ValueError):
    pass


def num_qubits(dim: int) -> int:
    m = int(dim).bit_length() - 1
    if dim < 1 or 1 << m != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    if m > MAX_QUBITS:
        raise DimensionError(f"{m} qubits exceeds the dense cap of {MAX_QUBITS}")
    return m


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        num_qubits(amp.size)
        norm = np.vdot(amp, amp).real
        if abs(norm - 1) > ATOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm})")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_qubits(self) -> int:
        return num_qubits(self.dim)

    def density(self) -> "DensityOperator":
        a = self.amplitudes
        return DensityOperator(np.outer(a, a.conj()))

    @classmethod
    def from_vector(cls, vec) -> "PureState":
        """Normalize an arbitrary nonzero vector."""
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        return cls(vec / np.linalg.norm(vec))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError("density operator must be a square matrix")
        num_qubits(mat.shape[0])
        if not np.allclose(mat, mat.conj().T, atol=ATOL):
            raise ValueError("density operator is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1) > ATOL:
            raise ValueError(f"density operator has trace {tr}, expected 1")
        if np.linalg.eigvalsh(mat).min() < -1e-9:
            raise ValueError("density operator has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return num_qubits(self.dim)


def basis_state(index: int, n: int) -> PureState:
    vec = np.zeros(1 << n, dtype=complex)
    vec[index] = 1
    return PureState(vec)


def _raw(x):
    if isinstance(x, PureState):
        return x.amplitudes
    if isinstance(x, DensityOperator):
        return x.matrix
    return np.asarray(x)


def tensor(*operands):
    """Kronecker product of states, density operators or plain matrices.

    The result has the type of the first operand.
    """
    if not operands:
        raise ValueError("tensor needs at least one operand")
    kinds = {type(op) for op in operands}
    if len(kinds) > 1 and (PureState in kinds or DensityOperator in kinds):
        raise TypeError("cannot mix states of different kinds")
    out = reduce(np.kron, (_raw(op) for op in operands))
    first = operands[0]
    if isinstance(first, PureState):
        return PureState(out)
    if isinstance(first, DensityOperator):
        return DensityOperator(out)
    return out


def partial_trace(rho, keep: Sequence[int], n: int | None = None) -> DensityOperator:
    """Reduce ``rho`` to the qubits listed in ``keep`` (in the given order)."""
    mat = _raw(rho.density() if isinstance(rho, PureState) else rho)
    if n is None:
        n = num_qubits(mat.shape[0])
    keep = list(keep)
    if len(set(keep)) != len(keep) or any(not 0 <= q < n for q in keep):
        raise ValueError(f"invalid qubit index set {keep} for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    t = mat.reshape([2] * (2 * n))
    # row axes are 0..n-1, column axes n..2n-1
    perm = keep + traced + [n + q for q in keep] + [n + q for q in traced]
    t = t.transpose(perm)
    dk, dt = 1 << len(keep), 1 << len(traced)
    t = t.reshape(dk, dt, dk, dt)
    return DensityOperator(np.einsum("ajbj->ab", t))


def max_entangled(n: int) -> PureState:
    """``2^{-n/2} sum_i |i>_A |i>_B`` with the A register on the leading qubits."""
    if not 1 <= n <= MAX_QUBITS // 2:
        raise DimensionError(f"n must be in [1, {MAX_QUBITS // 2}]")
    d = 1 << n
    vec = np.zeros(d * d, dtype=complex)
    vec[np.arange(d) * d + np.arange(d)] = 1 / np.sqrt(d)
    return PureState(vec)


def nme_state(alpha) -> PureState:
    """``sum_i alpha_i |i>_A |i>_B`` for a Schmidt vector ``alpha``."""
    alpha = np.asarray(getattr(alpha, "alpha", alpha), dtype=float)
    d = alpha.size
    num_qubits(d * d)
    vec = np.zeros(d * d, dtype=complex)
    vec[np.arange(d) * d + np.arange(d)] = alpha
    return PureState(vec)


def random_state(n: int, rng: np.random.Generator) -> PureState:
    d = 1 << n
    return PureState.from_vector(rng.normal(size=d) + 1j * rng.normal(size=d))


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    d = 1 << n
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return DensityOperator((rho + rho.conj().T) / 2)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def is_unitary(u, atol: float = ATOL) -> bool:
    u = np.asarray(u)
    return np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=atol)


# ---------------------------------------------------------------------------
# Channels
# ---------------------------------------------------------------------------


def vec(mat: np.ndarray) -> np.ndarray:
    return np.asarray(mat).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape(d, d, order="F")


def kraus_to_superop(kraus: Sequence[np.ndarray]) -> np.ndarray:
    d = np.asarray(kraus[0]).shape[0]
    out = np.zeros((d * d, d * d), dtype=complex)
    for k in kraus:
        k = np.asarray(k, dtype=complex)
        out += np.kron(k.conj(), k)
    return out


def superop_to_choi(superop: np.ndarray) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| ⊗ E(|i><j|)`` (input register first)."""
    d = int(round(np.sqrt(superop.shape[0])))
    # superop[(a,b),(c,d)] in column-stacked indices: row = b*d + a for output (a,b)
    s = superop.reshape(d, d, d, d)  # [out_col, out_row, in_col, in_row]
    choi = s.transpose(3, 1, 2, 0).reshape(d * d, d * d)
    return choi


class QuantumChannel:
    """A linear map on ``n``-qubit operators.

    Built either from Kraus operators or directly from a superoperator matrix
    (column-stacking convention). Not every instance is CPTP - QPD sums are
    stored in the same class - use :meth:`is_cptp` to check.
    """

    def __init__(self, n_qubits: int, *, kraus: Sequence[np.ndarray] | None = None,
                 superop: np.ndarray | None = None):
        if (kraus is None) == (superop is None):
            raise ValueError("give exactly one of kraus= or superop=")
        if n_qubits > MAX_QUBITS // 2:
            raise DimensionError("superoperators are limited to 6 qubits")
        self.n_qubits = n_qubits
        self.dim = 1 << n_qubits
        self._kraus = None if kraus is None else [np.asarray(k, dtype=complex) for k in kraus]
        if self._kraus is not None and any(k.shape != (self.dim, self.dim) for k in self._kraus):
            raise DimensionError("Kraus operator shape does not match n_qubits")
        if superop is not None:
            superop = np.asarray(superop, dtype=complex)
            if superop.shape != (self.dim ** 2, self.dim ** 2):
                raise DimensionError("superoperator shape does not match n_qubits")
            self.superop = superop

    @cached_property
    def superop(self) -> np.ndarray:
        return kraus_to_superop(self._kraus)

    @property
    def kraus(self):
        return self._kraus

    @classmethod
    def identity(cls, n: int) -> "QuantumChannel":
        return cls(n, superop=np.eye(4 ** n, dtype=complex))

    @classmethod
    def unitary(cls, u: np.ndarray) -> "QuantumChannel":
        u = np.asarray(u, dtype=complex)
        return cls(num_qubits(u.shape[0]), kraus=[u])

    def apply(self, rho):
        """Apply to a density operator (returns DensityOperator) or raw matrix."""
        mat = _raw(rho.density() if isinstance(rho, PureState) else rho)
        if mat.shape != (self.dim, self.dim):
            raise DimensionError(f"operator of shape {mat.shape} on a {self.n_qubits}-qubit channel")
        if self._kraus is not None and "superop" not in self.__dict__:
            out = sum(k @ mat @ k.conj().T for k in self._kraus)
        else:
            out = unvec(self.superop @ vec(mat))
        if isinstance(rho, (DensityOperator, PureState)):
            return DensityOperator((out + out.conj().T) / 2)
        return out

    def compose(self, first: "QuantumChannel") -> "QuantumChannel":
        """``self ∘ first``: apply ``first``, then ``self``."""
        return QuantumChannel(self.n_qubits, superop=self.superop @ first.superop)

    def __add__(self, other: "QuantumChannel") -> "QuantumChannel":
        return QuantumChannel(self.n_qubits, superop=self.superop + other.superop)

    def __rmul__(self, c: float) -> "QuantumChannel":
        return QuantumChannel(self.n_qubits, superop=c * self.superop)

    def choi(self) -> np.ndarray:
        return superop_to_choi(self.superop)

    def is_trace_preserving(self, atol: float = 1e-9) -> bool:
        # tr[E(X)] = vec(I)^† S vec(X) for all X  <=>  vec(I)^T S = vec(I)^T
        vi = vec(np.eye(self.dim))
        return np.allclose(vi @ self.superop, vi, atol=atol)

    def is_completely_positive(self, atol: float = 1e-8) -> bool:
        c = self.choi()
        if not np.allclose(c, c.conj().T, atol=atol):
            return False
        return np.linalg.eigvalsh((c + c.conj().T) / 2).min() >= -atol

    def is_cptp(self) -> bool:
        return self.is_trace_preserving() and self.is_completely_positive()


def apply_channel(ch: QuantumChannel, rho):
    return ch.apply(rho)


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, letter ``i`` acting on qubit ``i``."""

    letters: str

    def __post_init__(self):
        letters = str(self.letters).upper()
        if not letters or any(c not in PAULI for c in letters):
            raise ValueError(f"invalid Pauli string {self.letters!r}")
        object.__setattr__(self, "letters", letters)

    @property
    def n(self) -> int:
        return len(self.letters)

    @cached_property
    def matrix(self) -> np.ndarray:
        return reduce(np.kron, (PAULI[c] for c in self.letters))

    def __str__(self):
        return self.letters


def pauli_strings(n: int, alphabet: str = "IXYZ"):
    """All Pauli strings of length ``n`` in lexicographic order of ``alphabet``."""
    from itertools import product

    return [PauliString("".join(p)) for p in product(alphabet, repeat=n)]


# basis change taking the +-1 eigenbasis of each Pauli to the Z basis
_ROTATION = {
    "I": I2,
    "Z": I2,
    "X": H,
    "Y": H @ np.diag([1, -1j]),
}


class Observable:
    """A Hermitian observable: a Pauli string or an explicit matrix."""

    def __init__(self, op):
        if isinstance(op, str):
            op = PauliString(op)
        if isinstance(op, PauliString):
            self.pauli = op
            self.matrix = op.matrix
        else:
            mat = np.asarray(op, dtype=complex)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise DimensionError("observable must be a square matrix")
            if not np.allclose(mat, mat.conj().T, atol=ATOL):
                raise ValueError("observable is not Hermitian")
            self.pauli = None
            self.matrix = mat
        self.dim = self.matrix.shape[0]
        self.n_qubits = num_qubits(self.dim)

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, list[np.ndarray]]:
        """Distinct eigenvalues and the matching orthonormal eigenvector blocks."""
        w, v = np.linalg.eigh((self.matrix + self.matrix.conj().T) / 2)
        vals, blocks = [], []
        start = 0
        for i in range(1, len(w) + 1):
            if i == len(w) or w[i] - w[start] > 1e-9:
                vals.append(w[start:i].mean())
                blocks.append(v[:, start:i])
                start = i
        return np.array(vals), blocks

    def outcome_distribution(self, state) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and Born probabilities for a PureState or DensityOperator."""
        if self.pauli is not None:
            diag = _pauli_rotated_diagonal(self.pauli, state)
            parity = _pauli_parity(self.pauli)
            p_plus = diag[parity == 1].sum()
            probs = np.clip(np.array([p_plus, 1 - p_plus]), 0, 1)
            return np.array([1.0, -1.0]), probs / probs.sum()
        vals, blocks = self.spectrum
        if isinstance(state, PureState):
            a = state.amplitudes
            probs = np.array([np.sum(np.abs(b.conj().T @ a) ** 2) for b in blocks])
        else:
            rho = _raw(state)
            probs = np.array([np.trace(b.conj().T @ rho @ b).real for b in blocks])
        probs = np.clip(probs, 0, None)
        return vals, probs / probs.sum()


def _pauli_parity(p: PauliString) -> np.ndarray:
    """Eigenvalue (+-1) of each computational basis state after basis rotation."""
    n = p.n
    idx = np.arange(1 << n)
    par = np.zeros(1 << n, dtype=np.int64)
    for q, c in enumerate(p.letters):
        if c != "I":
            par ^= (idx >> (n - 1 - q)) & 1
    return 1 - 2 * par


def _pauli_rotated_diagonal(p: PauliString, state) -> np.ndarray:
    rot = reduce(np.kron, (_ROTATION[c] for c in p.letters))
    if isinstance(state, PureState):
        return np.abs(rot @ state.amplitudes) ** 2
    rho = _raw(state)
    return np.real(np.einsum("ij,jk,ik->i", rot, rho, rot.conj()))


def _as_observable(o) -> Observable:
    return o if isinstance(o, Observable) else Observable(o)


def expectation(o, rho) -> float:
    """``tr[O rho]`` for a density operator or pure state."""
    o = _as_observable(o)
    if isinstance(rho, PureState):
        a = rho.amplitudes
        return float(np.vdot(a, o.matrix @ a).real)
    mat = _raw(rho)
    if mat.shape != o.matrix.shape:
        raise DimensionError("observable and state dimensions differ")
    return float(np.trace(o.matrix @ mat).real)


def born_sample(o, rho, rng: np.random.Generator, size: int | None = None):
    """Sample measurement eigenvalue(s) of ``o`` on ``rho``."""
    vals, probs = _as_observable(o).outcome_distribution(rho)
    return rng.choice(vals, size=size, p=probs)
