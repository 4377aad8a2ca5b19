"""n-qubit teleportation with an arbitrary resource state as a Pauli channel.

With resource ``rho`` on registers B (sender) and C (receiver), teleporting
``phi`` yields ``sum_sigma p_sigma sigma phi sigma`` where
``p_sigma = <Phi^sigma| rho |Phi^sigma>`` and
``|Phi^sigma> = (sigma ⊗ I)|Phi_n>`` is a generalized Bell state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf import field_new
from .mub import phase_op
from .qcore import (
    H,
    I2,
    X,
    Z,
    DensityOperator,
    PauliString,
    PureState,
    QuantumChannel,
    max_entangled,
    num_qubits,
    partial_trace,
    pauli_strings,
)

CLAMP = 1e-14


def generalized_bell(sigma) -> PureState:
    """``(sigma ⊗ I^{⊗n}) |Phi_n>``."""
    sigma = sigma if isinstance(sigma, PauliString) else PauliString(sigma)
    phi = max_entangled(sigma.n).amplitudes
    op = np.kron(sigma.matrix, np.eye(1 << sigma.n))
    return PureState(op @ phi)


@dataclass(frozen=True, eq=False)
class TeleportChannel:
    n: int
    error_probs: dict  # PauliString -> float

    def __post_init__(self):
        total = sum(self.error_probs.values())
        if any(p < -1e-12 for p in self.error_probs.values()) or abs(total - 1) > 1e-10:
            raise ValueError("Pauli error probabilities must be a distribution")

    def kraus(self) -> list[np.ndarray]:
        return [np.sqrt(p) * s.matrix for s, p in self.error_probs.items() if p > 0]

    def channel(self) -> QuantumChannel:
        return QuantumChannel(self.n, kraus=self.kraus())

    def apply(self, rho):
        return self.channel().apply(rho)


def _density(resource) -> np.ndarray:
    if isinstance(resource, PureState):
        return resource.density().matrix
    if isinstance(resource, DensityOperator):
        return resource.matrix
    return DensityOperator(resource).matrix


def teleport_channel(resource, n: int | None = None) -> TeleportChannel:
    """Pauli-error form of teleportation through a ``2n``-qubit resource."""
    rho = _density(resource)
    m = num_qubits(rho.shape[0])
    if n is None:
        n = m // 2
    if m != 2 * n:
        raise ValueError(f"resource has {m} qubits, expected {2 * n}")
    probs = {}
    for s in pauli_strings(n):
        b = generalized_bell(s).amplitudes
        p = float(np.vdot(b, rho @ b).real)
        probs[s] = 0.0 if abs(p) < CLAMP else p
    return TeleportChannel(n, probs)


def nme_overlaps(alpha) -> np.ndarray:
    """``<Phi^{Z_k}| Psi^alpha |Phi^{Z_k}> = 2^{-n} (sum_i (-1)^{k⊙i} alpha_i)^2`` for all k.

    Entry 0 equals ``(R + 1) / 2^n``. The overlaps sum to one.
    """
    a = np.asarray(getattr(alpha, "alpha", alpha), dtype=float)
    n = num_qubits(a.size)
    ctx = field_new(n)
    w = (ctx.parity_table @ a) ** 2 / a.size
    w[w < CLAMP] = 0.0
    return w


def nme_teleport_channel(alpha) -> QuantumChannel:
    """Closed form ``phi -> sum_k overlap_k Z_k phi Z_k`` for a ``Psi^alpha`` resource."""
    a = np.asarray(getattr(alpha, "alpha", alpha), dtype=float)
    n = num_qubits(a.size)
    ctx = field_new(n)
    w = nme_overlaps(a)
    return QuantumChannel(n, kraus=[np.sqrt(w[k]) * phase_op(ctx, k) for k in range(a.size) if w[k] > 0])


def teleport_by_circuit(phi, resource) -> DensityOperator:
    """Single-qubit teleportation simulated gate by gate.

    Qubit order is (A, B, C): A holds ``phi``, B/C hold the resource. Bell
    measurement on A, B (CNOT A->B, H on A), then ``X^{m_B} Z^{m_A}`` on C;
    returns the outcome-averaged state of C.
    """
    phi_m = _density(phi)
    res = _density(resource)
    if phi_m.shape != (2, 2) or res.shape != (4, 4):
        raise ValueError("circuit teleportation is implemented for one qubit")
    rho = np.kron(phi_m, res)
    cnot_ab = np.zeros((8, 8))
    for idx in range(8):
        a, b, c = (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        cnot_ab[(a << 2) | ((b ^ a) << 1) | c, idx] = 1
    u = np.kron(H, np.eye(4)) @ cnot_ab
    rho = u @ rho @ u.conj().T
    out = np.zeros((8, 8), dtype=complex)
    for ma in (0, 1):
        for mb in (0, 1):
            proj = np.kron(np.kron(np.diag([1 - ma, ma]), np.diag([1 - mb, mb])), I2)
            corr = np.linalg.matrix_power(Z, ma) @ np.linalg.matrix_power(X, mb)
            fix = np.kron(np.eye(4), corr)
            out += fix @ proj @ rho @ proj @ fix.conj().T
    return partial_trace(DensityOperator((out + out.conj().T) / 2), keep=[2])
