"""Quasiprobability decompositions of the n-qubit identity channel.

Three builders:

* :func:`qpd_baseline` - no entanglement; ``2^n`` MUB measure-and-prepare
  terms and one negative correction term, ``kappa = 2^{n+1} - 1``.
* :func:`qpd_nme` - ``2^n`` teleportations through ``Psi^alpha``, each
  conjugated by a MUB unitary, plus one correction term,
  ``kappa = 2^{n+1}/(R+1) - 1``.
* :func:`qpd_streamlined` - :func:`qpd_nme` for a resource on ``n_e < n``
  wires padded with ``|00>`` pairs, where the padded single-qubit
  teleportations are replaced by measure-and-prepare.

Terms are symbolic; :meth:`QpdTerm.channel` materializes a superoperator and
:meth:`QpdTerm.trajectory` gives a pure-state sampler for the estimator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .entangle import SchmidtVector, robustness_pure
from .gf import field_new
from .mub import mub_family, phase_op
from .qcore import PureState, QuantumChannel, num_qubits
from .teleport import nme_overlaps

DEGENERATE_EPS = 1e-9
MAX_N = 4


class DegenerateResourceError(ValueError):
    """The resource is maximally entangled, so the correction weights are 0/0."""


def _alpha_array(alpha) -> np.ndarray:
    if isinstance(alpha, SchmidtVector):
        return alpha.alpha
    return SchmidtVector(np.asarray(alpha, dtype=float)).alpha


@dataclass(frozen=True, eq=False)
class CorrectionTable:
    """``prob[k]`` for ``k`` in ``[1, 2^n)``; ``prob[0]`` is always 0."""

    prob: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.prob, dtype=float)
        if p[0] != 0 or np.any(p < 0) or abs(p.sum() - 1) > 1e-10:
            raise ValueError("correction table must be a distribution over k != 0")
        p.setflags(write=False)
        object.__setattr__(self, "prob", p)

    @classmethod
    def uniform(cls, n: int) -> "CorrectionTable":
        d = 1 << n
        p = np.full(d, 1 / (d - 1))
        p[0] = 0
        return cls(p)

    def as_dict(self) -> dict[int, float]:
        return {k: float(v) for k, v in enumerate(self.prob) if k}


def prob_correction(alpha) -> CorrectionTable:
    """``Pr(k|alpha) = (sum_j (-1)^{k⊙j} alpha_j)^2 / (2^n - 1 - R)`` for ``k != 0``."""
    a = _alpha_array(alpha)
    n = num_qubits(a.size)
    denom = a.size - 1 - robustness_pure(a)
    if denom <= DEGENERATE_EPS:
        raise DegenerateResourceError(
            f"resource is maximally entangled (2^n - 1 - R = {denom:.3g}); no correction term")
    ctx = field_new(n)
    p = (ctx.parity_table @ a) ** 2 / denom
    p[0] = 0.0
    # rounding can leave the total a few ulps off
    return CorrectionTable(p / p.sum())


# ---------------------------------------------------------------------------
# Trajectory samplers
# ---------------------------------------------------------------------------


@dataclass
class Trajectory:
    """Output pure states of one QPD term on a fixed input, plus a sampler.

    ``sample(rng, size)`` returns indices into ``states``, drawn through the
    same sequence of random choices the physical circuit would make.
    """

    states: np.ndarray  # (branches, dim)
    stages: list = field(default_factory=list)  # list of (probabilities, combine) pairs

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = np.zeros(size, dtype=np.int64)
        for probs, combine in self.stages:
            draw = _categorical(rng, probs, size)
            idx = combine(idx, draw)
        return idx

    def branch_probabilities(self) -> np.ndarray:
        """Exact distribution over ``states`` (enumerates all stage draws)."""
        out = np.zeros(len(self.states))
        dist = {0: 1.0}
        for probs, combine in self.stages:
            new = {}
            for i, pi in dist.items():
                for k, pk in enumerate(probs):
                    if pk > 0:
                        j = int(combine(np.array([i]), np.array([k]))[0])
                        new[j] = new.get(j, 0.0) + pi * pk
            dist = new
        for i, p in dist.items():
            out[i] += p
        return out


def _categorical(rng, probs, size) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    return np.minimum(np.searchsorted(cdf, rng.random(size), side="right"), len(probs) - 1)


def _born_probs(amps: np.ndarray) -> np.ndarray:
    p = np.abs(amps) ** 2
    return p / p.sum()


# ---------------------------------------------------------------------------
# Term kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MubMeasurePrepare:
    """Measure in MUB ``j`` and re-prepare the observed basis element."""

    n: int
    j: int

    def channel(self) -> QuantumChannel:
        u = mub_family(self.n).unitaries[self.j]
        return QuantumChannel(self.n, kraus=[np.outer(u[:, l], u[:, l].conj()) for l in range(1 << self.n)])

    def trajectory(self, psi: np.ndarray) -> Trajectory:
        u = mub_family(self.n).unitaries[self.j]
        probs = _born_probs(u.conj().T @ psi)
        return Trajectory(u.T.copy(), [(probs, lambda i, l: l)])


@dataclass(frozen=True, eq=False)
class TeleportConjugated:
    """``phi -> U_j E_tel(U_j^† phi U_j) U_j^†`` with resource ``Psi^alpha``.

    ``alpha`` covers the entangled wires only. The ``n_separable`` leading
    wires use a ``|00>`` resource, whose teleportation reduces to a
    computational-basis measurement followed by re-preparation, so they are
    simulated that way.
    """

    n: int
    j: int
    alpha: np.ndarray
    n_separable: int = 0

    @property
    def n_entangled(self) -> int:
        return self.n - self.n_separable

    @cached_property
    def error_probs(self) -> np.ndarray:
        return nme_overlaps(self.alpha)

    def _local_ops(self):
        """Yield ``(m, k, weight, operator)`` for the branches in the rotated frame."""
        ne, ns = self.n_entangled, self.n_separable
        ctx = field_new(ne)
        w = self.error_probs
        for m in range(1 << ns):
            proj = np.zeros((1 << ns, 1 << ns))
            proj[m, m] = 1
            for k in range(1 << ne):
                if w[k] > 0:
                    yield m, k, w[k], np.kron(proj, phase_op(ctx, k))

    def channel(self) -> QuantumChannel:
        u = mub_family(self.n).unitaries[self.j]
        kraus = [np.sqrt(wk) * (u @ op @ u.conj().T) for _, _, wk, op in self._local_ops()]
        return QuantumChannel(self.n, kraus=kraus)

    def trajectory(self, psi: np.ndarray) -> Trajectory:
        u = mub_family(self.n).unitaries[self.j]
        ne, ns = self.n_entangled, self.n_separable
        de = 1 << ne
        rotated = u.conj().T @ psi
        states = np.zeros((1 << self.n, 1 << self.n), dtype=complex)
        for m, k, _, op in self._local_ops():
            out = op @ rotated
            nrm = np.linalg.norm(out)
            if nrm > 0:
                states[m * de + k] = u @ out / nrm
        stages = [(self.error_probs, lambda i, k: i + k)]
        if ns:
            # outcome of measuring the separable wires in the rotated frame
            pm = _born_probs(rotated).reshape(1 << ns, de).sum(axis=1)
            stages.append((pm, lambda i, m: i + m * de))
        return Trajectory(states, stages)


@dataclass(frozen=True, eq=False)
class CorrectionMeasurePrepare:
    """Measure ``l`` in the computational basis, prepare ``|l⊕k>`` with ``k ~ table``."""

    n: int
    table: CorrectionTable

    def channel(self) -> QuantumChannel:
        d = 1 << self.n
        kraus = []
        for k in range(1, d):
            pk = self.table.prob[k]
            if pk > 0:
                # one Kraus operator per (l, k): the measurement destroys coherence
                for l in range(d):
                    op = np.zeros((d, d))
                    op[l ^ k, l] = np.sqrt(pk)
                    kraus.append(op)
        return QuantumChannel(self.n, kraus=kraus)

    def trajectory(self, psi: np.ndarray) -> Trajectory:
        d = 1 << self.n
        return Trajectory(
            np.eye(d, dtype=complex),
            [(_born_probs(psi), lambda i, l: l), (self.table.prob, lambda i, k: i ^ k)],
        )


@dataclass(frozen=True, eq=False)
class QpdTerm:
    coefficient: float
    kind: object

    def channel(self) -> QuantumChannel:
        return self.kind.channel()

    def trajectory(self, psi) -> Trajectory:
        amps = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
        return self.kind.trajectory(amps)


@dataclass(frozen=True, eq=False)
class Qpd:
    """``I^{⊗n} = sum_i c_i F_i`` with sampling table ``|c_i| / kappa``."""

    n: int
    terms: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if abs(self.coefficients.sum() - 1) > 1e-10:
            raise ValueError(f"QPD coefficients sum to {self.coefficients.sum()}, expected 1")

    @cached_property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms], dtype=float)

    @property
    def kappa(self) -> float:
        return float(np.abs(self.coefficients).sum())

    @property
    def probabilities(self) -> np.ndarray:
        a = np.abs(self.coefficients)
        return a / a.sum()

    @property
    def signs(self) -> np.ndarray:
        return np.where(self.coefficients < 0, -1.0, 1.0)

    def __len__(self):
        return len(self.terms)

    def superop(self) -> np.ndarray:
        return sum(t.coefficient * t.channel().superop for t in self.terms)

    def channel(self) -> QuantumChannel:
        return QuantumChannel(self.n, superop=self.superop())


def _check_n(n: int):
    if not 1 <= n <= MAX_N:
        raise ValueError(f"number of cut wires must be in [1, {MAX_N}], got {n}")


def qpd_baseline(n: int) -> Qpd:
    """Optimal cut of ``n`` wires without entanglement."""
    _check_n(n)
    d = 1 << n
    terms = [QpdTerm(1.0, MubMeasurePrepare(n, j)) for j in range(d)]
    terms.append(QpdTerm(-(d - 1.0), CorrectionMeasurePrepare(n, CorrectionTable.uniform(n))))
    return Qpd(n, terms, "baseline")


def _teleport_qpd(n: int, alpha_full: np.ndarray, make_kind, label: str) -> Qpd:
    d = 1 << n
    r = robustness_pure(alpha_full)
    terms = [QpdTerm(1.0 / (r + 1.0), make_kind(j)) for j in range(d)]
    if d - 1 - r > DEGENERATE_EPS:
        terms.append(QpdTerm(-(d / (r + 1.0) - 1.0),
                             CorrectionMeasurePrepare(n, prob_correction(alpha_full))))
    # maximally entangled: the correction weight vanishes and the term is dropped
    return Qpd(n, terms, label)


def qpd_nme(n: int, alpha) -> Qpd:
    """Teleportation-based cut using the pure resource ``Psi^alpha`` on ``2n`` qubits."""
    _check_n(n)
    a = _alpha_array(alpha)
    if a.size != 1 << n:
        raise ValueError(f"Schmidt vector has length {a.size}, expected {1 << n}")
    return _teleport_qpd(n, a, lambda j: TeleportConjugated(n, j, a), "nme")


def embed_schmidt(n: int, alpha_e) -> np.ndarray:
    """Schmidt vector of ``|00>^{⊗(n - n_e)} ⊗ Psi^{alpha_e}`` (separable wires leading)."""
    a = _alpha_array(alpha_e)
    full = np.zeros(1 << n)
    full[: a.size] = a
    return full


def qpd_streamlined(n: int, n_e: int, alpha_e=None) -> Qpd:
    """Cut ``n`` wires with a resource covering only ``n_e`` of them.

    ``n_e = 0`` (no entanglement; ``alpha_e`` may be omitted) gives back the
    baseline decomposition term for term.
    """
    _check_n(n)
    if not 0 <= n_e < n:
        raise ValueError(f"need 0 <= n_e < n, got n_e={n_e}, n={n}")
    if n_e == 0:
        if alpha_e is not None and not np.allclose(_alpha_array(alpha_e), [1.0]):
            raise ValueError("n_e = 0 takes no Schmidt vector")
        full = embed_schmidt(n, [1.0])
        return _teleport_qpd(n, full, lambda j: MubMeasurePrepare(n, j), "streamlined")
    a = _alpha_array(alpha_e)
    if a.size != 1 << n_e:
        raise ValueError(f"Schmidt vector has length {a.size}, expected {1 << n_e}")
    full = embed_schmidt(n, a)
    return _teleport_qpd(n, full, lambda j: TeleportConjugated(n, j, a, n - n_e), "streamlined")


def verify_identity(qpd: Qpd) -> dict:
    """Max absolute deviation of ``sum_i c_i superop(F_i)`` from the identity."""
    err = float(np.abs(qpd.superop() - np.eye(4 ** qpd.n)).max())
    return {"n": qpd.n, "kappa": qpd.kappa, "terms": len(qpd), "max_abs_error": err}
