import numpy as np
import pytest

from nmecut.gf import field_new, gf_mul
from nmecut.mub import (
    audit,
    mub_family,
    mub_unitary,
    phase_element_for_paulis,
    phase_exponent,
    phase_factor,
    phase_op,
    phase_op_paulis,
    s_operator,
    shift_op,
)
from nmecut.qcore import X, Y, Z, PauliString, random_density

ATOL = 1e-10


def test_phase_and_shift_one_qubit():
    ctx = field_new(1)
    np.testing.assert_array_equal(phase_op(ctx, 1), Z)
    np.testing.assert_array_equal(shift_op(ctx, 1), X)
    np.testing.assert_array_equal(phase_op(ctx, 0), np.eye(2))
    np.testing.assert_array_equal(shift_op(ctx, 0), np.eye(2))


def test_shift_two_qubits():
    np.testing.assert_array_equal(shift_op(field_new(2), 3), np.kron(X, X))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_phase_op_is_pauli_product(n):
    ctx = field_new(n)
    for k in range(ctx.size):
        letters = phase_op_paulis(ctx, k)
        # oracle: build the diagonal sign pattern directly from bit 0 of l⊙k
        diag = np.array([(-1) ** (gf_mul(ctx, l, k) & 1) for l in range(ctx.size)])
        np.testing.assert_array_equal(np.diag(PauliString(letters).matrix).real, diag)
        assert phase_element_for_paulis(ctx, letters) == k


def test_phase_element_rejects_bad_string():
    with pytest.raises(ValueError):
        phase_element_for_paulis(field_new(2), "ZX")


def test_phase_factor_examples():
    ctx = field_new(1)
    assert phase_factor(ctx, 1, 1) == 1j
    for n in (1, 2, 3):
        c = field_new(n)
        for j in range(c.size):
            assert phase_factor(c, j, 0) == 1


def _oracle_exponent(ctx, j, k):
    # product over (r, t) of i^{int(j⊙(k_r 2^r)⊙(k_t 2^t))}, kept as a complex product
    val = 1 + 0j
    for r in range(ctx.n):
        for t in range(ctx.n):
            a = ((k >> r) & 1) << r
            b = ((k >> t) & 1) << t
            val *= 1j ** gf_mul(ctx, gf_mul(ctx, j, a), b)
    return val


@pytest.mark.parametrize("n", [1, 2, 3])
def test_phase_factor_square_and_oracle(n):
    ctx = field_new(n)
    for j in range(ctx.size):
        for k in range(ctx.size):
            s = phase_factor(ctx, j, k)
            assert abs(s - _oracle_exponent(ctx, j, k)) < 1e-12
            assert 0 <= phase_exponent(ctx, j, k) < 4
            sign = (-1) ** (gf_mul(ctx, gf_mul(ctx, j, k), k) & 1)
            assert abs(s * s - sign) < 1e-12


def test_s_operator_examples():
    ctx = field_new(1)
    np.testing.assert_allclose(s_operator(ctx, 0, 1), X)
    np.testing.assert_allclose(s_operator(ctx, 1, 1), 1j * Z @ X)
    np.testing.assert_allclose(s_operator(ctx, 1, 1), -Y)
    for n in (1, 2, 3):
        c = field_new(n)
        for j in range(c.size):
            np.testing.assert_allclose(s_operator(c, j, 0), np.eye(c.size))


def test_mub_unitary_one_qubit():
    u = mub_unitary(field_new(1), 0)
    plus, minus = np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)
    np.testing.assert_allclose(u[:, 0], plus)
    np.testing.assert_allclose(u[:, 1], minus)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_complete_unbiasedness(n):
    fam = mub_family(n)
    d = 2 ** n
    bases = [fam.basis(j) for j in range(d + 1)]
    for b in bases:
        np.testing.assert_allclose(b @ b.conj().T, np.eye(d), atol=ATOL)
    for a in range(d + 1):
        for b in range(a + 1, d + 1):
            f = np.abs(bases[a].conj().T @ bases[b]) ** 2
            assert np.abs(f - 1 / d).max() <= ATOL


@pytest.mark.parametrize("n", [1, 2, 3])
def test_conjugation_and_eigenbasis(n):
    ctx = field_new(n)
    fam = mub_family(n)
    for j in range(ctx.size):
        u = fam.unitaries[j]
        ops = [s_operator(ctx, j, k) for k in range(ctx.size)]
        for k, s in enumerate(ops):
            np.testing.assert_allclose(u @ phase_op(ctx, k) @ u.conj().T, s, atol=ATOL)
            spectral = sum((-1) ** (gf_mul(ctx, l, k) & 1) * np.outer(u[:, l], u[:, l].conj())
                           for l in range(ctx.size))
            np.testing.assert_allclose(spectral, s, atol=ATOL)
        for a in ops:
            for b in ops:
                np.testing.assert_allclose(a @ b, b @ a, atol=ATOL)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_commutation_relation(n):
    ctx = field_new(n)
    for a in range(ctx.size):
        for b in range(ctx.size):
            za, xb = phase_op(ctx, a), shift_op(ctx, b)
            sign = (-1) ** (gf_mul(ctx, a, b) & 1)
            np.testing.assert_allclose(za @ xb, sign * xb @ za, atol=ATOL)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dephasing_identity(n, rng):
    ctx = field_new(n)
    rho = random_density(n, rng).matrix
    for k in range(1, ctx.size):
        # un-daggered on both sides: the squared phase factor supplies the sign
        lhs = sum(s_operator(ctx, j, k) @ rho @ s_operator(ctx, j, k) for j in range(ctx.size)) / ctx.size
        rhs = np.zeros_like(rho)
        for l in range(ctx.size):
            rhs[l ^ k, l ^ k] = rho[l, l]
        np.testing.assert_allclose(lhs, rhs, atol=ATOL)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_audit_report(n):
    rep = audit(n)
    assert set(rep) >= {"unitarity", "unbiasedness", "conjugation", "dephasing"}
    assert max(rep.values()) <= ATOL


def test_family_is_cached_and_read_only():
    fam = mub_family(2)
    assert fam is mub_family(2)
    with pytest.raises(ValueError):
        fam.unitaries[0][0, 0] = 0
