import numpy as np
import pytest

from nmecut.entangle import SchmidtVector
from nmecut.gf import field_new
from nmecut.mub import phase_element_for_paulis
from nmecut.qcore import (
    DensityOperator,
    QuantumChannel,
    basis_state,
    max_entangled,
    nme_state,
    pauli_strings,
    random_density,
    random_state,
)
from nmecut.teleport import (
    TeleportChannel,
    generalized_bell,
    nme_overlaps,
    nme_teleport_channel,
    teleport_by_circuit,
    teleport_channel,
)


def test_generalized_bell_examples():
    np.testing.assert_allclose(generalized_bell("II").amplitudes, max_entangled(2).amplitudes)
    np.testing.assert_allclose(generalized_bell("Z").amplitudes, np.array([1, 0, 0, -1]) / np.sqrt(2))


@pytest.mark.parametrize("n", [1, 2])
def test_generalized_bell_orthonormal(n):
    mat = np.array([generalized_bell(s).amplitudes for s in pauli_strings(n)])
    np.testing.assert_allclose(mat.conj() @ mat.T, np.eye(4 ** n), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_perfect_resource_gives_identity(n):
    ch = teleport_channel(max_entangled(n))
    assert ch.error_probs[next(iter(pauli_strings(n)))] == pytest.approx(1, abs=1e-12)
    err = np.abs(ch.channel().superop - np.eye(4 ** n)).max()
    assert err <= 1e-12


def test_separable_resource_dephases(rng):
    ch = teleport_channel(basis_state(0, 2))
    phi = random_density(1, rng)
    out = ch.apply(phi).matrix
    np.testing.assert_allclose(out, np.diag(np.diag(phi.matrix)), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_nme_resource_has_no_bit_flips(n, rng):
    alpha = SchmidtVector.from_values(rng.random(2 ** n))
    ch = teleport_channel(nme_state(alpha))
    for s, p in ch.error_probs.items():
        if set(s.letters) & {"X", "Y"}:
            assert abs(p) <= 1e-12


def test_overlap_examples():
    np.testing.assert_allclose(nme_overlaps(SchmidtVector.maximal(1)), [1, 0], atol=1e-12)
    np.testing.assert_allclose(nme_overlaps([1, 0]), [0.5, 0.5], atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_overlaps_sum_and_leading_entry(n, rng):
    for _ in range(10):
        alpha = SchmidtVector.from_values(rng.random(2 ** n))
        w = nme_overlaps(alpha)
        assert w.sum() == pytest.approx(1, abs=1e-12)
        assert w[0] == pytest.approx((alpha.robustness + 1) / 2 ** n, abs=1e-10)


@pytest.mark.parametrize("n", [1, 2])
def test_closed_form_matches_generic_overlaps(n, rng):
    ctx = field_new(n)
    for _ in range(5):
        alpha = SchmidtVector.from_values(rng.random(2 ** n))
        generic = teleport_channel(nme_state(alpha))
        closed = nme_teleport_channel(alpha)
        np.testing.assert_allclose(closed.superop, generic.channel().superop, atol=1e-10)
        w = nme_overlaps(alpha)
        # each Z-type error string is the phase operator of the matching field element
        for s, p in generic.error_probs.items():
            if set(s.letters) <= {"I", "Z"}:
                assert p == pytest.approx(w[phase_element_for_paulis(ctx, s.letters)], abs=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_channel_is_cptp_for_mixed_resources(n, rng):
    res = random_density(2 * n, rng)
    ch = teleport_channel(res).channel()
    assert ch.is_cptp()


def test_circuit_agrees_with_channel(rng):
    for _ in range(5):
        phi = random_density(1, rng)
        res = random_state(2, rng)
        by_circuit = teleport_by_circuit(phi, res).matrix
        by_channel = teleport_channel(res).apply(phi).matrix
        np.testing.assert_allclose(by_circuit, by_channel, atol=1e-12)


def test_bad_inputs():
    with pytest.raises(ValueError):
        teleport_channel(basis_state(0, 3))
    with pytest.raises(ValueError):
        TeleportChannel(1, {})
    with pytest.raises(ValueError):
        teleport_by_circuit(random_density(2, np.random.default_rng(0)), max_entangled(1))
    assert isinstance(teleport_channel(DensityOperator(np.eye(4) / 4)).channel(), QuantumChannel)
