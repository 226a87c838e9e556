import numpy as np
import pytest

from teleportlab.channels import depolarizing, identity_channel, random_channel
from teleportlab.qmath import (
    fidelity,
    maximally_entangled,
    projector,
    random_pure,
    random_state,
    swap_matrix,
    trace_distance,
)
from teleportlab.teleport import (
    bell_basis,
    bell_state,
    correction_unitary,
    teleport,
    teleport_detailed,
    teleport_with_resource,
)


def test_bell_state_eta0_is_maximally_entangled():
    np.testing.assert_allclose(bell_state(2, 0), maximally_entangled(2), atol=1e-15)


def test_bell_state_eta1_shift():
    expected = np.array([0, 1, 1, 0]) / np.sqrt(2)  # (|01> + |10>)/sqrt2
    np.testing.assert_allclose(bell_state(2, 1), expected, atol=1e-15)


def test_bell_projectors_match_states():
    basis = bell_basis(2)
    np.testing.assert_allclose(
        basis.projectors[0], projector(maximally_entangled(2)), atol=1e-15
    )


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bell_basis_orthonormal_complete(n):
    basis = bell_basis(n)
    gram = np.array([
        [np.vdot(u, v) for v in basis.states] for u in basis.states
    ])
    np.testing.assert_allclose(gram, np.eye(n * n), atol=1e-12)
    total = sum(basis.projectors)
    np.testing.assert_allclose(total, np.eye(n * n), atol=1e-12)


def test_bell_basis_rejects_small_dim():
    with pytest.raises(ValueError):
        bell_basis(1)


def test_correction_unitary_eta0_is_swap():
    np.testing.assert_allclose(correction_unitary(2, 0), swap_matrix(2, 2), atol=1e-15)


@pytest.mark.parametrize("n", [2, 3])
def test_correction_unitary_is_unitary(n):
    for eta in range(n * n):
        u = correction_unitary(n, eta)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(n * n), atol=1e-12)


def test_correction_unitary_eta2_phases():
    # eta=2 -> (n, m) = (1, 0): phase exp(i pi k) on the b index, then swap
    expected = swap_matrix(2, 2) @ np.kron(np.eye(2), np.diag([1.0, -1.0]))
    np.testing.assert_allclose(correction_unitary(2, 2), expected, atol=1e-14)


def test_correction_unitary_rejects_bad_eta():
    with pytest.raises(ValueError):
        correction_unitary(2, 4)


def test_teleport_through_fully_depolarizing():
    rho = random_state(2, seed=0)
    out = teleport(rho, depolarizing(1.0))
    assert fidelity(out, rho) >= 1 - 1e-9


def test_teleport_qutrit_through_random_channel():
    rho = random_state(3, seed=1)
    out = teleport(rho, random_channel(3, 9, seed=2))
    assert fidelity(out, rho) >= 1 - 1e-9


def test_teleport_maximally_mixed():
    out = teleport(np.eye(2) / 2, depolarizing(0.8))
    np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-12)


def test_teleport_random_triples():
    idx = 0
    for n in (2, 3):
        for seed in range(10):
            rho = random_state(n, seed=idx)
            ch = random_channel(n, (idx % (n * n)) + 1, seed=idx + 1000)
            assert trace_distance(teleport(rho, ch), rho) < 1e-9
            idx += 1


def test_teleport_dim_mismatch():
    with pytest.raises(ValueError):
        teleport(np.eye(3) / 3, depolarizing(0.5))


def test_branch_probabilities_uniform():
    for n in (2, 3):
        rho = random_state(n, seed=n)
        _, probs = teleport_detailed(rho, random_channel(n, 2, seed=5))
        np.testing.assert_allclose(probs, np.full(n * n, 1 / n**2), atol=1e-10)


def test_teleport_linear_in_state():
    ch = depolarizing(0.5)
    rho1 = random_state(2, seed=21)
    rho2 = random_state(2, seed=22)
    alpha = 0.3
    mixed = alpha * rho1 + (1 - alpha) * rho2
    expected = alpha * teleport(rho1, ch) + (1 - alpha) * teleport(rho2, ch)
    np.testing.assert_allclose(teleport(mixed, ch), expected, atol=1e-10)


def test_resource_default_matches_maximally_entangled():
    rho = random_state(2, seed=30)
    ch = depolarizing(0.25)
    np.testing.assert_allclose(
        teleport_with_resource(rho, ch, maximally_entangled(2)),
        teleport(rho, ch),
        atol=1e-13,
    )


def test_product_resource_kills_coherence():
    ch = depolarizing(0.5)
    product = np.zeros(4, dtype=complex)
    product[0] = 1.0  # |00>
    plus = projector(np.array([1, 1]) / np.sqrt(2))
    out = teleport_with_resource(plus, ch, product)
    np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-12)
    assert abs(fidelity(out, plus) - 0.5) < 1e-10
    # output depends only on the input's diagonal
    out_diag = teleport_with_resource(np.diag(np.diag(plus)), ch, product)
    np.testing.assert_allclose(out, out_diag, atol=1e-12)


def test_partial_resource_average_fidelity():
    # standard protocol with mu = (cos pi/8, sin pi/8): the average fidelity
    # over Haar inputs is (2 F_e + 1)/3 with F_e = (sum mu)^2 / 2
    c, s = np.cos(np.pi / 8), np.sin(np.pi / 8)
    resource = np.zeros(4, dtype=complex)
    resource[0], resource[3] = c, s
    ch = depolarizing(0.5)
    total = 0.0
    count = 1000
    for seed in range(count):
        psi = random_pure(2, seed)
        out = teleport_with_resource(projector(psi), ch, resource)
        total += float(np.real(psi.conj() @ out @ psi))
    average = total / count
    expected = (2 * ((c + s) ** 2 / 2) + 1) / 3
    assert average < 0.95
    assert abs(average - expected) < 0.02


def test_resource_dim_mismatch():
    with pytest.raises(ValueError):
        teleport_with_resource(random_state(2, 0), depolarizing(0.5), np.zeros(9))


def test_teleport_does_not_depend_on_channel():
    # the physical channel is never used on the payload path
    rho = random_state(2, seed=40)
    a = teleport(rho, identity_channel(2))
    b = teleport(rho, depolarizing(1.0))
    np.testing.assert_allclose(a, b, atol=1e-12)
