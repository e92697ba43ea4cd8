"""Tableau tests against the dense conjugation oracle.

The heavy lifting is test_generator_images_dense: every gate kind, every
basis row, every d, exponents and phases compared against U P U^dagger
computed densely. Everything downstream (forward/inverse conjugation,
right-composition) reuses words whose dense unitaries are built by the
package-independent helpers.
"""

import numpy as np
import pytest

from quditsim.gates import CliffordGate, GATE_KINDS, gate, inverse_gate
from quditsim.pauli import PauliString
from quditsim.tableau import Tableau, identity_tableau

from helpers import (
    dense_pauli,
    dense_word_unitary,
    random_clifford_gates,
    random_pauli_exponents,
)

DS = [2, 3, 5]


def random_tableau(rng, n, d, length):
    """Tableau plus the word that built it, so tests can go dense."""
    word = random_clifford_gates(rng, n, d, length)
    t = identity_tableau(n, d)
    t.apply_word(word)
    return t, word


# -- construction ---------------------------------------------------------------

def test_identity_rows_d2():
    t = identity_tableau(2, 2)
    assert t.row(0).to_text() == "t^0 Z0^1"
    assert t.row(1).to_text() == "t^0 Z1^1"
    assert t.row(2).to_text() == "t^0 X0^1"
    assert t.row(3).to_text() == "t^0 X1^1"
    assert np.all(t.phases == 0)


def test_identity_rows_d3_single_site():
    t = identity_tableau(1, 3)
    assert t.row(0) == PauliString(3, [0], [1])
    assert t.row(1) == PauliString(3, [1], [0])


@pytest.mark.parametrize("d", DS)
@pytest.mark.parametrize("n", [1, 2, 4])
def test_identity_symplectic(n, d):
    assert identity_tableau(n, d).symplectic_ok()


def test_identity_rejects_bad_n():
    with pytest.raises(ValueError):
        identity_tableau(0, 3)


# -- single gate images ----------------------------------------------------------

def test_hadamard_maps_stabilizer_to_x():
    t = identity_tableau(1, 2)
    t.apply_gate(gate("H", 0))
    assert t.row(0) == PauliString(2, [1], [0])


def test_phase_gate_qutrit_destabilizer():
    t = identity_tableau(1, 3)
    t.apply_gate(gate("S", 0))
    assert t.row(1) == PauliString(3, [1], [1], 0)


def test_phase_gate_qubit_destabilizer_has_odd_phase():
    # Y = tau X Z at d=2
    t = identity_tableau(1, 2)
    t.apply_gate(gate("S", 0))
    assert t.row(1) == PauliString(2, [1], [1], 1)


def test_sum_qutrit_all_rows_dense():
    t = identity_tableau(2, 3)
    t.apply_gate(gate("SUM", 0, 1))
    u = dense_word_unitary([gate("SUM", 0, 1)], 2, 3)
    basis = [(0, PauliString(3, [0, 0], [1, 0])),
             (1, PauliString(3, [0, 0], [0, 1])),
             (2, PauliString(3, [1, 0], [0, 0])),
             (3, PauliString(3, [0, 1], [0, 0]))]
    for r, p in basis:
        want = u @ p.to_matrix() @ u.conj().T
        assert np.allclose(t.row(r).to_matrix(), want, atol=1e-12)


@pytest.mark.parametrize("d", DS)
@pytest.mark.parametrize("kind", GATE_KINDS)
def test_generator_images_dense(kind, d):
    """Exponents and phases of every image row match dense conjugation."""
    two_site = kind in ("SUM", "SUM_inv")
    placements = [(0, 1), (1, 0)] if two_site else [(0,), (1,)]
    for sites in placements:
        g = CliffordGate(kind, sites)
        t = identity_tableau(2, d)
        t.apply_gate(g)
        u = dense_word_unitary([g], 2, d)
        for r in range(4):
            p = identity_tableau(2, d).row(r)
            want = u @ p.to_matrix() @ u.conj().T
            assert np.allclose(t.row(r).to_matrix(), want, atol=1e-12), \
                f"{kind} on {sites}, row {r}"


@pytest.mark.parametrize("d", DS)
def test_apply_gate_on_nontrivial_rows_dense(d):
    """Image tables must be right on all exponent pairs, not just generators."""
    rng = np.random.default_rng(90 + d)
    t, word = random_tableau(rng, 2, d, 12)
    for kind in GATE_KINDS:
        sites = (1, 0) if kind in ("SUM", "SUM_inv") else (1,)
        g = CliffordGate(kind, sites)
        t2 = t.copy().apply_gate(g)
        u = dense_word_unitary(word + [g], 2, d)
        for r in range(4):
            p = identity_tableau(2, d).row(r)
            want = u @ p.to_matrix() @ u.conj().T
            assert np.allclose(t2.row(r).to_matrix(), want, atol=1e-11)


def test_apply_gate_rejects_out_of_range():
    t = identity_tableau(2, 3)
    with pytest.raises(ValueError):
        t.apply_gate(gate("H", 2))
    with pytest.raises(ValueError):
        t.apply_gate(gate("SUM", 0, 5))


# -- forward conjugation ----------------------------------------------------------

@pytest.mark.parametrize("d", DS)
def test_conjugate_forward_identity(d):
    rng = np.random.default_rng(7)
    t = identity_tableau(3, d)
    for _ in range(5):
        x, z, ph = random_pauli_exponents(rng, d, 3)
        p = PauliString(d, x, z, ph)
        assert t.conjugate_forward(p) == p


def test_conjugate_forward_after_h():
    t = identity_tableau(1, 2)
    t.apply_gate(gate("H", 0))
    assert t.conjugate_forward(PauliString(2, [0], [1])) == PauliString(2, [1], [0])


@pytest.mark.parametrize("d", DS)
def test_conjugate_forward_random_word_dense(d):
    rng = np.random.default_rng(40 + d)
    t, word = random_tableau(rng, 3, d, 20)
    u = dense_word_unitary(word, 3, d)
    for _ in range(6):
        x, z, ph = random_pauli_exponents(rng, d, 3)
        p = PauliString(d, x, z, ph)
        got = t.conjugate_forward(p)
        want = u @ dense_pauli(d, x, z, ph) @ u.conj().T
        assert np.allclose(got.to_matrix(), want, atol=1e-11)


def test_conjugate_forward_shape_mismatch():
    t = identity_tableau(2, 3)
    with pytest.raises(ValueError):
        t.conjugate_forward(PauliString(3, [1], [0]))
    with pytest.raises(ValueError):
        t.conjugate_forward(PauliString(2, [1, 0], [0, 0]))


# -- inverse conjugation ------------------------------------------------------------

def test_conjugate_inverse_identity_tableau():
    p = PauliString(3, [1, 0], [0, 1], 4)
    t = identity_tableau(2, 3)
    assert t.conjugate_inverse(p) == p


@pytest.mark.parametrize("d", DS)
def test_conjugate_inverse_roundtrip_exact(d):
    rng = np.random.default_rng(60 + d)
    for _ in range(8):
        t, _ = random_tableau(rng, 3, d, 30)
        x, z, ph = random_pauli_exponents(rng, d, 3)
        q = PauliString(d, x, z, ph)
        p = t.conjugate_forward(q)
        back = t.conjugate_inverse(p)
        assert back == q  # exact, including phase


@pytest.mark.parametrize("d", [2, 3])
def test_conjugate_inverse_dense(d):
    rng = np.random.default_rng(77 + d)
    t, word = random_tableau(rng, 3, d, 30)
    u = dense_word_unitary(word, 3, d)
    for _ in range(6):
        x, z, ph = random_pauli_exponents(rng, d, 3)
        p = PauliString(d, x, z, ph)
        got = t.conjugate_inverse(p)
        want = u.conj().T @ dense_pauli(d, x, z, ph) @ u
        assert np.allclose(got.to_matrix(), want, atol=1e-11)


def test_conjugate_inverse_corrupted_tableau_raises():
    t = identity_tableau(2, 3)
    t.zs[1] = t.zs[0]  # duplicate stabilizer row: exponent matrix singular
    with pytest.raises(np.linalg.LinAlgError):
        t.conjugate_inverse(PauliString(3, [0, 0], [0, 1]))


# -- right multiplication -------------------------------------------------------------

def test_right_multiply_empty_word():
    rng = np.random.default_rng(3)
    t, _ = random_tableau(rng, 3, 3, 15)
    before = t.dump()
    t.right_multiply([])
    assert t.dump() == before


def test_right_multiply_identity_base():
    t = identity_tableau(2, 3).right_multiply([gate("H", 0)])
    want = identity_tableau(2, 3).apply_gate(gate("H", 0))
    assert t == want


@pytest.mark.parametrize("d", [2, 3])
def test_right_multiply_dense(d):
    rng = np.random.default_rng(85 + d)
    t, word_a = random_tableau(rng, 3, d, 15)
    word_b = [gate("SUM", 2, 1), gate("H", 2), gate("S", 1), gate("SUM_inv", 1, 2)]
    t.right_multiply(word_b)
    u = dense_word_unitary(word_a, 3, d) @ dense_word_unitary(word_b, 3, d)
    for r in range(6):
        p = identity_tableau(3, d).row(r)
        want = u @ p.to_matrix() @ u.conj().T
        assert np.allclose(t.row(r).to_matrix(), want, atol=1e-11)


@pytest.mark.parametrize("d", [2, 3])
def test_right_multiply_matches_prepended_word(d):
    # C, then W on the right, equals applying W first and then C's word
    rng = np.random.default_rng(19 + d)
    t, word = random_tableau(rng, 3, d, 10)
    extra = random_clifford_gates(rng, 3, d, 6)
    t.right_multiply(extra)
    ref = identity_tableau(3, d).apply_word(extra).apply_word(word)
    assert t == ref


# -- invariants ---------------------------------------------------------------------

@pytest.mark.parametrize("d", DS)
def test_gate_inverse_restores_exactly(d):
    rng = np.random.default_rng(23 + d)
    t, _ = random_tableau(rng, 3, d, 10)
    for kind in GATE_KINDS:
        sites = (0, 2) if kind in ("SUM", "SUM_inv") else (1,)
        g = CliffordGate(kind, sites)
        t2 = t.copy().apply_gate(g)
        for h in inverse_gate(g, d):
            t2.apply_gate(h)
        assert t2 == t


@pytest.mark.parametrize("d", DS)
def test_symplectic_preserved_by_random_words(d):
    rng = np.random.default_rng(31 + d)
    for _ in range(40):
        t, _ = random_tableau(rng, 4, d, 25)
        assert t.symplectic_ok()
        assert t.row(0).commutation_exponent(t.row(4)) == 1


@pytest.mark.parametrize("d", [2, 3])
def test_clifford_only_expectations_match_dense(d):
    """Measurement-free Pauli expectations from the tableau alone.

    For |psi> = C|0...0>, <psi|P|psi> = <0|C^dag P C|0> which is the inverse
    image's phase when its X block vanishes on every site, else zero.
    """
    rng = np.random.default_rng(101 + d)
    for _ in range(10):
        t, word = random_tableau(rng, 3, d, 18)
        u = dense_word_unitary(word, 3, d)
        psi = u[:, 0]
        x, z, ph = random_pauli_exponents(rng, d, 3)
        p = PauliString(d, x, z, ph)
        q = t.conjugate_inverse(p)
        got = q.phase_value() if not q.x.any() else 0.0
        want = psi.conj() @ (dense_pauli(d, x, z, ph) @ psi)
        assert abs(got - want) < 1e-12


# -- serialization ---------------------------------------------------------------------

def test_dump_golden():
    t = identity_tableau(2, 3)
    assert t.dump() == ("0 0 | 1 0 | 0\n"
                        "0 0 | 0 1 | 0\n"
                        "1 0 | 0 0 | 0\n"
                        "0 1 | 0 0 | 0")


def test_dump_roundtrip_values():
    rng = np.random.default_rng(2)
    t, _ = random_tableau(rng, 2, 5, 12)
    lines = t.dump().splitlines()
    assert len(lines) == 4
    for r, line in enumerate(lines):
        xs, zs, ph = line.split(" | ")
        assert [int(v) for v in xs.split()] == list(t.xs[r])
        assert [int(v) for v in zs.split()] == list(t.zs[r])
        assert int(ph) == t.phases[r]
