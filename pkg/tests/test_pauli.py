from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockft.pauli import PauliOperator, pauli_product, symplectic_product

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
Y = 1j * X @ Z


def dense(p: PauliOperator) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for q in range(p.n):
        xb, zb = (p.x >> q) & 1, (p.z >> q) & 1
        m = {(0, 0): I2, (1, 0): X, (0, 1): Z, (1, 1): Y}[(xb, zb)]
        out = np.kron(m, out)  # qubit q is bit q of the basis index
    return p.sign * out


def paulis(n):
    return st.builds(
        lambda x, z, s: PauliOperator(n, x, z, s),
        st.integers(0, (1 << n) - 1),
        st.integers(0, (1 << n) - 1),
        st.sampled_from([1, -1]),
    )


def test_from_string_and_str():
    p = PauliOperator.from_string("-XIZY")
    assert p.n == 4 and p.sign == -1
    assert str(p) == "-XIZY"
    assert p.weight == 3
    assert PauliOperator.from_hex(4, p.to_hex()) == p


def test_y_convention():
    y = PauliOperator.from_string("Y")
    assert np.allclose(dense(y), Y)


@given(paulis(3), paulis(3))
def test_product_matches_matrices_up_to_dropped_i(a, b):
    prod = a * b
    m = dense(a) @ dense(b)
    d = dense(prod)
    ratio = m[np.abs(d) > 0.5] / d[np.abs(d) > 0.5]
    # the product's phase is +-1 when a and b commute; otherwise a factor i is dropped
    if a.commutes(b):
        assert np.allclose(ratio, 1)
    else:
        assert np.allclose(np.abs(ratio.imag), 1)
        assert np.allclose(ratio.real, 0) and np.allclose(ratio, ratio[0])


@given(paulis(4), paulis(4))
def test_commutation_matches_matrices(a, b):
    A, B = dense(a), dense(b)
    assert a.commutes(b) == np.allclose(A @ B, B @ A)
    assert symplectic_product(a, b) == (0 if a.commutes(b) else 1)


@given(paulis(4))
def test_hermitian_and_self_inverse(a):
    A = dense(a)
    assert np.allclose(A, A.conj().T)
    assert a * a == PauliOperator.identity(4)


def test_length_mismatch():
    with pytest.raises(ValueError):
        symplectic_product(PauliOperator(2), PauliOperator(3))


def test_embed_restrict_tensor():
    p = PauliOperator.from_string("XZ")
    e = p.embed(5, [1, 3])
    assert str(e) == "+IXIZI"
    assert e.restrict([1, 3]) == p
    assert str(p.tensor(PauliOperator.from_string("Y"))) == "+XZY"
    assert pauli_product([p, p], 2) == PauliOperator.identity(2)
