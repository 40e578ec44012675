"""Matrix-model tests: ladder matrices, coherent states, defect measures."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakcr.errors import DomainParameterError, InvalidDimensionError, TruncationError
from weakcr.fock import (
    OperatorPair,
    basis_state,
    boson_pair,
    coherent_state,
    identity,
    inner,
    lowering,
    quasi_strong_defect,
    raising,
    swanson_pair,
    weak_defect,
    weyl_defect,
)


def test_lowering_smallest():
    assert np.allclose(lowering(2).entries, [[0, 1], [0, 0]])


def test_lowering_sqrt_rule():
    a = lowering(3).entries
    expected = np.zeros((3, 3), dtype=complex)
    expected[0, 1] = 1.0
    expected[1, 2] = math.sqrt(2)
    assert np.array_equal(a, expected)


def test_commutator_block_oracle():
    # direct matrix-multiplication oracle for [a, a*] at N = 8
    a, ad = lowering(8).entries, raising(8).entries
    comm = a @ ad - ad @ a
    assert np.allclose(comm[:7, :7], np.eye(7), atol=1e-14)
    assert comm[7, 7] == pytest.approx(-7.0)


def test_lowering_rejects_small_dimension():
    with pytest.raises(InvalidDimensionError):
        lowering(1)


def test_adjoint_is_involution():
    op = swanson_pair(0.4, 6).S
    assert np.array_equal(op.adjoint().adjoint().entries, op.entries)


def test_coherent_state_vacuum():
    phi = coherent_state(0.0, 5)
    assert np.allclose(phi.components, basis_state(0, 5).components)


def test_coherent_state_is_eigenvector():
    phi = coherent_state(1.0, 40)
    a = lowering(40)
    residual = np.linalg.norm(a.entries @ phi.components - phi.components)
    assert residual < 1e-8


def test_coherent_state_number_expectation():
    # direct sum oracle: sum_k k |c_k|^2 should equal |z|^2 = 1
    phi = coherent_state(1.0, 40)
    direct = sum(k * abs(c) ** 2 for k, c in enumerate(phi.components))
    assert direct == pytest.approx(1.0, abs=1e-8)
    ad_a = raising(40).entries @ lowering(40).entries
    assert inner(ad_a @ phi.components, phi.components) == pytest.approx(direct, abs=1e-12)


def test_coherent_state_tail_mass_guard():
    with pytest.raises(TruncationError) as exc:
        coherent_state(2.0, 4)
    assert exc.value.tail_mass > 1e-12


def test_swanson_reduces_to_boson():
    pair = swanson_pair(0.0, 8)
    assert np.allclose(pair.S.entries, lowering(8).entries)
    assert np.allclose(pair.T.entries, raising(8).entries)


def test_swanson_quarter_turn_matches_rotated_pair():
    pair = swanson_pair(math.pi / 4, 8)
    a, ad = lowering(8).entries, raising(8).entries
    assert np.allclose(pair.S.entries, (a + 1j * ad) / math.sqrt(2))
    assert np.allclose(pair.T.entries, (ad + 1j * a) / math.sqrt(2))


@pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 4])
def test_swanson_weak_defect(theta):
    assert weak_defect(swanson_pair(theta, 64)) < 1e-12


def test_weak_defect_boson_exact():
    assert weak_defect(boson_pair(16)) < 1e-14


def test_weak_defect_degenerate_pair():
    a = lowering(16)
    pair = OperatorPair(a, a, safe_rank=15)
    assert weak_defect(pair) >= 1.0


def test_weak_defect_swap_invariance():
    # weak defect of (S, T) equals that of (T', S')
    pair = swanson_pair(0.3, 32)
    swapped = OperatorPair(pair.T.adjoint(), pair.S.adjoint(), safe_rank=pair.safe_rank)
    assert abs(weak_defect(pair) - weak_defect(swapped)) < 1e-12


@pytest.mark.parametrize("theta, n", [(0.0, 4), (0.3, 4), (1.1, 9), (0.7, 33)])
def test_weak_defect_small_dimensions(theta, n):
    assert weak_defect(swanson_pair(theta, n)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=-math.pi, max_value=math.pi),
    st.integers(min_value=4, max_value=48),
)
def test_weak_defect_any_angle_any_dimension(theta, n):
    assert weak_defect(swanson_pair(theta, n)) < 1e-12


def test_quasi_strong_zero_parameter_exact():
    for pair in (boson_pair(16), swanson_pair(0.3, 16)):
        assert quasi_strong_defect(pair, 0.0) == 0.0


def test_quasi_strong_boson():
    assert quasi_strong_defect(boson_pair(128), 0.1) < 1e-8


def test_quasi_strong_degenerate_pair():
    a = lowering(64)
    pair = OperatorPair(a, a, safe_rank=63)
    # [V, a] = 0 for V = exp(alpha a), so the defect is alpha * max|V| on the band
    assert quasi_strong_defect(pair, 0.1) > 1e-3


def test_quasi_strong_rejects_negative_parameter():
    with pytest.raises(DomainParameterError):
        quasi_strong_defect(boson_pair(16), -0.5)


def test_weyl_zero_parameter():
    assert weyl_defect(boson_pair(64), 0.0, 0.3) < 1e-12


def test_weyl_boson():
    assert weyl_defect(boson_pair(256), 0.1, 0.1) < 1e-6


def test_weyl_degenerate_pair():
    a = lowering(64)
    pair = OperatorPair(a, a, safe_rank=63)
    assert weyl_defect(pair, 0.5, 0.5) > 1e-2


def test_weyl_rejects_negative_parameters():
    with pytest.raises(DomainParameterError):
        weyl_defect(boson_pair(16), 0.1, -0.1)


def test_weyl_truncation_convergence():
    # defect decreases with N until it reaches the double-precision floor
    values = [weyl_defect(boson_pair(n), 0.1, 0.1) for n in (32, 64, 128, 256)]
    for prev, nxt in zip(values, values[1:]):
        assert nxt <= max(prev, 1e-12)


def test_implication_chain_all_small():
    pair = boson_pair(256)
    assert weak_defect(pair) < 1e-6
    assert quasi_strong_defect(pair, 0.1) < 1e-6
    assert weyl_defect(pair, 0.1, 0.1) < 1e-6


def test_semigroup_band_exhaustion():
    with pytest.raises(TruncationError):
        quasi_strong_defect(boson_pair(16), 5.0)


def test_identity_and_pair_validation():
    assert np.array_equal(identity(3).entries, np.eye(3))
    with pytest.raises(InvalidDimensionError):
        OperatorPair(lowering(4), lowering(8))
    with pytest.raises(InvalidDimensionError):
        OperatorPair(lowering(4), raising(4), safe_rank=4)
