"""Ladder, biorthogonality, and intertwiner tests."""

import math

import numpy as np
import pytest

from weakcr.errors import (
    NoKernelError,
    NonNormalizableError,
    PreconditionError,
    TruncationError,
)
from weakcr.fock import basis_state, boson_pair, identity, lowering, raising, swanson_pair
from weakcr.ladder import (
    biorthogonality_gram,
    build_ladder,
    commutation_power_check,
    eigen_check,
    intertwiners,
    kernel_vector,
    residuals_monotone,
    restricted_spectrum,
    tail_mass_membership,
)


def swanson_families(theta=0.3, dim=96, length=6):
    pair = swanson_pair(theta, dim)
    member = tail_mass_membership(pair.safe_rank)
    xi0 = kernel_vector(pair.S, 1e-10)
    eta0 = kernel_vector(pair.T.adjoint(), 1e-10)
    fam_xi = build_ladder(pair.T, xi0, length, member=member)
    fam_eta = build_ladder(pair.S.adjoint(), eta0, length, member=member)
    return pair, fam_xi, fam_eta


# --- kernel vectors -----------------------------------------------------------


def test_kernel_of_lowering_is_vacuum():
    xi0 = kernel_vector(lowering(16), 1e-10)
    assert np.allclose(xi0.components, basis_state(0, 16).components, atol=1e-12)


def test_kernel_of_swanson_matches_recursion():
    # nullspace oracle: S xi = 0 forces c1 = 0 and c2/c0 = -i tan(theta)/sqrt(2)
    S = swanson_pair(0.3, 64).S
    xi0 = kernel_vector(S, 1e-10)
    ratio = xi0.components[2] / xi0.components[0]
    assert abs(ratio - (-1j * math.tan(0.3) / math.sqrt(2))) < 1e-8
    assert abs(xi0.components[1]) < 1e-10
    # phase convention: first non-negligible component positive real
    assert xi0.components[0].real > 0
    assert abs(xi0.components[0].imag) < 1e-12


def test_kernel_vector_rejects_invertible():
    with pytest.raises(NoKernelError) as exc:
        kernel_vector(identity(8), 1e-10)
    assert exc.value.sigma_min == pytest.approx(1.0)


# --- ladder construction -------------------------------------------------------


def test_boson_ladder_is_basis():
    # sqrt(k!) cancels the ladder factors exactly
    fam = build_ladder(raising(32), basis_state(0, 32), 8)
    assert len(fam) == 9
    for k, v in enumerate(fam.vectors):
        assert np.allclose(v.components, basis_state(k, 32).components, atol=1e-13)


def test_member_always_false_keeps_base_only():
    fam = build_ladder(raising(16), basis_state(0, 16), 5, member=lambda s: False)
    assert len(fam) == 1
    assert fam.stop_reason == "membership failed at k=1"


def test_membership_stops_at_truncation_edge():
    fam = build_ladder(raising(8), basis_state(0, 8), 20, member=tail_mass_membership(7))
    assert len(fam) == 7  # e_7 has all mass beyond band 7
    assert fam.stop_reason.startswith("membership failed")


def test_build_ladder_rejects_zero_base():
    from weakcr.fock import StateVector

    with pytest.raises(PreconditionError):
        build_ladder(raising(8), StateVector(np.zeros(8)), 3)


# --- eigen checks ---------------------------------------------------------------


def test_boson_eigen_residuals_vanish():
    pair = boson_pair(32)
    fam = build_ladder(pair.T, basis_state(0, 32), 10)
    res = eigen_check(pair, fam)
    assert max(res) < 1e-12
    assert fam.eigen_residuals == res


def test_swanson_eigen_residuals():
    pair, fam_xi, _ = swanson_families()
    res = eigen_check(pair, fam_xi)
    assert len(res) == 7
    assert max(res) < 1e-8


def test_wrong_base_has_order_one_residual():
    pair = boson_pair(32)
    fam = build_ladder(pair.T, basis_state(1, 32), 3)
    res = eigen_check(pair, fam)
    assert res[0] >= 1.0


def test_residual_monotonicity_is_reported_not_asserted():
    pair, fam_xi, _ = swanson_families()
    res = eigen_check(pair, fam_xi)
    flag = residuals_monotone(res)
    assert isinstance(flag, bool)
    assert flag == all(b >= a for a, b in zip(res, res[1:]))


# --- iterated commutation -------------------------------------------------------


def test_power_check_weak_relation_case():
    pair = boson_pair(32)
    assert commutation_power_check(pair, basis_state(0, 32), 1) < 1e-12


def test_power_check_k3():
    pair = boson_pair(32)
    assert commutation_power_check(pair, basis_state(2, 32), 3) < 1e-10


def test_power_check_kernel_case():
    # S xi0 = 0 turns the identity into S T^k xi0 = k T^(k-1) xi0
    pair = boson_pair(32)
    xi0 = kernel_vector(pair.S, 1e-10)
    assert commutation_power_check(pair, xi0, 4) < 1e-10


def test_power_check_swanson():
    pair = swanson_pair(0.3, 64)
    xi0 = kernel_vector(pair.S, 1e-10)
    assert commutation_power_check(pair, xi0, 3) < 1e-10


def test_power_check_truncation_guard():
    pair = boson_pair(16)
    with pytest.raises(TruncationError):
        commutation_power_check(pair, basis_state(13, 16), 3)


# --- biorthogonality -------------------------------------------------------------


def test_boson_gram_is_identity():
    pair = boson_pair(32)
    fam_xi = build_ladder(pair.T, basis_state(0, 32), 6)
    fam_eta = build_ladder(pair.S.adjoint(), kernel_vector(pair.T.adjoint(), 1e-10), 6)
    G = biorthogonality_gram(fam_xi, fam_eta)
    assert np.max(np.abs(G - np.eye(7))) < 1e-12


def test_swanson_gram_identity():
    _, fam_xi, fam_eta = swanson_families()
    G = biorthogonality_gram(fam_xi, fam_eta)
    assert np.max(np.abs(G - np.eye(7))) < 1e-7


def test_mismatched_families_are_not_biorthogonal():
    _, fam_xi, _ = swanson_families(0.3)
    _, _, fam_eta0 = swanson_families(0.0)
    G = biorthogonality_gram(fam_xi, fam_eta0)
    off = G - np.diag(np.diag(G))
    assert np.max(np.abs(off)) > 1e-3


def test_gram_conjugate_symmetry():
    _, fam_xi, fam_eta = swanson_families()
    G = biorthogonality_gram(fam_xi, fam_eta)
    G_swap = biorthogonality_gram(fam_eta, fam_xi)
    assert np.max(np.abs(G_swap - G.conj().T)) < 1e-12


def test_orthogonal_bases_cannot_be_normalized():
    pair = boson_pair(16)
    fam_xi = build_ladder(pair.T, basis_state(1, 16), 2)
    fam_eta = build_ladder(pair.S.adjoint(), basis_state(0, 16), 2)
    with pytest.raises(NonNormalizableError):
        biorthogonality_gram(fam_xi, fam_eta)


# --- intertwiners ------------------------------------------------------------------


def test_boson_intertwiners_trivial():
    pair = boson_pair(32)
    fam_xi = build_ladder(pair.T, basis_state(0, 32), 5)
    fam_eta = build_ladder(pair.S.adjoint(), basis_state(0, 32), 5)
    K = intertwiners(pair, fam_xi, fam_eta)
    assert K.inverse_defect < 1e-12
    assert K.intertwining_defect_eta < 1e-12
    assert K.intertwining_defect_xi < 1e-12
    assert K.riesz.positive
    assert K.riesz.orthonormality_defect < 1e-12


def test_swanson_intertwiners():
    pair, fam_xi, fam_eta = swanson_families()
    K = intertwiners(pair, fam_xi, fam_eta)
    assert K.inverse_defect < 1e-6
    assert K.intertwining_defect_eta < 1e-6
    assert K.intertwining_defect_xi < 1e-6


def test_inverse_defect_within_conditioning_bound():
    pair, fam_xi, fam_eta = swanson_families()
    K = intertwiners(pair, fam_xi, fam_eta)
    bound = 10.0 * max(K.condition_numbers) * np.finfo(float).eps
    assert K.inverse_defect <= bound


def test_swanson_orthonormalization():
    pair, fam_xi, fam_eta = swanson_families(length=4)
    K = intertwiners(pair, fam_xi, fam_eta)
    assert K.riesz.positive
    assert K.riesz.orthonormality_defect < 1e-5


# --- restricted spectrum --------------------------------------------------------------


def test_restricted_spectrum_swanson():
    pair, fam_xi, _ = swanson_families()
    evals = restricted_spectrum(pair, fam_xi)
    assert np.max(np.abs(evals - np.arange(7))) < 1e-6
    # simplicity: pairwise gaps stay near 1
    gaps = np.diff(np.sort(evals.real))
    assert np.min(gaps) > 0.5


def test_ladder_vectors_linearly_independent():
    _, fam_xi, _ = swanson_families()
    X = np.column_stack([v.components for v in fam_xi.vectors])
    gram = X.conj().T @ X
    assert np.linalg.eigvalsh(gram).min() > 0
