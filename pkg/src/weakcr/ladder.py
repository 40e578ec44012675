"""Eigenvector ladders, biorthogonal families, and intertwining operators.

Starting from a kernel vector xi0 of S, the vectors xi_k = T^k xi0 / sqrt(k!)
are eigenvectors of the number-like operator T S with eigenvalue k; the
mirror family eta_r = (S')^r eta0 / sqrt(r!) built on a kernel vector of T'
is biorthogonal to it after normalizing <xi0, eta0> = 1.  The basis-exchange
maps K_xi (eta_j -> xi_j) and K_eta (xi_j -> eta_j) are mutually inverse and
intertwine the two number-like operators; when the restriction of K_eta to
the xi-span is positive its square root turns the xi family into an
orthonormal one, which is the finite-model shadow of the Riesz-basis
statement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConditioningError,
    InvalidDimensionError,
    NoKernelError,
    NonNormalizableError,
    PreconditionError,
    TruncationError,
)
from .fock import StateVector, TruncatedOperator, inner, norm


def kernel_vector(A: TruncatedOperator, tol=1e-10):
    """Unit-norm numerical kernel vector of A.

    Uses the right singular vector of the smallest singular value; raises
    NoKernelError carrying sigma_min when that value exceeds ``tol``.  The
    phase is fixed so the first non-negligible component is positive real,
    which makes the result deterministic.
    """
    u, s, vh = np.linalg.svd(A.entries)
    sigma_min = float(s[-1])
    if sigma_min > tol:
        raise NoKernelError(
            f"smallest singular value {sigma_min:.3e} exceeds tolerance {tol:.3e}",
            sigma_min=sigma_min,
        )
    v = vh[-1].conj()
    scale = np.max(np.abs(v))
    idx = int(np.argmax(np.abs(v) > 1e-12 * scale))
    phase = v[idx] / abs(v[idx])
    return StateVector(v / phase, label="ker")


def tail_mass_membership(band, rel_tol=1e-8):
    """Membership predicate: relative mass beyond ``band`` stays below rel_tol.

    This is the matrix-model proxy for "the vector still lies in the domain":
    a vector whose weight has reached the truncation edge can no longer be
    trusted under further applications.
    """

    def member(state: StateVector):
        total = state.norm
        if total == 0:
            return False
        return norm(state.components[band:]) <= rel_tol * total

    return member


@dataclass
class LadderFamily:
    """The vectors base, T base / sqrt(1!), T^2 base / sqrt(2!), ...

    ``eigen_residuals`` stays empty until eigen_check fills it.
    """

    base: StateVector
    vectors: list
    ladder_op_label: str
    stop_reason: str
    eigen_residuals: list = field(default_factory=list)

    def __post_init__(self):
        if not self.vectors or self.vectors[0] is not self.base:
            raise PreconditionError("vectors[0] must be the base vector")
        for k, v in enumerate(self.vectors):
            if v.norm == 0:
                raise PreconditionError(f"ladder vector {k} is zero")

    def __len__(self):
        return len(self.vectors)

    @property
    def top_index(self):
        return len(self.vectors) - 1


def build_ladder(op: TruncatedOperator, base: StateVector, n_max, member=None):
    """Apply ``op`` repeatedly, dividing by sqrt(k!), until n_max or rejection.

    ``member`` (StateVector -> bool) models domain membership of each new
    vector; early stop is a normal outcome recorded in ``stop_reason``.
    """
    if base.norm == 0:
        raise PreconditionError("base vector must be nonzero")
    if op.dim != base.dim:
        raise InvalidDimensionError("operator and base vector dimensions differ")
    vectors = [base]
    stop_reason = f"reached n_max={n_max}"
    current = base.components
    for k in range(1, n_max + 1):
        current = (op.entries @ current) / math.sqrt(k)
        candidate = StateVector(current, label=f"{base.label}:{k}")
        if member is not None and not member(candidate):
            stop_reason = f"membership failed at k={k}"
            break
        vectors.append(candidate)
    return LadderFamily(
        base=base,
        vectors=vectors,
        ladder_op_label=op.label,
        stop_reason=stop_reason,
    )


def eigen_check(pair, fam: LadderFamily):
    """Residuals of the eigenvalue relations along a ladder built from pair.T.

    For psi_k = fam.vectors[k] this checks (T S) psi_k = k psi_k together
    with the lowering action S psi_k = sqrt(k) psi_{k-1}; the returned entry
    is the larger of the two relative residuals.  Results are also stored on
    ``fam.eigen_residuals``.
    """
    if pair.dim != fam.base.dim:
        raise InvalidDimensionError("pair and family dimensions differ")
    number_op = pair.T.entries @ pair.S.entries
    residuals = []
    for k, psi in enumerate(fam.vectors):
        scale = psi.norm
        r_num = norm(number_op @ psi.components - k * psi.components) / scale
        r_low = 0.0
        if k >= 1:
            prev = fam.vectors[k - 1].components
            r_low = norm(pair.S.entries @ psi.components - math.sqrt(k) * prev) / scale
        residuals.append(max(r_num, r_low))
    fam.eigen_residuals = residuals
    return residuals


def residuals_monotone(residuals):
    """Diagnostic flag: residuals nondecreasing in k (truncation effect only)."""
    return all(b >= a for a, b in zip(residuals, residuals[1:]))


def commutation_power_check(pair, xi: StateVector, k: int):
    """Residual of S T^k xi - T^k S xi - k T^(k-1) xi in the matrix model."""
    if k < 1:
        raise PreconditionError(f"power must be >= 1, got {k}")
    if pair.dim != xi.dim:
        raise InvalidDimensionError("pair and state dimensions differ")
    guard = pair.safe_rank - (k + 1)
    if guard < 1:
        raise TruncationError(f"dimension {pair.dim} too small for power {k}")
    tail = norm(xi.components[guard:])
    if tail > 1e-10 * xi.norm:
        raise TruncationError(
            f"state reaches within {k + 1} indices of the truncation edge",
            tail_mass=tail,
        )
    S, T = pair.S.entries, pair.T.entries
    tk_prev = np.linalg.matrix_power(T, k - 1)
    tk = T @ tk_prev
    resid = S @ (tk @ xi.components) - tk @ (S @ xi.components) - k * (tk_prev @ xi.components)
    return norm(resid)


def _rescaled_eta(fam_xi: LadderFamily, fam_eta: LadderFamily):
    ip0 = inner(fam_xi.base.components, fam_eta.base.components)
    if abs(ip0) < 1e-14:
        raise NonNormalizableError(
            f"<xi0, eta0> = {ip0:.3e} cannot be scaled to 1"
        )
    scale = (1.0 / ip0).conjugate()
    return [scale * v.components for v in fam_eta.vectors]


def biorthogonality_gram(fam_xi: LadderFamily, fam_eta: LadderFamily):
    """Gram matrix G[i, j] = <xi_i, eta_j> after scaling <xi0, eta0> = 1.

    The eta family is rescaled as a whole (the ladder is linear in its base),
    and the result should be the identity on the overlapping index range.
    """
    etas = _rescaled_eta(fam_xi, fam_eta)
    G = np.empty((len(fam_xi), len(etas)), dtype=complex)
    for i, xi in enumerate(fam_xi.vectors):
        for j, eta in enumerate(etas):
            G[i, j] = inner(xi.components, eta)
    return G


@dataclass(frozen=True)
class RieszDiagnostics:
    """Frame data for the xi family and the orthonormalization it induces.

    ``singular_values`` are those of the column matrix of ladder vectors
    (squared frame bounds of the family); ``positive`` records whether the
    symmetrized restriction of K_eta to the xi-span is positive definite,
    and when it is, ``orthonormality_defect`` is the max-abs deviation of
    the Gram matrix of e_j = K_eta^(1/2) xi_j from the identity.
    """

    singular_values_xi: np.ndarray
    singular_values_eta: np.ndarray
    symmetry_defect: float
    positive: bool
    orthonormality_defect: float | None


@dataclass(frozen=True)
class IntertwinerPair:
    """Basis-exchange maps between the two ladders, in the ambient basis."""

    K_xi: np.ndarray
    K_eta: np.ndarray
    condition_numbers: tuple
    inverse_defect: float
    intertwining_defect_eta: float
    intertwining_defect_xi: float
    riesz: RieszDiagnostics


def intertwiners(pair, fam_xi: LadderFamily, fam_eta: LadderFamily, positivity_tol=1e-10):
    """Construct K_xi, K_eta and verify their defining relations numerically.

    K_xi maps eta_j to xi_j and K_eta maps xi_j to eta_j (pseudoinverse
    construction restricted to the spans).  Reported defects: K_eta K_xi - 1
    on the eta-span, and the intertwining defects
    K_eta (T S) - (S' T') K_eta on xi vectors (resp. the mirror for K_xi).
    """
    L = min(len(fam_xi), len(fam_eta))
    if L < 1:
        raise PreconditionError("need at least one ladder vector per family")
    etas = _rescaled_eta(fam_xi, fam_eta)
    X = np.column_stack([v.components for v in fam_xi.vectors[:L]])
    Y = np.column_stack(etas[:L])

    sx = np.linalg.svd(X, compute_uv=False)
    sy = np.linalg.svd(Y, compute_uv=False)
    eps = np.finfo(float).eps
    if sx[-1] <= eps * sx[0] * X.shape[0]:
        raise ConditioningError("xi family is numerically singular")
    if sy[-1] <= eps * sy[0] * Y.shape[0]:
        raise ConditioningError("eta family is numerically singular")
    cond_x = float(sx[0] / sx[-1])
    cond_y = float(sy[0] / sy[-1])

    X_pinv = np.linalg.pinv(X)
    Y_pinv = np.linalg.pinv(Y)
    K_xi = X @ Y_pinv
    K_eta = Y @ X_pinv

    coords = Y_pinv @ (K_eta @ (K_xi @ Y))
    inverse_defect = float(np.max(np.abs(coords - np.eye(L))))

    num_xi = pair.T.entries @ pair.S.entries
    num_eta = pair.S.entries.conj().T @ pair.T.entries.conj().T
    d_eta = max(
        norm(K_eta @ (num_xi @ x.components) - num_eta @ (K_eta @ x.components)) / x.norm
        for x in fam_xi.vectors[:L]
    )
    d_xi = max(
        norm(K_xi @ (num_eta @ y) - num_xi @ (K_xi @ y)) / norm(y)
        for y in (Y[:, j] for j in range(L))
    )

    # restriction of K_eta to the xi-span, in an orthonormal frame
    Q, _ = np.linalg.qr(X)
    A = Q.conj().T @ K_eta @ Q
    H = (A + A.conj().T) / 2.0
    symmetry_defect = float(np.max(np.abs(A - H)))
    evals, evecs = np.linalg.eigh(H)
    positive = bool(evals.min() > -positivity_tol)
    ortho_defect = None
    if positive:
        sqrt_H = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
        E = np.column_stack(
            [Q @ (sqrt_H @ (Q.conj().T @ X[:, j])) for j in range(L)]
        )
        gram = E.conj().T @ E
        ortho_defect = float(np.max(np.abs(gram - np.eye(L))))

    riesz = RieszDiagnostics(
        singular_values_xi=sx,
        singular_values_eta=sy,
        symmetry_defect=symmetry_defect,
        positive=positive,
        orthonormality_defect=ortho_defect,
    )
    return IntertwinerPair(
        K_xi=K_xi,
        K_eta=K_eta,
        condition_numbers=(cond_x, cond_y),
        inverse_defect=inverse_defect,
        intertwining_defect_eta=float(d_eta),
        intertwining_defect_xi=float(d_xi),
        riesz=riesz,
    )


def restricted_spectrum(pair, fam: LadderFamily):
    """Eigenvalues of T S restricted to the ladder span, in the ladder basis."""
    X = np.column_stack([v.components for v in fam.vectors])
    R = np.linalg.pinv(X) @ (pair.T.entries @ pair.S.entries) @ X
    evals = np.linalg.eigvals(R)
    return np.sort_complex(evals)
