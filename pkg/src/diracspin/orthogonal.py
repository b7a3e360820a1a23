"""Lagrangian subspaces of V ⊕ V* as orthogonal transformations of V.

With the metric fixed, A ∈ O(V) corresponds to
E_A = {((I - A⁻¹)v, (I + A⁻¹)v / 2)}, so E_I = V* and E_{-I} = V.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .dirac import (
    DiracMorphism,
    DiracStructure,
    certify,
    compose,
    forward_image,
    from_frame,
    is_strong,
    product,
    relation_residual,
)
from .errors import ConsistencyError, DimensionMismatch, NonLagrangianInput, NotOrthogonal, SingularForm
from .linear_core import DEFAULT_TOL, Subspace, span
from .matfun import expm_skew, phi_exp, polar_sign, sinh_kernel


@dataclass(frozen=True)
class OrthogonalPoint:
    A: np.ndarray
    tol: float = 1e-9

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise NotOrthogonal("A must be square")
        err = np.linalg.norm(A.T @ A - np.eye(A.shape[0]))
        if err > self.tol * max(1.0, A.shape[0]):
            raise NotOrthogonal(f"‖AᵀA - I‖ = {err:.3e}")
        object.__setattr__(self, "A", A)

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class SkewPoint:
    a: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        if a.shape[0] != a.shape[1] or np.max(np.abs(a + a.T), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(a), initial=0.0)):
            raise ValueError("a must be a square skew-symmetric matrix")
        object.__setattr__(self, "a", a)

    @property
    def n(self):
        return self.a.shape[0]


def _as_A(A):
    return A.A if isinstance(A, OrthogonalPoint) else OrthogonalPoint(A).A


def _as_a(a):
    return a.a if isinstance(a, SkewPoint) else SkewPoint(a).a


def lag_from_orth(A, tol=DEFAULT_TOL):
    A = _as_A(A)
    n = A.shape[0]
    Ainv = A.T
    frame = np.vstack([np.eye(n) - Ainv, 0.5 * (np.eye(n) + Ainv)])
    return from_frame(frame, n, tol)


def orth_from_lag(D):
    """Recover A from E through the split coordinates a = y + x/2, b = y - x/2."""
    n = D.n
    X, Y = D.E.frame[:n], D.E.frame[n:]
    Pa = X / 2 + Y
    Pb = -X / 2 + Y
    s = np.linalg.svd(Pb, compute_uv=False) if n else np.ones(1)
    if n and s[-1] <= D.E.tol * max(1.0, s[0]):
        raise NonLagrangianInput("split-coordinate block is singular")
    A = np.linalg.solve(Pb.T, Pa.T).T if n else np.zeros((0, 0))
    return OrthogonalPoint(A, tol=max(1e-9, 10 * D.E.tol))


def opposite(D):
    n = D.n
    F = D.E.frame.copy()
    F[n:] *= -1
    return DiracStructure(n, Subspace(F, D.E.tol))


def multiplicative_morphism(A1, A2):
    """(Σ, σ) at (A1, A2): Σ(ξ1, ξ2) = A2⁻¹ξ1 + ξ2 and the fusion 2-form σ."""
    A1, A2 = _as_A(A1), _as_A(A2)
    if A1.shape != A2.shape:
        raise DimensionMismatch("A1 and A2 must have the same size")
    n = A1.shape[0]
    theta = np.hstack([A2.T, np.eye(n)])
    Z = np.zeros((n, n))
    sigma = 0.5 * np.block([[Z, A2], [-A2.T, Z]])
    return DiracMorphism(theta, sigma)


def product_morphism(m1, m2):
    """(Θ1 × Θ2, ω1 ⊕ ω2)."""
    return DiracMorphism(sla.block_diag(m1.theta, m2.theta), sla.block_diag(m1.omega, m2.omega))


def associativity_check(A1, A2, A3):
    A1, A2, A3 = _as_A(A1), _as_A(A2), _as_A(A3)
    n = A1.shape[0]
    ident = DiracMorphism.identity(n)
    left = compose(multiplicative_morphism(A1 @ A2, A3),
                   product_morphism(multiplicative_morphism(A1, A2), ident))
    right = compose(multiplicative_morphism(A1, A2 @ A3),
                    product_morphism(ident, multiplicative_morphism(A2, A3)))
    return float(max(np.max(np.abs(left.theta - right.theta)),
                     np.max(np.abs(left.omega - right.omega))))


def e_basis(A):
    """Columns e(ξ) = ((I - A⁻¹)ξ, (I + A⁻¹)ξ / 2) over the standard basis."""
    A = _as_A(A)
    n = A.shape[0]
    return np.vstack([np.eye(n) - A.T, 0.5 * (np.eye(n) + A.T)])


def multiplicative_witness(A1, A2, xi):
    """Residual of e1(ξ) × e2(ξ) ∼ e(ξ) under (Σ, σ)."""
    A1, A2 = _as_A(A1), _as_A(A2)
    n = A1.shape[0]
    e1, e2, e = e_basis(A1) @ xi, e_basis(A2) @ xi, e_basis(A1 @ A2) @ xi
    x = np.concatenate([e1[:n], e2[:n], e1[n:], e2[n:]])
    return relation_residual(multiplicative_morphism(A1, A2), x, e)


def cayley(a):
    a = _as_a(a)
    n = a.shape[0]
    return np.linalg.solve((np.eye(n) - a / 2).T, (np.eye(n) + a / 2).T).T


def graph_structure(a, tol=DEFAULT_TOL):
    """Gr_a = {(a μ, μ)} on 𝔬(X)-fibres."""
    a = _as_a(a)
    n = a.shape[0]
    return from_frame(np.vstack([a, np.eye(n)]), n, tol)


def cayley_morphism(a):
    """The lift (id, 0): Gr_a ⇢ E_A with A the Cayley transform of a."""
    a = _as_a(a)
    A = cayley(a)
    # tidy rounding so the orthogonality certificate is not the bottleneck
    U, _, Vh = np.linalg.svd(A)
    return DiracMorphism.identity(a.shape[0]), OrthogonalPoint(U @ Vh)


def exp_lift(a, tol=DEFAULT_TOL):
    """(Π_a, -ϖ_a) with Π_a = (I - e^{-a})/a; strong iff Π_a is invertible."""
    a = _as_a(a)
    Pi = phi_exp(a)
    M = sinh_kernel(a)
    # ϖ(ξ1, ξ2) = -B(M ξ1, ξ2) has Gram matrix M, so -ϖ has Gram -M
    morph = DiracMorphism(Pi, -0.5 * (M - M.T))
    s = np.linalg.svd(Pi, compute_uv=False)
    strong = bool(s.size == 0 or s[-1] > tol)
    A = expm_skew(a)
    U, _, Vh = np.linalg.svd(A)
    return morph, OrthogonalPoint(U @ Vh), strong


def exp_witness(a, xi):
    """Residual of e_0(ξ) = (aξ, ξ) ∼ e(ξ) under the exponential lift."""
    a = _as_a(a)
    m, A, _ = exp_lift(a)
    x = np.concatenate([a @ xi, xi])
    return relation_residual(m, x, e_basis(A) @ xi)


def gauge_orthogonal(A, omega):
    """Closed form A^ω = (A - R(A - I))(I - R(A - I))⁻¹ with R the contraction map ι_v ω = R v."""
    A = _as_A(A)
    R = np.asarray(omega).T
    n = A.shape[0]
    K = R @ (A - np.eye(n))
    return np.linalg.solve((np.eye(n) - K).T, (A - K).T).T, np.linalg.svd(np.eye(n) - K, compute_uv=False)[-1]


def gauge_transform(D, omega, check=True):
    """Shear (v, α) ↦ (v, α - ι_v ω) applied to the frame of E."""
    omega = np.asarray(omega, dtype=float)
    n = D.n
    F = D.E.frame
    sheared = np.vstack([F[:n], F[n:] - omega.T @ F[:n]])
    out = from_frame(sheared, n, D.E.tol)
    if check:
        A = orth_from_lag(D).A
        closed, smin = gauge_orthogonal(A, omega)
        if smin > 1e-6:
            gap = np.linalg.norm(orth_from_lag(out).A - closed)
            if gap > 1e-7:
                raise ConsistencyError(f"shear and closed form disagree by {gap:.3e}")
    return out


@dataclass(frozen=True)
class SymplecticPathPoint:
    A_t: np.ndarray
    A_tilde: np.ndarray
    J: np.ndarray
    margin: float
    min_singular: float
    halfplane_ok: bool


def symplectic_path(R, t, tol=1e-10):
    """Both paths from -I to I attached to a nondegenerate 2-form.

    ``R`` is the Gram matrix of ω.  The complex structure is J = R|R|⁻¹.
    A_t is the orthogonal point of the standard path of (0, ω), whose
    closed form uses the contraction map ι_v ω = Rᵀ v.
    """
    R = _as_a(R)
    n = R.shape[0]
    J, gap = polar_sign(R)
    if gap <= tol * max(1.0, np.linalg.norm(R, 2)):
        raise SingularForm("R is singular")
    C = R.T
    c = 0.5 * (1 - t) ** 2
    A_t = np.linalg.solve((t * C + c * np.eye(n)).T, (t * C - c * np.eye(n)).T).T
    A_tilde = -expm_skew(t * np.pi * J)
    margin = float(min(np.linalg.eigvals(J @ A_t).real.min(), np.linalg.eigvals(J @ A_tilde).real.min()))
    smin = float(min(np.linalg.svd(J @ A_t + np.eye(n), compute_uv=False)[-1],
                     np.linalg.svd(J @ A_tilde + np.eye(n), compute_uv=False)[-1]))
    return SymplecticPathPoint(A_t, A_tilde, J, margin, smin, margin >= -tol and smin >= 1e-6)


def exp_pullback_homotopy(a, s, tol=DEFAULT_TOL):
    a = _as_a(a)
    return lag_from_orth(expm_skew(s * a), tol)
