"""Pointwise quasi-Hamiltonian data for compact matrix groups.

All tangent vectors of G are written in left trivialization, and 𝔤 is
identified with 𝔤* through a B-orthonormal basis.  At a point m of a
q-Hamiltonian space the data are Φ(m) = g, the differential dΦ: T → 𝔤,
the 2-form ω on T, and the generating vectors ξ ↦ ξ_M.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .dirac import (
    DiracMorphism,
    compose,
    forward_image,
    is_strong,
    product,
    vectors,
)
from .errors import (
    DimensionMismatch,
    InconsistentMomentCondition,
    NonLagrangianResult,
    NotFree,
    NotInGroup,
    NotRegular,
)
from .jsonio import decode_matrix, encode_matrix
from .linear_core import distance, null_space, same_subspace, span
from .orthogonal import (
    exp_lift,
    graph_structure,
    lag_from_orth,
    multiplicative_morphism,
    product_morphism,
)


def _pauli():
    return [np.array([[0, 1], [1, 0]], dtype=complex),
            np.array([[0, -1j], [1j, 0]], dtype=complex),
            np.array([[1, 0], [0, -1]], dtype=complex)]


def _inner(X, Y):
    return float(np.real(np.trace(X.conj().T @ Y)))


@dataclass(frozen=True)
class GroupContext:
    """A compact matrix group with a B-orthonormal basis of its Lie algebra.

    B(X, Y) = Re tr(Xᴴ Y) = -tr(XY) on skew-Hermitian matrices.
    """

    tag: str
    basis: tuple
    B: np.ndarray = field(default=None)

    def __post_init__(self):
        mats = [np.asarray(X) for X in self.basis]
        ortho = []
        for X in mats:
            Y = X.astype(complex)
            for Z in ortho:
                Y = Y - _inner(Z, Y) * Z
            nrm = np.sqrt(_inner(Y, Y))
            if nrm < 1e-12:
                raise ValueError("basis matrices are linearly dependent")
            ortho.append(Y / nrm)
        object.__setattr__(self, "basis", tuple(ortho))
        object.__setattr__(self, "B", np.eye(len(ortho)))

    @property
    def n(self):
        return len(self.basis)

    @property
    def size(self):
        return self.basis[0].shape[0]

    def element(self, xi):
        return sum(c * X for c, X in zip(xi, self.basis))

    def coords(self, X):
        return np.array([_inner(E, X) for E in self.basis])

    def bracket(self, x, y):
        X, Y = self.element(x), self.element(y)
        return self.coords(X @ Y - Y @ X)

    def ad(self, mu):
        """Matrix of ad_μ = [μ, ·] in the basis."""
        return np.column_stack([self.bracket(mu, e) for e in np.eye(self.n)])

    def exp(self, mu):
        return sla.expm(self.element(mu))

    def identity(self):
        return np.eye(self.size, dtype=self.basis[0].dtype)

    def invariance_residual(self):
        err = 0.0
        E = np.eye(self.n)
        for x in E:
            adx = self.ad(x)
            err = max(err, np.max(np.abs(adx + adx.T)))
        return err


def so3():
    L = []
    for i in range(3):
        M = np.zeros((3, 3))
        j, k = (i + 1) % 3, (i + 2) % 3
        M[k, j], M[j, k] = 1.0, -1.0
        L.append(M)
    return GroupContext("SO3", tuple(L))


def su2():
    return GroupContext("SU2", tuple(1j * s / 2 for s in _pauli()))


def so_n(n):
    if n == 3:
        return so3()
    mats = []
    for i in range(n):
        for j in range(i + 1, n):
            M = np.zeros((n, n))
            M[i, j], M[j, i] = -1.0, 1.0
            mats.append(M)
    return GroupContext(f"SO{n}", tuple(mats))


def context(tag):
    table = {"SO3": so3, "SU2": su2}
    if tag in table:
        return table[tag]()
    if tag.startswith("SO") and tag[2:].isdigit():
        return so_n(int(tag[2:]))
    raise ValueError(f"unknown group {tag!r}")


def adjoint(ctx, g, tol=1e-9):
    g = np.asarray(g)
    if g.shape != (ctx.size, ctx.size):
        raise NotInGroup("wrong matrix size")
    if np.linalg.norm(g.conj().T @ g - np.eye(ctx.size)) > tol * 10 * ctx.size or abs(np.linalg.det(g) - 1) > 1e-8:
        raise NotInGroup("g is not a unit-determinant unitary matrix")
    gi = g.conj().T
    return np.column_stack([ctx.coords(g @ X @ gi) for X in ctx.basis])


def cartan_dirac_at(ctx, g):
    """E_G at g in left trivialization: the structure E_{Ad_g}."""
    return lag_from_orth(adjoint(ctx, g))


def cartan_dirac_sections(ctx, g):
    """Frame of e(ξ) = ((I - Ad_g⁻¹)ξ, ½(I + Ad_g⁻¹)ξ) over the basis."""
    Ad = adjoint(ctx, g)
    n = ctx.n
    return np.vstack([np.eye(n) - Ad.T, 0.5 * (np.eye(n) + Ad.T)])


@dataclass(frozen=True)
class PointedQHam:
    """Data of a q-Hamiltonian space at one point.

    ``generators`` is the T_dim × n matrix whose columns are ξ_M for the
    basis vectors ξ.
    """

    g: np.ndarray
    dPhi: np.ndarray
    omega: np.ndarray
    generators: np.ndarray

    def __post_init__(self):
        dPhi = np.asarray(self.dPhi, dtype=float)
        m = dPhi.shape[1]
        omega = np.asarray(self.omega, dtype=float).reshape(m, m)
        gens = np.asarray(self.generators, dtype=float).reshape(m, dPhi.shape[0])
        object.__setattr__(self, "dPhi", dPhi)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "generators", gens)

    @property
    def T_dim(self):
        return self.dPhi.shape[1]

    @property
    def n(self):
        return self.dPhi.shape[0]

    def morphism(self):
        return DiracMorphism(self.dPhi, self.omega)

    def to_dict(self, tag=None):
        out = {"g": encode_matrix(self.g), "n": self.n, "T_dim": self.T_dim,
               "dPhi": encode_matrix(self.dPhi) if self.T_dim else [],
               "omega": encode_matrix(self.omega) if self.T_dim else [],
               "generators": encode_matrix(self.generators) if self.T_dim else []}
        if tag is not None:
            out["group"] = tag
        return out

    @classmethod
    def from_dict(cls, data):
        n, m = int(data["n"]), int(data["T_dim"])

        def mat(key, shape):
            return decode_matrix(data[key]).reshape(shape) if m else np.zeros(shape)

        return cls(decode_matrix(data["g"]), mat("dPhi", (n, m)), mat("omega", (m, m)), mat("generators", (m, n)))


@dataclass(frozen=True)
class QHamReport:
    is_dirac_morphism: bool
    is_strong: bool
    parity_ok: bool
    residuals: dict
    tol: float = 1e-9

    @property
    def passed(self):
        small = all(v <= self.tol for v in self.residuals.values())
        return self.is_dirac_morphism and self.is_strong and self.parity_ok and small

    def to_dict(self):
        return {"is_dirac_morphism": self.is_dirac_morphism, "is_strong": self.is_strong,
                "parity_ok": self.parity_ok, "passed": self.passed, "residuals": self.residuals}


def verify_qham(ctx, p, tol=1e-9):
    Ad = adjoint(ctx, p.g)
    target = lag_from_orth(Ad)
    m = p.morphism()
    res = {}
    try:
        img = forward_image(m, vectors(p.T_dim))
        gap = distance(img.E, target.E)
    except NonLagrangianResult:
        gap = np.pi / 2
    res["image_gap"] = float(gap)
    n = ctx.n
    if p.T_dim:
        X = p.generators
        res["moment"] = float(np.linalg.norm(p.omega.T @ X + 0.5 * p.dPhi.T @ (np.eye(n) + Ad.T)))
        res["equivariance"] = float(np.linalg.norm(p.dPhi @ X - (np.eye(n) - Ad.T)))
    strong = is_strong(m, vectors(p.T_dim))
    parity_ok = (-1) ** p.T_dim == int(np.sign(np.linalg.det(Ad)))
    return QHamReport(bool(gap <= tol), bool(strong), bool(parity_ok), res, tol)


def _solve_skew(X, Y):
    """Least-squares skew Ω with Ω X = Y; returns (Ω, residual)."""
    m = X.shape[0]
    idx = [(a, b) for a in range(m) for b in range(a + 1, m)]
    if not idx:
        return np.zeros((m, m)), float(np.linalg.norm(Y))
    cols = []
    for a, b in idx:
        E = np.zeros((m, m))
        E[a, b], E[b, a] = 1.0, -1.0
        cols.append((E @ X).ravel())
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), Y.ravel(), rcond=None)
    Om = np.zeros((m, m))
    for c, (a, b) in zip(coef, idx):
        Om[a, b], Om[b, a] = c, -c
    return Om, float(np.linalg.norm(Om @ X - Y))


def conjugacy_class_data(ctx, g, tol=1e-9):
    """The conjugacy class through g with moment map the inclusion."""
    Ad = adjoint(ctx, g)
    n = ctx.n
    gens_g = np.eye(n) - Ad.T
    T = span(gens_g, tol=tol, scale=1.0).frame
    X = T.T @ gens_g
    # ι(ξ_M)ω = Ωᵀ ξ_M = -Ω ξ_M must equal -½ dΦᵀ (I + Ad⁻¹) ξ
    Om, res = _solve_skew(X, 0.5 * T.T @ (np.eye(n) + Ad.T))
    if res > tol * max(1.0, n):
        raise InconsistentMomentCondition(f"least-squares residual {res:.3e}")
    return PointedQHam(np.asarray(g), T, Om, X)


@lru_cache(maxsize=None)
def fusion_sigma_sign():
    """Sign s such that (Σ, s·σ) maps E_{A1} × E_{A2} onto E_{A1A2}.

    Decided once by a self-test on a fixed random pair rather than by
    transcription, since the two written forms of σ differ by convention.
    """
    rng = np.random.default_rng(12345)
    A1, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    A2, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    base = multiplicative_morphism(A1, A2)
    src = product(lag_from_orth(A1), lag_from_orth(A2))
    for s in (1.0, -1.0):
        m = DiracMorphism(base.theta, s * base.omega)
        if same_subspace(forward_image(m, src).E, lag_from_orth(A1 @ A2).E):
            return s
    raise RuntimeError("neither sign of σ reproduces E_{A1A2}")


def fusion_morphism(ctx, g1, g2):
    base = multiplicative_morphism(adjoint(ctx, g1), adjoint(ctx, g2))
    return DiracMorphism(base.theta, fusion_sigma_sign() * base.omega)


def fusion(ctx, p1, p2):
    """(d mult, σ) ∘ (dΦ1 × dΦ2, ω1 ⊕ ω2) with the diagonal action."""
    if p1.n != ctx.n or p2.n != ctx.n:
        raise DimensionMismatch("points belong to a different group context")
    composed = compose(fusion_morphism(ctx, p1.g, p2.g),
                       product_morphism(p1.morphism(), p2.morphism()))
    gens = np.vstack([p1.generators, p2.generators])
    return PointedQHam(p1.g @ p2.g, composed.theta, composed.omega, gens)


@dataclass(frozen=True)
class HamiltonianPoint:
    """Ordinary Hamiltonian data at a point with moment value μ ∈ 𝔤 ≅ 𝔤*."""

    mu: np.ndarray
    dPhi: np.ndarray
    omega: np.ndarray
    generators: np.ndarray

    @property
    def T_dim(self):
        return self.dPhi.shape[1]


def coadjoint_orbit_data(ctx, mu, tol=1e-9):
    """The coadjoint orbit through μ with ξ_M = ad_μ ξ and inclusion moment map."""
    mu = np.asarray(mu, dtype=float)
    a = ctx.ad(mu)
    T = span(a, tol=tol, scale=1.0).frame
    X = T.T @ a
    # Hamiltonian condition ι(ξ_M)ω = -dΦᵀ ξ, i.e. Ω X = dΦᵀ
    Om, res = _solve_skew(X, T.T)
    if res > tol * max(1.0, ctx.n):
        raise InconsistentMomentCondition(f"least-squares residual {res:.3e}")
    return HamiltonianPoint(mu, T, Om, X)


def verify_hamiltonian(ctx, p0, tol=1e-9):
    """Gap between the forward image of T and Gr_{ad_μ}."""
    img = forward_image(DiracMorphism(p0.dPhi, p0.omega), vectors(p0.T_dim))
    return distance(img.E, graph_structure(ctx.ad(p0.mu)).E)


def exponential_point(ctx, p0, tol=1e-9):
    """Φ = exp Φ0 and ω = ω0 - Φ0*ϖ via the exponential lift at ad_μ."""
    lift, A, strong = exp_lift(ctx.ad(p0.mu), tol)
    if not strong:
        raise NotRegular("exp is not regular at μ")
    composed = compose(lift, DiracMorphism(p0.dPhi, p0.omega))
    return PointedQHam(ctx.exp(p0.mu), composed.theta, composed.omega, p0.generators)


@dataclass(frozen=True)
class ReductionResult:
    omega_red: np.ndarray
    H: np.ndarray
    F: np.ndarray
    F_prime: np.ndarray
    phi_correction: float
    isotropy_residual: float
    standard_residual: float
    block_residual: float


def reduction_normal_form(p, F=None, tol=1e-9):
    """Split ω on T Z ⊕ F' into ω_red ⊕ the standard form on 𝔤 ⊕ 𝔤*.

    Requires Φ(m) = e, dΦ surjective and injective generators.  ``F`` is a
    complement of ker dΦ; by default the orthogonal one.
    """
    n, m = p.n, p.T_dim
    Om, dPhi, X = p.omega, p.dPhi, p.generators
    if np.linalg.matrix_rank(dPhi, tol=tol * max(1.0, np.linalg.norm(dPhi, 2))) < n:
        raise NotRegular("dΦ is not surjective")
    if np.linalg.matrix_rank(X, tol=tol * max(1.0, np.linalg.norm(X, 2))) < n:
        raise NotFree("generators are not injective")
    if F is None:
        F = span(dPhi.T, tol=tol).frame
    F = np.asarray(F, dtype=float)
    Fw = null_space(F.T @ Om, tol, scale=1.0)
    basis = np.hstack([X, Fw])
    if basis.shape[1] != m or np.linalg.svd(basis, compute_uv=False)[-1] <= tol:
        raise NotFree("𝔤-directions meet the ω-complement of F")
    coef = np.linalg.solve(basis, F)
    phiF = X @ coef[:n]
    Fp = F - 0.5 * phiF
    iso = float(np.linalg.norm(Fp.T @ Om @ Fp))
    Y = Fp @ np.linalg.inv(dPhi @ Fp)
    W = np.hstack([X, Y])
    std = np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    std_res = float(np.linalg.norm(W.T @ Om @ W - std))
    H = null_space(W.T @ Om, tol, scale=1.0)
    H = span(H, tol=tol).frame
    omega_red = H.T @ Om @ H
    off = float(np.linalg.norm(H.T @ Om @ W))
    return ReductionResult(omega_red, H, F, Fp, float(np.linalg.norm(phiF)), iso, std_res, off + std_res)


def synthetic_reduction_instance(rng, k, n, cond=2.0):
    """ω_red ⊕ standard form on 𝔤 ⊕ 𝔤*, written in scrambled coordinates.

    Old coordinates are (u, v, μ) with u ∈ R^{2k}; the scramble P maps new
    coordinates to old ones.  Returns the point and the ground truth.
    """
    W = rng.standard_normal((2 * k, 2 * k))
    S = W - W.T
    # make S comfortably nondegenerate
    S = S + 2 * np.kron(np.eye(k), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    std = np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    Om0 = sla.block_diag(S, std)
    m = 2 * k + 2 * n
    dPhi0 = np.hstack([np.zeros((n, 2 * k + n)), np.eye(n)])
    X0 = np.vstack([np.zeros((2 * k, n)), np.eye(n), np.zeros((n, n))])
    Q1, _ = np.linalg.qr(rng.standard_normal((m, m)))
    Q2, _ = np.linalg.qr(rng.standard_normal((m, m)))
    P = Q1 @ np.diag(rng.uniform(1.0 / cond, cond, m)) @ Q2
    Om = P.T @ Om0 @ P
    point = PointedQHam(np.eye(1), dPhi0 @ P, 0.5 * (Om - Om.T), np.linalg.solve(P, X0))
    return point, {"omega_red": S, "P": P, "k": k}


def recovery_residual(result, truth):
    """‖ω_red(found) - Qᵀ ω_red(true) Q‖ with Q the map H → reduced coordinates."""
    k = truth["k"]
    Q = truth["P"][:2 * k] @ result.H
    return float(np.linalg.norm(result.omega_red - Q.T @ truth["omega_red"] @ Q))


def reduce_at_level(ctx, p, tol=1e-9):
    """Reduction at Φ = g through fusion with the conjugacy class of g⁻¹."""
    ginv = np.linalg.inv(p.g)
    fused = fusion(ctx, p, conjugacy_class_data(ctx, ginv, tol))
    return reduction_normal_form(fused, tol=tol)
