"""The operator d/dt on L²([0,1], Cⁿ) with boundary condition f(1) = -A f(0).

Analytic spectra, a centered finite-difference model, the Hilbert-Schmidt
divergence diagnostic for J_{A'} - J_A, conjugation by loops, resolvent
continuity and the finite-dimensional bound for J_D = i·sign(-iD).
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import quad_vec

from .errors import DimensionMismatch, NotOrthogonal, SingularOperator
from .matfun import polar_sign


@dataclass(frozen=True)
class BoundaryOperator:
    A: np.ndarray
    tol: float = 1e-9

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A))
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch("A must be square")
        err = np.linalg.norm(A.conj().T @ A - np.eye(A.shape[0]))
        if err > 1e-8 * max(1, A.shape[0]):
            raise NotOrthogonal(f"A is not unitary (‖AᴴA - I‖ = {err:.2e})")
        object.__setattr__(self, "A", A)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def field(self):
        return "complex-unitary" if np.iscomplexobj(self.A) else "real-orthogonal"


@dataclass(frozen=True)
class AnalyticSpectrum:
    lambdas: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class Mode:
    eigenvalue: complex
    lam: float
    k: int
    r: int
    vector: np.ndarray

    def sample(self, t):
        return np.exp(self.eigenvalue * np.asarray(t))[:, None] * self.vector[None, :]


def eigen_data(B):
    """Unitary eigenbasis of A and λ ∈ [0, 1) with eigenvalues e^{2πiλ}."""
    T, Z = sla.schur(B.A.astype(complex), output="complex")
    lam = np.mod(np.angle(np.diag(T)) / (2 * np.pi), 1.0)
    lam[np.abs(lam - 0.5) <= B.tol] = 0.5
    lam[lam >= 1.0 - B.tol] = 0.0
    lam[lam <= B.tol] = 0.0
    return AnalyticSpectrum(lam, Z)


def analytic_spectrum(B, k_min, k_max):
    """Modes exp(2πi(λ + k - ½)t) v, sorted by imaginary part."""
    data = eigen_data(B)
    modes = []
    for r, lam in enumerate(data.lambdas):
        for k in range(k_min, k_max + 1):
            ev = 2j * np.pi * (lam + k - 0.5)
            modes.append(Mode(ev, float(lam), k, r, data.vectors[:, r]))
    modes.sort(key=lambda m: (m.eigenvalue.imag, m.r))
    return modes


def kernel_dim(B):
    s = np.linalg.svd(B.A + np.eye(B.n), compute_uv=False)
    ref = max(s[0], 1.0)
    return int(np.sum(s <= B.tol * ref))


@dataclass(frozen=True)
class DiscretizedOperator:
    """Sparse nN × nN skew-adjoint model of D_A on the midpoint grid."""

    N: int
    n: int
    sparse: sp.csr_matrix
    shift: sp.csr_matrix
    h: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "h", 1.0 / self.N)

    @property
    def matrix(self):
        return self.sparse.toarray()

    @property
    def grid(self):
        return (np.arange(self.N) + 0.5) / self.N


def _twisted_shift(A, N):
    """(S f)_j = f_{j+1} with f_N read as -A f_0."""
    n = A.shape[0]
    inner = sp.kron(sp.eye(N, N, k=1), sp.eye(n), format="lil").astype(A.dtype)
    inner[(N - 1) * n:, :n] = -A
    return inner.tocsr()


def discretize(B, N):
    """Centered differences (f_{j+1} - f_{j-1}) / 2h on the midpoint grid."""
    if N < 8:
        raise ValueError("N must be at least 8")
    S = _twisted_shift(B.A, N)
    # S is unitary, so S⁻¹ = Sᴴ and the stencil is exactly skew-adjoint
    M = ((S - S.conj().T) * (N / 2.0)).tocsr()
    return DiscretizedOperator(N, B.n, M, S)


def discrete_eigenvalues(op, count=None, sigma=1e-5):
    """Imaginary parts of the spectrum, ascending.

    With ``count`` only the eigenvalues nearest 0 are computed, by
    shift-invert Lanczos on the sparse Hermitian matrix -iD.
    """
    H = (-1j * op.sparse).tocsc()
    dim = H.shape[0]
    if count is None or count >= dim - 1:
        return sla.eigvalsh(H.toarray())
    w = spla.eigsh(H, k=count, sigma=sigma, which="LM", return_eigenvectors=False)
    return np.sort(w.real)


def discrete_kernel(op, threshold=1e-6):
    """Return (raw zero-mode count, count with the lattice doublers removed).

    The centered stencil is (S - S⁻¹)/2h, so its kernel splits into
    ker(S - I), the constant-on-the-grid modes, and ker(S + I), the
    alternating modes that appear on even grids.  Only the first piece
    corresponds to the continuum kernel.
    """
    k = min(2 * op.n + 2, op.sparse.shape[0] - 2)
    w = discrete_eigenvalues(op, count=k)
    raw = int(np.sum(np.abs(w) <= threshold))
    E = op.shift - sp.eye(op.shift.shape[0], format="csr")
    G = (E.conj().T @ E).tocsc()
    g = spla.eigsh(G, k=min(op.n + 1, G.shape[0] - 2), sigma=-1e-2, which="LM", return_eigenvectors=False)
    physical = int(np.sum(np.abs(g) <= threshold ** 2))
    return raw, physical


def match_modes(op, B, count=10):
    """Relative errors of the ``count`` smallest analytic eigenvalues.

    Each analytic eigenvalue is paired with its nearest discrete one.  Even
    grids carry a doubled copy of the low spectrum, hence the extra room.
    """
    K = count // (2 * B.n) + 3
    modes = analytic_spectrum(B, -K, K)
    modes.sort(key=lambda m: abs(m.eigenvalue))
    target = np.array([m.eigenvalue.imag for m in modes[:count]])
    w = discrete_eigenvalues(op, count=min(2 * count + 4 * B.n, op.sparse.shape[0] - 2))
    # kernel modes have no scale, so their error is absolute
    errs = np.array([np.min(np.abs(w - x)) / (abs(x) if x != 0 else 1.0) for x in target])
    return target, errs


@dataclass(frozen=True)
class HSReport:
    M_values: np.ndarray
    partial_sums: np.ndarray
    slope: float
    first_term: float
    coefficient: float
    verdict: str


def _pair_terms(B1, B2, tol):
    d1, d2 = eigen_data(B1), eigen_data(B2)
    pairs = []
    for r, lam in enumerate(d1.lambdas):
        for s, lamp in enumerate(d2.lambdas):
            ip = np.vdot(d1.vectors[:, r], d2.vectors[:, s])
            delta = lamp - lam
            amp = abs(ip) * abs(np.exp(2j * np.pi * delta) - 1)
            if amp <= tol:
                continue
            c = amp ** 2 / (4 * np.pi ** 2)
            k_min = int(np.floor(0.5 - lam)) + 1
            l_max = int(np.floor(0.5 - lamp))
            pairs.append((c, delta, k_min, l_max))
    return pairs


def _partial_sum(pairs, M):
    total = 0.0
    for c, delta, k_min, l_max in pairs:
        p = np.arange(k_min - min(l_max, M), 2 * M + 1)
        lo = np.maximum(k_min, p - M)
        hi = np.minimum(M, p + min(l_max, M))
        cnt = np.clip(hi - lo + 1, 0, None)
        total += c * float(np.sum(cnt / (p - delta) ** 2))
    return total


def hs_divergence_diagnostic(B1, B2, M_max=100000, M_values=None, tol=1e-9):
    """Truncated sums of |⟨φ_k, φ'_l⟩|² over the mixed-sign index region."""
    if B1.n != B2.n:
        raise DimensionMismatch("operators must share the fiber dimension")
    pairs = _pair_terms(B1, B2, tol)
    if M_values is None:
        hi = np.log10(M_max)
        M_values = np.unique(np.round(np.logspace(1, hi, int(4 * (hi - 1)) + 1)).astype(int))
    M_values = np.asarray(M_values, dtype=int)
    sums = np.array([_partial_sum(pairs, int(M)) for M in M_values])
    coefficient = float(sum(c for c, *_ in pairs))
    first = max((c / (k_min - l_max - delta) ** 2 for c, delta, k_min, l_max in pairs), default=0.0)
    last = M_values >= M_values[-1] / 10.0
    if np.sum(last) >= 2:
        slope = float(np.polyfit(np.log(M_values[last]), sums[last], 1)[0])
    else:
        slope = 0.0
    verdict = "divergent" if first > 0 and slope > 0.1 * first else "bounded"
    return HSReport(M_values, sums, slope, float(first), coefficient, verdict)


def _sample_path(gamma, grid):
    if callable(gamma):
        return np.array([np.atleast_2d(gamma(t)) for t in grid])
    return np.asarray(gamma)


def conjugation_identity(B_from, B_to, gamma, N=128, k_max=3):
    """Residual of M_γ D_{A'} M_γ⁻¹ = D_A + M_μ with μ = -γ̇γ⁻¹.

    ``B_from`` carries A' and ``B_to`` carries A = γ(1) A' γ(0)⁻¹, so that
    g = γ f carries the boundary condition of A' to that of A.  γ̇ is a forward difference on the midpoint grid, with the
    sample past the end continued through the boundary twist.  The
    residual is the operator norm on the span of the sampled analytic modes
    of D_A with |k| ≤ k_max; on the full grid the high-frequency part does
    not converge.  When μ jumps across the boundary twist the residual
    decays like N^(-1/2) instead of N^(-1).
    """
    n = B_to.n
    opf, opt = discretize(B_from, N), discretize(B_to, N)
    G = _sample_path(gamma, opf.grid)
    if G.shape != (N, n, n):
        raise DimensionMismatch("gamma must be sampled as N matrices of size n")
    if np.max(np.linalg.norm(G.conj().transpose(0, 2, 1) @ G - np.eye(n), axis=(1, 2))) > 1e-8:
        raise NotOrthogonal("gamma samples must be unitary")
    Ginv = G.conj().transpose(0, 2, 1)
    tail = B_to.A @ G[0] @ np.linalg.inv(B_from.A)
    Gnext = np.concatenate([G[1:], tail[None]], axis=0)
    mu = -(Gnext - G) * N @ Ginv
    Mg = sla.block_diag(*G)
    Mgi = sla.block_diag(*Ginv)
    Mmu = sla.block_diag(*mu)
    R = Mg @ (opf.sparse @ Mgi) - opt.sparse - Mmu
    modes = analytic_spectrum(B_to, -k_max, k_max)
    Phi = np.stack([m.sample(opt.grid).reshape(-1) for m in modes], axis=1)
    Q, _ = np.linalg.qr(Phi)
    return float(np.linalg.norm(R @ Q, 2))


def resolvent_continuity(B, a, N=512):
    """(‖R₁(D_{exp(a)A}) - R₁(D_A)‖, 3‖a‖) on the discretization.

    The two stencils differ only in the wrap blocks, so the difference
    R₁(D_a) (D_0 - D_a) R₁(D_0) has rank at most 2n and its norm comes from
    a few sparse solves.
    """
    a = np.atleast_2d(np.asarray(a))
    Ba = BoundaryOperator(sla.expm(a) @ B.A, B.tol)
    D0 = discretize(B, N).sparse.astype(complex)
    Da = discretize(Ba, N).sparse.astype(complex)
    I = sp.identity(D0.shape[0], dtype=complex, format="csc")
    delta = (D0 - Da).tocoo()
    bound = 3.0 * float(np.linalg.norm(a, 2))
    rows, cols = np.unique(delta.row), np.unique(delta.col)
    if not rows.size:
        return 0.0, bound
    core = delta.tocsr()[rows][:, cols].toarray()
    X = spla.splu((Da - I).tocsc()).solve(I[:, rows].toarray())
    Y = spla.splu((D0 - I).conj().T.tocsc()).solve(I[:, cols].toarray())
    _, Rx = np.linalg.qr(X)
    _, Ry = np.linalg.qr(Y)
    return float(np.linalg.norm(Rx @ core @ Ry.conj().T, 2)), bound


def sign_structure(D, tol=1e-9):
    J, gap = polar_sign(D)
    if gap <= tol:
        raise SingularOperator(f"spectrum within {gap:.2e} of zero")
    return J, gap


def finite_hs_bound(D, Q, tol=1e-9):
    """(‖J_{D+Q} - J_D‖_F, ‖Q‖_F / a) with a the smaller spectral gap."""
    D = np.asarray(D)
    Q = np.asarray(Q)
    J0, g0 = sign_structure(D, tol)
    J1, g1 = sign_structure(D + Q, tol)
    a = min(g0, g1)
    return float(np.linalg.norm(J1 - J0)), float(np.linalg.norm(Q) / a)


def sign_by_quadrature(D, T=1e6):
    """J_D = -(1/π) ∫ (D - t)⁻¹ dt, integrated symmetrically over |t| ≤ T.

    The pair (D - t)⁻¹ + (D + t)⁻¹ = 2D(D² - t²)⁻¹ is integrated on
    [0, T] after t = tan θ; the tail beyond T is replaced by its leading
    term -2D/T.
    """
    D = np.asarray(D, dtype=complex)
    I = np.eye(D.shape[0])
    D2 = D @ D

    def integrand(theta):
        t = np.tan(theta)
        return 2 * D @ np.linalg.inv(D2 - t * t * I) / np.cos(theta) ** 2

    body, _ = quad_vec(integrand, 0.0, np.arctan(T), epsabs=1e-12, epsrel=1e-10, limit=2000)
    tail = -2 * D / T
    J = -(body + tail) / np.pi
    return J.real if np.allclose(J.imag, 0) else J
