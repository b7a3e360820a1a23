"""Spinor (Fock) modules of finite-dimensional complex structures and the
windowed infinite-wedge model with weights and the shift τ.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, OddKernel, WindowTooLarge
from .matfun import polar_sign
from . import spectral

SQRT2 = np.sqrt(2.0)
MAX_WINDOW = 12


@dataclass(frozen=True)
class ComplexStructure:
    J: np.ndarray
    tol: float = 1e-9

    def __post_init__(self):
        J = np.atleast_2d(np.asarray(self.J, dtype=float))
        d = J.shape[0]
        if d % 2 or J.shape != (d, d):
            raise DimensionMismatch("J must be square of even size")
        if np.linalg.norm(J @ J + np.eye(d)) > self.tol * 10 * d or np.linalg.norm(J + J.T) > self.tol * 10 * d:
            raise ValueError("J must satisfy J² = -I and Jᵀ = -J")
        object.__setattr__(self, "J", J)

    @property
    def d(self):
        return self.J.shape[0]

    @classmethod
    def from_skew(cls, D, tol=1e-9):
        J, _ = spectral.sign_structure(np.asarray(D, dtype=float), tol)
        return cls(J, tol)


def _creation_matrices(m):
    """Jordan-Wigner creation operators a_k† on ∧Cᵐ, basis = bitmasks."""
    dim = 1 << m
    states = np.arange(dim)
    ops = []
    for k in range(m):
        bit = 1 << k
        empty = (states & bit) == 0
        src = states[empty]
        below = np.array([bin(s & (bit - 1)).count("1") for s in src], dtype=int)
        sign = np.where(below % 2 == 0, 1, -1)
        ops.append(sp.csr_matrix((sign, (src | bit, src)), shape=(dim, dim), dtype=np.int64))
    return ops


@dataclass(frozen=True)
class SpinorModule:
    """∧V₊ with V₊ = ker(J - i), orthonormal basis f_1, …, f_m."""

    J: ComplexStructure

    @cached_property
    def plus_basis(self):
        w, V = np.linalg.eigh(-1j * self.J.J)
        # J f = i f  ⇔  (-iJ) f = f
        F = V[:, w > 0]
        return F

    @property
    def m(self):
        return self.J.d // 2

    @property
    def wedge_dim(self):
        return 1 << self.m

    @cached_property
    def creation(self):
        return [op.toarray().astype(float) for op in _creation_matrices(self.m)]

    def clifford_action(self, v):
        """ρ(v) = √2 (ε(v₊) + ι(v₋)) on the wedge basis."""
        v = np.asarray(v)
        if v.shape != (self.J.d,):
            raise DimensionMismatch("vector has the wrong length")
        F = self.plus_basis
        plus = F.conj().T @ v  # coordinates of v₊
        minus = F.T @ v        # ι(v₋) f_k = B(v₋, f_k)
        out = np.zeros((self.wedge_dim, self.wedge_dim), dtype=complex)
        for k, ad in enumerate(self.creation):
            out += plus[k] * ad + minus[k] * ad.T
        return SQRT2 * out

    def grading(self):
        deg = np.array([bin(s).count("1") for s in range(self.wedge_dim)])
        return np.diag(np.where(deg % 2 == 0, 1.0, -1.0))


def grading(S):
    return S.grading()


def clifford_action(S, v):
    return S.clifford_action(v)


def kernel_rank(J1, J2, tol=1e-9):
    s = np.linalg.svd(J1.J + J2.J, compute_uv=False)
    return int(np.sum(s <= tol * max(1.0, s[0])))


def ss_parity(J1, J2, tol=1e-9):
    """Parity of ½ dim ker(J1 + J2)."""
    if J1.d != J2.d:
        raise DimensionMismatch("complex structures on different spaces")
    k = kernel_rank(J1, J2, tol)
    if k % 2:
        raise OddKernel(f"dim ker(J1 + J2) = {k}")
    return "odd" if (k // 2) % 2 else "even"


@dataclass(frozen=True, order=True)
class WedgeState:
    """K = {k ≤ 0} ∪ added ∖ removed."""

    added: tuple = ()
    removed: tuple = ()

    def __post_init__(self):
        added = tuple(sorted(set(int(k) for k in self.added), reverse=True))
        removed = tuple(sorted(set(int(k) for k in self.removed)))
        if any(k <= 0 for k in added) or any(k > 0 for k in removed):
            raise ValueError("added must be positive and removed nonpositive")
        object.__setattr__(self, "added", added)
        object.__setattr__(self, "removed", removed)

    def contains(self, k):
        return k in self.added if k > 0 else k not in self.removed


def weight(K):
    """m_K = #{k ∈ K, k > 0} - #{k ∉ K, k ≤ 0}."""
    return len(K.added) - len(K.removed)


def shift(K):
    """τ(K) = K + 1 in canonical form."""
    added = {k + 1 for k in K.added}
    if 0 not in K.removed:
        added.add(1)
    removed = {r + 1 for r in K.removed if r <= -1}
    return WedgeState(tuple(added), tuple(removed))


@dataclass(frozen=True)
class WedgeWindow:
    """Wedge states whose symmetric difference with the sea lies in [lo, hi].

    Basis vectors are bitmasks; bit i stands for the mode k = lo + i.
    s_K = f_{k1} ∧ f_{k2} ∧ … with k1 > k2 > …, so ε(f_k) picks up the sign
    (-1)^{#{j ∈ K : j > k}}.
    """

    lo: int
    hi: int

    @property
    def modes(self):
        return list(range(self.lo, self.hi + 1))

    @property
    def size(self):
        return self.hi - self.lo + 1

    @property
    def dim(self):
        return 1 << self.size

    def index(self, K):
        mask = 0
        for i, k in enumerate(self.modes):
            if K.contains(k):
                mask |= 1 << i
        return mask

    def state(self, mask):
        added = [k for i, k in enumerate(self.modes) if k > 0 and mask >> i & 1]
        removed = [k for i, k in enumerate(self.modes) if k <= 0 and not mask >> i & 1]
        return WedgeState(tuple(added), tuple(removed))

    def weights(self):
        masks = np.arange(self.dim)
        pos = np.array([k > 0 for k in self.modes])
        bits = (masks[:, None] >> np.arange(self.size)[None, :]) & 1
        return bits[:, pos].sum(axis=1) - (1 - bits[:, ~pos]).sum(axis=1)


@dataclass(frozen=True)
class WedgeOperators:
    window: WedgeWindow
    creation: dict
    annihilation: dict
    tau: sp.csr_matrix
    grading: sp.csr_matrix
    normalization: float = SQRT2


def wedge_operators(N, lo=None, hi=None):
    """Exact integer ε(f_k), ι(f_k*), τ and grading on a window.

    The default window is k ∈ [-N, N].  Multiply by ``normalization`` (√2)
    to obtain ρ(f_k) and ρ(f_k*).
    """
    if N > MAX_WINDOW:
        raise WindowTooLarge(f"window {N} exceeds {MAX_WINDOW}")
    lo = -N if lo is None else lo
    hi = N if hi is None else hi
    W = WedgeWindow(lo, hi)
    size, dim = W.size, W.dim
    masks = np.arange(dim, dtype=np.int64)
    creation, annihilation = {}, {}
    for i, k in enumerate(W.modes):
        bit = 1 << i
        src = masks[(masks & bit) == 0]
        above = np.zeros(src.shape, dtype=np.int64)
        for j in range(i + 1, size):
            above += (src >> j) & 1
        sign = 1 - 2 * (above % 2)
        op = sp.csr_matrix((sign, (src | bit, src)), shape=(dim, dim), dtype=np.int64)
        creation[k] = op
        annihilation[k] = op.T.tocsr()
    top = 1 << (size - 1)
    src = masks[(masks & top) == 0]
    # shift every mode up by one; the mode just below the window is filled
    tau = sp.csr_matrix((np.ones(src.size, dtype=np.int64), ((src << 1) | 1, src)), shape=(dim, dim))
    w = W.weights()
    grading = sp.diags(np.where(w % 2 == 0, 1, -1).astype(np.int64)).tocsr()
    return WedgeOperators(W, creation, annihilation, tau, grading)


def car_defect(ops):
    """Total absolute entry mismatch in the canonical anticommutation relations."""
    eye = sp.identity(ops.window.dim, dtype=np.int64, format="csr")
    total = 0
    for k in ops.window.modes:
        for l in ops.window.modes:
            a, b = ops.creation[k], ops.creation[l]
            total += int(abs(a @ b + b @ a).sum())
            anti = ops.annihilation[k] @ b + b @ ops.annihilation[k]
            if k == l:
                anti = anti - eye
            total += int(abs(anti).sum())
    return total


def tau_defect(ops):
    """Mismatch in τ ε_k = ε_{k+1} τ and τ ι_k = ι_{k+1} τ below the top mode."""
    total = 0
    for k in ops.window.modes[:-1]:
        for table in (ops.creation, ops.annihilation):
            total += int(abs(ops.tau @ table[k] - table[k + 1] @ ops.tau).sum())
    return total


def _rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class SO2Ladder:
    s: float
    window: WedgeWindow
    eigenvalues: dict
    crossings: int
    kernel_dim: int
    vacuum_weight: int
    vacuum_parity: str
    polarization_match: bool
    weights: np.ndarray


def so2_model(s, N=6):
    """Weight ladder of the window after spectral flow along A_s = rot(2πs).

    Mode k of the flowed operator is f_k^{(s)} = e^{2πi(k - ½ + s)t} u with
    u the e^{2πis}-eigenvector of A_s.  The window is the balanced range
    k ∈ [1 - N, N].  Weights are reported in the fixed frame: each zero
    crossing of the ladder between 0 and s (a kernel mode counts as crossed)
    moves the vacuum up by one, which at s = 1 is the action of τ.
    """
    W = WedgeWindow(1 - N, N)
    B = spectral.BoundaryOperator(_rotation(2 * np.pi * s))
    modes = spectral.analytic_spectrum(B, W.lo - 2, W.hi + 2)
    target = np.exp(2j * np.pi * s)
    data = spectral.eigen_data(B)
    # the channel whose A_s-eigenvalue is e^{2πis} carries f_k^{(s)}
    r_u = int(np.argmin(np.abs(np.exp(2j * np.pi * data.lambdas) - target)))
    ladder = {}
    for md in modes:
        if md.r != r_u:
            continue
        # λ + k - ½ = (k' - ½ + s) with k' the transported label
        kp = int(round(md.lam + md.k - s))
        if W.lo <= kp <= W.hi:
            ladder[kp] = md.eigenvalue
    zero = 1e-9
    crossings = sum(1 for k in ladder if k - 0.5 < 0 and (k - 0.5 + s) >= -zero) \
        - sum(1 for k in ladder if k - 0.5 > 0 and (k - 0.5 + s) < -zero)
    # at s = 0 the creation modes above the sea are exactly those with Im > 0
    match = all((ladder[k].imag > 0) == (k >= 1) for k in ladder) if abs(s) < 1e-12 else \
        all((ladder[k].imag > zero) == (k - 0.5 + s > zero) for k in ladder)
    weights = np.sort(W.weights() + crossings)
    return SO2Ladder(
        s=float(s),
        window=W,
        eigenvalues=ladder,
        crossings=int(crossings),
        kernel_dim=spectral.kernel_dim(B),
        vacuum_weight=int(crossings),
        vacuum_parity="odd" if crossings % 2 else "even",
        polarization_match=bool(match),
        weights=weights,
    )
