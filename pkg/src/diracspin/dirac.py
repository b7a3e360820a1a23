"""Linear Dirac structures on V ⊕ V* and Dirac morphisms (Θ, ω).

Layout conventions used throughout the package:

* an element of V ⊕ V* is the stacked vector ``[v; α]``;
* a Dirac structure on V1 ⊕ V2 ⊕ … stores all vector parts first and all
  covector parts after, ``[v1; v2; …; α1; α2; …]``;
* ``omega`` is the Gram matrix ``Ω[i, j] = ω(e_i, e_j)``, so the contraction
  ι_v ω = ω(v, ·) is the covector ``Ωᵀ v``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonLagrangianResult, NotStrong
from .jsonio import decode_matrix, encode_matrix
from .linear_core import (
    DEFAULT_TOL,
    BilinearPairing,
    LinearRelation,
    Subspace,
    intersect,
    null_space,
    isotropic_check,
    relation_apply,
    same_subspace,
    span,
)


@dataclass(frozen=True)
class DiracMorphism:
    theta: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        theta = np.atleast_2d(np.asarray(self.theta, dtype=float))
        omega = np.atleast_2d(np.asarray(self.omega, dtype=float))
        if omega.shape[0] != omega.shape[1] or omega.shape[0] != theta.shape[1]:
            raise DimensionMismatch("omega must be square with side equal to theta's column count")
        if omega.size and np.max(np.abs(omega + omega.T)) > 1e-9 * max(1.0, np.max(np.abs(omega))):
            raise ValueError("omega is not skew-symmetric")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "omega", omega)

    @property
    def source_dim(self):
        return self.theta.shape[1]

    @property
    def target_dim(self):
        return self.theta.shape[0]

    def contract(self, v):
        """ι_v ω as a covector."""
        return self.omega.T @ v

    def to_dict(self):
        return {"theta": encode_matrix(self.theta), "omega": encode_matrix(self.omega),
                "source_dim": self.source_dim, "target_dim": self.target_dim}

    @classmethod
    def from_dict(cls, data):
        n = int(data.get("source_dim", len(data["omega"])))
        m = int(data.get("target_dim", len(data["theta"])))
        theta = decode_matrix(data["theta"]).reshape(m, n) if m and n else np.zeros((m, n))
        omega = decode_matrix(data["omega"]).reshape(n, n) if n else np.zeros((0, 0))
        return cls(theta, omega)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n), np.zeros((n, n)))


@dataclass(frozen=True)
class DiracStructure:
    n: int
    E: Subspace

    @property
    def pairing(self):
        return BilinearPairing.canonical(self.n)

    def to_dict(self):
        return {"n": self.n, "E": self.E.to_dict()}

    @classmethod
    def from_dict(cls, data, tol=DEFAULT_TOL):
        return certify(Subspace.from_dict(data["E"], tol), int(data["n"]))


def certify(E, n):
    """Wrap E as a DiracStructure after checking isotropy and dimension."""
    if E.ambient_dim != 2 * n:
        raise DimensionMismatch("E must live in a space of dimension 2n")
    ok, res = isotropic_check(E, BilinearPairing.canonical(n))
    if not ok or E.dim != n:
        raise NonLagrangianResult(f"dim {E.dim} (want {n}), isotropy residual {res:.3e}")
    return DiracStructure(n, E)


def from_frame(frame, n, tol=DEFAULT_TOL):
    return certify(span(frame, tol=tol), n)


def vectors(n, tol=DEFAULT_TOL):
    """The Dirac structure V ⊂ V ⊕ V*."""
    return DiracStructure(n, Subspace(np.vstack([np.eye(n), np.zeros((n, n))]), tol))


def covectors(n, tol=DEFAULT_TOL):
    """The Dirac structure V* ⊂ V ⊕ V*."""
    return DiracStructure(n, Subspace(np.vstack([np.zeros((n, n)), np.eye(n)]), tol))


def graph_of_form(omega, tol=DEFAULT_TOL):
    """{(v, ι_v ω)}, the forward image of V under (id, -ω)."""
    n = omega.shape[0]
    return DiracStructure(n, span(np.vstack([np.eye(n), omega.T]), tol=tol))


def product(*structures):
    """E1 × E2 × … in the [v1; v2; …; α1; α2; …] layout."""
    dims = [D.n for D in structures]
    total = sum(dims)
    cols = []
    off = 0
    for D in structures:
        F = D.E.frame
        block = np.zeros((2 * total, F.shape[1]), dtype=F.dtype)
        block[off:off + D.n] = F[:D.n]
        block[total + off:total + off + D.n] = F[D.n:]
        cols.append(block)
        off += D.n
    tol = max(D.E.tol for D in structures) if structures else DEFAULT_TOL
    frame = np.hstack(cols) if cols else np.zeros((0, 0))
    return DiracStructure(total, Subspace(frame, tol))


def compose(m2, m1):
    """(Θ2 Θ1, ω1 + Θ1ᵀ ω2 Θ1)."""
    if m2.source_dim != m1.target_dim:
        raise DimensionMismatch("m2 source must equal m1 target")
    theta = m2.theta @ m1.theta
    omega = m1.omega + m1.theta.T @ m2.omega @ m1.theta
    return DiracMorphism(theta, 0.5 * (omega - omega.T))


def morphism_relation(m, tol=DEFAULT_TOL):
    """Graph of v' = Θv, α = ι_v ω + Θᵀ α', parametrized by (v, α')."""
    n, k = m.source_dim, m.target_dim
    top = np.block([[np.eye(n), np.zeros((n, k))],
                    [m.omega.T, m.theta.T]])
    bottom = np.block([[m.theta, np.zeros((k, k))],
                       [np.zeros((k, n)), np.eye(k)]])
    return LinearRelation(2 * n, 2 * k, span(np.vstack([top, bottom]), tol=tol))


def forward_image(m, D):
    if m.source_dim != D.n:
        raise DimensionMismatch("morphism source does not match structure")
    img = relation_apply(morphism_relation(m, D.E.tol), D.E, "forward")
    return certify(img, m.target_dim)


def backward_image(m, D):
    if m.target_dim != D.n:
        raise DimensionMismatch("morphism target does not match structure")
    img = relation_apply(morphism_relation(m, D.E.tol), D.E, "backward")
    return certify(img, m.source_dim)


def kernel_of(m, tol=DEFAULT_TOL):
    """{(v, ι_v ω) : v ∈ ker Θ}."""
    K = null_space(m.theta, tol) if m.target_dim else np.eye(m.source_dim)
    return span(np.vstack([K, m.omega.T @ K]), tol=tol, scale=1.0)


def is_strong(m, D):
    if m.source_dim != D.n:
        raise DimensionMismatch("morphism source does not match structure")
    return intersect(D.E, kernel_of(m, D.E.tol)).dim == 0


def intersection_with_vectors(D):
    return intersect(D.E, vectors(D.n, D.E.tol).E)


def parity(D):
    return "odd" if intersection_with_vectors(D).dim % 2 else "even"


def relation_residual(m, x, y):
    """How far the pair x = (v, α), y = (v', α') is from satisfying x ∼ y."""
    n = m.source_dim
    v, a = x[:n], x[n:]
    vp, ap = y[:m.target_dim], y[m.target_dim:]
    r1 = np.linalg.norm(m.theta @ v - vp)
    r2 = np.linalg.norm(a - m.contract(v) - m.theta.T @ ap)
    return float(r1 + r2)


def _path_image(theta, omega, D):
    return forward_image(DiracMorphism(theta, omega), D)


def standard_path(m, D, t):
    """E_t: forward image of E under j_t = ((1-t) id, tΘ), ω_t = tω."""
    if not is_strong(m, D):
        raise NotStrong("standard path needs a strong morphism")
    n = m.source_dim
    theta = np.vstack([(1 - t) * np.eye(n), t * m.theta])
    return _path_image(theta, t * m.omega, D)


def two_param_path(m1, m2, D, t, tp):
    """E_{tt'} for the pair Θ: V → V', Θ': V' → V''."""
    if t < 0 or tp < 0 or t + tp > 1 + 1e-12:
        raise ValueError("need t, t' ≥ 0 and t + t' ≤ 1")
    if not is_strong(m1, D) or not is_strong(m2, forward_image(m1, D)):
        raise NotStrong("two-parameter path needs strong morphisms")
    n = m1.source_dim
    theta = np.vstack([(1 - t - tp) * np.eye(n), t * m1.theta, tp * m2.theta @ m1.theta])
    composite = m1.omega + m1.theta.T @ m2.omega @ m1.theta
    return _path_image(theta, t * m1.omega + tp * composite, D)


def normalized_path(D, t):
    """Ẽ_t for the morphism (id, 0), with j_t rescaled to be isometric."""
    n = D.n
    c = (t * t + (1 - t) ** 2) ** -0.5
    theta = c * np.vstack([(1 - t) * np.eye(n), t * np.eye(n)])
    return _path_image(theta, np.zeros((n, n)), D)


def same_structure(D1, D2, tol=1e-8):
    return D1.n == D2.n and same_subspace(D1.E, D2.E, tol)
