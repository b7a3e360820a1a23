"""Dense subspace and linear-relation calculus with explicit tolerances.

Subspaces are held as orthonormal column frames.  Every rank decision goes
through the singular values of the matrix at hand, compared against
``tol`` times a reference scale.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch
from .jsonio import decode_matrix, encode_matrix

DEFAULT_TOL = 1e-9


def _rank_cut(s, tol, scale=None):
    if s.size == 0:
        return 0
    ref = s[0] if scale is None else max(s[0], scale)
    if ref == 0:
        return 0
    return int(np.sum(s > tol * ref))


@dataclass(frozen=True)
class Subspace:
    frame: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        F = np.asarray(self.frame)
        if F.ndim != 2:
            raise DimensionMismatch("frame must be a 2-d array")
        object.__setattr__(self, "frame", F)

    @property
    def ambient_dim(self):
        return self.frame.shape[0]

    @property
    def dim(self):
        return self.frame.shape[1]

    @property
    def field(self):
        return "complex" if np.iscomplexobj(self.frame) else "real"

    def projector(self):
        return self.frame @ self.frame.conj().T

    def to_dict(self):
        return {"ambient_dim": self.ambient_dim, "field": self.field, "frame": encode_matrix(self.frame)}

    @classmethod
    def from_dict(cls, data, tol=DEFAULT_TOL):
        n = int(data["ambient_dim"])
        raw = data["frame"]
        F = decode_matrix(raw) if raw and raw[0] else np.zeros((n, 0))
        F = F.reshape(n, -1)
        if data.get("field") == "complex":
            F = F.astype(complex)
        return span(F, tol=tol, ambient_dim=n)

    @classmethod
    def zero(cls, ambient_dim, field="real", tol=DEFAULT_TOL):
        dtype = complex if field == "complex" else float
        return cls(np.zeros((ambient_dim, 0), dtype=dtype), tol)

    @classmethod
    def full(cls, ambient_dim, field="real", tol=DEFAULT_TOL):
        dtype = complex if field == "complex" else float
        return cls(np.eye(ambient_dim, dtype=dtype), tol)


def span(vectors, tol=DEFAULT_TOL, ambient_dim=None, scale=None):
    """Orthonormal frame for the column span of ``vectors``.

    ``scale`` sets a floor for the reference singular value, which keeps
    rounding noise out when the columns are known to have norm at most
    ``scale`` but may all have collapsed.
    """
    V = np.asarray(vectors)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    if ambient_dim is not None and V.shape[0] != ambient_dim:
        raise DimensionMismatch(f"expected {ambient_dim} rows, got {V.shape[0]}")
    if V.shape[1] == 0:
        return Subspace(np.zeros((V.shape[0], 0), dtype=V.dtype), tol)
    U, s, _ = np.linalg.svd(V, full_matrices=False)
    r = _rank_cut(s, tol, scale)
    return Subspace(U[:, :r], tol)


def null_space(M, tol=DEFAULT_TOL, scale=None):
    """Orthonormal frame of {x : M x = 0}."""
    M = np.atleast_2d(np.asarray(M))
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(ncols, dtype=M.dtype)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    r = _rank_cut(s, tol, scale)
    return Vh[r:].conj().T


def orthogonal_complement(S):
    return Subspace(null_space(S.frame.conj().T, S.tol, scale=1.0), S.tol)


def _check_same(S1, S2):
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionMismatch(f"ambient dims differ: {S1.ambient_dim} vs {S2.ambient_dim}")


def intersect(S1, S2):
    """S1 ∩ S2 as the common null space of both orthogonal complements."""
    _check_same(S1, S2)
    tol = max(S1.tol, S2.tol)
    C1 = orthogonal_complement(S1).frame
    C2 = orthogonal_complement(S2).frame
    M = np.vstack([C1.conj().T, C2.conj().T])
    if M.shape[0] == 0:
        dtype = np.result_type(S1.frame, S2.frame)
        return Subspace(np.eye(S1.ambient_dim, dtype=dtype), tol)
    return Subspace(null_space(M, tol, scale=1.0), tol)


def subspace_sum(S1, S2):
    _check_same(S1, S2)
    return span(np.hstack([S1.frame, S2.frame]), tol=max(S1.tol, S2.tol), scale=1.0)


def direct_sum(*spaces):
    """Block-diagonal product S1 ⊕ S2 ⊕ … in the concatenated ambient space."""
    frame = sla.block_diag(*[S.frame for S in spaces])
    return Subspace(frame, max(S.tol for S in spaces))


def distance(S1, S2):
    """Largest principal angle; subspaces of different dimension are at π/2."""
    _check_same(S1, S2)
    if S1.dim != S2.dim:
        return np.pi / 2
    if S1.dim == 0:
        return 0.0
    return float(np.max(sla.subspace_angles(S1.frame, S2.frame)))


def same_subspace(S1, S2, tol=1e-8):
    return S1.ambient_dim == S2.ambient_dim and distance(S1, S2) <= tol


@dataclass(frozen=True)
class BilinearPairing:
    gram: np.ndarray

    @property
    def dim(self):
        return self.gram.shape[0]

    @classmethod
    def canonical(cls, n):
        """⟨(v1, a1), (v2, a2)⟩ = a1(v2) + a2(v1) on V ⊕ V*."""
        Z = np.zeros((n, n))
        I = np.eye(n)
        return cls(np.block([[Z, I], [I, Z]]))


def isotropic_check(S, P):
    """Return (is_isotropic, residual) with residual the 2-norm of Fᵀ G F."""
    if S.ambient_dim != P.dim:
        raise DimensionMismatch("subspace and pairing live in different spaces")
    if S.dim == 0:
        return True, 0.0
    res = float(np.linalg.norm(S.frame.T @ P.gram @ S.frame, 2))
    return res <= S.tol, res


@dataclass(frozen=True)
class LinearRelation:
    source_dim: int
    target_dim: int
    graph: Subspace

    def __post_init__(self):
        if self.graph.ambient_dim != self.source_dim + self.target_dim:
            raise DimensionMismatch("graph ambient dimension must be source_dim + target_dim")


def relation_apply(R, S, direction="forward"):
    """Forward or backward image of S under the relation R."""
    n, m = R.source_dim, R.target_dim
    if direction == "forward":
        if S.ambient_dim != n:
            raise DimensionMismatch("subspace does not live in the relation's source")
        slab = direct_sum(S, Subspace.full(m, S.field, S.tol))
        rows = slice(n, n + m)
    elif direction == "backward":
        if S.ambient_dim != m:
            raise DimensionMismatch("subspace does not live in the relation's target")
        slab = direct_sum(Subspace.full(n, S.field, S.tol), S)
        rows = slice(0, n)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    meet = intersect(R.graph, slab)
    return span(meet.frame[rows], tol=max(S.tol, R.graph.tol), scale=1.0)
