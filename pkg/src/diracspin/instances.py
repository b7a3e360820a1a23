"""Seeded random instances shared by the suites, the generator and tests."""
import numpy as np
from scipy.linalg import block_diag

from .dirac import DiracMorphism, is_strong
from .orthogonal import lag_from_orth


def random_orthogonal(rng, n, det=None):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if det is not None and np.sign(np.linalg.det(Q)) != det:
        Q[:, 0] *= -1
    return Q


def random_unitary(rng, n):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_skew(rng, n, scale=1.0):
    W = rng.standard_normal((n, n))
    return scale * (W - W.T) / 2


def orthogonal_with_eigen(rng, n, minus=0, plus=0):
    """Random A ∈ O(n) with prescribed multiplicities of -1 and +1.

    The remaining eigenvalues come in generic rotation pairs, so n - minus -
    plus must be even.
    """
    rest = n - minus - plus
    if rest % 2:
        raise ValueError("remaining dimension must be even")
    blocks = [-np.eye(minus), np.eye(plus)]
    for _ in range(rest // 2):
        th = rng.uniform(0.3, np.pi - 0.3)
        c, s = np.cos(th), np.sin(th)
        blocks.append(np.array([[c, -s], [s, c]]))
    D = block_diag(*[b for b in blocks if b.size])
    Q = random_orthogonal(rng, n)
    return Q @ D @ Q.T


def random_structure(rng, n):
    """E_A for A with a random number of -1 eigenvalues (so parity varies)."""
    minus = int(rng.integers(0, n + 1))
    plus = (n - minus) % 2
    return lag_from_orth(orthogonal_with_eigen(rng, n, minus, plus))


def random_morphism(rng, n, k, rank=None):
    theta = rng.standard_normal((k, n))
    if rank is not None and rank < min(n, k):
        theta = rng.standard_normal((k, rank)) @ rng.standard_normal((rank, n))
    return DiracMorphism(theta, random_skew(rng, n))


def random_strong_pair(rng, n, k, tries=200):
    """A strong (morphism, structure) pair with source dimension n."""
    for _ in range(tries):
        D = random_structure(rng, n)
        rank = int(rng.integers(0, min(n, k) + 1))
        m = random_morphism(rng, n, k, rank=rank)
        if rng.random() < 0.3:
            m = DiracMorphism(m.theta, np.zeros((n, n)))
        if is_strong(m, D):
            return m, D
    raise RuntimeError("could not draw a strong pair")
