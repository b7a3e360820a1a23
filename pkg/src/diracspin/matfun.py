"""Functions of skew (normal) matrices via unitary diagonalization."""
import numpy as np

SERIES_RADIUS = 1e-6


def _eig_skew(a):
    # a = V diag(i w) Vᴴ with -i a Hermitian
    w, V = np.linalg.eigh(-1j * np.asarray(a))
    return w, V


def skew_function(a, f, series):
    """Apply scalar f to a skew (or anti-Hermitian) matrix.

    ``series`` evaluates f near 0, where f may have a removable singularity.
    The result is real when ``a`` is real.
    """
    a = np.asarray(a)
    w, V = _eig_skew(a)
    z = 1j * w
    vals = np.empty_like(z)
    small = np.abs(z) < SERIES_RADIUS
    vals[small] = series(z[small])
    vals[~small] = f(z[~small])
    out = (V * vals) @ V.conj().T
    return out.real if np.isrealobj(a) else out


def phi_exp(a):
    """(I - e^{-a}) / a, equal to I at a = 0."""
    return skew_function(a, lambda z: (1 - np.exp(-z)) / z, lambda z: 1 - z / 2 + z * z / 6)


def sinh_kernel(a):
    """(a - sinh a) / a², equal to 0 at a = 0."""
    return skew_function(a, lambda z: (z - np.sinh(z)) / (z * z), lambda z: -z / 6 - z ** 3 / 120)


def expm_skew(a):
    return skew_function(a, np.exp, np.exp)


def polar_sign(D, tol=1e-12):
    """i·sign(-iD) for skew-adjoint D; the complex structure D|D|⁻¹.

    Returns (J, smallest |eigenvalue|).
    """
    D = np.asarray(D)
    w, V = np.linalg.eigh(-1j * D)
    gap = float(np.min(np.abs(w))) if w.size else np.inf
    J = (V * (1j * np.sign(w))) @ V.conj().T
    if np.isrealobj(D):
        J = J.real
    return J, gap
