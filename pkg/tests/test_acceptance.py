"""Acceptance criteria, each at its stated tolerance and instance count.

Every test records a short summary through the ``criterion`` fixture; the
conftest prints one PASS/FAIL line per criterion at the end of the run.
"""
import time

import numpy as np
import pytest

from diracspin import dirac, fock, orthogonal, qham, spectral
from diracspin.instances import (
    orthogonal_with_eigen,
    random_orthogonal,
    random_skew,
    random_strong_pair,
    random_unitary,
)
from diracspin.linear_core import distance, intersect


def _planar(theta):
    return np.array([[0.0, -theta], [theta, 0.0]])


@pytest.mark.criterion("AC1 orthogonal dictionary")
def test_ac01_orthogonal_dictionary(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for i in range(100):
        n = 2 + i % 5
        A = random_orthogonal(rng, n)
        worst = max(worst, np.linalg.norm(orthogonal.orth_from_lag(orthogonal.lag_from_orth(A)).A - A))
    exact = True
    for n in range(1, 7):
        E_I, E_minus = orthogonal.lag_from_orth(np.eye(n)), orthogonal.lag_from_orth(-np.eye(n))
        exact &= intersect(E_I.E, dirac.covectors(n).E).dim == n
        exact &= intersect(E_minus.E, dirac.vectors(n).E).dim == n
    law_bad = 0
    for i in range(60):
        n = 2 + i % 5
        shared = int(rng.integers(0, n + 1))
        A1 = random_orthogonal(rng, n)
        Q = random_orthogonal(rng, n)
        R = np.eye(n)
        if shared < n:
            R[shared:, shared:] = orthogonal_with_eigen(rng, n - shared, (n - shared) % 2, 0)
        A2 = A1 @ Q @ R @ Q.T
        got = intersect(orthogonal.lag_from_orth(A1).E, orthogonal.lag_from_orth(A2).E).dim
        law_bad += got != shared
    elapsed = time.perf_counter() - start
    criterion.note(f"round trip {worst:.1e}, intersection-law failures {law_bad}, {elapsed:.2f} s")
    assert worst <= 1e-9
    assert exact
    assert law_bad == 0
    assert elapsed < 5.0


@pytest.mark.criterion("AC2 parity invariance")
def test_ac02_parity_invariance(criterion):
    rng = np.random.default_rng(202)
    changed, seen = 0, set()
    for i in range(200):
        n, k = 1 + i % 8, 1 + (i // 8) % 8
        m, D = random_strong_pair(rng, n, k)
        before, after = dirac.parity(D), dirac.parity(dirac.forward_image(m, D))
        seen.add(before)
        changed += before != after
    criterion.note(f"{changed} parity changes in 200 morphisms")
    assert changed == 0
    assert seen == {"even", "odd"}


@pytest.mark.criterion("AC3 multiplicativity")
def test_ac03_multiplicativity(criterion):
    rng = np.random.default_rng(303)
    gap, weak = 0.0, 0
    for i in range(100):
        n = 2 + i % 4
        A1, A2 = random_orthogonal(rng, n), random_orthogonal(rng, n)
        m = orthogonal.multiplicative_morphism(A1, A2)
        src = dirac.product(orthogonal.lag_from_orth(A1), orthogonal.lag_from_orth(A2))
        weak += not dirac.is_strong(m, src)
        gap = max(gap, distance(dirac.forward_image(m, src).E, orthogonal.lag_from_orth(A1 @ A2).E))
    assoc = 0.0
    for i in range(50):
        n = 2 + i % 4
        assoc = max(assoc, orthogonal.associativity_check(*(random_orthogonal(rng, n) for _ in range(3))))
    criterion.note(f"gap {gap:.1e}, non-strong {weak}, associativity {assoc:.1e}")
    assert gap <= 1e-8 and weak == 0 and assoc <= 1e-10


@pytest.mark.criterion("AC4 exponential lift")
def test_ac04_exponential_lift(criterion):
    step = 1e-3
    grid = np.arange(step, 3 * np.pi, step)
    mismatch = 0
    verdicts = []
    for theta in grid:
        strong = orthogonal.exp_lift(_planar(theta))[2]
        # Π = (I - e^{-a})/a has singular values 2|sin(θ/2)|/θ
        mismatch += strong != (2 * abs(np.sin(theta / 2)) / theta > 1e-9)
        verdicts.append(strong)
    sig = np.array([np.linalg.svd(orthogonal.exp_lift(_planar(t))[0].theta, compute_uv=False)[-1] for t in grid])
    flip = grid[np.argmin(sig)]
    at_flip = orthogonal.exp_lift(_planar(2 * np.pi))[2]
    rng = np.random.default_rng(404)
    wit = 0.0
    for _ in range(30):
        n = int(rng.integers(1, 7))
        a = random_skew(rng, n, rng.uniform(0.1, 3.0))
        wit = max(wit, max(orthogonal.exp_witness(a, xi) for xi in np.eye(n)))
    criterion.note(f"verdict mismatches {mismatch}, flip at {flip:.4f}, witness {wit:.1e}")
    assert mismatch == 0
    assert abs(flip - 2 * np.pi) <= step
    assert not at_flip and all(verdicts[: int(6.0 / step)])
    assert wit <= 1e-10


@pytest.mark.criterion("AC5 boundary spectra")
def test_ac05_boundary_spectra(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(505)
    cases = [
        np.array([[np.exp(0.9j)]]),
        orthogonal_with_eigen(rng, 2),
        random_unitary(rng, 2),
    ]
    worst, ratio = 0.0, np.inf
    for A in cases:
        B = spectral.BoundaryOperator(A)
        _, e1 = spectral.match_modes(spectral.discretize(B, 1000), B, 10)
        _, e2 = spectral.match_modes(spectral.discretize(B, 2000), B, 10)
        worst = max(worst, e2.max())
        ratio = min(ratio, e1.max() / e2.max())
    elapsed = time.perf_counter() - start
    criterion.note(f"max rel error {worst:.1e}, min ratio {ratio:.2f}, {elapsed:.1f} s")
    assert worst <= 1e-3 and ratio >= 3.5 and elapsed < 60.0


@pytest.mark.criterion("AC6 HS dichotomy")
def test_ac06_hs_dichotomy(criterion):
    B1, B2 = spectral.BoundaryOperator(np.eye(1)), spectral.BoundaryOperator(-np.eye(1))
    Ms = [10**3, 10**4, 10**5]
    rep = spectral.hs_divergence_diagnostic(B1, B2, M_values=Ms)
    # each term is |(e^{iπ} - 1) / (2πi(p - ½))|², so the log-coefficient is 4/(4π²)
    oracle = 1 / np.pi**2
    slope = np.polyfit(np.log(Ms), rep.partial_sums, 1)[0]
    same = spectral.hs_divergence_diagnostic(B1, B1, M_values=Ms)
    criterion.note(f"slope {slope:.6f} vs {oracle:.6f}, equal-case sums {same.partial_sums.max():.1e}")
    assert np.all(np.diff(rep.partial_sums) > 0)
    assert abs(slope - oracle) <= 0.25 * oracle
    assert np.all(same.partial_sums == 0.0)


def _gapped_pair(rng, d, gap):
    while True:
        U = random_unitary(rng, d)
        w = rng.choice([-1, 1], d) * rng.uniform(gap, 3.0, d)
        D = U @ np.diag(1j * w) @ U.conj().T
        Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        Q = 0.5 * (Z - Z.conj().T) * rng.uniform(0.01, 0.3)
        if min(np.abs(np.linalg.eigvalsh(-1j * D)).min(), np.abs(np.linalg.eigvalsh(-1j * (D + Q))).min()) >= gap:
            return D, Q


@pytest.mark.criterion("AC7 finite HS bound")
def test_ac07_finite_hs_bound(criterion):
    rng = np.random.default_rng(707)
    violations, worst = 0, 0.0
    for _ in range(200):
        D, Q = _gapped_pair(rng, int(rng.integers(1, 21)), 0.1)
        lhs, rhs = spectral.finite_hs_bound(D, Q)
        violations += lhs > rhs
        worst = max(worst, lhs / rhs)
    criterion.note(f"{violations} violations, worst ratio {worst:.3f}")
    assert violations == 0


@pytest.mark.criterion("AC8 resolvent bound")
def test_ac08_resolvent_bound(criterion):
    rng = np.random.default_rng(808)
    violations, worst = 0, 0.0
    for i in range(50):
        n = 1 + i % 2
        A = random_orthogonal(rng, n) if i % 4 < 2 else random_unitary(rng, n)
        a = random_skew(rng, n, rng.uniform(0.05, 1.0)) if n > 1 else np.array([[1j * rng.uniform(-1, 1)]])
        lhs, rhs = spectral.resolvent_continuity(spectral.BoundaryOperator(A), a, N=512)
        violations += lhs > rhs
        worst = max(worst, lhs / rhs)
    criterion.note(f"{violations} violations, worst ratio {worst:.3f}")
    assert violations == 0


@pytest.mark.criterion("AC9 Fock and wedge")
def test_ac09_fock_wedge(criterion):
    ops = fock.wedge_operators(6)
    car, tau = fock.car_defect(ops), fock.tau_defect(ops)
    rng = np.random.default_rng(909)
    bad = 0
    for _ in range(1000):
        added = rng.choice(np.arange(1, 30), int(rng.integers(0, 8)), replace=False)
        removed = rng.choice(np.arange(-29, 1), int(rng.integers(0, 8)), replace=False)
        K = fock.WedgeState(tuple(added), tuple(removed))
        bad += fock.weight(fock.shift(K)) != fock.weight(K) + 1
    s0, s1 = fock.so2_model(0.0, 6), fock.so2_model(1.0, 6)
    ladder = np.array_equal(s1.weights, s0.weights + 1)
    criterion.note(f"CAR defect {car}, tau defect {tau}, weight failures {bad}, ladder shift {ladder}")
    assert car == 0 and tau == 0 and bad == 0 and ladder


@pytest.mark.criterion("AC10 q-Hamiltonian suite")
def test_ac10_qhamiltonian(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(1010)
    worst, failed, parity_bad, verified = 0.0, 0, 0, 0
    for ctx in (qham.su2(), qham.so3()):
        points = []
        for _ in range(20):
            p = qham.conjugacy_class_data(ctx, ctx.exp(rng.standard_normal(3)))
            points.append(p)
        for i in range(0, len(points) - 1, 2):
            points.append(qham.fusion(ctx, points[i], points[i + 1]))
        for p in points:
            rep = qham.verify_qham(ctx, p)
            worst = max(worst, *rep.residuals.values())
            failed += not rep.passed
            parity_bad += (-1) ** p.T_dim != round(np.linalg.det(qham.adjoint(ctx, p.g)))
            verified += 1
    recovery = 0.0
    for i in range(100):
        n = 1 + i % 3
        k = int(rng.integers(0, (12 - 2 * n) // 2 + 1))
        point, truth = qham.synthetic_reduction_instance(rng, k, n)
        assert point.T_dim <= 12
        recovery = max(recovery, qham.recovery_residual(qham.reduction_normal_form(point), truth))
    elapsed = time.perf_counter() - start
    criterion.note(f"{verified} points, worst residual {worst:.1e}, recovery {recovery:.1e}, {elapsed:.1f} s")
    assert failed == 0 and worst <= 1e-9 and parity_bad == 0
    assert recovery <= 1e-9
    assert elapsed < 30.0


@pytest.mark.criterion("AC11 symplectic path")
def test_ac11_symplectic_path(criterion):
    rng = np.random.default_rng(1111)
    margin, smin = np.inf, np.inf
    for i in range(20):
        n = 4 if i % 2 == 0 else 6
        R = random_skew(rng, n)
        while np.linalg.svd(R, compute_uv=False)[-1] < 1e-2:
            R = random_skew(rng, n)
        for t in np.linspace(0.0, 1.0, 50):
            pt = orthogonal.symplectic_path(R, t)
            margin = min(margin, pt.margin)
            smin = min(smin, pt.min_singular)
    criterion.note(f"min margin {margin:.2e}, min singular value {smin:.2e}")
    assert margin >= -1e-10 and smin >= 1e-6
