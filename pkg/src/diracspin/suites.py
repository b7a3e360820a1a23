"""Seeded property suites behind ``diracspin suite``."""
from dataclasses import asdict, dataclass, field

import numpy as np

from . import dirac, fock, orthogonal, qham, spectral
from .instances import (
    orthogonal_with_eigen,
    random_orthogonal,
    random_skew,
    random_strong_pair,
    random_structure,
    random_unitary,
)
from .linear_core import distance, intersect


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    status: str = ""

    def __post_init__(self):
        self.residual = float(self.residual)
        self.tolerance = float(self.tolerance)
        self.status = "pass" if self.residual <= self.tolerance else "fail"


@dataclass
class RunReport:
    command: str
    seed: int
    records: list
    wall_time: float = 0.0
    tables: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(r.status == "pass" for r in self.records)

    def to_dict(self):
        return {"command": self.command, "seed": self.seed, "ok": self.ok,
                "records": [asdict(r) for r in self.records],
                "tables": self.tables, "wall_time": self.wall_time}


def _flag(ok):
    return 0.0 if ok else 1.0


def dirac_suite(rng, n_max=6, trials=60):
    out = []
    iso, dim_bad, parity_bad, func_gap = 0.0, 0, 0, 0.0
    for _ in range(trials):
        n, k = int(rng.integers(1, n_max + 1)), int(rng.integers(1, n_max + 1))
        m, D = random_strong_pair(rng, n, k)
        img = dirac.forward_image(m, D)
        iso = max(iso, np.linalg.norm(img.E.frame.T @ img.pairing.gram @ img.E.frame))
        dim_bad += img.E.dim != k
        parity_bad += dirac.parity(img) != dirac.parity(D)
        m2, _ = random_strong_pair(rng, k, int(rng.integers(1, n_max + 1)))
        comp = dirac.compose(m2, m)
        if dirac.is_strong(m2, img) and dirac.is_strong(comp, D):
            func_gap = max(func_gap, distance(dirac.forward_image(comp, D).E, dirac.forward_image(m2, img).E))
        dim_bad += dirac.kernel_of(m).dim != m.theta.shape[1] - np.linalg.matrix_rank(m.theta)
    out.append(Check("forward image isotropic", iso, 1e-8))
    out.append(Check("dimension counts", dim_bad, 0))
    out.append(Check("parity invariance", parity_bad, 0))
    out.append(Check("functoriality gap", func_gap, 1e-8))
    return out


def orth_suite(rng, n_max=6, trials=50):
    out = []
    rt, inter_bad, par_bad, mult_gap, strong_bad, assoc, cay = 0.0, 0, 0, 0.0, 0, 0.0, 0.0
    for _ in range(trials):
        n = int(rng.integers(2, n_max + 1))
        A = random_orthogonal(rng, n)
        rt = max(rt, np.linalg.norm(A - orthogonal.orth_from_lag(orthogonal.lag_from_orth(A)).A))
        minus = int(rng.integers(0, n + 1))
        A1 = orthogonal_with_eigen(rng, n, minus, (n - minus) % 2)
        shared = int(rng.integers(0, n + 1))
        Q = random_orthogonal(rng, n)
        # A2 = A1 R with R fixing a random subspace of dimension `shared`
        R = np.eye(n)
        if shared < n:
            R[shared:, shared:] = random_orthogonal(rng, n - shared)
        A2 = A1 @ Q @ R @ Q.T
        s = np.linalg.svd(A1 - A2, compute_uv=False)
        expected = int(np.sum(s <= 1e-9))
        got = intersect(orthogonal.lag_from_orth(A1).E, orthogonal.lag_from_orth(A2).E).dim
        inter_bad += got != expected
        par_bad += (dirac.parity(orthogonal.lag_from_orth(A1)) == "even") != (np.linalg.det(A1) > 0)
        B1, B2 = random_orthogonal(rng, n), random_orthogonal(rng, n)
        m = orthogonal.multiplicative_morphism(B1, B2)
        src = dirac.product(orthogonal.lag_from_orth(B1), orthogonal.lag_from_orth(B2))
        mult_gap = max(mult_gap, distance(dirac.forward_image(m, src).E, orthogonal.lag_from_orth(B1 @ B2).E))
        strong_bad += not dirac.is_strong(m, src)
        assoc = max(assoc, orthogonal.associativity_check(B1, B2, random_orthogonal(rng, n)))
        a = random_skew(rng, n)
        cay = max(cay, np.linalg.norm(orthogonal.orth_from_lag(orthogonal.graph_structure(a)).A - orthogonal.cayley(a)))
    out += [Check("round trip", rt, 1e-9), Check("intersection law", inter_bad, 0),
            Check("parity law", par_bad, 0), Check("multiplicativity gap", mult_gap, 1e-8),
            Check("multiplicative morphism strong", strong_bad, 0),
            Check("associativity", assoc, 1e-10), Check("Cayley graph", cay, 1e-9)]
    return out


def spectral_suite(rng, N=2000, trials=20):
    out, tables = [], {}
    B = spectral.BoundaryOperator(orthogonal_with_eigen(rng, 2, 0, 0))
    rows = []
    prev = None
    for n_grid in (250, 500, 1000, N):
        _, errs = spectral.match_modes(spectral.discretize(B, n_grid), B, 10)
        rows.append({"N": n_grid, "max_rel_error": float(errs.max()),
                     "ratio": None if prev is None else float(prev / errs.max())})
        prev = errs.max()
    tables["convergence"] = rows
    out.append(Check("relative error at largest N", rows[-1]["max_rel_error"], 1e-3))
    out.append(Check("second-order ratio shortfall", max(0.0, 3.5 - rows[-1]["ratio"]), 0))
    kern_bad = 0
    for _ in range(5):
        minus = int(rng.integers(0, 3))
        Bk = spectral.BoundaryOperator(orthogonal_with_eigen(rng, 2, minus, (2 - minus) % 2))
        _, phys = spectral.discrete_kernel(spectral.discretize(Bk, 64))
        kern_bad += phys != spectral.kernel_dim(Bk)
    out.append(Check("kernel law", kern_bad, 0))
    h_bad = 0
    for _ in range(5):
        A = random_unitary(rng, 2)
        h_bad += spectral.hs_divergence_diagnostic(spectral.BoundaryOperator(A), spectral.BoundaryOperator(A), 10**4).verdict != "bounded"
        Ap = A @ spectral.BoundaryOperator(orthogonal_with_eigen(rng, 2, 0, 0)).A
        h_bad += spectral.hs_divergence_diagnostic(spectral.BoundaryOperator(A), spectral.BoundaryOperator(Ap), 10**4).verdict != "divergent"
    out.append(Check("HS dichotomy", h_bad, 0))
    worst = 0.0
    for _ in range(trials):
        d = int(rng.integers(2, 21))
        D, Q = _gapped_pair(rng, d)
        lhs, rhs = spectral.finite_hs_bound(D, Q)
        worst = max(worst, lhs - rhs)
    out.append(Check("finite HS bound excess", max(worst, 0.0), 0))
    worst = 0.0
    for _ in range(10):
        A = random_orthogonal(rng, 2)
        lhs, rhs = spectral.resolvent_continuity(spectral.BoundaryOperator(A), random_skew(rng, 2, 0.5), 512)
        worst = max(worst, lhs - rhs)
    out.append(Check("resolvent bound excess", max(worst, 0.0), 0))
    return out, tables


def _gapped_pair(rng, d, gap=0.1):
    """Anti-Hermitian D and Q with both spectra at distance ≥ gap from 0."""
    while True:
        U = random_unitary(rng, d)
        w = rng.choice([-1, 1], d) * rng.uniform(2 * gap, 3.0, d)
        D = U @ np.diag(1j * w) @ U.conj().T
        Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        Q = 0.5 * (Z - Z.conj().T) * rng.uniform(0.01, 0.3)
        if np.min(np.abs(np.linalg.eigvalsh(-1j * (D + Q)))) >= gap:
            return D, Q


def fock_suite(rng, window=6, trials=1000):
    out = []
    ops = fock.wedge_operators(window)
    car = fock.car_defect(ops)
    out.append(Check("CAR relations", car, 0))
    bad = 0
    for _ in range(trials):
        K = _random_state(rng)
        bad += fock.weight(fock.shift(K)) != fock.weight(K) + 1
    out.append(Check("weight of shift", bad, 0))
    err = fock.tau_defect(ops)
    out.append(Check("tau conjugation", err, 0))
    s0, s1 = fock.so2_model(0.0, window), fock.so2_model(1.0, window)
    out.append(Check("ladder shift at s = 1", _flag(np.array_equal(s1.weights, s0.weights + 1)), 0))
    odd = 0
    for _ in range(50):
        d = 2 * int(rng.integers(1, 5))
        J1 = fock.ComplexStructure.from_skew(random_skew(rng, d))
        J2 = fock.ComplexStructure.from_skew(random_skew(rng, d))
        odd += fock.kernel_rank(J1, J2) % 2
    out.append(Check("even kernel of J1 + J2", odd, 0))
    return out


def _random_state(rng):
    added = rng.choice(np.arange(1, 20), int(rng.integers(0, 6)), replace=False)
    removed = rng.choice(np.arange(-19, 1), int(rng.integers(0, 6)), replace=False)
    return fock.WedgeState(tuple(added), tuple(removed))


def qham_suite(rng, trials=100):
    out = []
    worst, failed, parity_bad = 0.0, 0, 0
    points = {}
    for ctx in (qham.su2(), qham.so3()):
        pts = []
        for _ in range(10):
            g = ctx.exp(rng.standard_normal(3))
            p = qham.conjugacy_class_data(ctx, g)
            rep = qham.verify_qham(ctx, p)
            worst = max(worst, *rep.residuals.values())
            failed += not rep.passed
            parity_bad += not rep.parity_ok
            pts.append(p)
        points[ctx.tag] = pts
        fused = qham.fusion(ctx, pts[0], pts[1])
        rep = qham.verify_qham(ctx, fused)
        failed += not rep.passed
        worst = max(worst, *rep.residuals.values())
        p0 = qham.coadjoint_orbit_data(ctx, 0.5 * rng.standard_normal(3))
        rep = qham.verify_qham(ctx, qham.exponential_point(ctx, p0))
        failed += not rep.passed
    out += [Check("conjugacy, fusion, exponential residuals", worst, 1e-9),
            Check("verification failures", failed, 0), Check("parity law", parity_bad, 0)]
    iso, rec = 0.0, 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 4))
        k = int(rng.integers(0, (12 - 2 * n) // 2 + 1))
        p, truth = qham.synthetic_reduction_instance(rng, k, n)
        res = qham.reduction_normal_form(p)
        iso = max(iso, res.isotropy_residual)
        rec = max(rec, res.block_residual, qham.recovery_residual(res, truth))
    out += [Check("F' isotropy", iso, 1e-10), Check("reduction recovery", rec, 1e-9)]
    return out


SUITES = ("dirac", "orth", "spectral", "fock", "qham", "all")


def run_suite(name, seed=0, N=2000, window=6):
    import time

    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    records, tables = [], {}
    names = SUITES[:-1] if name == "all" else (name,)
    for part in names:
        if part == "dirac":
            recs = dirac_suite(rng)
        elif part == "orth":
            recs = orth_suite(rng)
        elif part == "spectral":
            recs, tab = spectral_suite(rng, N=N)
            tables.update(tab)
        elif part == "fock":
            recs = fock_suite(rng, window=window)
        else:
            recs = qham_suite(rng)
        for r in recs:
            r.name = f"{part}: {r.name}"
        records += recs
    report = RunReport(f"suite {name}", seed, records, tables=tables)
    report.wall_time = time.perf_counter() - start
    return report
