"""Command-line entry point: ``diracspin <group> <action> [options]``."""
import argparse
import sys
import time

import numpy as np

from . import dirac, fock, orthogonal, qham, spectral
from .errors import DiracError
from .instances import random_morphism, random_orthogonal, random_skew
from .jsonio import decode_matrix, dump_json, encode_matrix, load_json
from .linear_core import DEFAULT_TOL
from .suites import SUITES, run_suite


def _matrix(path):
    return decode_matrix(load_json(path))


def _structure(path, tol):
    data = load_json(path)
    if "E" in data:
        return dirac.DiracStructure.from_dict(data, tol)
    return orthogonal.lag_from_orth(decode_matrix(data), tol)


def _morphism(path):
    return dirac.DiracMorphism.from_dict(load_json(path))


def _structure_report(D):
    out = {"structure": D.to_dict(), "parity": dirac.parity(D)}
    try:
        out["A"] = encode_matrix(orthogonal.orth_from_lag(D).A)
    except DiracError:
        pass
    return out


def cmd_dirac(args):
    tol = args.tol
    if args.action == "forward":
        m, D = _morphism(args.morphism), _structure(args.structure, tol)
        img = dirac.forward_image(m, D)
        return {"strong": dirac.is_strong(m, D), **_structure_report(img)}
    if args.action == "kernel":
        K = dirac.kernel_of(_morphism(args.morphism), tol)
        return {"kernel": K.to_dict(), "dim": K.dim}
    if args.action == "strong":
        return {"strong": dirac.is_strong(_morphism(args.morphism), _structure(args.structure, tol))}
    if args.action == "parity":
        D = _structure(args.structure, tol)
        return {"parity": dirac.parity(D), "dim_E_cap_V": dirac.intersection_with_vectors(D).dim}
    if args.action == "path":
        m, D = _morphism(args.morphism), _structure(args.structure, tol)
        return _structure_report(dirac.standard_path(m, D, args.t))
    raise SystemExit(2)


def cmd_orth(args):
    tol = args.tol
    if args.action == "lag":
        return _structure_report(orthogonal.lag_from_orth(_matrix(args.A), tol))
    if args.action == "from-lag":
        D = _structure(args.structure, tol)
        A = orthogonal.orth_from_lag(D).A
        return {"A": encode_matrix(A), "det": float(np.linalg.det(A)), "parity": dirac.parity(D)}
    if args.action == "mult":
        A1, A2 = _matrix(args.A1), _matrix(args.A2)
        m = orthogonal.multiplicative_morphism(A1, A2)
        src = dirac.product(orthogonal.lag_from_orth(A1, tol), orthogonal.lag_from_orth(A2, tol))
        img = dirac.forward_image(m, src)
        from .linear_core import distance

        return {"morphism": m.to_dict(), "strong": dirac.is_strong(m, src),
                "gap": distance(img.E, orthogonal.lag_from_orth(A1 @ A2, tol).E)}
    if args.action == "exp":
        a = _matrix(args.a)
        m, A, strong = orthogonal.exp_lift(a, tol)
        wit = max((orthogonal.exp_witness(a, x) for x in np.eye(a.shape[0])), default=0.0)
        return {"morphism": m.to_dict(), "A": encode_matrix(A.A), "strong": strong, "witness_residual": wit}
    if args.action == "cayley":
        a = _matrix(args.a)
        _, A = orthogonal.cayley_morphism(a)
        return {"A": encode_matrix(A.A)}
    if args.action == "gauge":
        D = orthogonal.gauge_transform(orthogonal.lag_from_orth(_matrix(args.A), tol), _matrix(args.omega))
        return _structure_report(D)
    if args.action == "symplectic":
        R = _matrix(args.R)
        grid = np.linspace(0, 1, args.points) if args.t is None else [args.t]
        rows = []
        for t in grid:
            pt = orthogonal.symplectic_path(R, float(t))
            rows.append({"t": float(t), "margin": pt.margin, "min_singular": pt.min_singular,
                         "halfplane_ok": pt.halfplane_ok})
        return {"points": rows, "halfplane_ok": all(r["halfplane_ok"] for r in rows)}
    raise SystemExit(2)


def cmd_spectral(args):
    B = spectral.BoundaryOperator(_matrix(args.A), args.tol)
    if args.action == "analytic":
        modes = spectral.analytic_spectrum(B, args.kmin, args.kmax)
        return {"kernel_dim": spectral.kernel_dim(B),
                "modes": [{"eigenvalue": [m.eigenvalue.real, m.eigenvalue.imag], "lambda": m.lam,
                           "k": m.k, "r": m.r} for m in modes]}
    if args.action == "discretize":
        op = spectral.discretize(B, args.N)
        target, errs = spectral.match_modes(op, B, args.count)
        raw, phys = spectral.discrete_kernel(op)
        out = {"N": args.N, "analytic": target.tolist(), "relative_errors": errs.tolist(),
               "kernel_raw": raw, "kernel": phys, "kernel_dim": spectral.kernel_dim(B)}
        if args.report:
            dump_json(out, args.report)
        return out
    if args.action == "hs-test":
        B2 = spectral.BoundaryOperator(_matrix(args.Aprime), args.tol)
        rep = spectral.hs_divergence_diagnostic(B, B2, args.M)
        return {"M": rep.M_values.tolist(), "partial_sums": rep.partial_sums.tolist(), "slope": rep.slope,
                "coefficient": rep.coefficient, "first_term": rep.first_term, "verdict": rep.verdict}
    if args.action == "resolvent":
        lhs, rhs = spectral.resolvent_continuity(B, _matrix(args.a), args.N)
        return {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs}
    raise SystemExit(2)


def cmd_fock(args):
    if args.action == "car-check":
        ops = fock.wedge_operators(args.window)
        car, tau = fock.car_defect(ops), fock.tau_defect(ops)
        return {"window": args.window, "dim": ops.window.dim, "car_defect": car, "tau_defect": tau,
                "ok": car == 0 and tau == 0}
    if args.action == "weights":
        L = fock.so2_model(args.s, args.window)
        vals, counts = np.unique(L.weights, return_counts=True)
        return {"s": L.s, "crossings": L.crossings, "kernel_dim": L.kernel_dim,
                "vacuum_weight": L.vacuum_weight, "vacuum_parity": L.vacuum_parity,
                "polarization_match": L.polarization_match,
                "ladder": {str(int(v)): int(c) for v, c in zip(vals, counts)}}
    if args.action == "parity":
        J1 = fock.ComplexStructure.from_skew(_matrix(args.J1))
        J2 = fock.ComplexStructure.from_skew(_matrix(args.J2))
        return {"kernel_dim": fock.kernel_rank(J1, J2), "parity": fock.ss_parity(J1, J2)}
    raise SystemExit(2)


def _qham_point(path):
    data = load_json(path)
    if "instance" in data:
        data = data["instance"]
    return qham.context(data.get("group", "SU2")), qham.PointedQHam.from_dict(data), data


def cmd_qham(args):
    if args.action == "verify":
        ctx, p, _ = _qham_point(args.instance)
        return qham.verify_qham(ctx, p, args.tol).to_dict()
    if args.action == "fuse":
        ctx, p1, _ = _qham_point(args.a)
        _, p2, _ = _qham_point(args.b)
        f = qham.fusion(ctx, p1, p2)
        return {"instance": f.to_dict(ctx.tag), "report": qham.verify_qham(ctx, f, args.tol).to_dict()}
    if args.action == "reduce":
        data = load_json(args.instance)
        _, p, _ = _qham_point(args.instance)
        res = qham.reduction_normal_form(p, tol=args.tol)
        out = {"omega_red": encode_matrix(res.omega_red) if res.omega_red.size else [],
               "isotropy_residual": res.isotropy_residual, "block_residual": res.block_residual,
               "phi_correction": res.phi_correction}
        if "ground_truth" in data:
            gt = data["ground_truth"]
            truth = {"k": gt["k"], "P": decode_matrix(gt["P"]),
                     "omega_red": decode_matrix(gt["omega_red"]) if gt["k"] else np.zeros((0, 0))}
            out["recovery_residual"] = qham.recovery_residual(res, truth)
        return out
    raise SystemExit(2)


def cmd_gen(args):
    rng = np.random.default_rng(args.seed)
    if args.kind == "orthogonal":
        return {"A": encode_matrix(random_orthogonal(rng, args.n))}
    if args.kind == "skew":
        return {"a": encode_matrix(random_skew(rng, args.n))}
    if args.kind == "dirac-morphism":
        return random_morphism(rng, args.n, args.m or args.n).to_dict()
    if args.kind == "qham-conjugacy":
        ctx = qham.context(args.group)
        if args.theta is not None:
            xi = np.zeros(ctx.n)
            xi[-1] = args.theta * (2 if ctx.tag == "SU2" else 1)
        else:
            xi = rng.standard_normal(ctx.n)
        p = qham.conjugacy_class_data(ctx, ctx.exp(xi), args.tol)
        return p.to_dict(ctx.tag)
    if args.kind == "qham-reduction":
        n = args.n
        m = args.m if args.m is not None else 2 * n + 2
        if m < 2 * n or (m - 2 * n) % 2:
            raise SystemExit("m must be at least 2n with m - 2n even")
        p, truth = qham.synthetic_reduction_instance(rng, (m - 2 * n) // 2, n)
        return {"instance": p.to_dict(), "ground_truth": {
            "k": truth["k"], "P": encode_matrix(truth["P"]),
            "omega_red": encode_matrix(truth["omega_red"]) if truth["k"] else []}}
    raise SystemExit(2)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the JSON report here ('-' for stdout)")
    common.add_argument("--json", action="store_true", help="print the JSON report")

    p = argparse.ArgumentParser(prog="diracspin", parents=[common],
                                description="Dirac structures, boundary spectra, spinor modules and q-Hamiltonian checks")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dirac", parents=[common])
    d.add_argument("action", choices=["forward", "kernel", "strong", "parity", "path"])
    d.add_argument("--morphism")
    d.add_argument("--structure")
    d.add_argument("--t", type=float, default=0.5)

    o = sub.add_parser("orth", parents=[common])
    o.add_argument("action", choices=["lag", "from-lag", "mult", "exp", "cayley", "gauge", "symplectic"])
    for name in ("--A", "--A1", "--A2", "--a", "--omega", "--R", "--structure"):
        o.add_argument(name)
    o.add_argument("--t", type=float, default=None)
    o.add_argument("--points", type=int, default=50)

    s = sub.add_parser("spectral", parents=[common])
    s.add_argument("action", choices=["analytic", "discretize", "hs-test", "resolvent"])
    s.add_argument("--A", required=True)
    s.add_argument("--Aprime")
    s.add_argument("--a")
    s.add_argument("--kmin", type=int, default=-5)
    s.add_argument("--kmax", type=int, default=5)
    s.add_argument("--N", type=int, default=512)
    s.add_argument("--M", type=int, default=100000)
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--report")

    f = sub.add_parser("fock", parents=[common])
    f.add_argument("action", choices=["car-check", "weights", "parity"])
    f.add_argument("--window", type=int, default=6)
    f.add_argument("--s", type=float, default=0.0)
    f.add_argument("--J1")
    f.add_argument("--J2")

    q = sub.add_parser("qham", parents=[common])
    q.add_argument("action", choices=["verify", "fuse", "reduce"])
    q.add_argument("--instance")
    q.add_argument("--a")
    q.add_argument("--b")

    su = sub.add_parser("suite", parents=[common])
    su.add_argument("name", choices=SUITES)
    su.add_argument("--N", type=int, default=2000)
    su.add_argument("--window", type=int, default=6)

    g = sub.add_parser("gen", parents=[common])
    g.add_argument("kind", choices=["orthogonal", "skew", "dirac-morphism", "qham-conjugacy", "qham-reduction"])
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--group", default="SU2")
    g.add_argument("--theta", type=float, default=None)
    return p


HANDLERS = {"dirac": cmd_dirac, "orth": cmd_orth, "spectral": cmd_spectral,
            "fock": cmd_fock, "qham": cmd_qham, "gen": cmd_gen}


def main(argv=None):
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        if args.command == "suite":
            report = run_suite(args.name, args.seed, N=args.N, window=args.window)
            payload, ok = report.to_dict(), report.ok
        else:
            body = HANDLERS[args.command](args)
            payload = {"command": " ".join(sys.argv[1:] if argv is None else argv), "seed": args.seed,
                       "result": body, "wall_time": time.perf_counter() - start}
            ok = bool(body.get("ok", body.get("passed", True)))
            if args.command == "gen":
                payload = body
    except (DiracError, OSError, KeyError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        dump_json(payload, args.out)
    if args.json or not args.out:
        if args.json or args.command == "gen":
            print(dump_json(payload))
        else:
            _summary(payload)
    return 0 if ok else 1


def _summary(payload):
    if "records" in payload:
        for r in payload["records"]:
            print(f"[{r['status'].upper()}] {r['name']}: residual {r['residual']:.3e} (tol {r['tolerance']:.1e})")
        print(f"{'ok' if payload['ok'] else 'FAILED'} in {payload['wall_time']:.1f} s")
    else:
        print(dump_json(payload.get("result", payload)))


if __name__ == "__main__":
    sys.exit(main())
