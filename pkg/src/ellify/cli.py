"""Command-line front end: ``ellify params|construct|verify|solve|recover|demo``."""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import golden
from .constructors import (BlockKroneckerPolynomial, StrongBlockMinimalBasesPolynomial,
                           block_kronecker_companion, default_split, frobenius_companion,
                           frobenius_like_ellification,
                           symmetric_companion_quadratification)
from .minbases import EmbeddingPair, enumerate_parameters, kronecker_embedding
from .polycore import MatrixPolynomial, dumps, evaluate, loads, random_polynomial, read_mp
from .recovery import (RecoveryContext, extract_minimal_basis_kronecker,
                       lift_right_null_vector, minimal_indices_of,
                       recover_eigenvector, recover_minimal_basis_general,
                       shift_minimal_indices)
from .verify import (SingularPolynomialError, is_regular, polynomial_eigenvalues,
                     verify_ellification)

SIDECAR_VERSION = 1
KRONECKER_FORMS = ("kronecker", "frobenius", "frobenius-like", "symmetric")


class CliError(Exception):
    """Usage or input problem reported with exit code 2."""


# sidecar -------------------------------------------------------------------

def sidecar_for(lif, form, d):
    """JSON-ready description of an l-ification."""
    data = {"format": "ellify-sidecar", "version": SIDECAR_VERSION, "form": form,
            "ell": lif.ell, "m": lif.m, "n": lif.n, "d": d,
            "m1": lif.m1, "m2": lif.m2}
    if isinstance(lif, BlockKroneckerPolynomial):
        eps, eta = lif.epsilon, lif.eta
        data.update(epsilon=eps, eta=eta,
                    partition={"row_blocks": [lif.m] * (eta + 1) + [lif.n] * eps,
                               "col_blocks": [lif.n] * (eps + 1) + [lif.m] * eta},
                    shifts={"right": eps * lif.ell, "left": eta * lif.ell})
    else:
        data.update(epsilon=None, eta=None,
                    partition={"row_blocks": [lif.m + lif.m2, lif.m1],
                               "col_blocks": [lif.n + lif.m1, lif.m2]},
                    shifts={"right": lif.deg_N1, "left": lif.deg_N2})
        wings = {}
        for side, E, K in ((1, lif.embedding1, lif.K1), (2, lif.embedding2, lif.K2)):
            if K is None:
                continue
            if E is None:
                raise CliError("custom sidecar needs embeddings for every wing")
            wings[str(side)] = {"N": dumps(E.N), "K_hat": dumps(E.K_hat),
                                "N_hat": dumps(E.N_hat)}
        data["wings"] = wings
    return data


def load_sidecar(path):
    with open(path) as fh:
        data = json.load(fh)
    if data.get("format") != "ellify-sidecar":
        raise CliError(f"{path} is not an ellify sidecar")
    if data.get("version") != SIDECAR_VERSION:
        raise CliError(f"unsupported sidecar version {data.get('version')!r}")
    return data


def lification_from_files(L, side):
    """Rebuild the structured object from the assembled matrix and its sidecar.

    Wing blocks are taken from ``L`` itself so that a corrupted file fails
    verification instead of being silently replaced.
    """
    ell, m, n = side["ell"], side["m"], side["n"]
    if L.grade != ell:
        raise CliError(f"l-ification has grade {L.grade}, sidecar says {ell}")
    if side["form"] in KRONECKER_FORMS:
        eps, eta = side["epsilon"], side["eta"]
        E1 = kronecker_embedding(eps, ell, n, L.field)
        E2 = kronecker_embedding(eta, ell, m, L.field)
        mr, mc = (eta + 1) * m, (eps + 1) * n
        m1, m2, w1, w2 = eps * n, eta * m, E1, E2
        N1, N2 = E1.N, E2.N
    elif side["form"] == "custom-sbmb":
        m1, m2 = side["m1"], side["m2"]
        mr, mc = m + m2, n + m1
        w1 = _wing_from_sidecar(side, "1")
        w2 = _wing_from_sidecar(side, "2")
        N1 = w1.N if w1 else MatrixPolynomial.identity(n, L.field)
        N2 = w2.N if w2 else MatrixPolynomial.identity(m, L.field)
    else:
        raise CliError(f"unknown form {side['form']!r}")
    if L.shape != (mr + m1, mc + m2):
        raise CliError(f"l-ification is {L.shape}, sidecar implies {(mr + m1, mc + m2)}")
    M = L.block(0, mr, 0, mc)
    K1 = L.block(mr, mr + m1, 0, mc) if m1 else None
    K2 = L.block(0, mr, mc, mc + m2).T if m2 else None
    E1 = EmbeddingPair(K1, w1.K_hat, w1.N, w1.N_hat) if (K1 is not None and w1) else None
    E2 = EmbeddingPair(K2, w2.K_hat, w2.N, w2.N_hat) if (K2 is not None and w2) else None
    return StrongBlockMinimalBasesPolynomial(M, K1, K2, N1, N2, E1, E2)


def _wing_from_sidecar(side, key):
    w = side.get("wings", {}).get(key)
    if w is None:
        return None
    N = loads(w["N"])
    return EmbeddingPair(K=None, K_hat=loads(w["K_hat"]), N=N, N_hat=loads(w["N_hat"]))


def verify_assembled(L, side, P, **kwargs):
    """Verify an assembled matrix against ``P`` using the sidecar partition.

    Besides the structural checks this confirms that ``L`` has nothing
    outside the ``M`` and wing blocks.
    """
    lif = lification_from_files(L, side)
    report = verify_ellification(lif, P, **kwargs)
    if lif.L != L:
        report.checks = [c for c in report.checks if c[0] != "shape"]
        report.checks.insert(0, ("shape", False,
                                 "entries outside the M and wing blocks are not zero"))
    return report


def context_from_sidecar(side, lif=None):
    if side["form"] in KRONECKER_FORMS:
        return RecoveryContext.kronecker(side["epsilon"], side["eta"], side["ell"],
                                         side["m"], side["n"])
    return RecoveryContext("general-sbmb", side["ell"], side["m"], side["n"],
                           side["shifts"]["right"], side["shifts"]["left"],
                           embedding1=None if lif is None else lif.embedding1,
                           embedding2=None if lif is None else lif.embedding2,
                           m1=side["m1"], m2=side["m2"])


# commands --------------------------------------------------------------------

def cmd_params(args, out):
    rows = enumerate_parameters(args.m, args.n, args.d, args.ell)
    out.write("m1\tm2\tepsilon\teta\n")
    for p in rows:
        out.write(f"{p.m1}\t{p.m2}\t{p.epsilon}\t{p.eta}\n")
    return 0


def build_form(P, form, ell=None, epsilon=None, eta=None, side="first"):
    d = P.grade
    if form == "kronecker":
        if ell is None:
            raise CliError("--ell is required for the kronecker form")
        if d % ell:
            raise CliError(f"--ell {ell} does not divide the grade {d}; only ell | d "
                           "companion forms are built")
        k = d // ell
        if epsilon is None and eta is None:
            epsilon, eta = default_split(k)
        elif epsilon is None:
            epsilon = k - 1 - eta
        elif eta is None:
            eta = k - 1 - epsilon
        if epsilon < 0 or eta < 0 or epsilon + eta != k - 1:
            raise CliError(f"need epsilon + eta = {k - 1}")
        return block_kronecker_companion(P, epsilon, eta, ell)
    if form == "frobenius":
        if ell not in (None, 1):
            raise CliError("the Frobenius forms are pencils (ell = 1)")
        return frobenius_companion(P, side)
    if form == "frobenius-like":
        if ell is None:
            raise CliError("--ell is required for the frobenius-like form")
        return frobenius_like_ellification(P, ell, side)
    if form == "symmetric":
        if ell not in (None, 2):
            raise CliError("the symmetric template is quadratic (ell = 2)")
        return symmetric_companion_quadratification(P)
    raise CliError(f"unknown form {form!r}")


def cmd_construct(args, out):
    P = read_mp(args.input)
    lif = build_form(P, args.form, args.ell, args.epsilon, args.eta, args.side)
    Path(args.output).write_text(dumps(lif.L))
    sidecar = args.sidecar or str(Path(args.output).with_suffix(".json"))
    Path(sidecar).write_text(json.dumps(sidecar_for(lif, args.form, P.grade), indent=2) + "\n")
    out.write(f"wrote {args.output} ({lif.L.rows}x{lif.L.cols}, grade {lif.ell}) and {sidecar}\n")
    return 0


def cmd_verify(args, out):
    L = read_mp(args.lification)
    side = load_sidecar(args.sidecar)
    P = read_mp(args.target)
    if L.field != "Q" or P.field != "Q":
        raise CliError("verify works on exact (Q) files")
    report = verify_assembled(L, side, P, float_check=args.float_check, tol=args.tol,
                              seed=args.seed)
    out.write(report.format() + "\n")
    return 0 if report.overall else 1


def cmd_solve(args, out):
    P = read_mp(args.input)
    if P.field == "Q" and not is_regular(P, args.seed):
        raise SingularPolynomialError("P is singular; eigenvalues are not defined")
    lif = build_form(P, "kronecker", args.ell, args.epsilon, args.eta)
    finite, ninf = polynomial_eigenvalues(lif.L)
    out.write("re\tim\tflag\n")
    for v in finite:
        out.write(f"{float(v.real)!r}\t{float(v.imag)!r}\tfinite\n")
    for _ in range(ninf):
        out.write("inf\t0.0\tinfinite\n")
    return 0


def _parse_point(text):
    t = text.strip().lower()
    if t in ("inf", "infinity", "∞"):
        return "inf"
    try:
        return Fraction(t)
    except ValueError:
        return complex(t.replace("i", "j"))


def cmd_recover(args, out):
    L = read_mp(args.lification)
    side = load_sidecar(args.sidecar)
    V = read_mp(args.vectors)
    lif = lification_from_files(L, side)
    ctx = context_from_sidecar(side, lif)
    if args.at is None:
        if ctx.kind == "block-kronecker":
            cols = extract_minimal_basis_kronecker(V, ctx, args.side)
            out.write(dumps(_hstack_cols(cols)))
        else:
            out.write(dumps(recover_minimal_basis_general(V, lif, args.side)))
        return 0
    lam0 = _parse_point(args.at)
    if V.grade != 0:
        raise CliError("eigenvectors must be constant (grade 0)")
    A = V.coeffs[0]
    Lc = L if V.field == "Q" and isinstance(lam0, Fraction) else L.to_float()
    if lam0 == "inf":
        Lval = np.asarray(Lc.coeffs[-1])
    else:
        x0 = lam0 if Lc.field == "Q" else (complex(lam0) if isinstance(lam0, complex)
                                            else float(lam0))
        Lval = evaluate(Lc, x0)
    if args.side == "left":
        Lval = Lval.T
    results = []
    for j in range(A.shape[1]):
        z = A[:, j] if Lc.field == "Q" else np.asarray(A[:, j], dtype=float)
        res = Lval.dot(z)
        if Lc.field == "Q":
            if any(r != 0 for r in res):
                raise CliError(f"vector {j} is not an eigenvector of the l-ification")
        else:
            scale = np.linalg.norm(Lval) * np.linalg.norm(z)
            if np.linalg.norm(res) > args.tol * max(scale, 1e-300):
                raise CliError(f"vector {j} is not an eigenvector of the l-ification")
        results.append(recover_eigenvector(z, "inf" if lam0 == "inf" else lam0, ctx, args.side))
    R = np.column_stack(results)
    if np.iscomplexobj(R):
        if np.abs(R.imag).max() > 0:
            raise CliError("recovered vectors are complex; the text format is real")
        R = R.real
    out.write(dumps(MatrixPolynomial([R], "Q" if R.dtype == object else "F64")))
    return 0


def _hstack_cols(cols):
    from .polycore import block
    g = max(c.grade for c in cols)
    return block([[c.with_grade(g) for c in cols]])


# demos --------------------------------------------------------------------

def demo_symmetric_quartic(out, seed):
    sb = golden.symmetric_quartic_quadratification()
    P = golden.quartic_rank_one()
    out.write("P = diag(λ^4, 0); K = [1, -λ, λ^2]; N = [[λ, 1, 0], [0, λ, 1]]\n")
    out.write("M = diag(λ^2, 0, 0) solves N M N^T = P.  Assembled quadratification:\n")
    table = golden.render_numeric(sb.L)
    out.write(golden.format_table(table) + "\n")
    out.write(f"matches printed matrix: {table == golden.GOLDEN_QUARTIC}\n")
    out.write(f"symmetric: {sb.L == sb.L.T}\n\n")
    report = verify_ellification(sb, P)
    out.write(report.format() + "\n\n")
    ctx = RecoveryContext.from_sbmb(sb)
    ip = minimal_indices_of(P)
    il = minimal_indices_of(sb.L)
    out.write(f"minimal indices of P: right {ip.right_minimal_indices}, left {ip.left_minimal_indices}\n")
    out.write(f"minimal indices of L: right {il.right_minimal_indices}, left {il.left_minimal_indices}"
              f" (shifted from P: {shift_minimal_indices(ip.right_minimal_indices, ctx, 'right')},"
              f" {shift_minimal_indices(ip.left_minimal_indices, ctx, 'left')})\n")
    h = MatrixPolynomial([[[0], [1]]])
    z = lift_right_null_vector(h, sb)
    back = recover_minimal_basis_general(z, sb)
    out.write(f"lifted null vector z = {[golden.render_polynomial_entry(z.entry(i, 0)) for i in range(z.rows)]}\n")
    out.write(f"recovered h = {[golden.render_polynomial_entry(back.entry(i, 0)) for i in range(back.rows)]}\n")
    ok = report.overall and table == golden.GOLDEN_QUARTIC and back.same_polynomial(h)
    return 0 if ok else 1


def demo_grade6(out, seed):
    forms = [("strong linearization (eps=3, eta=2, ell=1)", golden.grade6_linearization,
              golden.GOLDEN_GRADE6_LINEAR),
             ("strong quadratification (eps=eta=1, ell=2)", golden.grade6_quadratification,
              golden.GOLDEN_GRADE6_QUADRATIC),
             ("strong 3-ification (eps=1, eta=0, ell=3)", golden.grade6_cubification,
              golden.GOLDEN_GRADE6_CUBIC)]
    rng = np.random.default_rng(seed)
    P = random_polynomial(2, 3, 6, rng)
    ok = True
    for title, builder, gold in forms:
        table = golden.render_template(builder, 6)
        report = verify_ellification(builder(P), P)
        out.write(f"{title}\n{golden.format_table(table)}\n")
        out.write(f"matches printed matrix: {table == gold}; "
                  f"verification on a random 2x3 grade-6 P (seed {seed}): "
                  f"{'PASS' if report.overall else 'FAIL'}\n\n")
        ok = ok and table == gold and report.overall
    return 0 if ok else 1


def demo_symmetric_grade10(out, seed):
    table = golden.render_template(symmetric_companion_quadratification, 10, ["n"] * 5)
    out.write("symmetric companion quadratification, grade 10\n")
    out.write(golden.format_table(table) + "\n")
    same = table == golden.GOLDEN_SYMMETRIC_GRADE10
    out.write(f"matches printed matrix: {same} (middle block carries P4 as a constant)\n")
    rng = np.random.default_rng(seed)
    P = random_polynomial(3, 3, 10, rng)
    P = P + P.T
    lif = symmetric_companion_quadratification(P)
    report = verify_ellification(lif, P)
    out.write(f"random symmetric 3x3 instance (seed {seed}): L symmetric {lif.L == lif.L.T}\n")
    out.write(report.format() + "\n")
    return 0 if (same and report.overall and lif.L == lif.L.T) else 1


DEMOS = {
    "symmetric-quartic": demo_symmetric_quartic,
    "grade6-forms": demo_grade6,
    "symmetric-grade10": demo_symmetric_grade10,
}


def cmd_demo(args, out):
    return DEMOS[args.name](out, args.seed)


# entry point ---------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="ellify",
                                description="Strong l-ifications of matrix polynomials.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("params", help="enumerate (m1, m2, epsilon, eta)")
    for name in ("m", "n", "d", "ell"):
        s.add_argument(name, type=int)
    s.set_defaults(func=cmd_params)

    s = sub.add_parser("construct", help="build a companion l-ification")
    s.add_argument("--input", required=True)
    s.add_argument("--ell", type=int)
    s.add_argument("--epsilon", type=int)
    s.add_argument("--eta", type=int)
    s.add_argument("--form", default="kronecker", choices=KRONECKER_FORMS)
    s.add_argument("--side", default="first", choices=("first", "second"))
    s.add_argument("--output", required=True)
    s.add_argument("--sidecar")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("verify", help="certify an l-ification against its target")
    s.add_argument("--lification", required=True)
    s.add_argument("--sidecar", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--float-check", action="store_true")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", help="eigenvalues through a block Kronecker l-ification")
    s.add_argument("--input", required=True)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--epsilon", type=int)
    s.add_argument("--eta", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("recover", help="recover minimal bases or eigenvectors of P")
    s.add_argument("--lification", required=True)
    s.add_argument("--sidecar", required=True)
    s.add_argument("--vectors", required=True)
    s.add_argument("--side", default="right", choices=("left", "right"))
    s.add_argument("--at", help="eigenvalue (number or 'inf'); omit for minimal bases")
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_recover)

    s = sub.add_parser("demo", help="replay the worked constructions")
    s.add_argument("name", choices=sorted(DEMOS))
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_demo)
    return p


def _raising_module(exc):
    """Library module that owns the error: its exception class, else the innermost frame."""
    owner = type(exc).__module__
    if owner.startswith("ellify.") and owner != __name__:
        return owner.split(".", 1)[1]
    name = None
    tb = exc.__traceback__
    while tb is not None:
        mod = tb.tb_frame.f_globals.get("__name__", "")
        if mod.startswith("ellify."):
            name = mod.split(".", 1)[1]
        tb = tb.tb_next
    return name or type(exc).__module__.rsplit(".", 1)[-1]


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"ellify {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, ArithmeticError, OSError, KeyError,
            NotImplementedError, json.JSONDecodeError) as exc:
        module = _raising_module(exc)
        print(f"ellify {args.command} [{module}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
