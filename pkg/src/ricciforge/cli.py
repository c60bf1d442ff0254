"""Command-line entry point: ``ricciforge <subcommand> ...``.

Exit codes: 0 success, 1 a check or verification failed, 2 malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from . import serialize as ser
from .certify import (
    CertificateNotFound,
    certify_compact_pipeline,
    check_lemma0,
    check_main_theorem,
    check_su2_theorem,
    search_negative_ricci_metric,
    verify_certificate,
    RicciCertificate,
)
from .classical import build_compact, build_noncompact_sl
from .curvature import MetricLieAlgebra, ricci
from .degeneration import (
    LimitDiverges,
    dropped_terms,
    lemma0_family,
    psi_family,
    scale_bracket,
    take_limit,
)
from .lie_core import LieAlgebra
from .poly_reps import build_poly_rep, standard_rep
from .rational import qeye
from .semidirect import central_semidirect

__all__ = ["main", "cli_dispatch", "parallel_map", "reproduce_worked_examples", "GOLDEN"]


class InputError(Exception):
    pass


def thread_cap() -> int:
    raw = os.environ.get("RICCIFORGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Iterable) -> list:
    """Order-preserving map using at most ``RICCIFORGE_THREADS`` workers."""
    items = list(items)
    cap = thread_cap()
    if cap == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# golden examples
# ---------------------------------------------------------------------------

GOLDEN = {
    "gl2_W2": [-6, -24, -2, -2, -7, -7, -4, -4, -7, -7],
    "sl2_C2": [
        [-4, 0, 0, 0, 0, 0, 0, 0],
        [0, -12, 0, 0, 0, 0, 0, 0],
        [0, 0, -1, 1, 0, 0, 0, 0],
        [0, 0, 1, -1, 0, 0, 0, 0],
        [0, 0, 0, 0, -5, 0, 0, 0],
        [0, 0, 0, 0, 0, -5, 0, 0],
        [0, 0, 0, 0, 0, 0, -3, 0],
        [0, 0, 0, 0, 0, 0, 0, -3],
    ],
    "sl2_C2_rotated": [-4, -12, -8, -12, -2, -2, -6, -6],
}


def gl2_w2_limit() -> tuple[LieAlgebra, np.ndarray]:
    """Limit of ``gl(2, R) x| W_2`` (rho = 1) and the gram making ``1/2 v_i`` orthonormal on V1."""
    u = build_noncompact_sl(2)[0]
    rep, split = build_poly_rep("sl", 2, 2)
    L = central_semidirect(u, rep)
    Linf = take_limit(scale_bracket(L, lemma0_family(L, split, 1)))
    G = qeye(Linf.dim)
    off = Linf.dim - rep.dim_V
    for v in split.V1:
        G[off + v, off + v] = Fraction(4)
    return Linf, G


def sl2_c2_limit() -> LieAlgebra:
    u = build_noncompact_sl(2)[0]
    rep, split = standard_rep("sl", 2)
    L = central_semidirect(u, rep)
    return take_limit(scale_bracket(L, lemma0_family(L, split, 1)))


def rotated_basis(dim: int = 8, x: int = 2, y: int = 3) -> np.ndarray:
    """Columns: the basis with ``X, Y`` replaced by ``X + Y, X - Y``."""
    B = qeye(dim)
    B[x, x], B[y, x] = Fraction(1), Fraction(1)
    B[x, y], B[y, y] = Fraction(1), Fraction(-1)
    return B


def ricci_in_basis(L: LieAlgebra, B: np.ndarray) -> np.ndarray:
    """Ricci operator for the metric making the columns of ``B`` orthonormal, in that basis."""
    from .rational import inverse

    Binv = inverse(B)
    G = Binv.T.dot(Binv)
    R = ricci(MetricLieAlgebra(L, G)).ricci
    return Binv.dot(R).dot(B)


def _is_diag(R) -> bool:
    n = R.shape[0]
    return all(R[i, j] == 0 for i in range(n) for j in range(n) if i != j)


def _example_gl2():
    Linf, G = gl2_w2_limit()
    R = ricci(MetricLieAlgebra(Linf, G)).ricci
    d = [R[i, i] for i in range(10)]
    return "gl(2,R) x| W_2 limit", _is_diag(R) and d == GOLDEN["gl2_W2"], d


def _example_sl2():
    R = ricci(MetricLieAlgebra.orthonormal(sl2_c2_limit())).ricci
    return "sl(2,R) x| C^2 limit", R.tolist() == GOLDEN["sl2_C2"], [R[i, i] for i in range(8)]


def _example_sl2_rotated():
    R = ricci_in_basis(sl2_c2_limit(), rotated_basis())
    d = [R[i, i] for i in range(8)]
    return "sl(2,R) x| C^2 limit, basis X+Y, X-Y", _is_diag(R) and d == GOLDEN["sl2_C2_rotated"], d


def reproduce_worked_examples() -> list[tuple[str, bool, list]]:
    """``(name, matches golden, computed diagonal)`` for each worked example."""
    return parallel_map(lambda f: f(), [_example_gl2, _example_sl2, _example_sl2_rotated])


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _load(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from exc


def _algebra(args) -> LieAlgebra:
    try:
        return ser.algebra_from_json(_load(args.algebra))
    except InputError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed algebra: {exc}") from exc


def _gram(args, dim: int):
    if not getattr(args, "gram", None):
        return qeye(dim)
    try:
        obj = _load(args.gram)
        G = ser.matrix_from_json(obj["matrix"] if isinstance(obj, dict) else obj)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed gram: {exc}") from exc
    if G.shape != (dim, dim):
        raise InputError("gram size does not match the algebra")
    return G


class Ctx:
    def __init__(self, args):
        self.args = args
        self.outputs: dict[str, str] = {}

    def emit(self, payload, text: str | None = None):
        data = ser.dumps(payload)
        if self.args.out:
            Path(self.args.out).write_text(data)
            self.outputs[self.args.out] = ser.sha256_file(self.args.out)
        if self.args.json or text is None:
            if not self.args.out:
                sys.stdout.write(data)
        else:
            print(text)


def _build_algebra(family: str, m: int) -> LieAlgebra:
    if family == "sl":
        return build_noncompact_sl(m)[0]
    return build_compact(family, m)[0]


def cmd_build(ctx: Ctx) -> int:
    a = ctx.args
    L = _build_algebra(a.family, a.m)
    ctx.emit(ser.algebra_to_json(L), f"{a.family}({a.m}): dim {L.dim}, labels {' '.join(l.text for l in L.labels)}")
    return 0


def cmd_rep(ctx: Ctx) -> int:
    a = ctx.args
    rep, split = standard_rep(a.family, a.m) if a.standard else build_poly_rep(a.family, a.m, a.n)
    ctx.emit(ser.representation_to_json(rep, split), f"dim V = {rep.dim_V}, V1 = {list(split.V1)}")
    return 0


def cmd_assemble(ctx: Ctx) -> int:
    a = ctx.args
    if a.rep:
        try:
            rep, _ = ser.representation_from_json(_load(a.rep))
        except InputError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed representation: {exc}") from exc
    else:
        rep, _ = build_poly_rep(a.family, a.m, a.n)
    L = central_semidirect(rep.source, rep)
    ctx.emit(ser.algebra_to_json(L), f"assembled algebra of dim {L.dim}")
    return 0


def cmd_ricci(ctx: Ctx) -> int:
    L = _algebra(ctx.args)
    G = _gram(ctx.args, L.dim)
    try:
        r = ricci(MetricLieAlgebra(L, G))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    payload = {
        "type": "ricci_report",
        "ricci": ser.matrix_to_json(r.ricci),
        "eigenvalues": list(r.eigenvalues),
        "verdict": r.verdict,
        "exact": r.exact,
    }
    text = f"verdict: {r.verdict}\neigenvalues: {' '.join(repr(v) for v in r.eigenvalues)}"
    if r.exact:
        text += "\ndiagonal: " + " ".join(str(r.ricci[i, i]) for i in range(L.dim))
    ctx.emit(payload, text)
    return 0


def _family(obj, L: LieAlgebra):
    if obj.get("type") == "scaling_family":
        return ser.family_from_json(obj)
    if "lemma0" in obj:
        split = ser.split_from_json(obj["lemma0"])
        return lemma0_family(L, split, ser.rat_from_json(obj.get("rho", {"num": 1, "den": 1})))
    if "psi" in obj:
        return psi_family(L, obj["psi"])
    raise ValueError("family must be a scaling_family, {'lemma0': split, 'rho': r} or {'psi': [indices]}")


def cmd_degenerate(ctx: Ctx) -> int:
    a = ctx.args
    L = _algebra(a)
    try:
        F = _family(_load(a.family), L)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed family: {exc}") from exc
    LB = scale_bracket(L, F)
    drops = [{"i": i, "j": j, "k": k, "exponent": e, "c": ser.rat_to_json(c)} for (i, j, k), e, c in dropped_terms(LB)]
    if not a.limit:
        payload = {
            "type": "laurent_bracket",
            "dim": LB.dim,
            "entries": [
                {"i": i, "j": j, "k": k, "terms": [{"exponent": e, "c": ser.rat_to_json(c)} for e, c in p.items()]}
                for (i, j, k), p in LB.entries.items()
            ],
        }
        ctx.emit(payload, f"{len(LB.entries)} scaled brackets")
        return 0
    try:
        lim = take_limit(LB)
    except LimitDiverges as exc:
        print(str(exc), file=sys.stderr)
        return 1
    payload = {"limit": ser.algebra_to_json(lim), "dropped": drops}
    ctx.emit(payload, f"limit has {len(lim.bracket.entries)} brackets; dropped {len(drops)}")
    return 0


def cmd_check(ctx: Ctx) -> int:
    a = ctx.args
    if a.theorem == "su2":
        rep = check_su2_theorem(_algebra(a))
    else:
        r, split = build_poly_rep(a.family, a.m, a.n)
        rep = check_lemma0(r, split) if a.theorem == "lemma0" else check_main_theorem(r, split)
    ctx.emit(ser.report_to_json(rep), rep.summary())
    return 0 if rep.passed else 1


def cmd_certify(ctx: Ctx) -> int:
    a = ctx.args
    if a.algebra:
        L = _algebra(a)
        ML = search_negative_ricci_metric(L, a.budget, a.seed)
        if ML is None:
            print("no metric with negative Ricci curvature found within budget", file=sys.stderr)
            return 1
        r = ricci(ML)
        cert = RicciCertificate(
            L, ML.gram, r.eigenvalues, r.lambda_max, None,
            {"seed": a.seed, "budget": a.budget}, ("numerical metric search",),
        )
    else:
        try:
            cert = certify_compact_pipeline(a.family, a.m, a.n, rho=a.rho, lift=a.lift)
        except CertificateNotFound as exc:
            print(str(exc), file=sys.stderr)
            return 1
    ctx.emit(ser.certificate_to_json(cert), f"lambda_max = {cert.lambda_max!r}")
    return 0


def cmd_verify(ctx: Ctx) -> int:
    a = ctx.args
    try:
        cert = ser.certificate_from_json(_load(a.certificate))
        alg = ser.algebra_from_json(_load(a.algebra_file)) if a.algebra_file else None
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed certificate: {exc}") from exc
    rep = verify_certificate(cert, alg)
    ctx.emit(ser.report_to_json(rep), rep.summary())
    return 0 if rep.passed else 1


def cmd_reproduce(ctx: Ctx) -> int:
    if ctx.args.target != "paper-examples":
        raise InputError(f"unknown reproduction target {ctx.args.target!r}")
    results = reproduce_worked_examples()
    lines = []
    for name, ok, diag in results:
        lines.append(f"{name}: Diag({', '.join(str(v) for v in diag)}) {'PASS' if ok else 'FAIL'}")
    payload = {"type": "reproduction", "results": [{"name": n, "pass": ok, "diagonal": d} for n, ok, d in results]}
    ctx.emit(payload, "\n".join(lines))
    return 0 if all(ok for _, ok, _ in results) else 1


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ricciforge", description="Lie algebras with negative Ricci curvature")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON instead of a summary")
    common.add_argument("--out", help="write the JSON payload to this file")
    common.add_argument("--manifest", help="write a run manifest to this file")
    sub = p.add_subparsers(dest="command", required=True)

    def fam(sp, n=True):
        sp.add_argument("--family", choices=["su", "so", "sp", "sl"], required=True)
        sp.add_argument("--m", type=int, required=True)
        if n:
            sp.add_argument("--n", type=int, default=2)

    s = sub.add_parser("build", parents=[common], help="build a classical Lie algebra")
    fam(s, n=False)
    s.set_defaults(fn=cmd_build)

    s = sub.add_parser("rep", parents=[common], help="polynomial representation W_n")
    fam(s)
    s.add_argument("--standard", action="store_true", help="defining action on C^m instead")
    s.set_defaults(fn=cmd_rep)

    s = sub.add_parser("assemble", parents=[common], help="(R Z + u) x| V")
    s.add_argument("--rep", help="representation JSON (else build from --family/--m/--n)")
    s.add_argument("--family", choices=["su", "so", "sp", "sl"])
    s.add_argument("--m", type=int)
    s.add_argument("--n", type=int, default=2)
    s.set_defaults(fn=cmd_assemble)

    s = sub.add_parser("ricci", parents=[common], help="Ricci operator of a metric Lie algebra")
    s.add_argument("--algebra", required=True)
    s.add_argument("--gram")
    s.set_defaults(fn=cmd_ricci)

    s = sub.add_parser("degenerate", parents=[common], help="scale brackets and take the limit")
    s.add_argument("--algebra", required=True)
    s.add_argument("--family", required=True, help="scaling family JSON")
    s.add_argument("--limit", action="store_true")
    s.set_defaults(fn=cmd_degenerate)

    s = sub.add_parser("check", parents=[common], help="check theorem hypotheses")
    s.add_argument("--theorem", choices=["lemma0", "main", "su2"], required=True)
    s.add_argument("--family", choices=["su", "so", "sp", "sl"])
    s.add_argument("--m", type=int)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--algebra")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("certify", parents=[common], help="produce a negative Ricci certificate")
    s.add_argument("--family", choices=["su", "so", "sp", "sl"])
    s.add_argument("--m", type=int)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--rho", type=_fraction)
    s.add_argument("--lift", action="store_true")
    s.add_argument("--algebra", help="search numerically on this algebra instead")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=100_000)
    s.set_defaults(fn=cmd_certify)

    s = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    s.add_argument("certificate")
    s.add_argument("algebra_file", nargs="?")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("reproduce", parents=[common], help="reproduce the worked examples")
    s.add_argument("target")
    s.set_defaults(fn=cmd_reproduce)
    return p


def _validate(args):
    need_fam = {
        "assemble": not args.__dict__.get("rep"),
        "check": args.__dict__.get("theorem") in ("lemma0", "main"),
        "certify": not args.__dict__.get("algebra"),
    }.get(args.command, False)
    if need_fam and (args.family is None or args.m is None):
        raise InputError("--family and --m are required")
    if args.command == "check" and args.theorem == "su2" and not args.algebra:
        raise InputError("--algebra is required for the su2 check")


def _write_manifest(path: str, argv: Sequence[str], ctx: Ctx, wall: float, code: int):
    params = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in vars(ctx.args).items() if k not in ("fn", "manifest")}
    inputs = {}
    for key in ("algebra", "gram", "rep", "certificate", "algebra_file"):
        val = params.get(key)
        if val and os.path.isfile(val):
            inputs[val] = ser.sha256_file(val)
    if ctx.args.command == "degenerate" and os.path.isfile(ctx.args.family):
        inputs[ctx.args.family] = ser.sha256_file(ctx.args.family)
    manifest = {
        "command": ctx.args.command,
        "argv": list(argv),
        "parameters": params,
        "input_hashes": inputs,
        "tool_version": __version__,
        "outputs": ctx.outputs,
        "exit_code": code,
        "wall_time": wall,
    }
    Path(path).write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")


def cli_dispatch(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    ctx = Ctx(args)
    start = time.perf_counter()
    try:
        _validate(args)
        code = args.fn(ctx)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = 2
    if args.manifest:
        _write_manifest(args.manifest, argv, ctx, time.perf_counter() - start, code)
    return code


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
