"""Command line interface: ``varcalc <command> --dims x --fields u ...``.

Exit codes: 0 success, 2 parse or usage error, 3 precondition violation,
4 internal invariant breach.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from decimal import Decimal

from . import __version__
from .brackets import (
    CLASSICAL,
    EULER,
    FRECHET,
    GRADED,
    hamiltonian_vector_field,
    is_hamiltonian,
    jacobi_residual,
    poisson_bracket,
    sn_self_bracket_22,
    sn_self_trivector,
    trivector_on_differentials,
)
from .errors import InvariantError, ParseError, PreconditionError, VarcalcError
from .graded import adjoint, grading_zero_nf, skew_defect, skew_part
from .jet import euler_operators
from .parser import make_spec, parse_density, parse_operator, parse_tensor
from .printer import format_any, format_poly
from .tensors import canonical_differential, differential_of_functional, tensor_nf

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 2, 3, 4

COMMANDS = ("adjoint", "skew", "sn-self", "is-hamiltonian", "bracket", "jacobi",
            "hamvec", "euler", "frechet", "nf")

# flags each command needs; everything else is rejected when given
_REQUIRED = {
    "adjoint": ("op",), "skew": ("op",), "sn-self": ("op",), "is-hamiltonian": ("op",),
    "bracket": ("op", "f", "g"), "jacobi": ("op", "f", "g", "h"), "hamvec": ("op", "h"),
    "euler": ("density",), "frechet": ("density",), "nf": ("density",),
}
_OPTIONAL = {"is-hamiltonian": ("mode",), "bracket": ("method",), "jacobi": ("method",)}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="varcalc", description="Boundary-graded variational calculus.")
    p.add_argument("--version", action="version", version=f"varcalc {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command")
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--dims", required=True, help="coordinate names, e.g. 'x' or 'x,y'")
        s.add_argument("--fields", required=True, help="field names, e.g. 'u' or 'u,v'")
        for flag in ("op", "f", "g", "h", "density"):
            s.add_argument(f"--{flag}")
        s.add_argument("--mode", choices=(GRADED, CLASSICAL))
        s.add_argument("--method", choices=(EULER, FRECHET))
        s.add_argument("--json", action="store_true", help="emit a JSON report")
        s.add_argument("--seed", type=int, default=0, help="recorded in the report")
    return p


def _check_flags(args):
    need = _REQUIRED[args.command]
    allowed = set(need) | set(_OPTIONAL.get(args.command, ()))
    for flag in ("op", "f", "g", "h", "density", "mode", "method"):
        val = getattr(args, flag)
        if flag in need and val is None:
            raise _UsageError(f"{args.command} requires --{flag}")
        if flag not in allowed and val is not None:
            raise _UsageError(f"{args.command} does not take --{flag}")


def _roundtrip(obj, parse):
    """Printed output must re-parse to the same object."""
    if parse(format_any(obj)) != obj:
        raise InvariantError(f"printer/parser round trip failed for {format_any(obj)!r}")


def _run(args) -> dict:
    spec = make_spec(args.dims, args.fields)
    dens = lambda s: parse_density(spec, s)  # noqa: E731
    res: dict = {"result": {}, "verdicts": {}, "residuals": {}}
    out = res["result"]
    cmd = args.command

    if cmd in ("adjoint", "skew", "sn-self", "is-hamiltonian", "bracket", "jacobi", "hamvec"):
        op = parse_operator(spec, args.op)
        out["operator"] = format_any(op)

    if cmd == "adjoint":
        a = adjoint(op)
        if adjoint(a) != op:
            raise InvariantError("adjoint is not an involution on this input")
        _roundtrip(a, lambda s: parse_operator(spec, s))
        out["adjoint"] = format_any(a)
    elif cmd == "skew":
        k = skew_part(op)
        if skew_defect(k):
            raise InvariantError("skew part is not skew-adjoint")
        out["skew"] = format_any(k)
        res["verdicts"]["was_skew"] = not skew_defect(op)
    elif cmd == "sn-self":
        taken = bool(skew_defect(op))
        k = skew_part(op) if taken else op
        pre = sn_self_trivector(k)
        nf = sn_self_bracket_22(k)
        _roundtrip(nf, lambda s: parse_tensor(spec, s))
        out["operator_used"] = format_any(k)
        res["verdicts"]["skew_taken"] = taken
        res["residuals"] = {"pre_nf": format_any(pre), "nf": format_any(nf)}
    elif cmd == "is-hamiltonian":
        v = is_hamiltonian(op, args.mode or GRADED)
        res["verdicts"] = {"mode": v.mode, "is_hamiltonian": v.is_hamiltonian, "skew_taken": v.skew_taken}
        out["operator_used"] = format_any(v.operator_used)
        res["residuals"] = {"pre_nf": format_any(v.pre_nf), "nf": format_any(v.residual)}
        if v.mode == CLASSICAL:
            out["variational_derivatives"] = {
                f"{k[0]}:{spec.fields[k[1]]}": format_any(d) for k, d in sorted(v.variational.items())
            }
    elif cmd == "bracket":
        F, G = dens(args.f), dens(args.g)
        b = poisson_bracket(op, F, G, args.method or EULER)
        res["residuals"] = {"pre_nf": format_any(b), "nf": format_any(grading_zero_nf(b))}
        out["bracket"] = res["residuals"]["nf"]
    elif cmd == "jacobi":
        F, G, H = dens(args.f), dens(args.g), dens(args.h)
        r = jacobi_residual(op, F, G, H, args.method or EULER)
        t = sn_self_bracket_22(op)
        ev = trivector_on_differentials(t, F, G, H)
        out["sn_self_bracket"] = format_any(t)
        out["sn_on_differentials"] = format_any(ev)
        res["residuals"] = {"nf": format_any(r)}
        res["verdicts"]["jacobi_holds"] = r.is_zero()
    elif cmd == "hamvec":
        H = dens(args.h)
        xi = hamiltonian_vector_field(op, H)
        out["hamiltonian_vector_field"] = format_any(xi)
    elif cmd == "euler":
        d = dens(args.density)
        rows = {}
        for J, f in sorted(d.parts.items()):
            for (A, K), e in euler_operators(f, spec.n_dims).items():
                rows[f"grading={list(J)} field={spec.fields[A]} K={list(K)}"] = format_poly(spec, e)
        out["euler_operators"] = rows
        out["canonical_differential"] = format_any(canonical_differential(d))
    elif cmd == "frechet":
        d = dens(args.density)
        out["differential"] = format_any(differential_of_functional(d))
        out["canonical_differential"] = format_any(canonical_differential(d))
    elif cmd == "nf":
        try:
            d = dens(args.density)
            n = grading_zero_nf(d)
            if grading_zero_nf(n) != n:
                raise InvariantError("normal form is not idempotent")
        except ParseError as e:
            if "wedge slot" not in str(e):
                raise
            d = parse_tensor(spec, args.density)
            n = tensor_nf(d)
        res["residuals"] = {"pre_nf": format_any(d), "nf": format_any(n)}
        out["nf"] = res["residuals"]["nf"]
    return res


def _emit_text(report, stream):
    for k, v in report["result"].items():
        if isinstance(v, dict) and not v:
            print(f"{k}: none", file=stream)
        elif isinstance(v, dict):
            print(f"{k}:", file=stream)
            for kk, vv in v.items():
                print(f"  {kk}: {vv}", file=stream)
        else:
            print(f"{k}: {v}", file=stream)
    for k, v in report["verdicts"].items():
        print(f"{k}: {str(v).lower() if isinstance(v, bool) else v}", file=stream)
    for k, v in report["residuals"].items():
        print(f"residual[{k}]: {v}", file=stream)


def run_cli(argv=None, stdout=None, stderr=None) -> tuple[int, dict | None]:
    """Run one command; returns ``(exit_code, report)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    t0 = time.perf_counter()
    args = None
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise _UsageError(f"missing command, one of: {', '.join(COMMANDS)}")
        _check_flags(args)
        body = _run(args)
        code, error = EXIT_OK, None
    except SystemExit as e:  # --help / --version
        return int(e.code or 0), None
    except (_UsageError, ParseError) as e:
        code, error, body = EXIT_PARSE, str(e), None
    except PreconditionError as e:
        code, error, body = EXIT_PRECONDITION, str(e), None
    except (InvariantError, AssertionError) as e:
        code, error, body = EXIT_INTERNAL, f"internal invariant breach: {e}", None
    except (ValueError, KeyError, VarcalcError) as e:
        # bad dims/fields declarations and the like
        code, error, body = EXIT_PARSE, str(e), None
    except Exception as e:  # pragma: no cover
        code, error, body = EXIT_INTERNAL, f"internal error: {type(e).__name__}: {e}", None
    elapsed = time.perf_counter() - t0
    report = {
        "command": argv,
        "subcommand": getattr(args, "command", None),
        "exit_code": code,
        "error": error,
        "result": (body or {}).get("result", {}),
        "verdicts": (body or {}).get("verdicts", {}),
        "residuals": (body or {}).get("residuals", {}),
        "timing": {"seconds": str(Decimal(elapsed).quantize(Decimal("0.000001")))},
        "seed": str(getattr(args, "seed", 0) or 0),
    }
    if args is not None and getattr(args, "json", False):
        json.dump(report, stdout, indent=2, sort_keys=True)
        stdout.write("\n")
    elif error is None:
        _emit_text(report, stdout)
    if error is not None:
        print(f"varcalc: error: {error}", file=stderr)
    return code, report


def main(argv=None) -> int:
    return run_cli(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
