"""``descriptor-lab`` command line: simulate circuit files, run suites and protocols.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
parse and engine errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import protocols
from .circuit import CircuitError, load_circuit_file
from .config import TOL, max_dim
from .descriptors import expectation, run_circuit
from .pauli import PauliError, PauliSum
from .pictures import born_expectation, instrumental_equivalence_check, observable_matrix, schrodinger_run
from .suites import SUITES, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SIG_DIGITS = 10


class UsageError(Exception):
    pass


def _round(x: float) -> float:
    if not math.isfinite(x):
        return x
    return float(f"{x:.{SIG_DIGITS}g}")


def clean(obj: Any) -> Any:
    """JSON-ready copy of ``obj`` with floats cut to 10 significant digits."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_round(obj.real), _round(obj.imag)]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    return obj


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def _csv(rows: list[dict]) -> str:
    flat = [_flatten(r) for r in rows]
    fields: list[str] = []
    for r in flat:
        fields.extend(k for k in r if k not in fields)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)
    return buf.getvalue()


def _text(report: dict, rows_key: str | None) -> str:
    lines = []
    for k, v in _flatten({k: v for k, v in report.items()
                          if k not in ("cases", "steps", rows_key)}).items():
        lines.append(f"{k}: {v}")
    for row in report.get(rows_key) or [] if rows_key == "observables" else []:
        lines.append("  " + "  ".join(f"{k}={v}" for k, v in _flatten(row).items()))
    lines.append("PASS" if report.get("pass") else "FAIL")
    return "\n".join(lines) + "\n"


def emit(report: dict, fmt: str, rows_key: str | None, out) -> None:
    report = clean(report)
    if fmt == "json":
        out.write(json.dumps(report, indent=2) + "\n")
    elif fmt == "csv":
        rows = report.get(rows_key) if rows_key else None
        if not rows:
            rows = [{k: v for k, v in report.items() if k not in ("cases", "steps")}]
        out.write(_csv(rows))
    else:
        out.write(_text(report, rows_key))


# ---------------------------------------------------------------- simulate

def _parse_observables(texts: Sequence[str], layout) -> list[PauliSum]:
    if not texts:
        return [PauliSum([(1.0, "".join("Z" if t == s else "I" for t in range(layout.n)))])
                for s in range(layout.n) if layout.dims[s] == 2]
    out = []
    for text in texts:
        f = PauliSum.parse(text)
        if f.n_qubits is not None and f.n_qubits != layout.n:
            raise UsageError(f"observable {text!r} has {f.n_qubits} letters for {layout.n} subsystems")
        out.append(f)
    return out


def cmd_simulate(args) -> dict:
    cf = load_circuit_file(args.path)
    circuit = cf.to_circuit()
    layout = circuit.layout
    if layout.total_dim > max_dim():
        raise UsageError(f"total dimension {layout.total_dim} exceeds the cap {max_dim()}")
    observables = _parse_observables(args.observable, layout)
    rows = []
    mode = "step" if layout.all_qubits else "global"
    frame = run_circuit(circuit, mode=mode) if args.picture == "heisenberg" else None
    state = schrodinger_run(circuit) if args.picture == "schrodinger" else None
    for f in observables:
        row: dict[str, Any] = {"observable": f.to_text()}
        if args.picture == "both":
            rep = instrumental_equivalence_check(circuit, f)
            row.update(rep.to_dict())
        elif args.picture == "heisenberg":
            row["heisenberg"] = expectation(frame, f)
            row["pass"] = True
        else:
            row["schrodinger"] = born_expectation(state, observable_matrix(f, layout))
            row["pass"] = True
        rows.append(row)
    return {
        "check": "simulate",
        "file": str(args.path),
        "picture": args.picture,
        "dims": list(layout.dims),
        "gates": len(circuit),
        "tolerance": TOL.equivalence,
        "observables": rows,
        "pass": all(r["pass"] for r in rows),
    }


# ---------------------------------------------------------------- verify

def cmd_verify(args) -> dict:
    return run_suite(args.suite, seed=args.seed, cases=args.cases)


# ---------------------------------------------------------------- protocol

def _complex_arg(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j").replace("−", "-"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def cmd_protocol(args) -> dict:
    if args.name == "sdc":
        rep = protocols.superdense_coding(args.i, args.j)
    elif args.name == "teleport":
        rep = protocols.teleportation(args.alpha, args.beta, decohere_channel=args.decohere,
                                      hops=args.hops)
    elif args.name == "branching":
        rep = protocols.local_branching_demo(args.bob_angle)
    else:
        rep = protocols.chsh_game(tuple(args.angles) if args.angles else protocols.OPTIMAL_CHSH_ANGLES)
    return rep.to_dict()


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "text"), default="json",
                     help="report format (default: json)")

    parser = argparse.ArgumentParser(
        prog="descriptor-lab",
        description="Heisenberg-picture descriptor simulation checked against a state-vector oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[fmt], help="evaluate observables on a circuit file")
    sim.add_argument("path", help="circuit JSON file")
    sim.add_argument("--picture", choices=("heisenberg", "schrodinger", "both"), default="both")
    sim.add_argument("--observable", action="append", default=[], metavar="PAULI_SUM",
                     help="Pauli-sum text such as 'ZZ' or '0.5*XI;0.5*IX' (repeatable); "
                          "default: Z on each qubit")
    sim.set_defaults(func=cmd_simulate, rows="observables")

    ver = sub.add_parser("verify", parents=[fmt], help="run a seeded property suite")
    ver.add_argument("suite", choices=sorted(SUITES))
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--cases", type=int, default=None,
                     help="number of cases (stepglobal: frames per gate)")
    ver.set_defaults(func=cmd_verify, rows="cases")

    pro = sub.add_parser("protocol", help="run a protocol and report it")
    psub = pro.add_subparsers(dest="name", required=True)
    sdc = psub.add_parser("sdc", parents=[fmt], help="superdense coding of two bits")
    sdc.add_argument("--i", type=int, choices=(0, 1), default=0)
    sdc.add_argument("--j", type=int, choices=(0, 1), default=0)
    tel = psub.add_parser("teleport", parents=[fmt], help="teleport a qubit state")
    tel.add_argument("--alpha", type=_complex_arg, default=complex(1.0))
    tel.add_argument("--beta", type=_complex_arg, default=complex(0.0))
    tel.add_argument("--decohere", action="store_true", help="fully dephase the classical channel")
    tel.add_argument("--hops", type=int, default=2, help="channel hops (2 = direct)")
    br = psub.add_parser("branching", parents=[fmt], help="local branching on a Bell pair")
    br.add_argument("--bob-angle", type=float, default=0.0)
    ch = psub.add_parser("chsh", parents=[fmt], help="CHSH game")
    ch.add_argument("--angles", type=float, nargs=4, metavar=("A", "A2", "B", "B2"))
    for p in (sdc, tel, br, ch):
        p.set_defaults(func=cmd_protocol, rows="steps")
    return parser


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        report = args.func(args)
    except (UsageError, CircuitError, PauliError, ValueError, ArithmeticError, OSError) as exc:
        err.write(f"descriptor-lab: error: {exc}\n")
        return EXIT_USAGE
    emit(report, args.format, args.rows, out)
    return EXIT_PASS if report.get("pass") else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
