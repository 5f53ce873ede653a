"""Command-line front end: ``well-ladder <subcommand> [flags]``.

Exit codes: 0 success, 1 usage or validation error, 2 a numerical check
missed its tolerance. Settings may also come from a flat ``key = value``
file given with ``--config``; flags on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import coherent, factorization, jcsim, nonclassical, su11
from .grid import Grid, Units, l2_distance

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2
FORMATS = ("csv", "json")

EIGEN_RAYLEIGH_TOL = 1e-5
LADDER_TOL = 1e-7
IDENTITY_TOL = 1e-6


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    hbar: float = 1.0
    mass: float = 1.0
    length: float = math.pi
    J_max: int | None = None  # None: each subcommand picks its own default
    n_points: int = 512
    output_format: str = "csv"
    output_path: str | None = None  # None or "-": standard output

    def __post_init__(self):
        for name in ("hbar", "mass", "length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.J_max is not None and self.J_max < 1:
            raise ValueError("jmax must be positive")
        if self.n_points < 1:
            raise ValueError("n-points must be positive")
        if self.output_format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")

    @property
    def units(self) -> Units:
        return Units(self.hbar, self.mass, self.length)


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _json_value(v):
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render_table(rows: list[dict], fmt: str = "csv", columns: list[str] | None = None) -> str:
    """Serialise homogeneous records; floats use the shortest round-trip form."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    keys = list(columns) if columns is not None else (list(rows[0]) if rows else [])
    for row in rows:
        if list(row) != keys:
            raise ValueError(f"rows are not homogeneous: {list(row)} vs {keys}")
    if fmt == "json":
        records = [{k: _json_value(row[k]) for k in keys} for row in rows]
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys)
    for row in rows:
        writer.writerow([_format_value(row[k]) for k in keys])
    return buf.getvalue()


def emit_table(rows: list[dict], fmt: str = "csv", path: str | Path | None = None,
               columns: list[str] | None = None) -> None:
    """Write :func:`render_table` output to ``path`` (standard output if None or ``-``)."""
    text = render_table(rows, fmt, columns)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _parse_scalar(text: str):
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    if text in ("true", "false"):
        return text == "true"
    return text


def parse_table(text: str, fmt: str = "csv") -> list[dict]:
    """Inverse of :func:`render_table` for the value types it writes."""
    if fmt == "json":
        return json.loads(text)
    reader = csv.reader(io.StringIO(text))
    header = next(reader, [])
    return [{k: _parse_scalar(v) for k, v in zip(header, line)} for line in reader]


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` pairs; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    for number, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _common(p: argparse.ArgumentParser, fmt: str = "csv") -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--format", dest="output_format", choices=FORMATS, default=fmt)
    p.add_argument("--output", dest="output_path", default=None, help="file path, '-' for stdout")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--length", type=float, default=math.pi, help="well width L")
    p.add_argument("--n-points", type=int, default=512)
    p.add_argument("--jmax", dest="J_max", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="well-ladder", allow_abbrev=False,
                     description="Square-well ladder operators, coherent states and JC dynamics.")
    sub = parser.add_subparsers(dest="command", metavar="subcommand", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("eigen", help="chain-built eigenpairs versus the analytic spectrum",
                       allow_abbrev=False)
    _common(p)
    p.add_argument("--double", action="store_true", help="build the chain in double precision")

    p = sub.add_parser("ladder-check", help="algebra and grid-ladder identities", allow_abbrev=False)
    _common(p)
    p.add_argument("--levels", type=int, default=10, help="grid ladder checked for j <= levels")

    p = sub.add_parser("coherent", help="BG or GP coefficients, or moment checks", allow_abbrev=False)
    _common(p)
    p.add_argument("--family", type=str.upper, choices=coherent.FAMILIES, default="BG")
    p.add_argument("--alpha", type=complex, default=complex(0.5))
    p.add_argument("--tail-tol", type=float, default=coherent.DEFAULT_TAIL_TOL)
    p.add_argument("--report", choices=("coefficients", "moments"), default="coefficients")

    p = sub.add_parser("identity-check", help="BG resolution of the identity", allow_abbrev=False)
    _common(p)
    p.add_argument("--levels", type=int, default=6)
    p.add_argument("--radial-points", type=int, default=8)

    p = sub.add_parser("metrics", help="squeezing and Mandel Q over an alpha sweep",
                       allow_abbrev=False)
    _common(p)
    p.add_argument("--family", type=str.upper, choices=coherent.FAMILIES, default="BG")
    p.add_argument("--alpha-min", type=float, default=None)
    p.add_argument("--alpha-max", type=float, default=None)
    p.add_argument("--steps", type=int, default=nonclassical.SWEEP_POINTS)

    p = sub.add_parser("jc", help="Jaynes-Cummings generation of GP states", allow_abbrev=False)
    _common(p, fmt="json")
    p.add_argument("--lambda", dest="drive", type=float, default=1.0 / 200.0)
    p.add_argument("--Lambda", dest="coupling", type=float, default=1.0)
    p.add_argument("--phi", type=float, default=2.0 * math.pi)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--propagator", choices=jcsim.PROPAGATORS, default="factored")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    values = read_config_file(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    known = {a.dest: a for a in sub._actions}  # noqa: SLF001
    defaults = {}
    for key, raw in values.items():
        key = {"jmax": "J_max", "format": "output_format", "output": "output_path"}.get(key, key)
        action = known.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if isinstance(action, argparse._StoreTrueAction):  # noqa: SLF001
            defaults[key] = raw.lower() in ("1", "true", "yes")
            continue
        try:
            value = action.type(raw) if action.type else raw
        except ValueError as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"config key {key!r} must be one of {list(action.choices)}")
        defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _run_config(args) -> RunConfig:
    return RunConfig(args.hbar, args.mass, args.length, args.J_max, args.n_points,
                     args.output_format, args.output_path)


def cmd_eigen(args, cfg: RunConfig):
    depth = cfg.J_max or 10
    grid = Grid(cfg.length, cfg.n_points)
    chain = factorization.FactorChain(cfg.units, max(depth, factorization.DEFAULT_J_MAX))
    rows, ok = [], True
    for j in range(1, depth + 1):
        pair = factorization.eigenpair_chain(j, grid, chain, extended=not args.double)
        rayleigh = factorization.rayleigh_quotient(pair.psi, cfg.units)
        rel = abs(rayleigh / pair.energy - 1.0)
        ok &= rel <= EIGEN_RAYLEIGH_TOL
        err = l2_distance(pair.psi, factorization.exact_eigenfunction(j, grid))
        rows.append({"j": j, "energy": pair.energy, "energy_rayleigh": rayleigh,
                     "rayleigh_rel_error": rel, "psi_l2_error": err})
    return rows, ok


def _check_row(name, value, expected, tol):
    passed = abs(value - expected) <= tol
    return {"check": name, "value": float(value), "expected": float(expected),
            "tolerance": float(tol), "pass": bool(passed)}


def cmd_ladder_check(args, cfg: RunConfig):
    J = cfg.J_max or su11.DEFAULT_J_MAX
    kp, km, k0 = su11.ladder_matrices(J)
    inner = slice(0, J - 1)

    def edge_max(a):
        return float(np.abs(a[inner, inner]).max())

    rows = [
        _check_row("[K-,K+]-2K0", edge_max((su11.commutator(km, kp) - 2 * k0).entries), 0, 0),
        _check_row("[K0,K+]-K+", edge_max((su11.commutator(k0, kp) - kp).entries), 0, 0),
        _check_row("[K0,K-]+K-", edge_max((su11.commutator(k0, km) + km).entries), 0, 0),
    ]
    forms = su11.hamiltonian_forms(J, cfg.units)
    for name in ("antinormal", "symmetric"):
        rows.append(_check_row(f"H_normal-H_{name}",
                               edge_max(forms["normal"] - forms[name]), 0, 0))
    rows.append(_check_row("adjoint_defect", su11.adjoint_defect(J), 1, 0))

    grid = Grid(cfg.length, cfg.n_points)
    levels = min(args.levels, J - 2)
    raise_err = lower_err = cross_err = 0.0
    for j in range(1, levels + 1):
        psi = factorization.exact_eigenfunction(j, grid)
        up = su11.sin_times_angular_ladder(j, psi, dagger=True)
        raise_err = max(raise_err, l2_distance(up, factorization.exact_eigenfunction(j + 1, grid) * j))
        down = su11.sin_times_angular_ladder(j, psi, dagger=False)
        target = factorization.exact_eigenfunction(j - 1, grid) * j if j > 1 else psi * 0.0
        lower_err = max(lower_err, l2_distance(down, target))
        coords = su11.level_coordinates(su11.apply_position_ladder(psi, "raise", j), J)
        expected = kp @ su11.LevelVector.basis(j, J)
        cross_err = max(cross_err, float(np.abs(coords.coeffs - expected.coeffs).max()))
    rows += [
        _check_row("sin*A_dagger psi_j - j psi_j+1", raise_err, 0, LADDER_TOL),
        _check_row("sin*A psi_j - j psi_j-1", lower_err, 0, LADDER_TOL),
        _check_row("grid K+ vs matrix K+", cross_err, 0, LADDER_TOL),
    ]
    return rows, all(r["pass"] for r in rows)


def cmd_coherent(args, cfg: RunConfig):
    if args.report == "moments":
        rows = []
        for j in range(coherent.MOMENT_MAX_J + 1):
            lhs, rhs = coherent.moment_check(j)
            rows.append({"j": j, "lhs": lhs, "rhs": rhs, "rel_error": abs(lhs / rhs - 1.0)})
        return rows, all(r["rel_error"] <= IDENTITY_TOL for r in rows)
    spec = coherent.CoherentSpec(args.family, args.alpha, cfg.J_max or su11.DEFAULT_J_MAX,
                                 args.tail_tol)
    state = coherent.coherent_state(spec)
    rows = [{"level": k + 1, "re": float(c.real), "im": float(c.imag),
             "probability": float(abs(c) ** 2)} for k, c in enumerate(state.coeffs)]
    return rows, True


def cmd_identity_check(args, cfg: RunConfig):
    diag = coherent.identity_resolution_diag(args.levels, args.radial_points)
    rows = []
    for j, d in enumerate(diag):
        lhs, rhs = coherent.moment_check(j)
        rows.append({"level": j + 1, "moment_lhs": lhs, "moment_rhs": rhs,
                     "moment_rel_error": abs(lhs / rhs - 1.0), "diagonal": d,
                     "diagonal_error": abs(d - 1.0)})
    worst = max((max(r["moment_rel_error"], r["diagonal_error"]) for r in rows), default=0.0)
    return rows, worst <= IDENTITY_TOL


def cmd_metrics(args, cfg: RunConfig):
    family = args.family
    default_a = nonclassical.SWEEP_RANGE[family]
    lo = -default_a if args.alpha_min is None else args.alpha_min
    hi = default_a if args.alpha_max is None else args.alpha_max
    if args.steps < 0 or lo > hi:
        raise ValueError("need steps >= 0 and alpha-min <= alpha-max")
    if lo == -hi and args.steps % 2 == 1:
        alphas = nonclassical.default_alphas(family, args.steps, hi)
    else:
        alphas = np.linspace(lo, hi, args.steps)
    points = nonclassical.metric_sweep(family, alphas, cfg.J_max)
    rows = [p.as_row() for p in points]
    if cfg.output_format == "json":
        # JSON carries the flags as a list per point
        rows = [{**r, "flags": list(p.flags)} for r, p in zip(rows, points)]
    return rows, True


METRIC_COLUMNS = ["alpha", "s_x1", "s_y1", "s_x2", "s_y2", "mandel_q", "flags"]


def cmd_jc(args, cfg: RunConfig):
    jc = jcsim.JCConfig(args.drive, args.coupling, args.phi, args.t,
                        cfg.J_max or jcsim.DEFAULT_J_MAX, args.propagator)
    psi0 = jcsim.initial_state(jc.J_max)
    state = jcsim.propagate(jc, psi0)
    other = jcsim.exact_propagator(jc, psi0) if jc.propagator == "factored" \
        else jcsim.factored_propagator(jc, psi0)
    probs = jcsim.outcome_probabilities(state)
    a = jc.alpha_eff
    gp_plus = jcsim.gp_reference(a, jc.J_max)
    gp_minus = jcsim.gp_reference(-a, jc.J_max)
    row = {
        "propagator": jc.propagator, "coupling_ratio": jc.coupling_ratio,
        "alpha_eff_re": a.real, "alpha_eff_im": a.imag,
        "xi_re": jc.xi.real, "xi_im": jc.xi.imag,
        "p_e": probs["e"], "p_g": probs["g"],
    }
    for outcome in ("e", "g"):
        try:
            field = jcsim.conditional_field_state(state, outcome)
            row[f"fidelity_{outcome}_gp_plus"] = jcsim.fidelity(field, gp_plus)
            row[f"fidelity_{outcome}_gp_minus"] = jcsim.fidelity(field, gp_minus)
        except jcsim.ZeroProbabilityOutcome:
            row[f"fidelity_{outcome}_gp_plus"] = row[f"fidelity_{outcome}_gp_minus"] = float("nan")
    row["fidelity_factored_exact"] = jcsim.fidelity(state, other)
    row["norm_defect"] = abs(state.norm() - 1.0)
    return [row], True


COMMANDS = {
    "eigen": cmd_eigen,
    "ladder-check": cmd_ladder_check,
    "coherent": cmd_coherent,
    "identity-check": cmd_identity_check,
    "metrics": cmd_metrics,
    "jc": cmd_jc,
}


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        cfg = _run_config(args)
        rows, ok = COMMANDS[args.command](args, cfg)
        columns = METRIC_COLUMNS if args.command == "metrics" else None
        emit_table(rows, cfg.output_format, cfg.output_path, columns)
    except UsageError as exc:
        sys.stderr.write(str(exc).rstrip("\n") + "\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"well-ladder: error: {exc}\n")
        return EXIT_USAGE
    except ArithmeticError as exc:  # blowup, leak, nonconvergence
        sys.stderr.write(f"well-ladder: numerical failure: {exc}\n")
        return EXIT_TOLERANCE
    if not ok:
        sys.stderr.write(f"well-ladder: {args.command}: tolerance check failed\n")
        return EXIT_TOLERANCE
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
