"""Command-line front end.

Every subcommand emits one JSON document (sorted keys, versioned schema)
on stdout and optionally to ``--output-path``.  Exit codes: 0 all checks
pass, 1 a mathematical invariant failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .config import DEFAULT_SAMPLE_COUNT, DEFAULT_SEED, SCHEMA, TOL
from .errors import ConjugatePair, InconsistentVerdict, QTwistError
from .quaternion import (
    BASIS,
    ComplexifiedQuaternion,
    Quaternion,
    embedding_from_u,
    matrix_iso,
    orientation_selfcheck,
)

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    example_id: str = "flat1"
    grid_resolution: int = 5
    zeta_sample_set: Union[str, list] = "default"
    tol_vanish: float = TOL.vanish
    tol_nonzero: float = TOL.nonzero
    fd_step: float = TOL.fd_step
    sample_count: int = DEFAULT_SAMPLE_COUNT
    output_path: Optional[str] = None
    seed: int = DEFAULT_SEED
    p1: list = field(default_factory=lambda: [1.0, 0.0, 0.0])
    p2: list = field(default_factory=lambda: [0.0, 1.0, 0.0])

    def validate(self) -> "RunConfig":
        if self.grid_resolution < 2:
            raise UsageError(f"grid_resolution must be >= 2, got {self.grid_resolution}")
        if not 0 < self.tol_vanish < self.tol_nonzero / 10:
            raise UsageError("need 0 < tol_vanish < tol_nonzero / 10")
        if self.fd_step <= 0:
            raise UsageError("fd_step must be positive")
        if self.sample_count < 8:
            raise UsageError("sample_count must be at least 8")
        self.zetas()
        return self

    def zetas(self) -> list[complex]:
        from .twistor import ZETA_PRESETS

        if isinstance(self.zeta_sample_set, str):
            if self.zeta_sample_set in ZETA_PRESETS:
                return list(ZETA_PRESETS[self.zeta_sample_set]())
            raise UsageError(f"unknown zeta preset {self.zeta_sample_set!r}; known: {', '.join(ZETA_PRESETS)}")
        return [complex(z) for z in self.zeta_sample_set]


# ---------------------------------------------------------------- parsing helpers


def _parse_floats(text: str, n: Optional[int] = None, what: str = "point") -> list[float]:
    try:
        vals = [float(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise UsageError(f"malformed {what}: {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers, got {len(vals)}")
    if not all(np.isfinite(vals)):
        raise UsageError(f"non-finite {what}: {text!r}")
    return vals


def _parse_zetas(text: str):
    from .twistor import ZETA_PRESETS

    if text in ZETA_PRESETS:
        return text
    try:
        zs = [complex(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"zeta sample set must be a preset or a comma list of complex numbers: {text!r}") from None
    if not zs or not all(np.isfinite(z) for z in zs):
        raise UsageError(f"bad zeta sample set {text!r}")
    return zs


def _entry(example_id: str):
    from .gallery import get_entry

    try:
        return get_entry(example_id)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def _embedding(u: list[float]):
    if np.linalg.norm(u) < 1e-12:
        raise UsageError("embedding vector must be nonzero")
    return embedding_from_u(np.asarray(u) / np.linalg.norm(u))


def emit(doc: dict, output_path: Optional[str] = None) -> str:
    text = json.dumps(dict(doc, schema=SCHEMA), sort_keys=True, indent=2, default=_json_default) + "\n"
    sys.stdout.write(text)
    if output_path:
        with open(output_path, "w") as fh:
            fh.write(text)
    return text


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not serialisable: {type(obj).__name__}")


# ---------------------------------------------------------------- commands


def cmd_verify(config: RunConfig) -> int:
    from .geometry import smoothness_defect
    from .twistor import verify_theorem

    config.validate()
    entry = _entry(config.example_id)
    p1, p2 = _embedding(config.p1), _embedding(config.p2)
    try:
        report = verify_theorem(
            entry.chart,
            p1,
            p2,
            grid_resolution=config.grid_resolution,
            zetas=config.zetas(),
            tol_vanish=config.tol_vanish,
            tol_nonzero=config.tol_nonzero,
            seed=config.seed,
            probe_points=entry.probe_points,
            example_id=entry.id,
        )
    except ConjugatePair as exc:
        raise UsageError(str(exc)) from None
    except InconsistentVerdict as exc:
        emit({"command": "verify", "verdict": "INCONSISTENT", "error": str(exc), "diagnostics": exc.diagnostics},
             config.output_path)
        return EXIT_INVARIANT
    # dual-number derivatives against central differences, probes only
    defect = max(smoothness_defect(entry.chart.fields, x, config.fd_step) for x in entry.probe_points)
    fd_ok = defect < 1e-6
    report["fd_crosscheck"] = {"fd_step": config.fd_step, "max_defect": defect, "tolerance": 1e-6, "pass": fd_ok}
    report["expected_hypercomplex"] = entry.expected_hypercomplex
    report["command"] = "verify"
    if not fd_ok and report["verdict"] == "PASS":
        report["verdict"] = "FAIL"
    emit(report, config.output_path)
    return EXIT_OK if report["verdict"] == "PASS" else EXIT_INVARIANT


def cmd_localize(module_spec: str, sample_count: int = DEFAULT_SAMPLE_COUNT, output_path: Optional[str] = None) -> int:
    from .hmodule import localization_report, module_from_spec

    try:
        V = module_from_spec(module_spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = localization_report(V, sample_count=sample_count)
    weight_one = all(a == 1 for a in report["splitting_type"])
    report.update(command="localize", module_spec=module_spec, sample_count=sample_count, weight_one=weight_one)
    emit(report, output_path)
    return EXIT_OK if weight_one else EXIT_INVARIANT


def cmd_linefit(config: RunConfig, base_point: Optional[Sequence[float]] = None) -> int:
    from .twistor import line_check, line_restriction, twistor_acs

    config.validate()
    entry = _entry(config.example_id)
    M = entry.chart
    m = M.center if base_point is None else np.asarray(base_point, dtype=float)
    if not M.contains(m):
        raise UsageError(f"base point {list(map(float, m))} outside the chart domain of {entry.id}")
    zetas = config.zetas()
    T = twistor_acs(M)
    try:
        fit, check = line_check(T, m, zetas, (_embedding(config.p1), _embedding(config.p2)), config.tol_vanish)
    except QTwistError as exc:
        raise UsageError(str(exc)) from None
    ok = fit.relative_residual < TOL.fit_relative and fit.passed and check["holds"]
    report = {
        "command": "linefit",
        "example_id": entry.id,
        "base_point": [float(t) for t in m],
        "zeta_samples": [[z.real, z.imag] for z in zetas],
        "max_deg3_residual": fit.relative_residual,
        "tolerance": TOL.fit_relative,
        "data_scale": fit.scale,
        "zero_function": fit.is_zero,
        "deg2_separated": fit.separated,
        "four_zero_check": check,
        "pass": bool(ok),
    }
    if not ok:
        lr = line_restriction(T, m, zetas)
        report["sample_dump"] = [
            {"zeta": [z.real, z.imag], "re": e.real.tolist(), "im": e.imag.tolist()}
            for z, e in zip(zetas, lr.entries())
        ]
    emit(report, config.output_path)
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_gallery(output_path: Optional[str] = None) -> int:
    from .gallery import listing

    emit({"command": "gallery", "entries": listing()}, output_path)
    return EXIT_OK


def basis_table() -> dict:
    """Images of 1, i, j, k and the complex unit under the matrix isomorphism."""
    names = ["1", "i", "j", "k"]
    table = {}
    for name, q in zip(names, BASIS):
        m = matrix_iso(ComplexifiedQuaternion(q, Quaternion()))
        table[name] = [[[float(c.real), float(c.imag)] for c in row] for row in m]
    m = matrix_iso(ComplexifiedQuaternion(Quaternion(), BASIS[0]))
    table["sqrt(-1)"] = [[[float(c.real), float(c.imag)] for c in row] for row in m]
    return table


def cmd_selfcheck(output_path: Optional[str] = None) -> int:
    try:
        orient = orientation_selfcheck()
        ok = bool(orient["pass"])
    except QTwistError as exc:
        orient, ok = {"error": str(exc), "pass": False}, False
    emit({"command": "selfcheck", "orientation": orient, "matrix_iso_basis": basis_table(), "pass": ok}, output_path)
    return EXIT_OK if ok else EXIT_INVARIANT


# ---------------------------------------------------------------- argparse


def _run_options(p: argparse.ArgumentParser, with_grid: bool = True):
    p.add_argument("--example", "--example-id", dest="example_id", default="flat1")
    if with_grid:
        p.add_argument("--grid-resolution", "--grid", dest="grid_resolution", type=int, default=5)
    p.add_argument("--zeta-sample-set", dest="zeta_sample_set", default="default",
                   help="preset name (default, dense16) or comma list of complex numbers")
    p.add_argument("--tol-vanish", type=float, default=TOL.vanish)
    p.add_argument("--tol-nonzero", type=float, default=TOL.nonzero)
    p.add_argument("--fd-step", type=float, default=TOL.fd_step)
    p.add_argument("--sample-count", type=int, default=DEFAULT_SAMPLE_COUNT)
    p.add_argument("--output-path", "--output", dest="output_path", default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--p1", default="1,0,0", help="first embedding as a u-vector x,y,z")
    p.add_argument("--p2", default="0,1,0", help="second embedding as a u-vector x,y,z")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtwist", description="Quaternionic twistor verification runs.")
    sub = parser.add_subparsers(dest="command", required=True)
    _run_options(sub.add_parser("verify", help="cross-check integrability against the twistor structure"))
    lf = sub.add_parser("linefit", help="polynomial fit of N_X along one twistor line")
    _run_options(lf, with_grid=False)
    lf.add_argument("--base-point", default=None, help="comma-separated chart point (default: chart center)")
    lo = sub.add_parser("localize", help="localization of H or H2 over CP^1")
    lo.add_argument("module_spec")
    lo.add_argument("--sample-count", type=int, default=DEFAULT_SAMPLE_COUNT)
    lo.add_argument("--output-path", "--output", dest="output_path", default=None)
    for name, text in (("gallery", "list gallery entries"), ("selfcheck", "orientation and matrix table")):
        sub.add_parser(name, help=text).add_argument("--output-path", "--output", dest="output_path", default=None)
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        example_id=args.example_id,
        grid_resolution=getattr(args, "grid_resolution", 5),
        zeta_sample_set=_parse_zetas(args.zeta_sample_set),
        tol_vanish=args.tol_vanish,
        tol_nonzero=args.tol_nonzero,
        fd_step=args.fd_step,
        sample_count=args.sample_count,
        output_path=args.output_path,
        seed=args.seed,
        p1=_parse_floats(args.p1, 3, "p1"),
        p2=_parse_floats(args.p2, 3, "p2"),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            return cmd_verify(_config(args))
        if args.command == "linefit":
            point = None if args.base_point is None else _parse_floats(args.base_point, what="base point")
            return cmd_linefit(_config(args), point)
        if args.command == "localize":
            if args.sample_count < 8:
                raise UsageError("sample_count must be at least 8")
            return cmd_localize(args.module_spec, args.sample_count, args.output_path)
        if args.command == "gallery":
            return cmd_gallery(args.output_path)
        return cmd_selfcheck(args.output_path)
    except UsageError as exc:
        print(f"qtwist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QTwistError as exc:
        print(f"qtwist: invariant violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
