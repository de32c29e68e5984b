"""Command-line front end.

    rindler-dirac spectrum --a 0.01,0.02,0.03 --m 1 --s -1 --nmax 5
    rindler-dirac wavefunction --a 0.01 --grid -2000:500:4000
    rindler-dirac compare --a 0.01 --s -1,1
    rindler-dirac potential --a 0.01
    rindler-dirac validate --json -

Exit codes: 0 success, 2 usage error, 3 solver or validation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, svg
from .analysis import (
    SPECTRUM_TOL,
    analytic_report,
    compare_spectra,
    render_csv,
    truncation_error_report,
    wavefunction_dataset,
)
from .geometry import RindlerFrame, conformal_to_proper
from .numeric import Grid, SolverError
from .reduction import Kind, OscillatorForm, Sector, build_mass_function, effective_potential

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 2, 3
OUT_ENV = "RINDLER_DIRAC_OUT"
COMMANDS = ("spectrum", "wavefunction", "compare", "potential", "validate")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    a: list[float]
    m: float
    s: list[int]
    kind: str
    nmax: int
    grid: str
    out: str
    formats: list[str]
    numeric: bool = True
    tolerance: float = SPECTRUM_TOL
    json_path: str | None = None

    def grid_for(self, frame: RindlerFrame) -> Grid:
        if self.grid == "auto":
            return Grid.auto(frame)
        lo, hi, n = self.grid.split(":")
        return Grid(float(lo), float(hi), int(n))


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _sector_list(text: str) -> list[int]:
    try:
        return [int(Sector.parse(v.strip())) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def read_config_file(path: str) -> dict[str, str]:
    """key=value lines; '#' starts a comment."""
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rindler-dirac", description="Dirac fermions in the Rindler frame")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value file merged under the flags")
        p.add_argument("--a", default=None, help="comma-separated accelerations")
        p.add_argument("--m", default=None, help="particle mass (default 1)")
        p.add_argument("--s", default=None, help="comma-separated sectors, +1 and/or -1")
        p.add_argument("--kind", default=None, choices=[k.value for k in Kind])
        p.add_argument("--nmax", default=None, help="highest level index")
        p.add_argument("--grid", default=None, help="'auto' or lo:hi:N in conformal x")
        p.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or .)")
        p.add_argument("--format", default=None, help="comma-separated subset of csv,json,svg")
        if name == "spectrum":
            p.add_argument("--no-numeric", action="store_true", help="closed-form columns only")
        if name == "validate":
            p.add_argument("--tolerance", default=None, help="relative tolerance of the spectrum comparison")
            p.add_argument("--json", dest="json_path", default=None, help="write the report here ('-' for stdout)")
    return parser


_DEFAULTS = {
    "spectrum": {"a": "0.01,0.02,0.03", "s": "-1", "nmax": "5", "format": "csv,svg"},
    "wavefunction": {"a": "0.01", "s": "-1", "nmax": "3", "format": "csv,svg"},
    "compare": {"a": "0.01", "s": "-1,1", "nmax": "3", "format": "csv,json"},
    "potential": {"a": "0.01", "s": "-1,1", "nmax": "3", "format": "csv,svg"},
    "validate": {"a": "0.01,0.02,0.03", "s": "-1,1", "nmax": "3", "format": "json"},
}


def make_config(args: argparse.Namespace) -> RunConfig:
    merged = {"m": "1", "kind": "harmonic", "grid": "auto", **_DEFAULTS[args.command]}
    if args.config:
        merged.update(read_config_file(args.config))
    for key in ("a", "m", "s", "kind", "nmax", "grid", "out", "format", "tolerance"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    out = merged.get("out") or os.environ.get(OUT_ENV) or "."
    try:
        m = float(merged["m"])
        nmax = int(merged["nmax"])
        tolerance = float(merged.get("tolerance", SPECTRUM_TOL))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cfg = RunConfig(
        command=args.command,
        a=_float_list(merged["a"]),
        m=m,
        s=_sector_list(merged["s"]),
        kind=str(merged["kind"]),
        nmax=nmax,
        grid=str(merged["grid"]),
        out=out,
        formats=[f.strip() for f in str(merged["format"]).split(",") if f.strip()],
        numeric=not getattr(args, "no_numeric", False),
        tolerance=tolerance,
        json_path=getattr(args, "json_path", None),
    )
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: RunConfig) -> None:
    if not cfg.a:
        raise UsageError("--a needs at least one value")
    for a in cfg.a:
        if not (np.isfinite(a) and a > 0):
            raise UsageError(f"acceleration must be positive, got {a:g}")
    if not (np.isfinite(cfg.m) and cfg.m > 0):
        raise UsageError(f"mass must be positive, got {cfg.m:g}")
    if cfg.nmax < 0:
        raise UsageError("--nmax must be non-negative")
    if not cfg.s:
        raise UsageError("--s needs at least one sector")
    try:
        Kind.parse(cfg.kind)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    bad = set(cfg.formats) - {"csv", "json", "svg"}
    if bad:
        raise UsageError(f"unknown output format(s): {', '.join(sorted(bad))}")
    if cfg.grid != "auto":
        parts = cfg.grid.split(":")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if len(parts) != 3:
                raise ValueError
            Grid(lo, hi, n)
        except (ValueError, IndexError):
            raise UsageError(f"--grid must be 'auto' or lo:hi:N with lo < hi and N >= 3, got {cfg.grid!r}") from None
    if cfg.command == "spectrum" and cfg.numeric and Kind.parse(cfg.kind) is not Kind.HARMONIC:
        raise UsageError("spectrum compares against the closed form, which exists only for --kind harmonic")
    if cfg.tolerance <= 0:
        raise UsageError("--tolerance must be positive")


def _metadata(cfg: RunConfig, **extra) -> dict:
    return {"program": f"rindler-dirac {__version__}", "config": asdict(cfg), **extra}


def _tag(a: float, s: int | None = None) -> str:
    return f"{a:g}" if s is None else f"{a:g}_{s:+d}"


# ---------------------------------------------------------------------------
# commands; each returns {filename: text} and writes nothing itself


def cmd_spectrum(cfg: RunConfig) -> dict[str, str]:
    files = {}
    panel = svg.Panel("energy levels", "n", "eps")
    for a in cfg.a:
        frame = RindlerFrame(a, cfg.m)
        for s in cfg.s:
            if cfg.numeric:
                rep = compare_spectra(frame, s, cfg.nmax, cfg.grid_for(frame), tolerance=cfg.tolerance)
                if not rep.passed:
                    raise SolverError(f"a={a:g}, s={s:+d}: " + "; ".join(rep.failures))
            else:
                rep = analytic_report(frame, s, cfg.nmax)
            if "csv" in cfg.formats:
                files[f"spectrum_{_tag(a, s)}.csv"] = rep.to_csv(_metadata(cfg))
            if "json" in cfg.formats:
                files[f"spectrum_{_tag(a, s)}.json"] = _dump({**_metadata(cfg), "report": rep.to_dict()})
            ns = [r.n for r in rep.rows]
            eps = [r.eps_analytic for r in rep.rows]
            panel.add(ns + ns, eps + [-e for e in eps], label=f"a={a:g}, s={s:+d}", points=True)
    if "svg" in cfg.formats:
        files["spectrum.svg"] = svg.render([panel], comment=json.dumps(_metadata(cfg), sort_keys=True))
    return files


def cmd_wavefunction(cfg: RunConfig) -> dict[str, str]:
    files = {}
    panels = [svg.Panel(f"n = {n}", "x", "g(x)") for n in range(cfg.nmax + 1)]
    for a in cfg.a:
        frame = RindlerFrame(a, cfg.m)
        grid = cfg.grid_for(frame)
        for n in range(cfg.nmax + 1):
            ds = wavefunction_dataset(frame, n, grid)
            name = f"wf_n{n}.csv" if len(cfg.a) == 1 else f"wf_a{_tag(a)}_n{n}.csv"
            meta = _metadata(cfg, a=a, m=cfg.m, n=n, norm=ds.norm, nodes=ds.nodes, b_upper=ds.b_upper,
                             b_lower=ds.b_lower, decay_markers_y=list(ds.decay_markers),
                             grid={"x_min": grid.x_min, "x_max": grid.x_max, "n": grid.n})
            if "csv" in cfg.formats:
                files[name] = render_csv(["x", "xi", "y", "g", "f"], ds.rows(), meta)
            panels[n].add(ds.x, ds.g, label=f"a={a:g}")
    if "svg" in cfg.formats:
        files["wavefunction.svg"] = svg.render(panels, columns=2, comment=json.dumps(_metadata(cfg), sort_keys=True))
    return files


def cmd_compare(cfg: RunConfig) -> dict[str, str]:
    files = {}
    for a in cfg.a:
        frame = RindlerFrame(a, cfg.m)
        for s in cfg.s:
            rep = truncation_error_report(frame, s, cfg.grid_for(frame), cfg.nmax + 1)
            if "csv" in cfg.formats:
                files[f"truncation_{_tag(a, s)}.csv"] = rep.to_csv(_metadata(cfg))
            if "json" in cfg.formats:
                files[f"truncation_{_tag(a, s)}.json"] = _dump({**_metadata(cfg), "report": rep.to_dict()})
    return files


def cmd_potential(cfg: RunConfig) -> dict[str, str]:
    files = {}
    for a in cfg.a:
        frame = RindlerFrame(a, cfg.m)
        grid = cfg.grid_for(frame)
        x = grid.points
        y = OscillatorForm(frame, Sector.LOWER).y(x)
        panels = []
        for s in cfg.s:
            v = {k: effective_potential(build_mass_function(frame, k), s)(x) for k in Kind}
            rows = [list(r) for r in zip(x, conformal_to_proper(x, frame), y, v[Kind.EXACT], v[Kind.HARMONIC])]
            if "csv" in cfg.formats:
                files[f"potential_{_tag(a, s)}.csv"] = render_csv(
                    ["x", "xi", "y", "v_exact", "v_harmonic"], rows, _metadata(cfg, a=a, s=s))
            panels.append(svg.Panel(f"V, a={a:g}, s={s:+d}", "x", "V(x)")
                          .add(x, v[Kind.EXACT], "exact").add(x, v[Kind.HARMONIC], "harmonic"))
        if "svg" in cfg.formats:
            files[f"potential_{_tag(a)}.svg"] = svg.render(panels, columns=2,
                                                         comment=json.dumps(_metadata(cfg), sort_keys=True))
    return files


def cmd_validate(cfg: RunConfig) -> tuple[dict, int]:
    from .validation import run_all

    checks = run_all(tolerance=cfg.tolerance)
    passed = all(c["passed"] for c in checks)
    report = {**_metadata(cfg), "passed": passed, "checks": checks}
    return report, EXIT_OK if passed else EXIT_SOLVER


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _prepare_out(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc}") from None
    if not os.access(out, os.W_OK):
        raise UsageError(f"output directory {out} is not writable")
    return out


VALUE_FLAGS = ("--config", "--a", "--m", "--s", "--kind", "--nmax", "--grid", "--out", "--format", "--tolerance", "--json")


def _join_values(argv: list[str]) -> list[str]:
    """Glue values such as '-1,1' or '-2000:500:4000' to their flag so argparse keeps them."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1] != "-":
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        cfg = make_config(args)
        streaming = cfg.command == "validate" and cfg.json_path == "-"
        out = None if streaming else _prepare_out(cfg.out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"rindler-dirac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if cfg.command == "validate":
            report, code = cmd_validate(cfg)
            text = _dump(report)
            if streaming:
                sys.stdout.write(text)
            else:
                target = Path(cfg.json_path) if cfg.json_path else out / "validate.json"
                target.write_text(text, encoding="utf-8")
                print(target)
            for c in report["checks"]:
                status = "PASS" if c["passed"] else "FAIL"
                detail = f": {c['detail']}" if not c["passed"] and c["detail"] else ""
                print(f"{status} {c['name']}{detail}", file=sys.stderr)
            return code
        handler = {"spectrum": cmd_spectrum, "wavefunction": cmd_wavefunction,
                   "compare": cmd_compare, "potential": cmd_potential}[cfg.command]
        files = handler(cfg)
    except (SolverError, ValueError) as exc:
        print(f"rindler-dirac: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8", newline="\n")
    for name in files:
        print(out / name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
