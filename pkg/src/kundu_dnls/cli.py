"""Command-line surface: generate solution grids, verify, analyze patterns.

Exit codes: 0 success, 2 invalid configuration, 3 I/O failure,
4 verification failure.  Artifacts are byte-deterministic: floats are
written with 17 significant digits, lowercase exponent, LF line endings.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, catalog
from .darboux import DegenerationSpec, build_reduced_set, degenerate_limit, n_fold
from .errors import InvalidConfigError, IOFailureError
from .lax import PhasePolynomial, make_plane_wave_seed, zero_seed
from .numerics.grid import ComplexField2D, Grid2D, sample
from .verify import peak_analysis

SOLUTIONS = {
    "soliton1": dict(m1=1.0, n1=2.0, alpha=1.0, theta_p=1.0, theta_q=1.0),
    "soliton2": dict(m1=0.7, n1=0.3, m2=0.5, n2=0.5, alpha=1.0, theta_p=1.0, theta_q=1.0),
    "positon": dict(re1=0.8, im1=0.8, alpha=1.0, theta_p=1.0, theta_q=1.0),
    "breather": dict(),
    "rogue1": dict(),
    "rogue2": dict(S0=0.0, S1=0.0, S2=0.0, eps=2e-3),
    "rogue3": dict(S0=0.0, S1=0.0, S2=0.0, eps=2e-3),
    "engine-nfold": dict(seed="zero", a=-2.0, c=1.0, alpha=1.0, theta_p=1.0, theta_q=1.0,
                         lam1_re=1.0, lam1_im=2.0, lam2_re=None, lam2_im=None,
                         lam3_re=None, lam3_im=None),
    "engine-degenerate": dict(seed="planewave", a=-2.0, c=1.0, alpha=1.0,
                              theta_p=1.0, theta_q=1.0, lc_re=1.0, lc_im=1.0,
                              n=1, eps=1e-2, S0=0.0, S1=0.0, S2=0.0),
}

# one documented invocation per mapped figure (see README for the table)
FIGURE_MAP = {
    "fig1": ("soliton1", {}, "-3:3:201,-1:1:201"),
    "fig2": ("soliton2", {}, "-10:10:201,-10:10:201"),
    "fig3": ("positon", {}, "-10:10:201,-10:10:201"),
    "fig4": ("breather", {}, "-5:5:201,-3:3:201"),
    "fig5": ("rogue1", {}, "-4:4:201,-4:4:201"),
    "fig6": ("rogue2", {}, "-4:4:201,-4:4:201"),
    "fig7": ("rogue2", {"S1": 500.0}, "-30:30:401,-30:30:401"),
    "fig8": ("rogue3", {}, "-6:6:201,-6:6:201"),
    "fig9": ("rogue3", {"S1": 500.0, "eps": 4e-3}, "-40:40:401,-40:40:401"),
    "fig10": ("rogue3", {"S2": 1000.0, "eps": 4e-3}, "-25:25:401,-25:25:401"),
}


def parse_grid(spec: str) -> Grid2D:
    """Parse 'xmin:xmax:nx,tmin:tmax:nt'."""
    try:
        xpart, tpart = spec.split(",")
        x0, x1, nx = xpart.split(":")
        t0, t1, nt = tpart.split(":")
        return Grid2D(float(x0), float(x1), float(t0), float(t1), int(nx), int(nt))
    except (ValueError, TypeError) as exc:
        raise InvalidConfigError(f"bad grid spec {spec!r}: {exc}") from None


def _parse_params(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise InvalidConfigError(f"--param expects key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        out[key] = val
    return out


def resolve_params(solution: str, raw: dict) -> dict:
    if solution not in SOLUTIONS:
        raise InvalidConfigError(f"unknown solution {solution!r}; "
                                 f"choose from {sorted(SOLUTIONS)}")
    schema = SOLUTIONS[solution]
    unknown = set(raw) - set(schema)
    if unknown:
        raise InvalidConfigError(f"unknown parameter(s) {sorted(unknown)} for {solution}; "
                                 f"valid keys: {sorted(schema)}")
    params = dict(schema)
    for key, val in raw.items():
        if key == "seed":
            if val not in ("zero", "planewave"):
                raise InvalidConfigError("seed must be 'zero' or 'planewave'")
            params[key] = val
        elif key == "n":
            params[key] = int(val)
        else:
            params[key] = float(val)
    return params


def _make_seed(params: dict):
    if params.get("seed", "planewave") == "zero":
        return zero_seed(params.get("alpha", 1.0), params.get("theta_p", 1.0),
                         params.get("theta_q", 1.0))
    return make_plane_wave_seed(params.get("a", -2.0), params.get("c", 1.0),
                                params.get("alpha", 1.0), params.get("theta_p", 1.0),
                                params.get("theta_q", 1.0))


def build_field(solution: str, params: dict, precision: str):
    """Vectorized (x, t) -> complex closure for the requested solution."""
    if solution == "soliton1":
        return catalog.one_soliton(params["m1"], params["n1"], params["alpha"],
                                   params["theta_p"], params["theta_q"]).eval
    if solution == "soliton2":
        return catalog.two_soliton(params["m1"], params["n1"], params["m2"], params["n2"],
                                   params["alpha"], params["theta_p"], params["theta_q"]).eval
    if solution == "positon":
        return catalog.positon(params["re1"], params["im1"], params["alpha"],
                               params["theta_p"], params["theta_q"]).eval
    if solution == "breather":
        return catalog.breather().eval
    if solution == "rogue1":
        return catalog.rogue1().eval
    if solution in ("rogue2", "rogue3"):
        order = 2 if solution == "rogue2" else 3
        if order == 2 and params["S0"] == params["S1"] == params["S2"] == 0.0:
            return catalog.rogue2().eval
        seed = make_plane_wave_seed(-2.0, 1.0, 1.0)
        spec = DegenerationSpec(lambda_c=1 + 1j, epsilon=params["eps"], n=order,
                                phases=PhasePolynomial(params["S0"], params["S1"],
                                                       params["S2"]))
        kw = {} if precision == "auto" else {"precision": precision}
        return degenerate_limit(spec, seed, **kw).Q
    if solution == "engine-nfold":
        seed = _make_seed(params)
        lams = []
        for k in (1, 2, 3):
            re, im = params.get(f"lam{k}_re"), params.get(f"lam{k}_im")
            if re is not None and im is not None:
                lams.append(complex(re, im))
        if not lams:
            raise InvalidConfigError("engine-nfold needs at least lam1_re/lam1_im")
        sset = build_reduced_set(lams, seed)
        kw = {} if precision == "auto" else {"precision": precision}
        return n_fold(sset, seed, **kw).Q
    if solution == "engine-degenerate":
        seed = _make_seed(params)
        spec = DegenerationSpec(lambda_c=complex(params["lc_re"], params["lc_im"]),
                                epsilon=params["eps"], n=int(params["n"]),
                                phases=PhasePolynomial(params["S0"], params["S1"],
                                                       params["S2"]))
        kw = {} if precision == "auto" else {"precision": precision}
        return degenerate_limit(spec, seed, **kw).Q
    raise InvalidConfigError(f"unknown solution {solution!r}")


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if not np.isfinite(v):
            return '"%s"' % repr(float(v))
        return format(float(v), ".17g")
    raise TypeError(f"unexpected scalar {type(v)}")


def json_text(obj) -> str:
    """JSON with fixed float formatting (17 significant digits, lowercase e)."""
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(k)}:{json_text(v)}" for k, v in sorted(obj.items()))
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(json_text(v) for v in obj) + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return _fmt(obj)


def write_csv(path: Path, grid: Grid2D, values: np.ndarray):
    xs, ts = grid.xs, grid.ts
    lines = ["x,t,intensity,re,im"]
    for j, t in enumerate(ts):           # x varies fastest within each t row block
        for i, x in enumerate(xs):
            v = values[i, j]
            lines.append(",".join(_fmt(float(w)) for w in
                                  (x, t, abs(v) ** 2, v.real, v.imag)))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_json(path: Path, grid: Grid2D, values: np.ndarray, params: dict,
               include_complex: bool):
    doc = {
        "params": params,
        "grid": dict(x_min=grid.x_min, x_max=grid.x_max, t_min=grid.t_min,
                     t_max=grid.t_max, nx=grid.nx, nt=grid.nt),
        "data": [[float(abs(values[i, j]) ** 2) for j in range(grid.nt)]
                 for i in range(grid.nx)],
    }
    if include_complex:
        doc["re"] = [[float(values[i, j].real) for j in range(grid.nt)]
                     for i in range(grid.nx)]
        doc["im"] = [[float(values[i, j].imag) for j in range(grid.nt)]
                     for i in range(grid.nx)]
    path.write_text(json_text(doc) + "\n", encoding="utf-8", newline="\n")


def write_pgm(path: Path, values: np.ndarray):
    I = np.abs(values) ** 2
    finite = I[np.isfinite(I)]
    top = finite.max() if finite.size and finite.max() > 0 else 1.0
    img = np.nan_to_num(I / top, nan=0.0, posinf=1.0, neginf=0.0)
    pix = np.round(255 * img.T[::-1]).astype(np.uint8)  # rows: t descending
    header = f"P5\n{pix.shape[1]} {pix.shape[0]}\n255\n".encode("ascii")
    path.write_bytes(header + pix.tobytes())


def _write_meta(output: Path, fmt: str, solution: str, params: dict, grid_spec: str,
                precision: str):
    meta = {
        "tool_version": __version__,
        "convention_variant": "nonlinear_sign=+1, v_conjugation=independent",
        "precision": precision,
        "solution": solution,
        "params": params,
        "grid": grid_spec,
        "format": fmt,
    }
    Path(str(output) + ".meta.json").write_text(json_text(meta) + "\n",
                                                encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _load_config(ns: argparse.Namespace) -> dict:
    merged = {}
    if ns.config:
        try:
            merged = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise IOFailureError(f"cannot read config {ns.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"config {ns.config} is not valid JSON: {exc}") from None
        if not isinstance(merged, dict):
            raise InvalidConfigError("config file must hold a JSON object")
    return merged


def _effective(ns: argparse.Namespace):
    cfg = _load_config(ns)
    solution = ns.solution or cfg.get("solution")
    grid_spec = ns.grid or cfg.get("grid")
    raw_params = dict(cfg.get("params", {}))
    raw_params.update(_parse_params(ns.param))
    figure = getattr(ns, "figure", None) or cfg.get("figure")
    if figure:
        if figure not in FIGURE_MAP:
            raise InvalidConfigError(f"unknown figure {figure!r}; choose from "
                                     f"{sorted(FIGURE_MAP)}")
        fig_solution, fig_params, fig_grid = FIGURE_MAP[figure]
        solution = solution or fig_solution
        grid_spec = grid_spec or fig_grid
        merged = {k: v for k, v in fig_params.items()}
        merged.update(raw_params)
        raw_params = merged
    if not solution:
        raise InvalidConfigError("no solution selected (use --solution or --figure)")
    if not grid_spec:
        raise InvalidConfigError("no grid given (use --grid min:max:n,min:max:n)")
    params = resolve_params(solution, raw_params)
    # explicit flag > environment override > config field > auto selection
    precision = (ns.precision or os.environ.get("KDNLS_PRECISION")
                 or cfg.get("precision") or "auto")
    if precision not in ("auto", "double", "extended"):
        raise InvalidConfigError(f"precision must be double or extended, got {precision!r}")
    return solution, params, parse_grid(grid_spec), grid_spec, precision


def cmd_generate(ns: argparse.Namespace) -> int:
    solution, params, grid, grid_spec, precision = _effective(ns)
    field = build_field(solution, params, precision)
    fld = sample(field, grid)
    output = Path(ns.output)
    try:
        output.parent.mkdir(parents=True, exist_ok=True)
        if ns.format == "csv":
            write_csv(output, grid, fld.values)
        elif ns.format == "json":
            write_json(output, grid, fld.values, params, ns.include_complex)
        else:
            write_pgm(output, fld.values)
        _write_meta(output, ns.format, solution, params, grid_spec, precision)
    except OSError as exc:
        raise IOFailureError(f"cannot write {output}: {exc}") from None
    if not ns.quiet:
        print(f"wrote {output} ({ns.format}, {grid.nx}x{grid.nt})")
    return 0


def cmd_analyze(ns: argparse.Namespace) -> int:
    solution, params, grid, grid_spec, precision = _effective(ns)
    field = build_field(solution, params, precision)
    fld = sample(field, grid)
    intensity = ComplexField2D(grid, np.abs(fld.values) ** 2, fld.invalid)
    ps = peak_analysis(intensity, cluster_radius=ns.cluster_radius)
    doc = {
        "solution": solution,
        "params": params,
        "grid": grid_spec,
        "background": ps.background,
        "classification": ps.classification,
        "peak_count": len(ps.peaks),
        "structure_count": len(ps.structures),
        "peaks": [list(p) for p in ps.peaks],
        "structures": [list(p) for p in ps.structures],
    }
    text = json_text(doc) + "\n"
    if ns.output:
        try:
            Path(ns.output).write_text(text, encoding="utf-8", newline="\n")
        except OSError as exc:
            raise IOFailureError(f"cannot write {ns.output}: {exc}") from None
        if not ns.quiet:
            print(f"wrote {ns.output}")
    else:
        print(text, end="")
    return 0


def cmd_verify(ns: argparse.Namespace) -> int:
    from .acceptance import run_suite

    echo = (lambda *_: None) if ns.quiet else print
    results = run_suite(ns.suite, echo=echo)
    if ns.output:
        doc = [dict(name=r.name, passed=r.passed, detail=r.detail,
                    elapsed=round(r.elapsed, 3)) for r in results]
        try:
            Path(ns.output).write_text(json_text(doc) + "\n", encoding="utf-8", newline="\n")
        except OSError as exc:
            raise IOFailureError(f"cannot write {ns.output}: {exc}") from None
    return 0 if all(r.passed for r in results) else 4


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kdnls",
                                 description="Kundu-DNLS solution engine and verifier")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, need_output: bool):
        p.add_argument("--solution", choices=sorted(SOLUTIONS), default=None)
        p.add_argument("--figure", choices=sorted(FIGURE_MAP), default=None,
                       help="use the documented parameters of a mapped figure")
        p.add_argument("--grid", default=None, help="xmin:xmax:nx,tmin:tmax:nt")
        p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
        p.add_argument("--config", default=None, help="JSON config file; flags override")
        p.add_argument("--precision", choices=["double", "extended"], default=None)
        p.add_argument("--quiet", action="store_true")
        if need_output:
            p.add_argument("--output", required=True)

    g = sub.add_parser("generate", help="sample a solution onto a grid and export it")
    add_common(g, need_output=True)
    g.add_argument("--format", choices=["csv", "json", "pgm"], default="csv")
    g.add_argument("--include-complex", action="store_true",
                   help="also store Re/Im parts in JSON output")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="peak-detect and classify an intensity field")
    add_common(a, need_output=False)
    a.add_argument("--output", default=None)
    a.add_argument("--cluster-radius", type=float, default=3.0)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run the acceptance battery")
    v.add_argument("--suite", choices=["full", "quick"], default="full")
    v.add_argument("--output", default=None, help="write a JSON report here")
    v.add_argument("--quiet", action="store_true")
    v.set_defaults(func=cmd_verify)
    return ap


def _join_grid_values(argv: list[str]) -> list[str]:
    """Fold `--grid -4:4:401,...` into `--grid=...` so argparse accepts the
    leading minus of a negative window bound."""
    out = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--grid" and i + 1 < len(argv) and ":" in argv[i + 1]:
            out.append(f"--grid={argv[i + 1]}")
            skip = True
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    ap = make_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = _join_grid_values(list(argv))
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors, matching ours
        return int(exc.code or 0)
    try:
        return ns.func(ns)
    except InvalidConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IOFailureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
