"""Command-line entry point: ``skagree <command> [options]``.

Every command that writes files also writes ``manifest.json`` with the full
argument vector, so ``replay(manifest_path)`` regenerates the same outputs.
Exit codes: 0 success, 2 usage or parse error, 3 violated precondition,
4 search or codebook budget exceeded (partial results are still written).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BudgetError, DomainError, InputError, PreconditionError
from .gaussian import GaussianParams, channel_terms, symmetric_sweep
from .models import AuxiliaryConfig, check_special_case, load_model_file
from .regions import (InputSearch, SearchConfig, inner_bound_region, outer_bound,
                      special_case_capacity)
from .sim import SimConfig, run_experiment

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_BUDGET = 0, 2, 3, 4


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and np.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("expected a nonnegative integer")
    return v


def _pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated integers, e.g. 4,4")
    return tuple(_positive_int(p) for p in parts)


def _float_list(text: str) -> list[float]:
    return [_positive_float(p) for p in text.split(",") if p]


def _int_list(text: str) -> list[int]:
    return [_positive_int(p) for p in text.split(",") if p]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skagree", description="Key-rate regions and scheme simulation.")
    ap.add_argument("--version", action="version", version=f"skagree {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("--model", required=True, help="model JSON file")
        p.add_argument("--out-dir", default=None, help="directory for outputs and manifest")
        p.add_argument("--format", nargs="+", choices=("csv", "json", "svg"), default=None)
        p.add_argument("--seed", type=_nonneg_int, default=0)
        p.add_argument("--threads", type=_positive_int, default=1)

    p = sub.add_parser("inner", help="inner-bound region by auxiliary search")
    common(p)
    p.add_argument("--steps", type=_positive_int, default=4)
    p.add_argument("--aux-sizes", type=_pair, default=None, help="|U1|,|U2|")
    p.add_argument("--v-sizes", type=_pair, default=None, help="|V1|,|V2|")
    p.add_argument("--identity-v", action="store_true", help="fix V_i = X_i")
    p.add_argument("--restarts", type=_nonneg_int, default=0)
    p.add_argument("--max-configs", type=_positive_int, default=4_000_000)

    p = sub.add_parser("outer", help="outer-bound corner")
    common(p)
    p.add_argument("--steps", type=_positive_int, default=64)
    p.add_argument("--joint-inputs", action=argparse.BooleanOptionalAction, default=True,
                   help="maximize over joint (default) or product input laws")

    p = sub.add_parser("capacity-special", help="capacity region under the special-case structure")
    common(p)
    p.add_argument("--steps", type=_positive_int, default=4)
    p.add_argument("--aux-sizes", type=_pair, default=None)
    p.add_argument("--max-configs", type=_positive_int, default=4_000_000)

    p = sub.add_parser("gaussian", help="Gaussian regions over a symmetric eavesdropper-noise sweep")
    common(p, model=False)
    for name, default in (("P1", 1.0), ("P2", 1.0), ("P3", 1.0), ("Ns1", 0.5), ("Ns2", 0.5), ("Nc3", 0.5)):
        p.add_argument(f"--{name}", type=_positive_float, default=default)
    p.add_argument("--nc-values", type=_float_list, default=[0.5, 0.6, 0.7, 0.8, 0.9],
                   help="comma-separated Nc1 = Nc2 values")
    p.add_argument("--steps", type=_positive_int, default=200, help="auxiliary grid per axis")

    p = sub.add_parser("simulate", help="Monte Carlo run of the coding scheme")
    common(p)
    p.add_argument("--trials", type=_positive_int, default=None)
    p.add_argument("--N", type=_positive_int, default=None, help="blocklength")
    p.add_argument("--n-values", type=_int_list, default=None, help="sweep blocklengths, e.g. 4,8,12")
    p.add_argument("--trace", action="store_true", help="write a per-trial CSV trace")

    p = sub.add_parser("info", help="model diagnostics")
    p.add_argument("--model", required=True)
    p.add_argument("--format", nargs="+", choices=("json",), default=None)
    return ap


# ---------------------------------------------------------------------------
# Output helpers


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_rows(path: Path, rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def _hull_rows(hull) -> list[dict]:
    return [{"vertex": i, "R1": float(x), "R2": float(y)} for i, (x, y) in enumerate(hull)]


def hulls_svg(hulls: list[tuple[str, np.ndarray]], width: int = 480, height: int = 360) -> str:
    """Fixed-viewport SVG of nested hulls; identical input gives identical bytes."""
    pad = 40
    pts = np.concatenate([np.asarray(h).reshape(-1, 2) for _, h in hulls] + [np.zeros((1, 2))])
    top = float(max(pts.max(), 1e-9)) * 1.05
    sx = (width - 2 * pad) / top
    sy = (height - 2 * pad) / top

    def xy(p):
        return f"{pad + p[0] * sx:.3f},{height - pad - p[1] * sy:.3f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{pad}" y2="{pad}" stroke="black"/>',
           f'<text x="{width - pad}" y="{height - pad + 25}" font-size="12" text-anchor="end">R1 (bits)</text>',
           f'<text x="{pad - 5}" y="{pad - 10}" font-size="12">R2 (bits)</text>',
           f'<text x="{pad}" y="{height - pad + 15}" font-size="10" text-anchor="middle">0</text>',
           f'<text x="{width - pad}" y="{height - pad + 15}" font-size="10" text-anchor="middle">{top:.3f}</text>']
    shades = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"]
    for k, (label, h) in enumerate(hulls):
        h = np.asarray(h).reshape(-1, 2)
        colour = shades[k % len(shades)]
        out.append(f'<polygon points="{" ".join(xy(p) for p in h)}" fill="none" '
                   f'stroke="{colour}" stroke-width="1.5"><title>{label}</title></polygon>')
        out.append(f'<text x="{width - pad - 5}" y="{pad + 14 * k}" font-size="11" '
                   f'text-anchor="end" fill="{colour}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


class _Outputs:
    def __init__(self, args, argv, default_formats):
        self.dir = Path(args.out_dir) if getattr(args, "out_dir", None) else None
        self.formats = set(args.format or default_formats)
        self.argv = list(argv)
        self.args = args
        self.files: list[str] = []

    def want(self, fmt: str) -> bool:
        return self.dir is not None and fmt in self.formats

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.dir / name

    def open(self):
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def manifest(self, extra: dict | None = None) -> None:
        if self.dir is None:
            return
        params = {k: v for k, v in vars(self.args).items() if k not in ("command", "out_dir", "format")}
        doc = {"command": self.args.command, "argv": self.argv, "version": __version__,
               "model_files": [self.args.model] if getattr(self.args, "model", None) else [],
               "parameters": params, "seed": getattr(self.args, "seed", None),
               "outputs": sorted(self.files)}
        doc.update(extra or {})
        _write_json(self.dir / "manifest.json", doc)


# ---------------------------------------------------------------------------
# Commands


def cmd_inner(args, out: _Outputs) -> int:
    src, ch, _ = load_model_file(args.model)
    search = SearchConfig(steps=args.steps, u_sizes=args.aux_sizes, v_sizes=args.v_sizes,
                          channel_aux="identity" if args.identity_v else "general",
                          restarts=args.restarts, seed=args.seed, max_configs=args.max_configs,
                          threads=args.threads)
    region = inner_bound_region(src, ch, search)
    _emit_region(region, "inner", out)
    return EXIT_BUDGET if region.partial else EXIT_OK


def _emit_region(region, stem: str, out: _Outputs) -> None:
    out.open()
    if out.want("json"):
        _write_json(out.path(f"{stem}.json"), region.to_dict())
    if out.want("csv"):
        _write_rows(out.path(f"{stem}.csv"), _hull_rows(region.hull))
    if out.want("svg"):
        out.path(f"{stem}.svg").write_text(hulls_svg([(stem, region.hull)]))
    out.manifest({"partial": region.partial})
    print(json.dumps({"hull": region.hull.tolist(), "partial": region.partial}))


def cmd_outer(args, out: _Outputs) -> int:
    src, ch, _ = load_model_file(args.model)
    corner = outer_bound(src, ch, InputSearch("joint" if args.joint_inputs else "product", args.steps))
    out.open()
    if out.want("json"):
        _write_json(out.path("outer.json"), corner.to_dict())
    if out.want("csv"):
        _write_rows(out.path("outer.csv"), [{"r1_max": corner.r1_max, "r2_max": corner.r2_max,
                                              "sum_max": corner.sum_max}])
    out.manifest()
    print(json.dumps(corner.to_dict()))
    return EXIT_OK


def cmd_capacity(args, out: _Outputs) -> int:
    src, ch, _ = load_model_file(args.model)
    search = SearchConfig(steps=args.steps, u_sizes=args.aux_sizes, seed=args.seed,
                          max_configs=args.max_configs, threads=args.threads)
    region = special_case_capacity(src, ch, search)
    _emit_region(region, "capacity", out)
    return EXIT_BUDGET if region.partial else EXIT_OK


def cmd_gaussian(args, out: _Outputs) -> int:
    base = GaussianParams(args.P1, args.P2, args.P3, args.Ns1, args.Ns2,
                          args.nc_values[0], args.nc_values[0], args.Nc3)
    rep = symmetric_sweep(base, tuple(args.nc_values), args.steps)
    rows = rep.rows()
    out.open()
    if out.want("csv"):
        _write_rows(out.path("gaussian.csv"), [{k: v for k, v in r.items() if k != "hull"} for r in rows])
    if out.want("json"):
        _write_json(out.path("gaussian.json"),
                    {"params": vars(base) | {"Nc_values": list(args.nc_values)},
                     "sum_threshold": rep.threshold, "nested": rep.nested,
                     "discrepancies": rep.discrepancies, "sweep": rows})
    if out.want("svg"):
        out.path("gaussian.svg").write_text(
            hulls_svg([(f"Nc={sp.params.Nc1:g}", sp.region.hull) for sp in rep.points]))
    out.manifest()
    summary = {"sum_threshold": rep.threshold, "nested": rep.nested,
               "shapes": {f"{sp.params.Nc1:g}": sp.shape for sp in rep.points},
               "channel_terms": {f"{sp.params.Nc1:g}": list(channel_terms(sp.params)) for sp in rep.points},
               "discrepancies": rep.discrepancies}
    print(json.dumps(summary))
    return EXIT_OK


def _sim_config(extra: dict, args, n: int | None) -> SimConfig:
    doc = dict(extra.get("sim", {}))
    unknown = set(doc) - set(SimConfig.__dataclass_fields__)
    if unknown:
        raise InputError(f"unknown sim fields: {sorted(unknown)}")
    doc["seed"] = args.seed
    if args.trials is not None:
        doc["trials"] = args.trials
    if n is not None:
        doc["N"] = n
    return SimConfig(**doc)


def cmd_simulate(args, out: _Outputs) -> int:
    src, ch, extra = load_model_file(args.model)
    aux = AuxiliaryConfig.from_dict(extra["aux"]) if "aux" in extra else AuxiliaryConfig.identity(src, ch)
    aux.check_compatible(src, ch)
    ns = args.n_values or [args.N]
    reports = []
    for n in ns:
        cfg = _sim_config(extra, args, n)
        reports.append(run_experiment(src, ch, aux, cfg, trace=args.trace))
    out.open()
    if out.want("json"):
        doc = reports[0].to_dict() if len(reports) == 1 else {"sweep": [r.to_dict() for r in reports]}
        _write_json(out.path("simulate.json"), doc)
    if out.want("csv"):
        _write_rows(out.path("simulate.csv"),
                    [{"N": r.config["N"], "trials": r.trials, "P_err": r.p_err,
                      **{f"fail_{k}": v for k, v in r.failures.items()},
                      "L1": r.leakage["L1"], "L2": r.leakage["L2"]} for r in reports])
    if args.trace and out.dir is not None:
        for r in reports:
            out.path(f"trace_N{r.config['N']}.csv").write_text(r.trace_csv())
    out.manifest()
    for r in reports:
        print(json.dumps({"N": r.config["N"], "P_err": r.p_err, "failures": r.failures,
                          "leakage": r.leakage}))
    return EXIT_OK


def cmd_info(args, out: _Outputs) -> int:
    src, ch, extra = load_model_file(args.model)
    sj = src.joint
    rep = check_special_case(src, ch)
    doc = {"source_sizes": list(src.sizes), "input_sizes": list(ch.input_sizes),
           "output_sizes": list(ch.output_sizes),
           "entropies": {n: sj.entropy([n]) for n in sj.names},
           "I(S1;S2|S3)": sj.mutual_information(["S1"], ["S2"], ["S3"]),
           "special_case": {"all_true": rep.all_true, "violated": rep.violated(), "values": rep.values},
           "extra_sections": sorted(extra)}
    print(json.dumps(doc, indent=2))
    return EXIT_OK


COMMANDS = {"inner": (cmd_inner, ("json", "csv")), "outer": (cmd_outer, ("json", "csv")),
            "capacity-special": (cmd_capacity, ("json", "csv")),
            "gaussian": (cmd_gaussian, ("csv", "json", "svg")),
            "simulate": (cmd_simulate, ("json", "csv")), "info": (cmd_info, ("json",))}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fn, formats = COMMANDS[args.command]
    out = _Outputs(args, argv, formats)
    try:
        return fn(args, out)
    except (InputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


def replay(manifest_path) -> int:
    """Re-run the command recorded in a manifest."""
    doc = json.loads(Path(manifest_path).read_text())
    return main(doc["argv"])


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
