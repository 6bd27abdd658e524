"""Command-line front end.

Subcommands mirror the pipeline stages so every experiment is scriptable:

  simulate      forward-solve clean ring data for a scenario
  noise         perturb a ring CSV
  reconstruct   indicator images from (noisy) ring CSVs
  pipeline      the whole chain for one scenario config
  rates         concentric-circle convergence study
  render        grid CSV -> PGM
  oracle-check  Nystrom solver vs the analytic circle oracle

Config files are flat ``key = value`` text (keys = ScenarioConfig fields);
command-line flags override config-file keys.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import continuation as ct
from . import formats
from . import indicator as ind
from .forward import SourceSet, analytic_circle, simulate_ring
from .geometry import ShapeSpec, make_curve
from .noise import NoiseSpec, add_noise
from .pipeline import ScenarioConfig, convergence_study, render_pgm, run_scenario

_OVERRIDE_KEYS = [
    ("side", str), ("bc", str), ("shape", str), ("shape-radius", float),
    ("delta", float), ("seed", int), ("truncation", int),
    ("source-radius", float), ("source-count", int),
    ("receiver-radius", float), ("receiver-count", int),
    ("forward-nodes", int), ("grid-nx", int), ("grid-ny", int),
]


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", "-c", type=Path, help="flat key = value config file")
    for name, typ in _OVERRIDE_KEYS:
        p.add_argument(f"--{name}", type=typ, default=None)
    p.add_argument("--k", type=float, nargs="+", default=None,
                   help="wavenumber list (overrides config)")


def _config_from_args(args) -> ScenarioConfig:
    cfg = ScenarioConfig.from_file(args.config) if args.config else ScenarioConfig()
    overrides = {}
    for name, _ in _OVERRIDE_KEYS:
        value = getattr(args, name.replace("-", "_"))
        if value is not None:
            overrides[name.replace("-", "_")] = value
    if args.k is not None:
        overrides["wavenumbers"] = tuple(args.k)
    if overrides:
        from dataclasses import replace
        cfg = replace(cfg, **overrides)
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _config_from_args(args).resolved()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    curve = cfg.curve()
    sources = cfg.sources()
    for k in cfg.wavenumbers:
        ring = simulate_ring(curve, cfg.bc, cfg.side, k, sources,
                             cfg.receiver_radius, cfg.receiver_count)
        path = outdir / f"ring_k{k:g}.csv"
        formats.write_ring_csv(path, ring, extra={"bc": cfg.bc, "shape": cfg.shape,
                                                  "seed": cfg.seed})
        print(f"wrote {path}")
    return 0


def _cmd_noise(args) -> int:
    ring, meta = formats.read_ring_csv(args.input)
    noisy = add_noise(ring, NoiseSpec(level=args.delta, seed=args.seed))
    extra = {key: meta[key] for key in ("bc", "shape") if key in meta}
    extra["seed"] = args.seed
    formats.write_ring_csv(args.output, noisy, extra=extra)
    print(f"wrote {args.output}")
    return 0


def _cmd_reconstruct(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    normalized = []
    for path in args.ring:
        ring, meta = formats.read_ring_csv(path)
        bc = meta.get("bc", "soft")
        n_trunc = args.truncation
        if n_trunc is None:
            n_trunc = ct.truncation_order(ring.noise_level, ring.side)
        coeffs = ct.compute_coefficients(ring, n_trunc)
        if ring.side == "interior":
            coeffs = ct.guard_interior_modes(coeffs)
        from .geometry import imaging_grid
        excl = ((0.0, 0.0), ring.radius) if ring.side == "interior" else None
        grid = imaging_grid(args.xmin, args.xmax, args.ymin, args.ymax,
                            args.nx, args.ny, exclusion=excl)
        raw = (ind.indicator_soft if bc == "soft" else ind.indicator_hard)(
            coeffs, ring.sources, grid)
        norm = ind.normalize(raw)
        normalized.append(norm)
        tag = f"{ring.k:g}"
        csv_path = outdir / f"indicator_k{tag}.csv"
        formats.write_grid_csv(csv_path, norm, extra={"bc": bc, "truncation": n_trunc})
        formats.write_pgm(outdir / f"indicator_k{tag}.pgm",
                          formats.pixels_from_image(ind.reciprocal(norm)))
        print(f"wrote {csv_path} (N={n_trunc})")
    if len(normalized) > 1:
        sup = ind.superpose_multifrequency(normalized)
        formats.write_grid_csv(outdir / "indicator_multi.csv", sup)
        formats.write_pgm(outdir / "indicator_multi.pgm",
                          formats.pixels_from_image(ind.reciprocal(sup)))
        print(f"wrote {outdir / 'indicator_multi.csv'}")
    return 0


def _cmd_pipeline(args) -> int:
    cfg = _config_from_args(args)
    result = run_scenario(cfg, args.outdir)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for k, n in result.truncation_by_k.items():
        excl = result.excluded_by_k[k]
        note = f", excluded modes {excl}" if excl else ""
        print(f"k={k:g}: N={n}{note}")
    print(f"manifest: {result.files['manifest.txt']}")
    return 0


def _cmd_rates(args) -> int:
    report = convergence_study(args.side, k=args.k, seeds=tuple(args.seeds))
    print(report.summary())
    if args.output:
        Path(args.output).write_text(report.summary() + "\n", encoding="ascii")
        print(f"wrote {args.output}")
    return 0


def _cmd_render(args) -> int:
    render_pgm(args.input, args.output, scale=args.scale, clip_percent=args.clip)
    print(f"wrote {args.output}")
    return 0


def _cmd_oracle_check(args) -> int:
    worst = 0.0
    for side, ring_r in (("exterior", 2.2), ("interior", 0.5)):
        curve = make_curve(ShapeSpec(kind="circle", radius=1.0, n_nodes=args.nodes))
        for bc in ("soft", "hard"):
            for k in args.k:
                sources = SourceSet(center=(0.0, 0.0), radius=ring_r, count=3, side=side)
                ring = simulate_ring(curve, bc, side, k, sources, ring_r, 64)
                err = 0.0
                for j, z in enumerate(sources.positions):
                    ref = analytic_circle(1.0, bc, side, k, z, ring.receiver_points)
                    err = max(err, float(np.abs(ring.samples[j] - ref).max()
                                         / np.abs(ref).max()))
                worst = max(worst, err)
                status = "ok" if err <= args.tol else "FAIL"
                print(f"{side:8s} {bc:4s} k={k:g}: max rel err {err:.3e} [{status}]")
    print(f"worst: {worst:.3e} (tolerance {args.tol:g})")
    return 0 if worst <= args.tol else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nearscat", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="forward-solve clean ring data")
    _add_config_args(p)
    p.add_argument("--outdir", "-o", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("noise", help="perturb a ring CSV")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=_cmd_noise)

    p = sub.add_parser("reconstruct", help="indicator images from ring CSVs")
    p.add_argument("--ring", "-r", action="append", required=True,
                   help="ring CSV path (repeat per wavenumber)")
    p.add_argument("--outdir", "-o", required=True)
    p.add_argument("--truncation", type=int, default=None)
    p.add_argument("--xmin", type=float, default=-1.5)
    p.add_argument("--xmax", type=float, default=1.5)
    p.add_argument("--ymin", type=float, default=-1.5)
    p.add_argument("--ymax", type=float, default=1.5)
    p.add_argument("--nx", type=int, default=150)
    p.add_argument("--ny", type=int, default=150)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("pipeline", help="full scenario run")
    _add_config_args(p)
    p.add_argument("--outdir", "-o", required=True)
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("rates", help="concentric-circle convergence study")
    p.add_argument("--side", choices=("exterior", "interior"), required=True)
    p.add_argument("--k", type=float, default=3.0)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("render", help="grid CSV -> ASCII PGM")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--scale", choices=("linear", "percentile"), default="percentile")
    p.add_argument("--clip", type=float, default=99.0)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("oracle-check", help="Nystrom vs analytic circle oracle")
    p.add_argument("--k", type=float, nargs="+", default=[3.0, 4.0, 5.0, 6.0])
    p.add_argument("--nodes", type=int, default=512)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=_cmd_oracle_check)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
