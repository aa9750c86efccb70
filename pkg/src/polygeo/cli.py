"""``polygeo`` command-line interface.

Exit codes: 0 on success, 2 for unparsable or invalid input, 3 for numerical
failures.  On failure the error class name is printed to standard error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as pio
from .convergence import (FAMILIES, DegenerationFamily, completeness_probe, convergence_table,
                          named_spec, NAMED_SPECS)
from .curves import CurvePath, DiscreteCurve
from .errors import ParseError, PolygeoError, ValidationError
from .geodesics import exp_map, log_map
from .metric import MetricSpec, Variant, gm_inner
from .shapes import curvature_grid

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


@dataclass
class ExperimentConfig:
    """Everything a single CLI invocation needs; ``seed`` drives all randomness."""

    command: str
    metric: MetricSpec = field(default_factory=MetricSpec)
    inputs: dict = field(default_factory=dict)
    output: str | None = None
    svg: str | None = None
    options: dict = field(default_factory=dict)
    seed: int = 0


def _floats(text, count=None, name="value"):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise ValidationError(f"{name}: expected {count} numbers, got {len(vals)}")
    return vals


def _ints(text, count=None, name="value"):
    vals = _floats(text, count, name)
    if any(v != int(v) or v <= 0 for v in vals):
        raise ValidationError(f"{name}: expected positive integers, got {text!r}")
    return [int(v) for v in vals]


def _read_curve(path) -> DiscreteCurve:
    if not Path(path).exists():
        raise ParseError(f"no such file: {path}")
    try:
        return pio.loads_curve(Path(path))
    except PolygeoError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _field(spec_text, c: DiscreteCurve) -> np.ndarray:
    if spec_text == "zero":
        return np.zeros((c.n, c.d))
    if spec_text == "identity":
        return np.array(c.vertices)
    if spec_text == "constant":
        h = np.zeros((c.n, c.d))
        h[:, 0] = 1.0
        return h
    if not Path(spec_text).exists():
        raise ParseError(f"no such file: {spec_text}")
    return pio.loads_field(Path(spec_text), c.n, c.d)


def _emit(text, output):
    if output:
        pio.write_text(output, text)
    else:
        sys.stdout.write(text)


def _emit_path(path: CurvePath, config: ExperimentConfig):
    _emit(pio.dumps_path(path) + "\n", config.output)
    if config.svg:
        pio.write_text(config.svg, pio.render_svg(path))


def _run_metric(config):
    c = _read_curve(config.inputs["curve"])
    h = _field(config.options["field"], c)
    k = _field(config.options.get("field2") or config.options["field"], c)
    print(repr(gm_inner(c, h, k, config.metric)))


def _run_shoot(config):
    c = _read_curve(config.inputs["curve"])
    v = _field(config.inputs["velocity"], c)
    path = exp_map(c, v, config.metric, steps=config.options["steps"],
                   method=config.options["method"])
    _emit_path(path, config)


def _run_connect(config):
    c0 = _read_curve(config.inputs["from"])
    c1 = _read_curve(config.inputs["to"])
    if c0.vertices.shape != c1.vertices.shape:
        raise ValidationError("endpoint curves must have the same shape")
    res = log_map(c0, c1, config.metric, frames=config.options["frames"],
                  rng=np.random.default_rng(config.seed))
    _emit_path(res.path, config)
    print(f"energy={res.final_energy!r} iterations={res.iterations} restarts={res.restarts}",
          file=sys.stderr)


def _run_curvature(config):
    grid = curvature_grid(config.options["region"], config.options["res"],
                          config.options["metric_name"],
                          transform="symlog" if config.options["symlog"] else None)
    _emit(pio.grid_csv(grid), config.output)
    if config.svg:
        pio.write_text(config.svg, pio.render_svg(grid))


def _run_converge(config):
    rows = convergence_table(named_spec(config.options["spec"]), config.metric.m,
                             config.metric.variant, config.options["ns"])
    _emit(pio.convergence_csv(rows), config.output)


def _run_probe(config):
    ks = range(config.options["kmin"], config.options["kmax"] + 1)
    table = completeness_probe(DegenerationFamily(config.options["family"]), config.metric,
                               [2.0 ** -k for k in ks])
    _emit(pio.probe_csv(table), config.output)


_RUNNERS = {"metric": _run_metric, "shoot": _run_shoot, "connect": _run_connect,
            "curvature": _run_curvature, "converge": _run_converge, "probe": _run_probe}


def run(config: ExperimentConfig) -> int:
    """Execute ``config``; returns the process exit status."""
    try:
        _RUNNERS[config.command](config)
    except (ParseError, ValidationError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PolygeoError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"ValidationError: {message}", file=sys.stderr)
        sys.exit(EXIT_VALIDATION)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polygeo", description="Sobolev geometry of closed polygons.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def metric_flags(p):
        p.add_argument("--order", type=int, default=2, help="metric order m >= 0 (default 2)")
        p.add_argument("--variant", choices=[v.value for v in Variant],
                       default=Variant.SCALE_INVARIANT.value, help="metric variant")

    def out_flags(p, svg=True):
        p.add_argument("--out", help="output file (default: standard output)")
        if svg:
            p.add_argument("--svg", help="also write an SVG rendering to this file")

    p = sub.add_parser("metric", help="evaluate g^m_c(h, k)")
    p.add_argument("--curve", required=True, help="curve JSON file")
    p.add_argument("--field", default="identity",
                   help="first field: identity, zero, constant, or a field JSON file")
    p.add_argument("--field2", help="second field (default: same as --field)")
    metric_flags(p)

    p = sub.add_parser("shoot", help="integrate the geodesic equation from a curve")
    p.add_argument("--curve", required=True, help="initial curve JSON file")
    p.add_argument("--velocity", required=True,
                   help="initial velocity: zero, identity, constant, or a field JSON file")
    p.add_argument("--steps", type=int, default=100, help="number of time steps")
    p.add_argument("--method", choices=["rk4", "euler"], default="rk4", help="integrator")
    metric_flags(p)
    out_flags(p)

    p = sub.add_parser("connect", help="geodesic between two curves by path straightening")
    p.add_argument("--from", dest="source", required=True, help="start curve JSON file")
    p.add_argument("--to", dest="target", required=True, help="end curve JSON file")
    p.add_argument("--frames", type=int, default=20, help="number of time intervals T")
    p.add_argument("--seed", type=int, default=0, help="seed for restart noise")
    metric_flags(p)
    out_flags(p)

    p = sub.add_parser("curvature", help="Gaussian curvature of triangle shape space")
    p.add_argument("--metric", default="g2", help="g0, g1, g2 (or any g<m>), or kendall")
    p.add_argument("--region", default="-1,2,0.01,2", help="x0,x1,y0,y1 chart region")
    p.add_argument("--res", default="31,21", help="NX,NY grid resolution")
    p.add_argument("--symlog", action="store_true", help="add a sign(K) log(1+|K|) column")
    out_flags(p)

    p = sub.add_parser("converge", help="discrete vs smooth metric convergence table")
    p.add_argument("--spec", default="circle", choices=sorted(NAMED_SPECS),
                   help="named smooth curve and field pair")
    p.add_argument("--ns", default="10,20,40,80", help="comma-separated vertex counts")
    metric_flags(p)
    out_flags(p, svg=False)

    p = sub.add_parser("probe", help="metric length of a degenerating family")
    p.add_argument("--family", choices=FAMILIES, default="edge-collapse", help="family")
    p.add_argument("--kmin", type=int, default=2, help="first k, eps = 2^-k")
    p.add_argument("--kmax", type=int, default=10, help="last k, eps = 2^-k")
    metric_flags(p)
    out_flags(p, svg=False)
    return parser


def config_from_args(args) -> ExperimentConfig:
    if hasattr(args, "order"):
        try:
            spec = MetricSpec(args.order, args.variant)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
    else:
        spec = MetricSpec()
    cfg = ExperimentConfig(args.command, spec, output=getattr(args, "out", None),
                           svg=getattr(args, "svg", None), seed=getattr(args, "seed", 0))
    cmd = args.command
    if cmd == "metric":
        cfg.inputs["curve"] = args.curve
        cfg.options.update(field=args.field, field2=args.field2)
    elif cmd == "shoot":
        if args.steps < 1:
            raise ValidationError("--steps must be positive")
        cfg.inputs.update(curve=args.curve, velocity=args.velocity)
        cfg.options.update(steps=args.steps, method=args.method)
    elif cmd == "connect":
        if args.frames < 2:
            raise ValidationError("--frames must be at least 2")
        cfg.inputs.update({"from": args.source, "to": args.target})
        cfg.options["frames"] = args.frames
    elif cmd == "curvature":
        x0, x1, y0, y1 = _floats(args.region, 4, "--region")
        if not (x0 < x1 and y0 < y1):
            raise ValidationError("--region must satisfy x0 < x1 and y0 < y1")
        cfg.options.update(region=(x0, x1, y0, y1), res=tuple(_ints(args.res, 2, "--res")),
                           metric_name=args.metric, symlog=args.symlog)
        from .shapes import parse_metric
        try:
            parse_metric(args.metric)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
    elif cmd == "converge":
        cfg.options.update(spec=args.spec, ns=_ints(args.ns, None, "--ns"))
    elif cmd == "probe":
        if not 0 <= args.kmin <= args.kmax:
            raise ValidationError("need 0 <= --kmin <= --kmax")
        cfg.options.update(family=args.family, kmin=args.kmin, kmax=args.kmax)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ValidationError as exc:
        print(f"ValidationError: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
