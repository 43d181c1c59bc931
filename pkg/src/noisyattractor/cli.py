"""Command-line front end: ``compute``, ``verify``, ``simulate`` and ``render``.

Exit codes: 0 success, 1 a check (or containment) failed, 2 spectral gate,
singular matrix or uncertifiable series, 3 I/O failure, 4 unparsable
configuration or arguments, 5 diverging trajectory.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass

import numpy as np

from . import atlas_io
from .boundary import build_atlas
from .checks import run_checks
from .errors import (
    DivergenceError,
    InputError,
    NonConvergenceError,
    SingularMatrixError,
    SpectralGateError,
)
from .linalg import as_matrix, check_gate, sphere_grid
from .oracle import SimConfig, cloud_vs_atlas, simulate
from .setmap import divergence_probe

log = logging.getLogger("noisyattractor")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_GATE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_DIVERGED = 5

FORMATS = ("csv", "json", "svg")


class ParseError(Exception):
    pass


@dataclass
class RunConfig:
    matrix: np.ndarray
    epsilon: float
    directions: int
    tolerance: float = 1e-10
    seed: int = 42
    samples: int = 100_000
    output_path: str | None = None
    format: str = "csv"
    x0: np.ndarray | None = None
    burn_in: int | None = None

    @property
    def dim(self):
        return self.matrix.shape[0]


def default_directions(m):
    return 720 if m == 2 else 2000


def parse_matrix(text):
    """Parse ``[[a, b], [c, d]]`` (JSON) or ``a,b;c,d`` into a matrix."""
    text = text.strip()
    try:
        if text.startswith("["):
            rows = json.loads(text)
        else:
            rows = [[float(v) for v in row.split(",")] for row in text.split(";")]
        return as_matrix(rows)
    except (ValueError, TypeError, InputError) as exc:
        raise ParseError(f"cannot parse matrix {text!r}: {exc}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with run settings")
    common.add_argument("--matrix", help="row-major matrix, e.g. [[0.9,0],[0,0.5]]")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--directions", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--out")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="noisyattractor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("compute", parents=[common], help="write the boundary atlas")
    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("--atlas", help="verify a stored atlas (csv or json) instead of computing one")
    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo cloud and containment report")
    p.add_argument("--probe", type=int, metavar="STEPS", help="report the divergence probe instead")
    p.add_argument("--report", help="path of the JSON report (default: next to --out)")
    p = sub.add_parser("render", parents=[common], help="convert a stored atlas to svg")
    p.add_argument("--atlas", required=True)
    return parser


def load_config(args, need_matrix=True):
    settings = {}
    if args.config:
        try:
            with open(args.config) as fh:
                settings = json.load(fh)
        except ValueError as exc:
            raise ParseError(f"cannot parse config {args.config}: {exc}") from exc
        if not isinstance(settings, dict):
            raise ParseError("config must be a JSON object")

    overrides = {
        "epsilon": args.epsilon,
        "directions": args.directions,
        "tolerance": args.tol,
        "seed": args.seed,
        "samples": args.samples,
        "output_path": args.out,
        "format": args.format,
    }
    settings.update({k: v for k, v in overrides.items() if v is not None})
    if "tol" in settings:
        settings.setdefault("tolerance", settings.pop("tol"))
    if "out" in settings:
        settings.setdefault("output_path", settings.pop("out"))

    if args.matrix is not None:
        matrix = parse_matrix(args.matrix)
    elif "matrix" in settings:
        matrix = parse_matrix(json.dumps(settings["matrix"]))
    elif need_matrix:
        raise ParseError("no matrix given (use --matrix or a config file)")
    else:
        matrix = None

    try:
        eps = settings.get("epsilon")
        if eps is None and need_matrix:
            raise ParseError("no epsilon given")
        cfg = RunConfig(
            matrix=matrix,
            epsilon=None if eps is None else float(eps),
            directions=int(settings.get("directions") or (default_directions(matrix.shape[0]) if matrix is not None else 720)),
            tolerance=float(settings.get("tolerance", 1e-10)),
            seed=int(settings.get("seed", 42)),
            samples=int(settings.get("samples", 100_000)),
            output_path=settings.get("output_path"),
            format=settings.get("format", "csv"),
            x0=None if settings.get("x0") is None else np.asarray(settings["x0"], dtype=float),
            burn_in=None if settings.get("burn_in") is None else int(settings["burn_in"]),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid configuration: {exc}") from exc

    if cfg.epsilon is not None and not cfg.epsilon > 0:
        raise ParseError("epsilon must be positive")
    if cfg.tolerance <= 0 or cfg.directions < 2 or cfg.samples < 1:
        raise ParseError("tol must be positive, directions >= 2 and samples >= 1")
    if cfg.format not in FORMATS:
        raise ParseError(f"format must be one of {FORMATS}")
    if cfg.format == "svg" and matrix is not None and matrix.shape[0] != 2:
        raise ParseError("svg output requires a 2x2 matrix")
    return cfg


def _emit(text, path):
    if path:
        atlas_io.write_atomic(path, text)
    else:
        sys.stdout.write(text)


def compute_atlas(cfg):
    check_gate(cfg.matrix)
    grid = sphere_grid(cfg.dim, cfg.directions, cfg.seed)
    return build_atlas(cfg.matrix, cfg.epsilon, grid, cfg.tolerance)


def cmd_compute(args):
    cfg = load_config(args)
    atlas = compute_atlas(cfg)
    _emit(atlas_io.emit(atlas, cfg.format), cfg.output_path)
    log.info("wrote %d records (order %d, tail %.3g)", len(atlas), atlas.truncation_order, atlas.tail_bound)
    return EXIT_OK


def cmd_verify(args):
    cfg = load_config(args, need_matrix=args.atlas is None)
    if args.atlas:
        atlas = atlas_io.read_atlas(args.atlas, cfg.matrix, cfg.epsilon)
        check_gate(atlas.matrix)
        tol = atlas.meta.get("tol", cfg.tolerance) if args.tol is None else cfg.tolerance
    else:
        atlas = compute_atlas(cfg)
        tol = cfg.tolerance
    results = run_checks(atlas, tol)
    for r in results:
        print(r.line())
    passed = all(r.passed for r in results)
    report = {
        "passed": passed,
        "dim": atlas.dim,
        "directions": len(atlas),
        "epsilon": atlas.epsilon,
        "tol": tol,
        "checks": [r.as_dict() for r in results],
    }
    if cfg.output_path:
        atlas_io.write_atomic(cfg.output_path, json.dumps(report, indent=1) + "\n")
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _cloud_csv(cloud):
    m = cloud.shape[1]
    lines = [",".join(f"x_{i + 1}" for i in range(m))]
    lines.extend(",".join(f"{v:.17g}" for v in row) for row in cloud)
    return "\n".join(lines) + "\n"


def cmd_simulate(args):
    cfg = load_config(args)
    if args.probe is not None:
        if args.probe < 1:
            raise ParseError("--probe needs a positive step count")
        grid = sphere_grid(cfg.dim, cfg.directions, cfg.seed)
        values = divergence_probe(cfg.matrix, cfg.epsilon, grid, args.probe)
        e1 = np.eye(cfg.dim)[0]
        doc = {
            "probe_steps": args.probe,
            "probe_value": divergence_probe(cfg.matrix, cfg.epsilon, e1, args.probe),
            "probe_max": float(values.max()),
            "probe_min": float(values.min()),
        }
        text = json.dumps(doc, indent=1) + "\n"
        print(text, end="")
        if args.report or cfg.output_path:
            atlas_io.write_atomic(args.report or cfg.output_path, text)
        return EXIT_OK

    atlas = compute_atlas(cfg)
    sim = SimConfig(cfg.matrix, cfg.epsilon, cfg.x0, cfg.burn_in, cfg.samples, cfg.seed)
    cloud = simulate(sim)
    report = cloud_vs_atlas(cloud, atlas, tol=1e-9)
    doc = report.as_dict()
    doc["seed"] = cfg.seed
    text = json.dumps(doc, indent=1) + "\n"
    out = cfg.output_path or "cloud.csv"
    atlas_io.write_atomic(out, _cloud_csv(cloud))
    report_path = args.report or (out.rsplit(".", 1)[0] + ".report.json")
    atlas_io.write_atomic(report_path, text)
    print(text, end="")
    return EXIT_OK if report.containment_fraction == 1.0 else EXIT_CHECK_FAILED


def cmd_render(args):
    cfg = load_config(args, need_matrix=False)
    atlas = atlas_io.read_atlas(args.atlas, cfg.matrix, cfg.epsilon if cfg.epsilon else 1.0)
    if atlas.dim != 2:
        raise ParseError("render requires a planar atlas")
    _emit(atlas_io.atlas_to_svg(atlas), cfg.output_path)
    return EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "render": cmd_render,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except SpectralGateError as exc:
        print(f"error: spectral radius {exc.spectral_radius:.12g} ≥ 1; no bounded attractor exists", file=sys.stderr)
        return EXIT_GATE
    except (SingularMatrixError, NonConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GATE
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ParseError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
