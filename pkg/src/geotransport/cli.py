"""Command-line interface: grid-info, export-matrices, run, oracle, error."""

import argparse
import os
import sys

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _set_threads(argv):
    """Pin BLAS thread counts before numpy loads its backend."""
    threads = None
    for i, arg in enumerate(argv):
        if arg == "--threads" and i + 1 < len(argv):
            threads = argv[i + 1]
        elif arg.startswith("--threads="):
            threads = arg.split("=", 1)[1]
    if threads is None:
        threads = os.environ.get("GEOTRANSPORT_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(threads)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="geotransport",
        description="Deterministic Boltzmann radiation-transport solver "
        "(geodesic finite elements, discrete ordinates, filtered harmonics).",
    )
    parser.add_argument("--threads", type=int, help="BLAS thread count")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grid-info", help="geodesic grid counts and export")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--export", help="write the grid in the geogrid text format")

    p = sub.add_parser("export-matrices", help="dump angle-space matrices")
    p.add_argument("--scheme", choices=["femn", "sn", "fpn"], required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--lmax", type=int)
    p.add_argument("--v", type=float, help="dissipation parameter")
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run a benchmark problem")
    _add_run_args(p)

    p = sub.add_parser("oracle", help="write an exact-solution field")
    p.add_argument("--problem", required=True)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--t", type=float, help="evaluation time (line source)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("error", help="L1/Linf between two fields, or field vs oracle")
    p.add_argument("--field", required=True)
    p.add_argument("--ref", help="reference field file")
    p.add_argument("--problem", help="compare against this problem's oracle")
    return parser


def _add_run_args(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--problem")
    p.add_argument("--scheme", choices=["femn", "sn", "fpn"])
    p.add_argument("--k", type=int)
    p.add_argument("--lmax", type=int)
    p.add_argument("--scale", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--limiter", choices=["minmod", "sminmod2", "modminmod2", "none"])
    p.add_argument("--positivity", choices=["clip", "filter", "none"])
    p.add_argument("--sigma-eff", type=float)
    p.add_argument("--strength", type=float, help="raw filter strength s")
    p.add_argument("--v", type=float, help="dissipation parameter")
    p.add_argument("--out")
    p.add_argument("--cadence", type=int)
    p.add_argument("--save-coeffs", action="store_true", default=None)


_CONFIG_KEYS = {
    "problem": str,
    "scheme": str,
    "k": int,
    "lmax": int,
    "scale": float,
    "dt": float,
    "t_end": float,
    "limiter": str,
    "positivity": str,
    "sigma_eff": float,
    "strength": float,
    "v": float,
    "out": str,
    "cadence": int,
    "save_coeffs": lambda s: s.lower() in ("1", "true", "yes"),
}


def _load_config_file(path):
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _CONFIG_KEYS[key](value.strip())
    return values


def _make_run_config(args):
    from .driver import ConfigError, RunConfig
    from .matrices import DEFAULT_DISSIPATION

    values = _load_config_file(args.config) if args.config else {}
    cli = {
        "problem": args.problem,
        "scheme": args.scheme,
        "k": args.k,
        "lmax": args.lmax,
        "scale": args.scale,
        "dt": args.dt,
        "t_end": args.t_end,
        "limiter": args.limiter,
        "positivity": args.positivity,
        "sigma_eff": args.sigma_eff,
        "strength": args.strength,
        "v": args.v,
        "out": args.out,
        "cadence": args.cadence,
        "save_coeffs": args.save_coeffs,
    }
    values.update({k: v for k, v in cli.items() if v is not None})
    if "problem" not in values:
        raise ConfigError("--problem is required (flag or config file)")
    return RunConfig(
        problem=values["problem"],
        scheme=values.get("scheme", "femn"),
        k=values.get("k"),
        l_max=values.get("lmax"),
        scale=values.get("scale", 1.0),
        dt=values.get("dt"),
        t_end=values.get("t_end"),
        limiter=values.get("limiter"),
        positivity=values.get("positivity"),
        sigma_eff=values.get("sigma_eff"),
        filter_strength=values.get("strength"),
        dissipation=values.get("v", DEFAULT_DISSIPATION),
        output_dir=values.get("out"),
        cadence=values.get("cadence", 0),
        save_coefficients=values.get("save_coeffs", False),
    )


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    _set_threads(argv)
    args = _build_parser().parse_args(argv)

    import numpy as np

    from . import geodesic
    from .driver import ConfigError, run_to_files
    from .dg import NonFiniteStateError

    try:
        if args.command == "grid-info":
            grid = geodesic.build_grid(args.k)
            print(f"k {grid.level}")
            print(f"points {grid.n_vertices}")
            print(f"edges {grid.n_edges}")
            print(f"triangles {grid.n_triangles}")
            areas = grid.triangle_areas()
            print(f"area_total {areas.sum():.12f}")
            print(f"area_ratio {areas.max() / areas.min():.6f}")
            if args.export:
                geodesic.export_grid(grid, args.export)
        elif args.command == "export-matrices":
            from .basis import make_basis
            from .fieldio import export_matrices
            from .matrices import DEFAULT_DISSIPATION, assemble_matrices

            if args.scheme == "fpn":
                if args.lmax is None:
                    raise ConfigError("fpn needs --lmax")
                basis = make_basis("fpn", l_max=args.lmax)
                resolution = f"l_max={args.lmax}"
            else:
                if args.k is None:
                    raise ConfigError(f"{args.scheme} needs --k")
                basis = make_basis(args.scheme, k=args.k)
                resolution = f"k={args.k}"
            mats = assemble_matrices(basis, args.v or DEFAULT_DISSIPATION)
            export_matrices(args.out, mats, args.scheme, resolution)
            print(f"wrote {basis.n}x{basis.n} matrices to {args.out}")
        elif args.command == "run":
            config = _make_run_config(args)
            run_to_files(config)
        elif args.command == "oracle":
            _oracle_command(args)
        elif args.command == "error":
            _error_command(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonFiniteStateError, FloatingPointError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"io failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _oracle_command(args):
    from .driver import ConfigError
    from .fieldio import write_energy_field
    from .problems import PROBLEMS

    if args.problem not in PROBLEMS:
        raise ConfigError(f"unknown problem {args.problem!r}")
    spec = PROBLEMS[args.problem]()
    if spec.oracle is None:
        raise ConfigError(f"problem {args.problem!r} has no oracle")
    grid = spec.make_grid(args.scale)
    t = args.t if args.t is not None else spec.t_end
    energy = spec.oracle(grid, t)
    write_energy_field(args.out, grid, energy, time=t)
    print(f"wrote oracle field {args.out}")


def _error_command(args):
    import numpy as np

    from .driver import ConfigError
    from .fieldio import read_field
    from .problems import PROBLEMS, l1_error
    from .dg import SpatialGrid2D

    meta, data = read_field(args.field)
    if meta["payload"] == "F":
        raise ConfigError("error comparison expects an E-payload field")
    if args.ref:
        _, ref = read_field(args.ref)
    elif args.problem:
        spec = PROBLEMS[args.problem]()
        grid = SpatialGrid2D(
            meta["nx"], meta["ny"], meta["dx"], meta["dy"], (meta["ox"], meta["oy"])
        )
        if spec.oracle is None:
            raise ConfigError(f"problem {args.problem!r} has no oracle")
        ref = spec.oracle(grid, meta["time"])
    else:
        raise ConfigError("error needs --ref or --problem")
    print(f"l1 {l1_error(data, ref):.8e}")
    print(f"linf {np.max(np.abs(data - ref)):.8e}")


if __name__ == "__main__":
    sys.exit(main())
