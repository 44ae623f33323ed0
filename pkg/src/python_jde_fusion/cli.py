"""Command line frontend

Subcommands: synth, fuse, eval, mds, persistence, ingest and pipeline.
Every run writes one manifest JSON next to its outputs: <out>.manifest.json
when the output is a file, <out>/manifest.json when it is a directory.
"""

import argparse
import asyncio
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from . import __version__
from .core import (
    DelayParams,
    DissimilarityMatrix,
    MultiTimeSeries,
    read_channels_csv,
    read_matrix_csv,
    validate_dissimilarity,
    write_channels_csv,
    write_matrix_csv,
)
from .error import JdeFusionException, ThresholdRequiredException
from .figures import channels_svg, diagram_svg, heatmap_svg, mds_scatter_svg, torus_curve_svg
from .geomtools import classical_mds, evaluate
from .ingest import TrialSpec, bundled_sample_path, load_motionsense
from .lib import (
    DEBUG,
    DEFAULT_BETA,
    DEFAULT_ITERATIONS,
    DEFAULT_KAPPA,
    DEFAULT_MAX_ROWS,
    SYNTHETIC_JDE_GRID,
    Boundary,
    FusionMethod,
    MatrixKind,
    env_workers,
    get_boundary_enum,
    get_matrix_kind_enum,
    get_method_enum,
    get_scope_enum,
)
from .orthofuse import jde_matrix, jdl_matrix, sensor_matrices
from .persistence import ENCLOSING, rips_persistence, write_diagram_csv
from .snf import SnfConfig, snf_fuse
from .synth import TorusCurveParams, ground_truth_similarity, make_experiment

logger = logging.getLogger(__name__)

EXPERIMENTS = ["exp1", "exp2", "exp3", "motionsense"]
MOTIONSENSE_DELAY = DelayParams(tau=1, d=20, boundary=Boundary.TRUNCATE)
MOTIONSENSE_LAMBDAS = [0.0, 1.0]


@dataclass
class RunManifest:
    """What a run did: its parameters, inputs and outputs."""

    subcommand: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    inputs: List[str] = field(default_factory=list)
    outputs: List[Dict[str, Any]] = field(default_factory=list)
    version: str = __version__
    duration_seconds: float = 0.0

    def write(self, path: Path) -> None:
        """Write the manifest as sorted, indented JSON."""
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(asdict(self), handle, indent=2, sort_keys=True)
            handle.write("\n")
        logger.debug("Wrote manifest %s", path)


def _manifest_path(out: Path) -> Path:
    if out.is_dir():
        return out / "manifest.json"
    return out.with_name(out.name + ".manifest.json")


def _output_metadata(path: Path) -> Dict[str, Any]:
    """The manifest entry describing a matrix file, empty if there is none."""

    for manifest in (path.with_name(path.name + ".manifest.json"), path.parent / "manifest.json"):
        if not manifest.is_file():
            continue
        with open(manifest, encoding="utf-8") as handle:
            content = json.load(handle)
        for entry in content.get("outputs", []):
            if entry.get("path") == path.name:
                return dict(entry)
    return {}


def _delay_params(args: argparse.Namespace) -> DelayParams:
    return DelayParams(
        tau=args.tau,
        d=args.d,
        lam=args.lam,
        boundary=get_boundary_enum(args.boundary),
        scope=get_scope_enum(args.scope),
    )


def _snf_config(args: argparse.Namespace) -> SnfConfig:
    return SnfConfig(
        beta=args.beta,
        kappa=args.kappa,
        iterations=args.iterations,
        symmetrize_each_step=args.symmetrize,
        synchronous=args.synchronous,
    )


def _delay_dict(params: DelayParams) -> Dict[str, Any]:
    return {
        "tau": params.tau,
        "d": params.d,
        "lambda": params.lam,
        "boundary": params.boundary.value,
        "scope": params.scope.value,
    }


def _snf_dict(config: SnfConfig) -> Dict[str, Any]:
    return {
        "beta": config.beta,
        "kappa": config.kappa,
        "iterations": config.iterations,
        "symmetrize": config.symmetrize_each_step,
        "synchronous": config.synchronous,
    }


def fuse_series(
    method: FusionMethod,
    ts: MultiTimeSeries,
    params: DelayParams,
    config: SnfConfig,
    windowed: bool = False,
    workers: Optional[int] = None,
) -> Tuple[NDArray[np.float64], MatrixKind, Dict[str, Any]]:
    """Run one fusion method over a series.

    JDL and SNF compare the sensors at the window starts of params, so all three
    methods index the same points.

    Returns:
    Tuple[NDArray, MatrixKind, Dict[str, Any]]: The matrix, its kind and the parameters used.
    """

    if method == FusionMethod.JDE:
        matrix = jde_matrix(ts, params, workers=workers)
        return np.array(matrix.values), MatrixKind.DISTANCE, _delay_dict(params)
    views = sensor_matrices(ts, params, windowed=windowed)
    delay = {"tau": params.tau, "d": params.d, "boundary": params.boundary.value, "windowed": windowed}
    if method == FusionMethod.JDL:
        return np.array(jdl_matrix(views).values), MatrixKind.DISTANCE, delay
    fused = snf_fuse(views, config)
    return np.array(fused.values), MatrixKind.SIMILARITY, {**delay, **_snf_dict(config)}


def cmd_synth(args: argparse.Namespace, manifest: RunManifest) -> Path:
    """Channels, ground truth and (with --figures) SVGs of a synthetic experiment."""

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    experiment = make_experiment(args.kind, args.seed, TorusCurveParams(N=args.points))
    write_channels_csv(out / "channels.csv", experiment.series)
    write_matrix_csv(out / "truth.csv", experiment.truth.values)
    write_matrix_csv(out / "points.csv", experiment.points)
    manifest.parameters = {
        "kind": args.kind,
        "points": args.points,
        "sensors": [sensor.to_dict() for sensor in experiment.sensors],
    }
    manifest.outputs = [
        {"path": "channels.csv", "kind": "channels"},
        {"path": "truth.csv", "kind": MatrixKind.DISTANCE.value, "method": "truth", "params": {}},
        {"path": "points.csv", "kind": "points"},
    ]
    if args.figures:
        bounds = heatmap_svg(out / "truth.svg", experiment.truth.values, "Ground truth")
        channels_svg(out / "channels.svg", experiment.series)
        torus_curve_svg(out / "curve.svg", experiment.points)
        manifest.outputs.extend(
            [
                {"path": "truth.svg", "kind": "heatmap", "scale": bounds},
                {"path": "channels.svg", "kind": "figure"},
                {"path": "curve.svg", "kind": "figure"},
            ]
        )
    return out


def cmd_fuse(args: argparse.Namespace, manifest: RunManifest) -> Path:
    """Fuse the channels of a channels CSV into one matrix CSV."""

    out = Path(args.out)
    method = get_method_enum(args.method)
    ts = read_channels_csv(args.channels)
    values, kind, params = fuse_series(
        method, ts, _delay_params(args), _snf_config(args), windowed=args.windowed, workers=args.workers
    )
    write_matrix_csv(out, values)
    manifest.inputs = [str(args.channels)]
    manifest.parameters = {"method": method.value, **params}
    manifest.outputs = [{"path": out.name, "kind": kind.value, "method": method.value, "params": params}]
    if args.figure:
        figure = out.with_suffix(".svg")
        bounds = heatmap_svg(figure, values, method.value.upper())
        manifest.outputs.append({"path": figure.name, "kind": "heatmap", "scale": bounds})
    return out


def cmd_eval(args: argparse.Namespace, manifest: RunManifest) -> Path:
    """Compare a fused matrix with a ground truth matrix, write the report JSON."""

    out = Path(args.out)
    fused_path = Path(args.fused)
    metadata = _output_metadata(fused_path)
    kind = get_matrix_kind_enum(args.kind or metadata.get("kind", MatrixKind.DISTANCE.value))
    method = args.method or metadata.get("method", "unknown")
    params = dict(metadata.get("params", {}))
    config = SnfConfig(
        beta=float(params.get("beta", DEFAULT_BETA)),
        kappa=float(params.get("kappa", DEFAULT_KAPPA)),
    )
    truth = validate_dissimilarity(read_matrix_csv(args.truth))
    report = evaluate(read_matrix_csv(fused_path), truth, kind, method, params, config)
    with open(out, "w", encoding="utf-8") as handle:
        json.dump(report.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")
    manifest.inputs = [str(fused_path), str(args.truth)]
    manifest.parameters = {"kind": kind.value, "method": method}
    manifest.outputs = [{"path": out.name, "kind": "report"}]
    return out


def cmd_mds(args: argparse.Namespace, manifest: RunManifest) -> Path:
    """Classical MDS coordinates of a distance matrix plus a scatter SVG."""

    out = Path(args.out)
    result = classical_mds(validate_dissimilarity(read_matrix_csv(args.matrix)), args.k)
    write_matrix_csv(out, result.coordinates)
    figure = out.with_suffix(".svg")
    mds_scatter_svg(figure, result.coordinates)
    manifest.inputs = [str(args.matrix)]
    manifest.parameters = {"k": args.k}
    manifest.outputs = [
        {
            "path": out.name,
            "kind": "coordinates",
            "eigenvalues": [float(value) for value in result.eigenvalues],
            "negative_mass": result.negative_mass,
        },
        {"path": figure.name, "kind": "figure"},
    ]
    return out


def _threshold(value: str) -> Any:
    return ENCLOSING if value == ENCLOSING else float(value)


def cmd_persistence(args: argparse.Namespace, manifest: RunManifest) -> Path:
    """Rips persistence diagram CSV of a distance matrix plus a diagram SVG."""

    out = Path(args.out)
    diagram = rips_persistence(
        validate_dissimilarity(read_matrix_csv(args.matrix)), args.max_dim, _threshold(args.threshold)
    )
    write_diagram_csv(out, diagram)
    figure = out.with_suffix(".svg")
    diagram_svg(figure, diagram)
    manifest.inputs = [str(args.matrix)]
    manifest.parameters = {"max_dim": args.max_dim, "threshold": args.threshold}
    manifest.outputs = [
        {"path": out.name, "kind": "diagram", "threshold": diagram.threshold, "points": len(diagram.points)},
        {"path": figure.name, "kind": "figure"},
    ]
    return out


def _trial_spec(args: argparse.Namespace) -> TrialSpec:
    return TrialSpec(
        activity=args.activity, subject=args.subject, max_rows=args.max_rows, standardize=args.standardize
    )


def cmd_ingest(args: argparse.Namespace, manifest: RunManifest) -> Path:
    """Re-emit the modalities of a MotionSense trial as a channels CSV."""

    out = Path(args.out)
    source = args.input or str(bundled_sample_path())
    spec = _trial_spec(args)
    ts = load_motionsense(source, spec)
    write_channels_csv(out, ts)
    manifest.inputs = [source]
    manifest.parameters = {"activity": spec.activity, "subject": spec.subject, "max_rows": spec.max_rows}
    manifest.parameters["standardize"] = spec.standardize
    manifest.outputs = [{"path": out.name, "kind": "channels"}]
    if args.figure:
        figure = out.with_suffix(".svg")
        channels_svg(figure, ts)
        manifest.outputs.append({"path": figure.name, "kind": "figure"})
    return out


Job = Callable[[], List[Dict[str, Any]]]


async def _gather(jobs: Sequence[Job], workers: int) -> List[List[Dict[str, Any]]]:
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(await asyncio.gather(*(loop.run_in_executor(pool, job) for job in jobs)))


def _jde_name(d: int, lam: float) -> str:
    return f"jde_d{d}_l{lam:g}"


def _synthetic_jobs(args: argparse.Namespace, out: Path, manifest: RunManifest) -> List[Job]:
    kind = EXPERIMENTS.index(args.experiment) + 1
    experiment = make_experiment(kind, args.seed, TorusCurveParams(N=args.points))
    config = _snf_config(args)
    truth = experiment.truth
    write_channels_csv(out / "channels.csv", experiment.series)
    write_matrix_csv(out / "truth.csv", truth.values)
    similarity = ground_truth_similarity(experiment.points, config)
    write_matrix_csv(out / "truth_similarity.csv", similarity.values)
    manifest.parameters["sensors"] = [sensor.to_dict() for sensor in experiment.sensors]
    manifest.outputs.extend(
        [
            {"path": "channels.csv", "kind": "channels"},
            {"path": "truth.csv", "kind": MatrixKind.DISTANCE.value, "method": "truth", "params": {}},
            {"path": "truth_similarity.csv", "kind": MatrixKind.SIMILARITY.value, "method": "truth", "params": {}},
            {"path": "truth.svg", "kind": "heatmap", "scale": heatmap_svg(out / "truth.svg", truth.values)},
            {
                "path": "truth_similarity.svg",
                "kind": "heatmap",
                "scale": heatmap_svg(out / "truth_similarity.svg", similarity.values),
            },
        ]
    )
    channels_svg(out / "channels.svg", experiment.series)
    torus_curve_svg(out / "curve.svg", experiment.points)
    manifest.outputs.extend([{"path": "channels.svg", "kind": "figure"}, {"path": "curve.svg", "kind": "figure"}])

    wrap = DelayParams(tau=1, d=1, boundary=Boundary.WRAP)
    runs: List[Tuple[str, FusionMethod, DelayParams]] = [
        ("jdl", FusionMethod.JDL, wrap),
        ("snf", FusionMethod.SNF, wrap),
    ]
    runs.extend(
        (_jde_name(d, lam), FusionMethod.JDE, DelayParams(tau=1, d=d, lam=lam, boundary=Boundary.WRAP))
        for d, lam in SYNTHETIC_JDE_GRID
    )

    def _job(name: str, method: FusionMethod, params: DelayParams) -> Job:
        def _run() -> List[Dict[str, Any]]:
            values, kind, used = fuse_series(method, experiment.series, params, config, workers=1)
            write_matrix_csv(out / f"{name}.csv", values)
            bounds = heatmap_svg(out / f"{name}.svg", values, name)
            report = evaluate(values, truth, kind, method.value, used, config)
            with open(out / f"{name}.eval.json", "w", encoding="utf-8") as handle:
                json.dump(report.to_dict(), handle, indent=2, sort_keys=True)
                handle.write("\n")
            logger.info("%s: pearson %.4f, spearman %.4f", name, report.pearson, report.spearman)
            return [
                {"path": f"{name}.csv", "kind": kind.value, "method": method.value, "params": used},
                {"path": f"{name}.svg", "kind": "heatmap", "scale": bounds},
                {"path": f"{name}.eval.json", "kind": "report"},
            ]

        return _run

    return [_job(name, method, params) for name, method, params in runs]


def _motionsense_jobs(args: argparse.Namespace, out: Path, manifest: RunManifest) -> List[Job]:
    threshold = _threshold(args.threshold)
    if args.max_dim == 2 and threshold == ENCLOSING:
        raise ThresholdRequiredException("Persistence in dimension 2 needs --threshold")
    source = args.input or str(bundled_sample_path())
    ts = load_motionsense(source, _trial_spec(args))
    manifest.inputs.append(source)
    write_channels_csv(out / "channels.csv", ts)
    channels_svg(out / "channels.svg", ts)
    manifest.outputs.extend([{"path": "channels.csv", "kind": "channels"}, {"path": "channels.svg", "kind": "figure"}])
    config = _snf_config(args)

    runs: List[Tuple[str, FusionMethod, DelayParams]] = [("jdl", FusionMethod.JDL, MOTIONSENSE_DELAY)]
    runs.extend(
        (
            _jde_name(MOTIONSENSE_DELAY.d, lam),
            FusionMethod.JDE,
            DelayParams(tau=MOTIONSENSE_DELAY.tau, d=MOTIONSENSE_DELAY.d, lam=lam, boundary=Boundary.TRUNCATE),
        )
        for lam in MOTIONSENSE_LAMBDAS
    )

    def _job(name: str, method: FusionMethod, params: DelayParams) -> Job:
        def _run() -> List[Dict[str, Any]]:
            values, kind, used = fuse_series(method, ts, params, config, workers=1)
            matrix: DissimilarityMatrix = validate_dissimilarity(values)
            write_matrix_csv(out / f"{name}.csv", values)
            bounds = heatmap_svg(out / f"{name}.svg", values, name)
            mds = classical_mds(matrix, 2)
            write_matrix_csv(out / f"{name}.mds.csv", mds.coordinates)
            mds_scatter_svg(out / f"{name}.mds.svg", mds.coordinates, f"MDS of {name}")
            diagram = rips_persistence(matrix, args.max_dim, threshold)
            write_diagram_csv(out / f"{name}.diagram.csv", diagram)
            diagram_svg(out / f"{name}.diagram.svg", diagram, f"Persistence of {name}")
            return [
                {"path": f"{name}.csv", "kind": kind.value, "method": method.value, "params": used},
                {"path": f"{name}.svg", "kind": "heatmap", "scale": bounds},
                {"path": f"{name}.mds.csv", "kind": "coordinates", "negative_mass": mds.negative_mass},
                {"path": f"{name}.mds.svg", "kind": "figure"},
                {"path": f"{name}.diagram.csv", "kind": "diagram", "threshold": diagram.threshold},
                {"path": f"{name}.diagram.svg", "kind": "figure"},
            ]

        return _run

    return [_job(name, method, params) for name, method, params in runs]


def cmd_pipeline(args: argparse.Namespace, manifest: RunManifest) -> Path:
    """Every method, evaluation and figure of one experiment."""

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest.parameters = {"experiment": args.experiment}
    if args.experiment == "motionsense":
        spec = _trial_spec(args)
        manifest.parameters.update({"activity": spec.activity, "subject": spec.subject, "max_rows": spec.max_rows})
        manifest.parameters.update({"max_dim": args.max_dim, "threshold": args.threshold})
        jobs = _motionsense_jobs(args, out, manifest)
    else:
        manifest.parameters.update({"points": args.points, **_snf_dict(_snf_config(args))})
        jobs = _synthetic_jobs(args, out, manifest)

    workers = args.workers if args.workers is not None else env_workers()
    logger.info("Running %d jobs of %s on %d workers", len(jobs), args.experiment, workers)
    for entries in asyncio.run(_gather(jobs, workers)):
        manifest.outputs.extend(entries)
    return out


def _add_switch(parser: argparse.ArgumentParser, flag: str, text: str) -> None:
    """An off-by-default switch that --no-<flag> turns off again."""
    parser.add_argument(flag, action=argparse.BooleanOptionalAction, default=False, help=text)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="seed of the random generator")
    parser.add_argument("--out", required=True, help="output file or directory")
    _add_switch(parser, "--quiet", "only log warnings and errors")
    parser.add_argument("--config", help="key=value file supplying default flags")


def _add_delay(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tau", type=int, default=1, help="delay in samples")
    parser.add_argument("--d", type=int, default=1, help="window length")
    parser.add_argument("--lambda", dest="lam", type=float, default=0.0, help="orthogonality parameter in [0, 1]")
    parser.add_argument("--scope", default="unmarked_only", choices=["unmarked_only", "all_vectors"])
    parser.add_argument("--boundary", default="truncate", choices=["truncate", "wrap"])


def _add_snf(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--beta", type=float, default=DEFAULT_BETA)
    parser.add_argument("--kappa", type=float, default=DEFAULT_KAPPA)
    parser.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    _add_switch(parser, "--symmetrize", "symmetrize each SNF update")
    _add_switch(parser, "--synchronous", "update all views from the previous sweep")


def _add_trial(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="trial CSV or dataset root, defaults to the bundled sample")
    parser.add_argument("--activity", default="dws_1")
    parser.add_argument("--subject", type=int, default=1)
    parser.add_argument("--max-rows", dest="max_rows", type=int, default=DEFAULT_MAX_ROWS)
    _add_switch(parser, "--standardize", "scale channels to mean 0, stddev 1")


def build_parser() -> argparse.ArgumentParser:
    """The argument parser of python-jde-fusion."""

    parser = argparse.ArgumentParser(prog="python-jde-fusion", description="Fuse multi-sensor time series.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="generate a synthetic torus experiment")
    synth.add_argument("--kind", type=int, choices=[1, 2, 3], default=1)
    synth.add_argument("--points", type=int, default=100, help="samples along the curve")
    _add_switch(synth, "--figures", "also draw SVG figures")
    _add_common(synth)
    synth.set_defaults(handler=cmd_synth)

    fuse = commands.add_parser("fuse", help="fuse a channels CSV into one matrix")
    fuse.add_argument("channels", help="channels CSV")
    fuse.add_argument("--method", required=True, choices=[method.value for method in FusionMethod])
    _add_switch(fuse, "--windowed", "JDL/SNF compare whole windows per sensor")
    fuse.add_argument("--workers", type=int, default=None, help="thread pool size for JDE")
    _add_switch(fuse, "--figure", "also draw a heatmap SVG")
    _add_delay(fuse)
    _add_snf(fuse)
    _add_common(fuse)
    fuse.set_defaults(handler=cmd_fuse)

    evaluation = commands.add_parser("eval", help="compare a fused matrix with the ground truth")
    evaluation.add_argument("fused", help="fused matrix CSV")
    evaluation.add_argument("truth", help="ground truth distance CSV")
    evaluation.add_argument("--kind", choices=[kind.value for kind in MatrixKind], default=None)
    evaluation.add_argument("--method", default=None)
    _add_common(evaluation)
    evaluation.set_defaults(handler=cmd_eval)

    mds = commands.add_parser("mds", help="classical MDS of a distance matrix")
    mds.add_argument("matrix", help="distance matrix CSV")
    mds.add_argument("--k", type=int, default=2, help="target dimension")
    _add_common(mds)
    mds.set_defaults(handler=cmd_mds)

    persistence = commands.add_parser("persistence", help="Rips persistence diagram of a distance matrix")
    persistence.add_argument("matrix", help="distance matrix CSV")
    persistence.add_argument("--max-dim", dest="max_dim", type=int, choices=[0, 1, 2], default=1)
    persistence.add_argument("--threshold", default=ENCLOSING, help="'enclosing' or a number")
    _add_common(persistence)
    persistence.set_defaults(handler=cmd_persistence)

    ingest = commands.add_parser("ingest", help="extract a MotionSense trial as a channels CSV")
    _add_trial(ingest)
    _add_switch(ingest, "--figure", "also draw the channels")
    _add_common(ingest)
    ingest.set_defaults(handler=cmd_ingest)

    pipeline = commands.add_parser("pipeline", help="run a whole experiment")
    pipeline.add_argument("experiment", choices=EXPERIMENTS)
    pipeline.add_argument("--points", type=int, default=100, help="samples along the curve")
    pipeline.add_argument("--workers", type=int, default=None, help="thread pool size")
    pipeline.add_argument("--max-dim", dest="max_dim", type=int, choices=[0, 1, 2], default=1, help="motionsense only")
    pipeline.add_argument("--threshold", default=ENCLOSING, help="'enclosing' or a number, motionsense only")
    _add_snf(pipeline)
    _add_trial(pipeline)
    _add_common(pipeline)
    pipeline.set_defaults(handler=cmd_pipeline)

    return parser


def config_arguments(path: str) -> List[str]:
    """Turn a key=value file into flags; true and false give --flag and --no-flag."""

    arguments: List[str] = []
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{number}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            if value.lower() in ("true", "false"):
                arguments.append(flag if value.lower() == "true" else "--no-" + flag[2:])
                continue
            arguments.extend([flag, value])
    return arguments


def _with_config(argv: List[str]) -> List[str]:
    """Insert the flags of --config right after the subcommand, so the command line wins."""

    config_parser = argparse.ArgumentParser(add_help=False)
    config_parser.add_argument("--config")
    known, _ = config_parser.parse_known_args(argv)
    if not known.config:
        return argv
    commands = [index for index, token in enumerate(argv) if not token.startswith("-")]
    if not commands:
        return argv
    position = commands[0] + 1
    return argv[:position] + config_arguments(known.config) + argv[position:]


def _configure_logging(quiet: bool) -> None:
    level = logging.DEBUG if DEBUG else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)
    logging.getLogger("matplotlib").setLevel(max(level, logging.WARNING))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line; 0 on success, 1 on failure, 2 on a usage error."""

    tokens = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_with_config(tokens))
    except OSError as exc:
        print(f"python-jde-fusion: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"python-jde-fusion: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)

    _configure_logging(args.quiet)
    manifest = RunManifest(subcommand=args.command, seed=args.seed)
    started = time.perf_counter()
    try:
        out = args.handler(args, manifest)
        manifest.duration_seconds = time.perf_counter() - started
        manifest.write(_manifest_path(out))
    except JdeFusionException as exc:
        logger.error("%s: %s", type(exc).__name__, exc.message.replace("\n", " "))
        return 1
    except (ValueError, OSError) as exc:
        logger.error("%s: %s", type(exc).__name__, str(exc).replace("\n", " "))
        return 1
    return 0
