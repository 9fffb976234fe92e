"""Command-line surface for experiments and artifact inspection.

Subcommands::

    gen-pop           draw a seeded synthetic worker population
    recruit           rank and select workers (or models) for one task
    bench-optimizers  greedy vs GA / PSO / ACO on one population
    bench-baselines   greedy vs reputation-only / cpu-only / random
    simulate          run a task stream through a ledger + blob store
    store put|get     content-addressed blob store access
    ledger replay|digest   fold or fingerprint a saved event log
    report            render benchmark CSVs as a markdown table

Artifact-producing commands take ``--out DIR`` and leave a
``manifest.json`` there recording the argv, input paths, seed and the
SHA-256 of every output file; re-running the recorded argv reproduces
every value byte for byte (the ``wall_ms`` column of benchmark results
is a wall-clock measurement and varies run to run).  Exit codes: 0
success, 1 data error, 2 usage error.  Parallel commands honor
``--jobs`` as an upper bound on worker processes.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from . import __version__
from . import metaheuristics as mh
from . import simharness as sh
from ._kernels import BACKEND
from .allocation import SelectionReport, allocate_models, greedy_select
from .core import (
    MarketError,
    ModelRecord,
    TaskSpec,
    TaskType,
    WorkerRegistry,
)
from .ledger import Ledger, log_digest, read_log, replay
from .store import BlobStore, NotFound

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2


class DataError(MarketError):
    """Bad input data; maps to exit code 1."""


# -- json + schema helpers -----------------------------------------------


def _load_json(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise DataError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON in {path}: {exc}") from exc


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _schema_registry():
    import referencing

    registry = referencing.Registry()
    for entry in resources.files("crowdmarket").joinpath("schemas").iterdir():
        if not entry.name.endswith(".schema.json"):
            continue
        contents = json.loads(entry.read_text(encoding="utf-8"))
        resource = referencing.Resource.from_contents(contents)
        registry = registry.with_resource(contents["$id"], resource)
    return registry


def load_schema(name: str) -> dict:
    """A shipped schema by short name, e.g. ``"population"``."""
    ref = resources.files("crowdmarket").joinpath(
        "schemas", f"{name}.schema.json"
    )
    return json.loads(ref.read_text(encoding="utf-8"))


def validate_document(obj, schema_name: str) -> None:
    """Schema-check a document; raises :class:`DataError` on violation."""
    import jsonschema

    schema = load_schema(schema_name)
    validator = jsonschema.Draft202012Validator(
        schema, registry=_schema_registry()
    )
    error = jsonschema.exceptions.best_match(validator.iter_errors(obj))
    if error is not None:
        path = "$" + "".join(f"[{p!r}]" for p in error.absolute_path)
        raise DataError(f"{schema_name} schema violation at {path}: {error.message}")


def _load_population(path: str):
    doc = _load_json(path)
    validate_document(doc, "population")
    try:
        return sh.population_from_dict(doc)
    except (KeyError, ValueError, MarketError) as exc:
        raise DataError(f"bad population file {path}: {exc}") from exc


def _load_stream(path: str):
    doc = _load_json(path)
    validate_document(doc, "stream")
    return sh.stream_from_dict(doc)


# -- manifests -----------------------------------------------------------


@dataclasses.dataclass
class RunManifest:
    """What ran, on what, and the fingerprints of what came out."""

    command: str
    argv: list[str]
    seed: int | None
    output_dir: str
    inputs: dict[str, str]
    outputs: dict[str, str]

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "argv": self.argv,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "versions": {
                "package": __version__,
                "python": "%d.%d.%d" % sys.version_info[:3],
                "kernel_backend": BACKEND,
            },
            "inputs": self.inputs,
            "outputs": self.outputs,
        }


def _write_manifest(
    command: str,
    argv: list[str],
    outdir: Path,
    *,
    seed: int | None,
    inputs: dict[str, str],
    artifacts: list[Path],
) -> None:
    outputs = {}
    for artifact in artifacts:
        digest = hashlib.sha256(artifact.read_bytes()).hexdigest()
        outputs[artifact.name] = digest
    manifest = RunManifest(
        command=command,
        argv=argv,
        seed=seed,
        output_dir=str(outdir),
        inputs=inputs,
        outputs=outputs,
    )
    _dump_json(manifest.to_dict(), outdir / "manifest.json")


def _outdir(args) -> Path:
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# -- commands ------------------------------------------------------------


def cmd_gen_pop(args, argv: list[str]) -> int:
    if args.spec:
        doc = _load_json(args.spec)
        spec = sh.PopulationSpec.from_dict(doc)
    else:
        spec = sh.PopulationSpec()
    overrides = {}
    if args.n is not None:
        overrides["n_workers"] = args.n
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
    profiles, latents = sh.generate_population(spec)
    outdir = _outdir(args)
    pop_path = outdir / "population.json"
    _dump_json(sh.population_to_dict(spec, profiles, latents), pop_path)
    _write_manifest(
        "gen-pop", argv, outdir, seed=spec.seed,
        inputs={"spec": args.spec} if args.spec else {},
        artifacts=[pop_path],
    )
    print(f"wrote {pop_path} ({len(profiles)} workers, seed {spec.seed})")
    return EXIT_OK


def _select_for_task(registry, task, method, args):
    if task.kind is TaskType.MODEL_SHARING:
        models = [
            ModelRecord.from_dict(m) for m in _load_json(args.models)["models"]
        ] if args.models else []
        if not models:
            raise DataError("sharing task needs --models with at least one record")
        for model in models:
            validate_document(model.to_dict(), "model")
        return allocate_models(registry, task, models)
    if method == "greedy":
        return greedy_select(registry, task)
    if method in mh.METAHEURISTICS:
        cfg = mh.default_config(method)
        knobs = {}
        if args.seed is not None:
            knobs["seed"] = args.seed
        if args.iterations is not None:
            knobs["iterations"] = args.iterations
        if args.population_size is not None:
            knobs["population_size"] = args.population_size
        if knobs:
            cfg = dataclasses.replace(cfg, **knobs)
        select = {"ga": mh.ga_select, "pso": mh.pso_select, "aco": mh.aco_select}
        report, _trajectory = select[method](registry, task, config=cfg)
        return report
    if method == "reputation":
        return mh.reputation_select(registry, task)
    if method == "cpu":
        return mh.cpu_select(registry, task)
    if method == "random":
        return mh.random_select(registry, task, seed=args.seed or 0)
    raise DataError(f"unknown method {method!r}")


def cmd_recruit(args, argv: list[str]) -> int:
    _spec, profiles, _latents = _load_population(args.pop)
    registry = WorkerRegistry.from_profiles(profiles)
    task_doc = _load_json(args.task)
    validate_document(task_doc, "task")
    task = TaskSpec.from_dict(task_doc)
    report = _select_for_task(registry, task, args.method, args)
    if args.csv:
        print(report.csv_text(), end="")
    else:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    if args.out:
        outdir = _outdir(args)
        report_json = outdir / "report.json"
        report_csv = outdir / "report.csv"
        _dump_json(report.to_dict(), report_json)
        report.write_csv(report_csv)
        _write_manifest(
            "recruit", argv, outdir, seed=args.seed,
            inputs={"pop": args.pop, "task": args.task,
                    **({"models": args.models} if args.models else {})},
            artifacts=[report_json, report_csv],
        )
    return EXIT_OK


def _parse_sizes(raw: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad group sizes {raw!r}") from None
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError(f"bad group sizes {raw!r}")
    return sizes


def _bench_one_size(job: tuple) -> list:
    which, pop_path, size, reps, seed, domain = job
    _spec, profiles, _latents = _load_population(pop_path)
    runner = (
        sh.run_optimizer_benchmark if which == "optimizers"
        else sh.run_baseline_benchmark
    )
    return runner(
        profiles, group_sizes=(size,), repetitions=reps, seed=seed,
        domain=domain,
    )


def _run_bench(which: str, args, argv: list[str]) -> int:
    sizes = args.sizes
    if args.jobs > 1:
        jobs = [
            (which, args.pop, size, args.reps, args.seed, args.domain)
            for size in sizes
        ]
        rows = []
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for chunk in pool.map(_bench_one_size, jobs):
                rows.extend(chunk)
    else:
        _spec, profiles, _latents = _load_population(args.pop)
        runner = (
            sh.run_optimizer_benchmark if which == "optimizers"
            else sh.run_baseline_benchmark
        )
        rows = runner(
            profiles, group_sizes=sizes, repetitions=args.reps,
            seed=args.seed, domain=args.domain,
        )
    outdir = _outdir(args)
    csv_path = outdir / "results.csv"
    json_path = outdir / "results.json"
    sh.write_results_csv(rows, csv_path)
    json_path.write_text(sh.results_to_json(rows) + "\n", encoding="utf-8")
    _write_manifest(
        f"bench-{which}", argv, outdir, seed=args.seed,
        inputs={"pop": args.pop}, artifacts=[csv_path, json_path],
    )
    print(render_results_table(rows))
    return EXIT_OK


def cmd_bench_optimizers(args, argv: list[str]) -> int:
    return _run_bench("optimizers", args, argv)


def cmd_bench_baselines(args, argv: list[str]) -> int:
    return _run_bench("baselines", args, argv)


def cmd_simulate(args, argv: list[str]) -> int:
    _spec, profiles, latents = _load_population(args.pop)
    outdir = _outdir(args)
    inputs = {"pop": args.pop}
    artifacts = []
    if args.stream:
        stream = _load_stream(args.stream)
        inputs["stream"] = args.stream
    else:
        stream_spec = sh.TaskStreamSpec(
            n_tasks=args.tasks, ticks=args.ticks, seed=args.stream_seed,
        )
        stream = sh.generate_task_stream(stream_spec)
        stream_path = outdir / "stream.json"
        _dump_json(sh.stream_to_dict(stream), stream_path)
        artifacts.append(stream_path)
    store = BlobStore(outdir / "store")
    result = sh.run_lifecycle(
        profiles, latents, stream, seed=args.seed, store=store,
    )
    log_path = outdir / "events.log"
    result.ledger.save_log(log_path)
    metrics_path = outdir / "metrics.csv"
    sh.write_metrics_csv(result.metrics, metrics_path)
    artifacts += [log_path, metrics_path]
    _write_manifest(
        "simulate", argv, outdir, seed=args.seed, inputs=inputs,
        artifacts=artifacts,
    )
    print(
        f"events={len(result.ledger.events)} "
        f"completed={result.tasks_completed} failed={result.tasks_failed}\n"
        f"log digest   {result.ledger.log_digest()}\n"
        f"state digest {result.state_digest_hex()}"
    )
    return EXIT_OK


def cmd_store(args, argv: list[str]) -> int:
    store = BlobStore(args.root)
    if args.store_cmd == "put":
        try:
            payload = Path(args.file).read_bytes()
        except FileNotFoundError as exc:
            raise DataError(f"no such file: {args.file}") from exc
        print(store.put(payload))
        return EXIT_OK
    try:
        payload = store.get(args.cid)
    except NotFound as exc:
        raise DataError(str(exc)) from exc
    if args.dest:
        Path(args.dest).write_bytes(payload)
        print(f"wrote {len(payload)} bytes to {args.dest}")
    else:
        sys.stdout.buffer.write(payload)
    return EXIT_OK


def cmd_ledger(args, argv: list[str]) -> int:
    try:
        events = read_log(args.log)
    except (OSError, MarketError, ValueError) as exc:
        raise DataError(f"cannot read log {args.log}: {exc}") from exc
    if args.ledger_cmd == "digest":
        print(f"events       {len(events)}")
        print(f"log digest   {log_digest(events)}")
        return EXIT_OK
    store = BlobStore(args.store) if args.store else None
    state = replay(events, store=store)
    print(f"events       {len(events)}")
    print(f"rejected     {len(state.rejections)}")
    print(f"state digest {state.state_digest_hex()}")
    return EXIT_OK


def render_results_table(rows) -> str:
    """Benchmark rows as a markdown table, best score per size starred."""
    best = {}
    for row in rows:
        if row.group_size not in best or row.mean_qos > best[row.group_size]:
            best[row.group_size] = row.mean_qos
    lines = [
        "| group_size | method | mean_qos | wall_ms |",
        "| ---: | --- | ---: | ---: |",
    ]
    for row in rows:
        star = " *" if row.mean_qos == best[row.group_size] else ""
        lines.append(
            f"| {row.group_size} | {row.method}{star} "
            f"| {row.mean_qos:.6f} | {row.wall_ms:.4f} |"
        )
    return "\n".join(lines)


def cmd_report(args, argv: list[str]) -> int:
    import csv

    rows = []
    for path in args.csv_files:
        try:
            with open(path, newline="", encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                if tuple(reader.fieldnames or ()) != sh.RESULT_HEADER:
                    raise DataError(
                        f"{path} is not a benchmark CSV "
                        f"(header {reader.fieldnames!r})"
                    )
                for rec in reader:
                    rows.append(
                        sh.BenchRow(
                            group_size=int(rec["group_size"]),
                            method=rec["method"],
                            mean_qos=float(rec["mean_qos"]),
                            wall_ms=float(rec["wall_ms"]),
                            seed=int(rec["seed"]),
                        )
                    )
        except FileNotFoundError as exc:
            raise DataError(f"no such file: {path}") from exc
        except ValueError as exc:
            raise DataError(f"bad value in {path}: {exc}") from exc
    table = render_results_table(rows)
    if args.out:
        Path(args.out).write_text(table + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(table)
    return EXIT_OK


# -- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowdmarket",
        description="Crowdsourced training-market toolkit: populations, "
                    "recruitment, benchmarks, event logs, blob store.",
    )
    parser.add_argument(
        "--version", action="version",
        version=f"crowdmarket {__version__} ({BACKEND} kernels)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-pop", help="draw a seeded synthetic population")
    p.add_argument("--n", type=int, default=None, help="number of workers")
    p.add_argument("--seed", type=int, default=None, help="population seed")
    p.add_argument("--spec", default=None, help="population spec JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen_pop)

    p = sub.add_parser("recruit", help="select workers or models for a task")
    p.add_argument("--pop", required=True, help="population JSON file")
    p.add_argument("--task", required=True, help="task JSON file")
    p.add_argument("--models", default=None,
                   help="models JSON file (sharing tasks)")
    p.add_argument("--method", default="greedy", choices=mh.ALL_METHODS)
    p.add_argument("--seed", type=int, default=None, help="search seed")
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--population-size", type=int, default=None)
    p.add_argument("--csv", action="store_true",
                   help="print the report as CSV instead of JSON")
    p.add_argument("--out", default=None, help="optional output directory")
    p.set_defaults(func=cmd_recruit)

    for name, func in (
        ("bench-optimizers", cmd_bench_optimizers),
        ("bench-baselines", cmd_bench_baselines),
    ):
        p = sub.add_parser(name, help=f"run the {name.split('-')[1]} benchmark")
        p.add_argument("--pop", required=True, help="population JSON file")
        p.add_argument("--sizes", type=_parse_sizes,
                       default=(5, 10, 15, 20, 25, 30),
                       help="comma-separated group sizes")
        p.add_argument("--reps", type=int, default=30,
                       help="repetitions per cell")
        p.add_argument("--seed", type=int, default=0, help="base seed")
        p.add_argument("--domain", type=int, default=None,
                       help="task domain (default: most covered)")
        p.add_argument("--jobs", type=int, default=1,
                       help="max parallel worker processes")
        p.add_argument("--out", required=True, help="output directory")
        p.set_defaults(func=func)

    p = sub.add_parser("simulate", help="run a task stream through a ledger")
    p.add_argument("--pop", required=True, help="population JSON file")
    p.add_argument("--stream", default=None, help="task stream JSON file")
    p.add_argument("--tasks", type=int, default=60,
                   help="generated stream size when --stream is absent")
    p.add_argument("--ticks", type=int, default=60,
                   help="arrival window for a generated stream")
    p.add_argument("--stream-seed", type=int, default=7,
                   help="seed for a generated stream")
    p.add_argument("--seed", type=int, default=0, help="lifecycle seed")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("store", help="content-addressed blob store")
    p.add_argument("--root", required=True, help="store root directory")
    store_sub = p.add_subparsers(dest="store_cmd", required=True)
    sp = store_sub.add_parser("put", help="store a file, print its cid")
    sp.add_argument("file")
    sp = store_sub.add_parser("get", help="fetch a blob by cid")
    sp.add_argument("cid")
    sp.add_argument("--dest", default=None, help="write to file, not stdout")
    p.set_defaults(func=cmd_store)

    p = sub.add_parser("ledger", help="inspect a saved event log")
    ledger_sub = p.add_subparsers(dest="ledger_cmd", required=True)
    lp = ledger_sub.add_parser("replay", help="fold a log, print state digest")
    lp.add_argument("log")
    lp.add_argument("--store", default=None,
                    help="blob store root for cid checks")
    lp = ledger_sub.add_parser("digest", help="print a log's digest")
    lp.add_argument("log")
    p.set_defaults(func=cmd_ledger)

    p = sub.add_parser("report", help="render benchmark CSVs as markdown")
    p.add_argument("csv_files", nargs="+", help="results.csv files")
    p.add_argument("--out", default=None, help="write table here")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except MarketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
