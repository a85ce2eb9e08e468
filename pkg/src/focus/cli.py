"""Command-line front end: synthesize, train, apply, score, eval, report.

Each error class maps to its own exit code so shell pipelines can react
to the failure kind.  Output files are written atomically.  With
--reproducible no timestamps are emitted, making runs byte-identical
for fixed inputs and seeds.
"""

from __future__ import annotations

import argparse
import io as _io
import sys
from dataclasses import dataclass, field

import numpy as np

from . import detect, geneig, projection, scatter, synth
from .errors import (
    ConfigError,
    DegenerateModelError,
    DimensionError,
    EmptySetError,
    FocusError,
    IndefiniteDenominatorError,
    MetricError,
    ModelCorruptError,
    ModelVersionError,
    NumericInputError,
    ScorerError,
)
from .io import (
    atomic_write_bytes,
    load_set_directory,
    read_focm,
    read_matrix,
    read_matrix_csv,
    write_matrix,
)

EXIT_CODES = {
    ConfigError: 2,
    DimensionError: 3,
    EmptySetError: 4,
    NumericInputError: 5,
    IndefiniteDenominatorError: 6,
    DegenerateModelError: 7,
    ModelVersionError: 8,
    ModelCorruptError: 9,
    ScorerError: 10,
    MetricError: 11,
}
EXIT_IO = 12


@dataclass(frozen=True)
class RunConfig:
    """Resolved invocation: one subcommand plus its settings."""

    subcommand: str
    paths: dict = field(default_factory=dict)
    weighting: str = "uniform"
    epsilon: float = geneig.DEFAULT_EPSILON_COEFF
    epsilon_abs: float | None = None
    cutoff: float = geneig.DEFAULT_CUTOFF
    zero_tol: float = geneig.DEFAULT_ZERO_TOL
    scorer: str = "knn:3"
    precision_at: tuple = (10,)
    seed: int = 0
    scenario: str = "analytic"
    fmt: str = "csv"
    stdin_format: str = "csv"
    reproducible: bool = False
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.epsilon_abs is not None and self.epsilon_abs < 0:
            raise ConfigError(f"epsilon-abs must be nonnegative, got {self.epsilon_abs}")
        if not 0.0 < self.cutoff <= 1.0:
            raise ConfigError(f"cutoff must be in (0, 1], got {self.cutoff}")
        if self.zero_tol < 0 or self.zero_tol >= self.cutoff:
            raise ConfigError(
                f"zero_tol {self.zero_tol} must be nonnegative and below cutoff"
            )
        if any(k < 1 for k in self.precision_at):
            raise ConfigError(f"precision cutoffs must be positive: {self.precision_at}")


def _read_input_matrix(path: str, cfg: RunConfig) -> np.ndarray:
    if path == "-":
        raw = sys.stdin.buffer.read()
        if cfg.stdin_format == "focm":
            return read_focm(_io.BytesIO(raw))
        return read_matrix_csv(_io.StringIO(raw.decode("utf-8")))
    return read_matrix(path)


def _write_labels(path, labels) -> None:
    lines = ["index,label"]
    lines += [f"{i},{int(v)}" for i, v in enumerate(labels)]
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def _read_labels(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        rows = [line.strip() for line in fh if line.strip()]
    if rows and not rows[0].split(",")[0].lstrip("-").isdigit():
        rows = rows[1:]
    pairs = []
    for row in rows:
        cells = row.split(",")
        if len(cells) != 2:
            raise MetricError(f"labels row {row!r} is not index,label")
        pairs.append((int(cells[0]), int(cells[1])))
    pairs.sort()
    return np.array([label for _, label in pairs], dtype=int)


def _format_values(values) -> str:
    return ", ".join(f"{v:.6g}" for v in values)


def cmd_synth(cfg: RunConfig) -> int:
    import os

    out = cfg.paths["out"]
    os.makedirs(out, exist_ok=True)
    opt = cfg.options
    if cfg.scenario == "analytic":
        spec = synth.AnalyticSpec(
            m_sets=opt.get("sets") or 10,
            n_per_set=opt.get("n") or 10000,
            seed=cfg.seed,
            scale=opt.get("scale", 3.0),
        )
        coll = synth.gen_analytic(spec)
        for m, x in enumerate(coll.sets):
            write_matrix(os.path.join(out, f"set_{m:03d}.{cfg.fmt}"), x, cfg.fmt)
        print(f"wrote {coll.num_sets} sets of {spec.n_per_set} points (d=3) to {out}")
        return 0

    spec = synth.IlluminationSpec(
        side=opt.get("side") or 28,
        amp_sigma=opt.get("amp_sigma", 0.5),
        fraction_lit=opt.get("fraction_lit", 0.5),
        seed=cfg.seed,
        m_sets=opt.get("sets") or 40,
        n_per_set=opt.get("n") or 300,
    )
    corpus = synth.gen_images(spec)
    train_dir = os.path.join(out, "train")
    os.makedirs(train_dir, exist_ok=True)
    for m, x in enumerate(corpus.train.sets):
        write_matrix(os.path.join(train_dir, f"set_{m:03d}.{cfg.fmt}"), x, cfg.fmt)
    write_matrix(os.path.join(out, f"test.{cfg.fmt}"), corpus.test, cfg.fmt)
    _write_labels(os.path.join(out, "labels.csv"), corpus.test_labels)
    print(
        f"wrote {corpus.train.num_sets} training sets ({spec.n_per_set} images each, "
        f"side {spec.side}) and {corpus.test.shape[0]} test images to {out}"
    )
    return 0


def cmd_train(cfg: RunConfig) -> int:
    coll = load_set_directory(cfg.paths["sets"])
    if coll.num_sets == 1:
        print(
            "warning: a single training set gives rank(Q)=0; every varying "
            "direction looks like a distractor",
            file=sys.stderr,
        )
    stats = scatter.SufficientStats.from_sets(coll)
    weighting = (
        scatter.WeightingScheme.proportional()
        if cfg.weighting == "proportional"
        else scatter.WeightingScheme.uniform()
    )
    summ = scatter.summarize(stats, weighting)
    eps = (
        cfg.epsilon_abs
        if cfg.epsilon_abs is not None
        else geneig.relative_epsilon(summ.c_all, cfg.epsilon)
    )
    spectrum = geneig.solve(summ.c_within, summ.c_all, epsilon=eps)
    part = geneig.partition(spectrum, cutoff=cfg.cutoff, zero_tol=cfg.zero_tol)
    model = projection.build_mapping(spectrum, part)
    projection.save(model, cfg.paths["out"], timestamp=not cfg.reproducible)

    print(f"sets {coll.num_sets}  points {coll.total_points}  dim {coll.dim}")
    print(f"epsilon {spectrum.epsilon:.6g}  cutoff {cfg.cutoff:g}  zero_tol {cfg.zero_tol:g}")
    print(f"spectrum: {_format_values(spectrum.values)}")
    print(
        f"partition: kept-null {len(part.keep_null)}  ambiguous {len(part.ambiguous)}  "
        f"removed {len(part.remove_distractor)}"
    )
    print(f"identity residual: {summ.identity_residual():.6g}")
    print(f"model: {cfg.paths['out']} ({model.dim_in} -> {model.dim_out})")
    return 0


def cmd_apply(cfg: RunConfig) -> int:
    model = projection.load(cfg.paths["model"])
    x = _read_input_matrix(cfg.paths["in"], cfg)
    if x.shape[0] == 0:
        out = np.zeros((0, model.dim_out))
    else:
        out = projection.apply(model, x)
    write_matrix(cfg.paths["out"], out)
    print(f"applied {model.dim_in}->{model.dim_out} map to {x.shape[0]} rows")
    return 0


def cmd_score(cfg: RunConfig) -> int:
    x = _read_input_matrix(cfg.paths["in"], cfg)
    report = detect.score(x, cfg.scorer)
    lines = [f"{v:.17g}" for v in report.scores]
    payload = ("\n".join(lines) + "\n").encode("ascii")
    out = cfg.paths.get("out")
    if out:
        atomic_write_bytes(out, payload)
        print(f"scored {len(lines)} rows with {report.scorer}")
    else:
        sys.stdout.write(payload.decode("ascii"))
    return 0


def cmd_eval(cfg: RunConfig) -> int:
    scores = np.loadtxt(cfg.paths["scores"], ndmin=1)
    labels = _read_labels(cfg.paths["labels"])
    metrics = detect.evaluate(scores, labels, cfg.precision_at)
    print(f"auc {metrics['auc']:.6f}")
    for k in sorted(metrics["precision_at"]):
        print(f"precision_at {k} {metrics['precision_at'][k]:.6f}")
    return 0


def cmd_report(cfg: RunConfig) -> int:
    model = projection.load(cfg.paths["model"])
    removed = set(model.removed_indices)
    print(f"model {cfg.paths['model']}")
    print(f"dim_in {model.dim_in}  dim_out {model.dim_out}  removed {model.num_removed}")
    print(f"cutoff {model.cutoff:g}  epsilon {model.epsilon:.6g}  zero_tol {model.zero_tol:g}")
    print(f"created {model.created}")
    print("index  eigenvalue    label")
    for i, v in enumerate(model.eigenvalues):
        if i in removed:
            label = "removed"
        elif v <= model.zero_tol:
            label = "kept-null"
        else:
            label = "ambiguous"
        print(f"{i:5d}  {v:<12.6g}  {label}")
    return 0


_HANDLERS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "apply": cmd_apply,
    "score": cmd_score,
    "eval": cmd_eval,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="focus",
        description="Learn and apply projections that drop distractor directions.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--scenario", choices=("analytic", "images"), default="analytic")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sets", type=int, help="number of training sets")
    p.add_argument("--n", type=int, help="points or images per set")
    p.add_argument("--scale", type=float, default=3.0, help="analytic mean spacing")
    p.add_argument("--side", type=int, help="image edge length")
    p.add_argument("--amp-sigma", type=float, default=0.5)
    p.add_argument("--fraction-lit", type=float, default=0.5)
    p.add_argument("--format", choices=("csv", "focm"), default="csv")
    p.add_argument("--reproducible", action="store_true")

    p = sub.add_parser("train", help="estimate scatter and fit a projection model")
    p.add_argument("--sets", required=True, help="directory of set files")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--weighting", choices=("uniform", "proportional"), default="uniform")
    p.add_argument("--epsilon", type=float, default=geneig.DEFAULT_EPSILON_COEFF,
                   help="trace-relative ridge coefficient")
    p.add_argument("--epsilon-abs", type=float, help="absolute ridge override")
    p.add_argument("--cutoff", type=float, default=geneig.DEFAULT_CUTOFF)
    p.add_argument("--zero-tol", type=float, default=geneig.DEFAULT_ZERO_TOL)
    p.add_argument("--reproducible", action="store_true")

    p = sub.add_parser("apply", help="project a matrix through a model")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True, help="matrix file or - for stdin")
    p.add_argument("--out", required=True)
    p.add_argument("--stdin-format", choices=("csv", "focm"), default="csv")

    p = sub.add_parser("score", help="compute anomaly scores for a matrix")
    p.add_argument("--in", dest="infile", required=True, help="matrix file or - for stdin")
    p.add_argument("--out", help="scores file; omitted prints to stdout")
    p.add_argument("--scorer", default="knn:3", help="knn:K or mahalanobis")
    p.add_argument("--stdin-format", choices=("csv", "focm"), default="csv")

    p = sub.add_parser("eval", help="evaluate scores against labels")
    p.add_argument("--scores", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--precision-at", default="10", help="comma-separated cutoffs")

    p = sub.add_parser("report", help="print a model's spectrum table")
    p.add_argument("--model", required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    paths = {}
    for key, attr in (("out", "out"), ("sets", "sets"), ("model", "model"),
                      ("in", "infile"), ("scores", "scores"), ("labels", "labels")):
        value = getattr(args, attr, None)
        if value is not None:
            paths[key] = value
    if args.subcommand == "train":
        # --sets is a directory input here, not an integer count
        paths["sets"] = args.sets
    precision = (10,)
    if getattr(args, "precision_at", None):
        try:
            precision = tuple(int(t) for t in str(args.precision_at).split(","))
        except ValueError:
            raise ConfigError(f"bad precision cutoffs {args.precision_at!r}") from None
    options = {}
    for key in ("scale", "side", "amp_sigma", "fraction_lit"):
        if getattr(args, key, None) is not None:
            options[key] = getattr(args, key)
    if args.subcommand == "synth":
        options["sets"] = args.sets
        options["n"] = args.n
    return RunConfig(
        subcommand=args.subcommand,
        paths=paths,
        weighting=getattr(args, "weighting", "uniform"),
        epsilon=getattr(args, "epsilon", geneig.DEFAULT_EPSILON_COEFF),
        epsilon_abs=getattr(args, "epsilon_abs", None),
        cutoff=getattr(args, "cutoff", geneig.DEFAULT_CUTOFF),
        zero_tol=getattr(args, "zero_tol", geneig.DEFAULT_ZERO_TOL),
        scorer=getattr(args, "scorer", "knn:3"),
        precision_at=precision,
        seed=getattr(args, "seed", 0),
        scenario=getattr(args, "scenario", "analytic"),
        fmt=getattr(args, "format", "csv"),
        stdin_format=getattr(args, "stdin_format", "csv"),
        reproducible=getattr(args, "reproducible", False),
        options=options,
    )


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return _HANDLERS[cfg.subcommand](cfg)
    except FocusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for klass, code in EXIT_CODES.items():
            if isinstance(exc, klass):
                return code
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint():  # console-script hook
    raise SystemExit(run())
