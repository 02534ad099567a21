"""Command-line experiment runner.

Subcommands: verify (built-in invariant battery), sweep (grid of adversarial
games to CSV), plot (CSV to SVG), example31 (the compromise-candidate
demonstration), gen (dump a random instance file), eval (run one algorithm on
an instance file). Every output is a pure function of configuration and seeds;
wall-clock timing is opt-in so reruns stay byte-identical.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import adversary, compromise
from .adversary import AdversaryParams, RunReport, adversarial_game, suggest_bin_count
from .core import (
    CircuitSet,
    Instance,
    QuerySet,
    RepresentationFamily,
    PostTrainedModel,
    instance_from_text,
    instance_to_text,
)
from .distortion import distortion_ratio
from .posttrain import ALGORITHMS, DEFAULT_PAIR_BUDGET, get_algorithm, rlhf_borda
from .preferences import (
    BT_LINEAR,
    NOISELESS,
    ORACLE_MODES,
    PreferenceOracle,
    UtilityMatrix,
)
from .verify import run_battery

CSV_SCHEMA_COMMENT = "# distortlab-sweep v1"
CSV_COLUMNS = [
    "variant", "m", "n", "r", "phi_count", "k", "epsilon", "R", "seed",
    "algorithm", "certified", "sum_n_iz", "alg_util", "opt_util",
    "distortion", "ms", "error",
]

VARIANT_EXAMPLE = "example31"
VARIANT_CUSTOM = "custom-instance-file"
VARIANTS = (*adversary.GAME_VARIANTS, VARIANT_EXAMPLE, VARIANT_CUSTOM)


class ConfigError(ValueError):
    """Bad experiment configuration."""


class SchemaError(ValueError):
    """A data file does not match its documented schema."""


# --- configuration -----------------------------------------------------------
#
# Config files are flat "key = value ..." lines; list-valued keys take
# space-separated entries and broadcast against each other (length L or 1).
# See the README for the full key table.


@dataclass
class ExperimentConfig:
    variant: str = adversary.VARIANT_UNITSUM
    algorithm: str = "rlhf_borda"
    oracle: str = NOISELESS
    m: list = field(default_factory=lambda: [4])
    n: list = field(default_factory=lambda: [80])
    r: list = field(default_factory=lambda: [1])
    phi: list = field(default_factory=lambda: [1])
    k: list | None = None
    epsilon: list | None = None
    R: list | None = None
    seeds: list = field(default_factory=lambda: [1])
    alpha: Fraction = Fraction(1, 10)
    beta: Fraction = Fraction(1, 2)
    budget: int = DEFAULT_PAIR_BUDGET
    timing: bool = False
    index_v: bool = False
    out: str = "sweep.csv"
    instance: str | None = None
    dump_dir: str | None = None
    threads: int = 1


_INT_LIST_KEYS = ("m", "n", "r", "phi", "k", "seeds")
_FRACTION_LIST_KEYS = ("epsilon", "R")


def parse_config(text: str) -> ExperimentConfig:
    cfg = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        try:
            if key in _INT_LIST_KEYS:
                setattr(cfg, key, [int(tok) for tok in value.split()])
            elif key in _FRACTION_LIST_KEYS:
                setattr(cfg, key, [Fraction(tok) for tok in value.split()])
            elif key in ("alpha", "beta"):
                setattr(cfg, key, Fraction(value))
            elif key in ("budget", "threads"):
                setattr(cfg, key, int(value))
            elif key in ("timing", "index_v"):
                setattr(cfg, key, bool(int(value)))
            elif key in ("variant", "algorithm", "oracle", "out", "instance", "dump_dir"):
                setattr(cfg, key, value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    return cfg


def _broadcast(cfg: ExperimentConfig):
    lists = {"m": cfg.m, "n": cfg.n, "r": cfg.r, "phi": cfg.phi}
    if cfg.k is not None:
        lists["k"] = cfg.k
    if cfg.epsilon is not None:
        lists["epsilon"] = cfg.epsilon
    if cfg.R is not None:
        lists["R"] = cfg.R
    length = max(len(v) for v in lists.values())
    out = {}
    for key, values in lists.items():
        if len(values) == 1:
            out[key] = values * length
        elif len(values) == length:
            out[key] = values
        else:
            raise ConfigError(
                f"grid key {key!r} has length {len(values)}, expected 1 or {length}"
            )
    return length, out


def validate_config(cfg: ExperimentConfig):
    if cfg.variant not in VARIANTS:
        raise ConfigError(f"unknown variant {cfg.variant!r}; expected one of {VARIANTS}")
    if cfg.algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {cfg.algorithm!r}")
    if cfg.oracle not in ORACLE_MODES:
        raise ConfigError(f"unknown oracle mode {cfg.oracle!r}")
    if not cfg.seeds:
        raise ConfigError("seed list is empty; seeds must be supplied explicitly")
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    if cfg.variant == adversary.VARIANT_UNITSUM and cfg.oracle != NOISELESS:
        raise ConfigError("the unit-sum game publishes a profile only; oracle must be noiseless")
    if cfg.variant == adversary.VARIANT_BT and cfg.oracle != BT_LINEAR:
        raise ConfigError("the Bradley-Terry game requires the bt-linear oracle")
    if cfg.variant == VARIANT_CUSTOM and not cfg.instance:
        raise ConfigError("variant custom-instance-file needs an 'instance = PATH' key")
    length, grid = _broadcast(cfg)
    for i in range(length):
        if grid["m"][i] < 2 or grid["n"][i] < 1 or grid["r"][i] < 1 or grid["phi"][i] < 1:
            raise ConfigError(f"grid point {i}: size values must be positive (m >= 2)")
        if "k" in grid and not (2 <= grid["k"][i] <= grid["m"][i]):
            raise ConfigError(f"grid point {i}: k must satisfy 2 <= k <= m")
    return length, grid


# --- one sweep run -----------------------------------------------------------


def make_skeleton(m: int, n: int, r: int, phi_count: int, seed: int) -> Instance:
    """Deterministic instance skeleton: random total maps, no utilities."""
    rng = np.random.default_rng([seed, 4])
    if r == 1:
        maps = ((0,) * n,) * phi_count
    else:
        maps = tuple(
            tuple(int(z) for z in rng.integers(0, r, size=n)) for _ in range(phi_count)
        )
    return Instance(QuerySet(n), CircuitSet.default(m), RepresentationFamily(r, maps))


def _blank_row(variant, seed, algorithm):
    row = {col: "" for col in CSV_COLUMNS}
    row.update(variant=variant, seed=seed, algorithm=algorithm)
    return row


def _metric(value) -> str:
    return repr(float(value))


def run_sweep_point(task: dict) -> dict:
    """Execute one (grid point, seed) run; returns a CSV row dict.

    Top-level so worker processes can receive it; failures land in the error
    column instead of aborting the sweep.
    """
    variant = task["variant"]
    seed = task["seed"]
    row = _blank_row(variant, seed, task["algorithm"])
    try:
        if variant in adversary.GAME_VARIANTS:
            report = _run_game_task(task)
            row.update(
                m=report.m, n=report.n, r=report.r, phi_count=report.phi_count,
                k=report.k, epsilon=_metric(report.epsilon), R=_metric(report.win_rate),
                certified=int(report.certified), sum_n_iz=report.sum_matched,
                alg_util=_metric(report.alg_util), opt_util=_metric(report.opt_util),
                distortion=_metric(report.distortion),
                ms=int(report.wall_clock_ms) if task["timing"] else 0,
            )
            if task["dump_dir"] and report.world is not None:
                _dump_world(task, report)
        else:
            row.update(_run_plain_task(task))
    except Exception as exc:  # noqa: BLE001 -- the error column is the contract
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _resolve_algorithm(name: str, budget: int):
    """Named algorithm; the Borda router additionally takes the pair budget."""
    if name == "rlhf_borda":

        def algo(instance, pretrained, oracle, rng):
            return rlhf_borda(instance, pretrained, oracle, pair_budget=budget)

        return algo
    return get_algorithm(name)


def _run_game_task(task) -> RunReport:
    m, n, r, phi = task["m"], task["n"], task["r"], task["phi"]
    k = task["k"] if task["k"] is not None else suggest_bin_count(n, r, phi, m)
    overrides = {}
    if task["epsilon"] is not None:
        overrides["epsilon"] = task["epsilon"]
    if task["R"] is not None:
        overrides["win_rate"] = task["R"]
    params = AdversaryParams.defaults(
        n, k, seed=task["seed"], index_weights=task["index_v"], **overrides
    )
    skeleton = make_skeleton(m, n, r, phi, task["seed"])
    pretrained = PostTrainedModel.uniform(skeleton.reps, 0, m)
    return adversarial_game(
        _resolve_algorithm(task["algorithm"], task["budget"]), skeleton, pretrained,
        params, task["variant"], algorithm_name=task["algorithm"],
    )


def _run_plain_task(task) -> dict:
    """example31 and custom-instance-file variants: a direct oracle run."""
    seed = task["seed"]
    if task["variant"] == VARIANT_EXAMPLE:
        instance = compromise.compromise_instance(task["alpha"], task["beta"])
    else:
        with open(task["instance"], encoding="utf-8") as fh:
            instance = instance_from_text(fh.read())
        if instance.utilities is None:
            raise SchemaError("instance file has no utilities; eval-style runs need them")
    oracle = _build_oracle(task["oracle"], instance, seed)
    pretrained = PostTrainedModel.uniform(instance.reps, 0, instance.m)
    model = _resolve_algorithm(task["algorithm"], task["budget"])(
        instance, pretrained, oracle, np.random.default_rng([seed, 1])
    )
    result = distortion_ratio(instance, instance.utilities, model)
    return dict(
        m=instance.m, n=instance.n, r=instance.r, phi_count=instance.reps.phi_count,
        alg_util=_metric(result.achieved), opt_util=_metric(result.optimum),
        distortion=_metric(result.value), ms=0,
    )


def _build_oracle(mode, instance, seed):
    if mode == NOISELESS:
        return PreferenceOracle.noiseless(instance.utilities)
    return PreferenceOracle.bradley_terry(
        instance.utilities, np.random.default_rng([seed, 2]), mode
    )


def _dump_world(task, report: RunReport):
    import os

    os.makedirs(task["dump_dir"], exist_ok=True)
    name = f"run_{report.variant}_m{report.m}_n{report.n}_seed{report.seed}.txt"
    with open(os.path.join(task["dump_dir"], name), "w", encoding="utf-8") as fh:
        fh.write(instance_to_text(report.world))


def sweep_rows(cfg: ExperimentConfig) -> list[dict]:
    length, grid = validate_config(cfg)
    tasks = []
    for i in range(length):
        for seed in cfg.seeds:
            tasks.append(
                dict(
                    variant=cfg.variant, algorithm=cfg.algorithm, oracle=cfg.oracle,
                    m=grid["m"][i], n=grid["n"][i], r=grid["r"][i], phi=grid["phi"][i],
                    k=grid["k"][i] if "k" in grid else None,
                    epsilon=grid["epsilon"][i] if "epsilon" in grid else None,
                    R=grid["R"][i] if "R" in grid else None,
                    seed=seed, alpha=cfg.alpha, beta=cfg.beta, budget=cfg.budget,
                    timing=cfg.timing, index_v=cfg.index_v,
                    instance=cfg.instance, dump_dir=cfg.dump_dir,
                )
            )
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(run_sweep_point, tasks))
    return [run_sweep_point(t) for t in tasks]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(CSV_SCHEMA_COMMENT + "\n")
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def cmd_sweep(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    if args.out:
        cfg.out = args.out
    if args.seed_list:
        cfg.seeds = [int(tok) for tok in args.seed_list.split()]
    if args.threads:
        cfg.threads = args.threads
    if args.index_v:
        cfg.index_v = True
    text = rows_to_csv(sweep_rows(cfg))
    with open(cfg.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {cfg.out}")
    return 0


# --- plotting ----------------------------------------------------------------


def read_sweep_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    if not lines:
        raise SchemaError("empty CSV")
    reader = csv.DictReader(lines)
    missing = [col for col in CSV_COLUMNS if col not in (reader.fieldnames or [])]
    if missing:
        raise SchemaError(f"CSV is missing required columns: {', '.join(missing)}")
    return list(reader)


def median_distortion_by_m(rows: list[dict]) -> list[tuple[int, float]]:
    by_m: dict[int, list[float]] = {}
    for row in rows:
        if row["error"]:
            continue
        try:
            m = int(row["m"])
            d = float(row["distortion"])
        except ValueError as exc:
            raise SchemaError(f"bad numeric cell in CSV: {exc}") from None
        by_m.setdefault(m, []).append(d)
    return [(m, statistics.median(vals)) for m, vals in sorted(by_m.items())]


def render_growth_svg(points: list[tuple[int, float]]) -> str:
    """Log-log scatter of median distortion vs circuit count, with a sqrt
    reference line anchored at the smallest-m point."""
    finite = [(m, d) for m, d in points if math.isfinite(d) and d > 0]
    if not finite:
        raise SchemaError("no finite distortion medians to plot")
    width, height = 560, 420
    left, right, top, bottom = 70, 20, 20, 50
    xs = [math.log10(m) for m, _ in finite]
    ys = [math.log10(d) for _, d in finite]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x0, x1 = x0 - 0.05, x1 + 0.05
    pad = 0.1 * max(y1 - y0, 0.2)
    y0, y1 = y0 - pad, y1 + pad

    def px(x):
        return left + (x - x0) / (x1 - x0) * (width - left - right)

    def py(y):
        return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" '
        f'y2="{height - bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>',
    ]
    for m, _ in finite:
        x = px(math.log10(m))
        parts.append(
            f'<text x="{x:.1f}" y="{height - bottom + 18}" font-size="12" '
            f'text-anchor="middle">{m}</text>'
        )
    for tick in _log_ticks(10 ** y0, 10 ** y1):
        y = py(math.log10(tick))
        parts.append(
            f'<text x="{left - 8}" y="{y:.1f}" font-size="12" text-anchor="end">{tick:g}</text>'
        )
        parts.append(
            f'<line x1="{left - 4}" y1="{y:.1f}" x2="{left}" y2="{y:.1f}" stroke="black"/>'
        )
    # sqrt reference through the first point: slope 1/2 in log-log.
    mref, dref = finite[0]
    c = math.log10(dref) - 0.5 * math.log10(mref)
    parts.append(
        f'<line class="ref" x1="{px(x0):.1f}" y1="{py(c + 0.5 * x0):.1f}" '
        f'x2="{px(x1):.1f}" y2="{py(c + 0.5 * x1):.1f}" '
        'stroke="gray" stroke-dasharray="5,4"/>'
    )
    for m, d in finite:
        parts.append(
            f'<circle class="pt" cx="{px(math.log10(m)):.1f}" '
            f'cy="{py(math.log10(d)):.1f}" r="4" fill="steelblue"/>'
        )
    parts.append(
        f'<text x="{(left + width - right) / 2:.1f}" y="{height - 12}" font-size="13" '
        'text-anchor="middle">circuits m (log)</text>'
    )
    parts.append(
        f'<text x="16" y="{(top + height - bottom) / 2:.1f}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 16 {(top + height - bottom) / 2:.1f})">'
        "median distortion (log)</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _log_ticks(lo: float, hi: float) -> list[float]:
    ticks = []
    k = math.floor(math.log10(lo))
    while 10 ** k <= hi * 10:
        for mult in (1, 2, 5):
            t = mult * 10 ** k
            if lo <= t <= hi:
                ticks.append(t)
        k += 1
    return ticks or [lo]


def cmd_plot(args) -> int:
    with open(args.csv, encoding="utf-8") as fh:
        rows = read_sweep_csv(fh.read())
    svg = render_growth_svg(median_distortion_by_m(rows))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.out}")
    return 0


# --- the worked example -------------------------------------------------------


def cmd_example31(args) -> int:
    try:
        alpha, beta = Fraction(args.alpha), Fraction(args.beta)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad alpha/beta: {exc}") from None
    if alpha < 0:
        raise ConfigError("alpha must be nonnegative")
    report = compromise.compromise_report(alpha, beta)
    labels = compromise.LABELS
    print(f"alpha = {alpha}, beta = {beta}")
    print("condition 2*alpha < beta:", "satisfied" if report.condition_holds else "VIOLATED")
    print()
    print("utility table (rows q_1..q_3):")
    print("      " + "  ".join(f"{lab:>6}" for lab in labels))
    for q, row in enumerate(report.utilities.values):
        print(f"  q_{q + 1} " + "  ".join(f"{str(v):>6}" for v in row))
    print()
    print("borda tally:", " ".join(str(s) for s in report.tally.scores))
    print("borda winner:", labels[report.borda_winner])
    print(
        f"cardinal optimum: {labels[report.optimum]} "
        f"(totals {', '.join(str(t) for t in report.totals)})"
    )
    print(f"distortion: {report.distortion} (= {float(report.distortion)})")
    return 0


# --- instance files -----------------------------------------------------------


def cmd_gen(args) -> int:
    if args.m < 2 or args.n < 1 or args.r < 1 or args.phi < 1:
        raise ConfigError("sizes must be positive (m >= 2)")
    rng = np.random.default_rng(args.seed)
    if args.r == 1:
        maps = ((0,) * args.n,) * args.phi
    else:
        maps = tuple(
            tuple(int(z) for z in rng.integers(0, args.r, size=args.n))
            for _ in range(args.phi)
        )
    rows = []
    for _ in range(args.n):
        while True:
            row = [float(x) for x in rng.random(args.m)]
            if len(set(row)) == args.m:
                break
        if args.unit_sum:
            total = sum(row)
            row = [x / total for x in row]
        rows.append(tuple(row))
    instance = Instance(
        QuerySet(args.n),
        CircuitSet.default(args.m),
        RepresentationFamily(args.r, maps),
        utilities=UtilityMatrix(
            tuple(rows), unit_sum=args.unit_sum, bounded01=not args.unit_sum
        ),
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(instance_to_text(instance))
    print(f"wrote {args.out}")
    return 0


def cmd_eval(args) -> int:
    if args.oracle not in ORACLE_MODES:
        raise ConfigError(f"unknown oracle mode {args.oracle!r}")
    with open(args.instance, encoding="utf-8") as fh:
        instance = instance_from_text(fh.read())
    if instance.utilities is None:
        raise ConfigError("instance file has no utilities; eval needs them")
    oracle = _build_oracle(args.oracle, instance, args.seed)
    pretrained = PostTrainedModel.uniform(instance.reps, 0, instance.m)
    model = _resolve_algorithm(args.algorithm, args.budget)(
        instance, pretrained, oracle, np.random.default_rng([args.seed, 1])
    )
    result = distortion_ratio(instance, instance.utilities, model)
    routed = [instance.circuits.labels[model.support(z)] for z in range(instance.r)]
    print(f"algorithm: {args.algorithm} (oracle {args.oracle}, seed {args.seed})")
    print("routing per representation:", " ".join(routed))
    print(f"algorithm expected utility: {float(result.achieved)}")
    print(f"optimal expected utility:   {float(result.optimum)}")
    print(f"distortion: {float(result.value)}")
    return 0


# --- verify -------------------------------------------------------------------


def cmd_verify(args) -> int:
    results = run_battery(index_weights=args.index_v)
    width = max(len(name) for name, _, _ in results)
    failures = [name for name, ok, _ in results if not ok]
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"{name:<{width}}  {status}  {detail}")
    print()
    if failures:
        print(f"FAILED: {failures[0]}")
        return 1
    print(f"all {len(results)} checks passed")
    return 0


# --- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distortlab",
        description="Measure how ordinal preference data limits routing-model post-training.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the built-in verification battery")
    p.add_argument("--index-v", action="store_true",
                   help="use index-based rank weights in the unit-sum construction")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="run a parameter sweep from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="override the config output path")
    p.add_argument("--seed-list", default=None, help='override seeds, e.g. "1 2 3"')
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--index-v", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="render a sweep CSV as an SVG growth plot")
    p.add_argument("csv")
    p.add_argument("--out", default="growth.svg")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("example31", help="print the compromise-candidate demonstration")
    p.add_argument("--alpha", default="0.1")
    p.add_argument("--beta", default="0.5")
    p.set_defaults(func=cmd_example31)

    p = sub.add_parser("gen", help="write a random instance file")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--phi", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unit-sum", action="store_true")
    p.add_argument("--out", default="instance.txt")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("eval", help="run one algorithm on an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--algorithm", default="rlhf_borda")
    p.add_argument("--oracle", default=NOISELESS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_PAIR_BUDGET,
                   help="comparisons per (query, pair) under a probabilistic oracle")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
