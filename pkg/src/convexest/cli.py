"""Command-line front end.

Experiments are described by a JSON config and dispatched to the
library; artifacts are CSV for tabular output and JSON for structured
results, one artifact per command plus a sidecar metadata file holding
the resolved config and seed. Identical config and seed give byte
identical artifacts, whatever the thread count.

Exit codes: 0 success, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CheckFailed, ConvexestError, ParseError, ValidationError
from .estimators import (
    AdaptiveConfig,
    adaptive,
    hull_estimator,
    min_kgon,
    theory_threshold,
)
from .experiments import (
    DEVIATION_CSV_HEADER,
    build_family,
    deviation_tail,
    efron_check,
    family_checks,
    risk_curve,
    vertex_count_curve,
    vertex_count_scaling,
)
from .geometry import ConvexPolygon
from .sampling import PolygonSupport, Seed, Support, support_from_json

COMMANDS = (
    "estimate",
    "risk-curve",
    "efron",
    "lower-bound",
    "adaptive",
    "vertex-scaling",
    "deviation-tail",
)


@dataclass
class ExperimentConfig:
    command: str
    support: Support | None = None
    n_grid: list = field(default_factory=list)
    reps: int = 200
    r: int | None = None
    C: float = 40.0
    q: float = 1.0
    normalized: bool = False
    estimator: str = "hull"
    h: float | None = None
    x_grid: list = field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0])
    seed: Seed = Seed()
    output_path: str = "out"
    points_path: str | None = None
    raw: dict = field(default_factory=dict)


def parse_config(text: str, allow_nontheoretical: bool = False) -> ExperimentConfig:
    """Parse and validate a JSON experiment config.

    Raises ParseError on malformed JSON and ValidationError listing every
    invalid field otherwise.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("config must be a JSON object")

    problems: list[str] = []
    command = obj.get("command")
    if command not in COMMANDS:
        problems.append(f"command: expected one of {COMMANDS}, got {command!r}")

    support = None
    if "support" in obj:
        try:
            support = support_from_json(obj["support"])
        except ConvexestError as exc:
            problems.append(f"support: {exc}")
    elif command not in ("estimate", "adaptive", None):
        problems.append("support: required for this command")

    n_grid = obj.get("n_grid", [])
    if "n" in obj and not n_grid:
        n_grid = [obj["n"]]
    if n_grid:
        if not all(isinstance(v, int) and v >= 3 for v in n_grid):
            problems.append("n_grid: entries must be integers >= 3")
        elif any(b <= a for a, b in zip(n_grid, n_grid[1:])):
            problems.append("n_grid: must be strictly increasing")
    elif command in ("risk-curve", "efron", "vertex-scaling", "deviation-tail"):
        problems.append("n_grid: required and nonempty for this command")

    reps = obj.get("reps", 200)
    if not isinstance(reps, int) or reps < 2:
        problems.append("reps: must be an integer >= 2")

    estimator = obj.get("estimator", "hull")
    if estimator not in ("hull", "kgon", "adaptive"):
        problems.append(f"estimator: expected hull, kgon or adaptive, got {estimator!r}")

    r = obj.get("r")
    if r is not None and (not isinstance(r, int) or r < 3):
        problems.append("r: must be an integer >= 3")
    if estimator == "kgon" and r is None:
        problems.append("r: required for the kgon estimator")
    if command == "lower-bound":
        if r is None or r < 10 or r % 2 != 0:
            problems.append("r: the lower-bound family needs an even r >= 10")

    h = obj.get("h")
    if command == "lower-bound":
        if h is None or not (isinstance(h, (int, float)) and 0 < h <= 1):
            problems.append("h: must be a number in (0, 1] for lower-bound")

    C = obj.get("C", 40.0)
    if not isinstance(C, (int, float)) or C <= 0:
        problems.append("C: must be a positive number")
    elif C <= theory_threshold() and not allow_nontheoretical:
        problems.append(
            f"C: {C} is below the risk-guarantee threshold 16d + 16/(d+1) = "
            f"{theory_threshold():.4f} (d = 2); pass --allow-nontheoretical to override"
        )

    q = obj.get("q", 1.0)
    if not isinstance(q, (int, float)) or q < 1:
        problems.append("q: must be a number >= 1")

    normalized = obj.get("normalized", False)
    if not isinstance(normalized, bool):
        problems.append("normalized: must be a boolean")

    x_grid = obj.get("x_grid", [1.0, 2.0, 4.0, 8.0])
    if command == "deviation-tail" and (
        not x_grid or any(not isinstance(x, (int, float)) or x <= 0 for x in x_grid)
    ):
        problems.append("x_grid: thresholds must be positive numbers")

    seed = Seed()
    try:
        seed = Seed.from_json(obj.get("seed", {}))
    except ConvexestError as exc:
        problems.append(f"seed: {exc}")

    points_path = obj.get("points_path")
    if command in ("estimate",) and points_path is None and support is None:
        problems.append("points_path: estimate needs a points file or a support to sample")

    if problems:
        raise ValidationError("invalid config: " + "; ".join(problems))

    return ExperimentConfig(
        command=command,
        support=support,
        n_grid=list(n_grid),
        reps=reps,
        r=r,
        C=float(C),
        q=float(q),
        normalized=normalized,
        estimator=estimator,
        h=float(h) if h is not None else None,
        x_grid=[float(x) for x in x_grid],
        seed=seed,
        output_path=obj.get("output_path", "out"),
        points_path=points_path,
        raw=obj,
    )


def read_points(path) -> np.ndarray:
    """Read a two-column CSV of points, with an optional x,y header."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if lineno == 1 and line.lower().replace(" ", "") in ("x,y",):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected two columns, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from exc
    return np.asarray(rows, dtype=float)


def write_points(path, points) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,y\n")
        for x, y in np.asarray(points, dtype=float):
            fh.write(f"{x!r},{y!r}\n")


def polygon_to_json(polygon: ConvexPolygon) -> list:
    return polygon.vertices.tolist()


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_artifact(out_dir: Path, name: str, text: str, config: ExperimentConfig) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text, encoding="utf-8")
    sidecar = {
        "config": config.raw,
        "seed": config.seed.to_json(),
        "command": config.command,
        "version": __version__,
    }
    (out_dir / (name + ".meta.json")).write_text(_dump_json(sidecar), encoding="utf-8")
    return path


def _adaptive_config(config: ExperimentConfig, allow_nontheoretical: bool) -> AdaptiveConfig:
    return AdaptiveConfig(
        C=config.C,
        r_max=None,
        allow_nontheoretical=allow_nontheoretical or config.C > theory_threshold(),
    )


def run(config: ExperimentConfig, out_dir=".", threads: int = 1,
        allow_nontheoretical: bool = False) -> Path:
    """Execute a parsed config and write its artifact; returns the path."""
    out = Path(out_dir)
    name = config.output_path

    if config.command == "estimate":
        if config.points_path is not None:
            pts = read_points(config.points_path)
        else:
            pts = config.support.sample(config.n_grid[0], config.seed.generator())
        result = min_kgon(pts, config.r) if config.r is not None else hull_estimator(pts)
        return _write_artifact(out, name + ".json", _dump_json(result.to_json()), config)

    if config.command == "adaptive":
        if config.points_path is not None:
            pts = read_points(config.points_path)
        else:
            pts = config.support.sample(config.n_grid[0], config.seed.generator())
        res = adaptive(pts, _adaptive_config(config, allow_nontheoretical))
        return _write_artifact(out, name + ".json", _dump_json(res.to_json()), config)

    if config.command == "risk-curve":
        curve = risk_curve(
            config.support,
            config.estimator,
            config.n_grid,
            config.reps,
            q=config.q,
            normalized=config.normalized,
            seed=config.seed,
            r=config.r,
            config=(
                _adaptive_config(config, allow_nontheoretical)
                if config.estimator == "adaptive"
                else None
            ),
            threads=threads,
        )
        return _write_artifact(out, name + ".csv", curve.to_csv(), config)

    if config.command == "efron":
        report = efron_check(config.support, config.n_grid[0], config.reps, config.seed)
        text = "lhs,rhs,rel_err\n" + f"{report['lhs']!r},{report['rhs']!r},{report['rel_err']!r}\n"
        return _write_artifact(out, name + ".csv", text, config)

    if config.command == "lower-bound":
        family = build_family(config.r, config.h)
        n_for_bound = config.n_grid[0] if config.n_grid else None
        report = family_checks(family, n=n_for_bound, raise_on_failure=False)
        obj = family.to_json()
        obj["checks"] = report
        path = _write_artifact(out, name + ".json", _dump_json(obj), config)
        if report["violations"]:
            raise CheckFailed(
                "family checks failed: " + ", ".join(report["violations"])
            )
        return path

    if config.command == "vertex-scaling":
        rows = vertex_count_curve(config.support, config.n_grid, config.reps, config.seed)
        fit = vertex_count_scaling(config.support, config.n_grid, config.reps, config.seed)
        lines = ["n,mean_vertices,std_err,reps"]
        lines += [f"{n},{mean!r},{se!r},{reps}" for n, mean, se, reps in rows]
        lines += [f"# slope,{fit.slope!r}", f"# intercept,{fit.intercept!r}"]
        return _write_artifact(out, name + ".csv", "\n".join(lines) + "\n", config)

    if config.command == "deviation-tail":
        if not isinstance(config.support, PolygonSupport):
            raise ValidationError("deviation-tail needs a polygon support")
        lines = [DEVIATION_CSV_HEADER]
        for n in config.n_grid:
            rows = deviation_tail(
                config.support, n, config.reps, config.x_grid, config.seed
            )
            lines += [f"{x!r},{tail!r},{bound!r}" for x, tail, bound in rows]
        return _write_artifact(out, name + ".csv", "\n".join(lines) + "\n", config)

    raise ValidationError(f"unhandled command {config.command!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="convexest",
        description="Convex support estimation experiments (config-driven)",
    )
    parser.add_argument("--config", required=True, help="path to a JSON experiment config")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed root")
    parser.add_argument("--out", default=".", help="output directory for artifacts")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for replicates")
    parser.add_argument(
        "--allow-nontheoretical",
        action="store_true",
        help="accept adaptive constants below the risk-guarantee threshold",
    )
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text, allow_nontheoretical=args.allow_nontheoretical)
        if args.seed is not None:
            config.seed = Seed(args.seed, config.seed.stream)
            config.raw["seed"] = config.seed.to_json()
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        path = run(
            config,
            out_dir=args.out,
            threads=args.threads,
            allow_nontheoretical=args.allow_nontheoretical,
        )
    except ConvexestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
