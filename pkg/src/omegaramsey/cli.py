"""Command line experiment runner.

Every report is JSON with a fixed key order and embeds the configuration
that produced it. The worker count and output path are left out of the
embedded configuration: they never change a report's content.

Exit codes: 0 success, 2 configuration error, 3 guard exceeded, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import coloring
from .arrow import COLORING_GUARD, ArrowInstance, arrow_check
from .errors import GrowthError, GuardExceeded
from .hypercore import FiniteHypergraph, HypergraphOracle, StructureOracle, materialize_prefix
from .typetree import (
    TABLE_GUARD,
    GrowthFunction,
    TypeTable,
    enumerate_level,
    level_count,
    minimal_growth,
    successor_count,
    type_of_vertex,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_IO = 4

SUBCOMMANDS = ("generate", "types", "height", "spectrum", "tree-audit", "arrow", "witness")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    subcommand: str
    u: int = 2
    seed: int = 0
    mode: str = "random"
    plant_depth: int = 5
    n_prefix: int = 100
    f: str = "minimal"
    modulus: int = 2
    filter: str = "all"
    sample_cap: int = 100_000
    allow_invalid_f: bool = False
    input: str | None = None
    instance: str | None = None
    pair: str | None = None
    vertices: str | None = None
    levels: int = 6
    audit_enum_limit: int = 100_000
    table_guard: int = TABLE_GUARD
    arrow_guard: int = COLORING_GUARD
    format: str = "json"

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.u < 2:
            raise ConfigError("--u must be at least 2")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if self.mode not in ("random", "generic"):
            raise ConfigError("--mode must be 'random' or 'generic'")
        for name in ("n_prefix", "plant_depth", "levels"):
            if getattr(self, name) < 0:
                raise ConfigError(f"--{name.replace('_', '-')} must be nonnegative")
        for name in ("modulus", "sample_cap", "audit_enum_limit", "table_guard", "arrow_guard"):
            if getattr(self, name) < 1:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
        if not (self.f == "minimal" or self.f.startswith("minimal:") or self.f.startswith("file:")):
            raise ConfigError("--f must be 'minimal', 'minimal:<lmax>' or 'file:<path>'")
        try:
            coloring.PairFilter.parse(self.filter)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.format not in ("json", "csv"):
            raise ConfigError("--format must be 'json' or 'csv'")

    def to_json(self) -> dict:
        out = asdict(self)
        out["guards"] = {
            "table_entries": self.table_guard,
            "arrow_colorings": self.arrow_guard,
            "audit_enumeration": self.audit_enum_limit,
        }
        for key in ("table_guard", "arrow_guard", "audit_enum_limit"):
            del out[key]
        out["convention"] = coloring.CONVENTION
        return out


def load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError:
        raise
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc


def growth_from_config(cfg: ExperimentConfig, needed: int) -> GrowthFunction:
    """Build the growth function; ``needed`` is the largest index the run uses."""
    fspec = cfg.f
    try:
        if fspec == "minimal":
            return minimal_growth(cfg.u, max(needed, 1))
        if fspec.startswith("minimal:"):
            lmax = int(fspec.split(":", 1)[1])
            if lmax < needed:
                raise ConfigError(f"--f {fspec} covers levels up to {lmax}, the run needs {needed}")
            return minimal_growth(cfg.u, lmax)
        data = load_json(fspec.split(":", 1)[1])
        f = GrowthFunction.from_json(data, allow_invalid=cfg.allow_invalid_f)
    except GrowthError as exc:
        raise ConfigError(f"{exc} (pass --allow-invalid-f to use it anyway)") from exc
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if f.u != cfg.u:
        raise ConfigError(f"growth file is for u={f.u}, run uses u={cfg.u}")
    if f.lmax < needed:
        raise ConfigError(f"growth file covers levels up to {f.lmax}, the run needs {needed}")
    return f


def source_from_config(cfg: ExperimentConfig, f: GrowthFunction | None):
    if cfg.input:
        try:
            H = FiniteHypergraph.from_json(load_json(cfg.input))
        except (KeyError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{cfg.input}: {exc}") from exc
        if H.u != cfg.u:
            raise ConfigError(f"{cfg.input} holds a u={H.u} structure, run uses u={cfg.u}")
        return StructureOracle(H, seed=cfg.seed)
    return HypergraphOracle(cfg.u, cfg.seed, cfg.mode, cfg.plant_depth, growth=f if cfg.mode == "generic" else None)


def _prefix_size(cfg: ExperimentConfig, oracle) -> int:
    if oracle.n_limit is not None:
        return min(cfg.n_prefix, oracle.n_limit) if cfg.n_prefix else oracle.n_limit
    return cfg.n_prefix


def parse_vertices(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _f_label(cfg: ExperimentConfig, f: GrowthFunction) -> str:
    return f"minimal:{f.lmax}" if f.kind == "minimal" else cfg.f


def run_generate(cfg: ExperimentConfig) -> str:
    if cfg.input:
        H = source_from_config(cfg, None).H
    else:
        f = growth_from_config(cfg, max(cfg.plant_depth, 1)) if cfg.mode == "generic" else None
        H = materialize_prefix(source_from_config(cfg, f), cfg.n_prefix)
    return H.dumps()


def run_types(cfg: ExperimentConfig) -> dict:
    probe = source_from_config(cfg, None) if cfg.input else None
    n = _prefix_size(cfg, probe) if probe is not None else cfg.n_prefix
    vs = parse_vertices(cfg.vertices) if cfg.vertices else list(range(n))
    f = growth_from_config(cfg, max([*vs, cfg.plant_depth, 1]))
    oracle = source_from_config(cfg, f)
    return {
        "config": cfg.to_json(),
        "f": _f_label(cfg, f),
        "types": [{"v": v, "level": v, "type": str(type_of_vertex(oracle, f, v))} for v in vs],
    }


def run_height(cfg: ExperimentConfig) -> dict:
    if not cfg.pair:
        raise ConfigError("height needs --pair v,w")
    try:
        v, w = (int(x) for x in cfg.pair.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad --pair {cfg.pair!r}") from exc
    if v == w or min(v, w) < 0:
        raise ConfigError("--pair needs two distinct nonnegative vertices")
    f = growth_from_config(cfg, max(v, w, cfg.plant_depth))
    oracle = source_from_config(cfg, f)
    tp = coloring._vertex_types(oracle, f)
    h, trace = coloring.f_height_types(oracle, f, tp(v), tp(w), tp)
    return {
        "config": cfg.to_json(),
        "f": _f_label(cfg, f),
        "pair": [v, w],
        "height": h,
        "color": h % cfg.modulus,
        "modulus": cfg.modulus,
        "trace": [
            {"x": str(s.x), "y": str(s.y), "z": str(s.z), "level": s.level, "terminated": s.terminated}
            for s in trace.steps
        ],
        "convention": coloring.CONVENTION,
    }


def run_spectrum(cfg: ExperimentConfig, workers: int = 1) -> dict:
    probe = source_from_config(cfg, None) if cfg.input else None
    n = _prefix_size(cfg, probe) if probe is not None else cfg.n_prefix
    vs = parse_vertices(cfg.vertices) if cfg.vertices else list(range(n))
    f = growth_from_config(cfg, max([*vs, cfg.plant_depth, 1]))
    oracle = source_from_config(cfg, f)
    filt = coloring.PairFilter.parse(cfg.filter)
    table = TypeTable(oracle, f, max(vs) + 1 if vs else 0, guard=cfg.table_guard)
    sp = coloring.height_spectrum(oracle, f, vs, filt, cfg.sample_cap, workers=workers, table=table, seed=cfg.seed)
    return {
        "u": cfg.u,
        "seed": cfg.seed,
        "f": "minimal" if f.kind == "minimal" else cfg.f,
        "N": n,
        "filter": str(filt),
        "histogram": {str(h): c for h, c in sorted(sp.histogram.items())},
        "max_consecutive": sp.max_consecutive,
        "convention": coloring.CONVENTION,
        "realized": sp.realized,
        "pairs_total": sp.pairs_total,
        "pairs_used": sp.pairs_used,
        "sampled": sp.sampled,
        "empty": sp.empty,
        "modulus": cfg.modulus,
        "color_classes": sp.color_classes(cfg.modulus),
        "source": oracle.describe(),
        "note": coloring.FINITE_PREFIX_NOTE,
        "config": cfg.to_json(),
    }


def run_tree_audit(cfg: ExperimentConfig) -> dict:
    if cfg.f.startswith("file:"):
        f = growth_from_config(cfg, 0)
        top = min(cfg.levels, f.lmax)
    else:
        f = growth_from_config(cfg, cfg.levels)
        top = cfg.levels
    rows = []
    for level in range(top + 1):
        lc = level_count(f, level)
        sc = successor_count(f, level)
        enumerated = None
        if lc <= cfg.audit_enum_limit:
            enumerated = sum(1 for _ in enumerate_level(f, level, guard=cfg.audit_enum_limit))
        rows.append(
            {
                "level": level,
                "f": str(f.value(level)),
                "level_count": str(lc),
                "successor_count": str(sc),
                "enumerated": None if enumerated is None else str(enumerated),
                "dominance": sc > lc,
            }
        )
    return {
        "u": cfg.u,
        "f": _f_label(cfg, f),
        "inequality_violations": f.violations(),
        "rows": rows,
        "config": cfg.to_json(),
    }


def run_arrow(cfg: ExperimentConfig) -> dict:
    if not cfg.instance:
        raise ConfigError("arrow needs --instance <file>")
    try:
        inst = ArrowInstance.from_json(load_json(cfg.instance))
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{cfg.instance}: {exc}") from exc
    verdict = arrow_check(inst, guard=cfg.arrow_guard)
    return {**verdict.to_json(), "config": cfg.to_json()}


def run_witness(cfg: ExperimentConfig) -> dict:
    probe = source_from_config(cfg, None) if cfg.input else None
    n = _prefix_size(cfg, probe) if probe is not None else cfg.n_prefix
    vs = parse_vertices(cfg.vertices) if cfg.vertices else list(range(cfg.plant_depth))
    f = growth_from_config(cfg, max([n - 1, *vs, cfg.plant_depth, 1]))
    oracle = source_from_config(cfg, f)
    table = TypeTable(oracle, f, max([n, *(v + 1 for v in vs)]), guard=cfg.table_guard)
    stats = coloring.witness_statistics(oracle, f, vs, range(n), table=table)
    return {
        "u": cfg.u,
        "seed": cfg.seed,
        "N": n,
        "f": _f_label(cfg, f),
        "statistics": stats,
        "exception_bound": cfg.u - 1,
        "source": oracle.describe(),
        "note": coloring.FINITE_PREFIX_NOTE,
        "config": cfg.to_json(),
    }


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if "rows" in report:
        cols = list(report["rows"][0]) if report["rows"] else []
        writer.writerow(cols)
        for row in report["rows"]:
            writer.writerow([row[c] for c in cols])
    elif "histogram" in report:
        writer.writerow(["height", "count"])
        for h, c in report["histogram"].items():
            writer.writerow([h, c])
    else:
        raise ConfigError("this report has no tabular projection")
    return buf.getvalue()


def render(report: dict, fmt: str = "json") -> str:
    if fmt == "csv":
        return to_csv(report)
    return json.dumps(report, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--u", type=int, default=2)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", default="random")
    common.add_argument("--lambda", dest="plant_depth", type=int, default=5, help="plant depth for generic mode")
    common.add_argument("--n-prefix", type=int, default=100)
    common.add_argument("--f", default="minimal", help="minimal | minimal:<lmax> | file:<path>")
    common.add_argument("--modulus", type=int, default=2)
    common.add_argument("--filter", default="all", help="all | label:<c>")
    common.add_argument("--sample-cap", type=int, default=100_000)
    common.add_argument("--out", default=None)
    common.add_argument("--allow-invalid-f", action="store_true")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--input", default=None, help="hypergraph JSON used instead of the oracle")
    common.add_argument("--format", default="json")
    common.add_argument("--table-guard", type=int, default=TABLE_GUARD)

    parser = argparse.ArgumentParser(prog="omegaramsey", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("generate", parents=[common], help="write a materialized prefix")
    p = sub.add_parser("types", parents=[common], help="print vertex types")
    p.add_argument("--vertices", default=None)
    p = sub.add_parser("height", parents=[common], help="height of one pair with its trace")
    p.add_argument("--pair", default=None)
    p = sub.add_parser("spectrum", parents=[common], help="height histogram over a prefix")
    p.add_argument("--vertices", default=None)
    p = sub.add_parser("tree-audit", parents=[common], help="level and successor counts of T_f")
    p.add_argument("--levels", type=int, default=6)
    p.add_argument("--audit-enum-limit", type=int, default=100_000)
    p = sub.add_parser("arrow", parents=[common], help="decide an arrow instance file")
    p.add_argument("--instance", default=None)
    p.add_argument("--arrow-guard", type=int, default=COLORING_GUARD)
    p = sub.add_parser("witness", parents=[common], help="meet-witness statistics")
    p.add_argument("--vertices", default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    fields = ExperimentConfig.__dataclass_fields__
    values = {k: v for k, v in vars(args).items() if k in fields}
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


RUNNERS = {
    "types": run_types,
    "height": run_height,
    "tree-audit": run_tree_audit,
    "arrow": run_arrow,
    "witness": run_witness,
}


def execute(cfg: ExperimentConfig, workers: int = 1) -> str:
    if cfg.subcommand == "generate":
        return run_generate(cfg)
    if cfg.subcommand == "spectrum":
        return render(run_spectrum(cfg, workers=workers), cfg.format)
    return render(RUNNERS[cfg.subcommand](cfg), cfg.format)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.workers < 1:
            raise ConfigError("--workers must be positive")
        text = execute(cfg, workers=args.workers)
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, GrowthError, ValueError, IndexError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
