"""Command-line front end: ``towernorm {eval,slice,verify,schedule}``.

Exit codes: 0 success, 2 usage or parse error, 3 numerical failure (and
failed verification for ``verify``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import kernels
from .norm import ConvergenceError, equivalence_constants, level_norm, minkowski_oracle
from .shape import DEFAULT_LEVELS, ScheduleError, ShapeSchedule, make_schedule
from .space import (
    BaseSpace,
    Tolerances,
    TowerSpace,
    TowerVector,
    _pad,
    ell1_tail,
    vectors_from_csv,
)
from .verify import CHECKS

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    """Bad input: reported on stderr with exit code 2."""


@dataclass
class Config:
    schedule: ShapeSchedule = field(default_factory=lambda: make_schedule(levels=DEFAULT_LEVELS))
    base_dim: int | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    verify_tol: float | None = None
    seed: int = 0
    out: str | None = None
    format: str | None = None

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Config":
        try:
            sched = ShapeSchedule.from_dict(data.get("schedule", {"kind": "default_geometric"}))
            tol = data.get("tolerances", {})
            tolerances = Tolerances(rel=float(tol.get("rel", 1e-12)),
                                    max_iter=int(tol.get("max_iter", 200)))
            out = data.get("output", {})
            fmt = out.get("format")
            if fmt not in (None, "json", "csv"):
                raise UsageError(f"output format must be json or csv, got {fmt!r}")
            base_dim = data.get("base_dim")
            if base_dim is not None:
                BaseSpace(int(base_dim))
            return cls(sched, None if base_dim is None else int(base_dim), tolerances,
                       tol.get("verify"), int(data.get("seed", 0)), out.get("path"), fmt)
        except (ScheduleError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"invalid config: {exc}") from exc

    def space(self, base_dim: int | None = None) -> TowerSpace:
        dim = self.base_dim or base_dim or 2
        return TowerSpace(BaseSpace(dim), self.schedule, self.tolerances, self.seed)


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def load_config(path: str | None) -> Config:
    if path is None:
        return Config()
    return Config.from_dict(_load_json(_read(path), path))


def load_vector(arg: str) -> TowerVector:
    """A vector from a JSON file, or inline JSON when ``arg`` starts with '{'."""
    text, source = (arg, "<inline>") if arg.lstrip().startswith("{") else (_read(arg), arg)
    data = _load_json(text, source)
    try:
        return TowerVector.from_dict(data)
    except (ValueError, TypeError, AttributeError) as exc:
        raise UsageError(f"{source}: {exc}") from exc


def _fit(space: TowerSpace, x: TowerVector, level: int | None) -> int:
    n = x.degree if level is None else level
    if x.dim != space.base.dim:
        raise UsageError(f"vector base dimension {x.dim} != configured {space.base.dim}")
    if not 0 <= n <= space.max_level:
        raise UsageError(f"level {n} outside 0..{space.max_level}")
    return n


# -- commands -------------------------------------------------------------


def evaluate(space: TowerSpace, x: TowerVector, level: int | None = None) -> dict:
    n = _fit(space, x, level)
    res = level_norm(space, x, n)
    return {
        "value": res.value,
        "per_level": res.per_level.tolist(),
        "oracle": minkowski_oracle(space, x, n),
        "tail_bound": ell1_tail(x, n),
        "level": n,
    }


def cmd_eval(config: Config, vector: str, level: int | None = None) -> Any:
    if vector.endswith(".csv"):
        dim = config.base_dim
        if dim is None:
            raise UsageError("CSV vector files need base_dim in the config")
        try:
            xs = vectors_from_csv(vector, dim)
        except (OSError, ValueError) as exc:
            raise UsageError(f"{vector}: {exc}") from exc
        space = config.space()
        return [evaluate(space, x, level) for x in xs]
    x = load_vector(vector)
    return evaluate(config.space(x.dim), x, level)


@dataclass(frozen=True)
class SlicePolyline:
    plane: tuple[TowerVector, TowerVector]
    points: np.ndarray
    resolution: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "radius", "px", "py"])
        for row in self.points:
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "plane": [self.plane[0].to_dict(), self.plane[1].to_dict()],
            "resolution": self.resolution,
            "points": self.points.tolist(),
        }


def slice_polyline(space: TowerSpace, u: TowerVector, v: TowerVector, n: int,
                   resolution: int = 720) -> SlicePolyline:
    """Unit sphere of |||.|||_n cut by span{u, v}, in (u, v) coordinates."""
    if resolution < 3:
        raise UsageError("resolution must be >= 3")
    for w in (u, v):
        _fit(space, w, n)
        if w.degree > n and np.any(w.coords[n:]):
            raise UsageError(f"plane vector has support beyond level {n}")
    mat = np.vstack([np.concatenate([w.base, _pad(w.coords, n)]) for w in (u, v)])
    if np.linalg.matrix_rank(mat) < 2:
        raise UsageError("degenerate plane: u and v are linearly dependent")
    theta = np.linspace(0.0, 2.0 * math.pi, resolution + 1)
    pts = np.empty((resolution + 1, 4))
    ub, vb = u.base, v.base
    uc, vc = _pad(u.coords, n), _pad(v.coords, n)
    for i, th in enumerate(theta[:-1]):
        c, s = math.cos(th), math.sin(th)
        p = TowerVector(c * ub + s * vb, c * uc + s * vc)
        r = 1.0 / level_norm(space, p, n).value
        pts[i] = (th, r, r * c, r * s)
    pts[-1] = pts[0]
    pts[-1, 0] = theta[-1]
    return SlicePolyline((u, v), pts, resolution)


def cmd_slice(config: Config, u: str, v: str, level: int, resolution: int) -> SlicePolyline:
    uv, vv = load_vector(u), load_vector(v)
    return slice_polyline(config.space(uv.dim), uv, vv, level, resolution)


def cmd_verify(config: Config, name: str, samples: int | None = None,
               tol: float | None = None, eps: float | None = None,
               base_dim: int | None = None) -> tuple[list[dict], int]:
    names = list(CHECKS) if name == "all" else [name]
    if any(nm not in CHECKS for nm in names):
        raise UsageError(f"unknown check {name!r}; choose from {', '.join(CHECKS)} or all")
    space = config.space(base_dim or 3)
    tol = tol if tol is not None else config.verify_tol
    reports = []
    for nm in names:
        kw: dict[str, Any] = {"samples": samples, "seed": config.seed}
        if tol is not None:
            kw["tol"] = tol
        if eps is not None and nm == "octahedral":
            kw["eps"] = eps
        reports.append(CHECKS[nm](space, **kw))
    ok = all(r.passed for r in reports)
    return [r.to_dict() for r in reports], EXIT_OK if ok else EXIT_NUMERIC


def schedule_table(space: TowerSpace) -> list[dict]:
    sched = space.schedule
    rows = []
    for n in range(1, sched.levels + 1):
        f = sched.shape(n)
        rows.append({
            "n": n, "z": f.z, "l": f.l, "s": f.s, "m": f.m, "v": f.v,
            "alpha": f.alpha, "c": f.c,
            "product": equivalence_constants(space, n).product,
            "octahedral": sched.octahedral_constant(n),
        })
    return rows


def cmd_schedule(config: Config) -> list[dict]:
    return schedule_table(config.space())


# -- output ---------------------------------------------------------------


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v)
                    for k, v in r.items()})
    return buf.getvalue()


def _text_table(rows: list[dict]) -> str:
    cols = list(rows[0])
    fmt = lambda v: str(v) if isinstance(v, int) else f"{v:.10g}"  # noqa: E731
    cells = [[fmt(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(wd) for c, wd in zip(cols, widths))]
    lines += ["  ".join(x.rjust(wd) for x, wd in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="towernorm", parents=[common],
                                description="Evaluate and certify the octahedral smooth tower norm.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate the norm of a vector")
    e.add_argument("vector", help="vector JSON file, inline JSON, or CSV of rows")
    e.add_argument("--level", type=int, default=None, help="evaluate |||x^n|||_n")

    s = sub.add_parser("slice", parents=[common], help="export a 2D cross-section of a unit ball")
    s.add_argument("--u", required=True, help="first plane vector (file or inline JSON)")
    s.add_argument("--v", required=True, help="second plane vector (file or inline JSON)")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--resolution", type=int, default=720)

    v = sub.add_parser("verify", parents=[common], help="run inequality certificates")
    v.add_argument("check", help=f"one of {', '.join(CHECKS)} or all")
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--eps", "--epsilon", dest="epsilon", type=float, default=None,
                   help="octahedrality epsilon")
    v.add_argument("--base-dim", type=int, default=None)

    sub.add_parser("schedule", parents=[common], help="print the schedule table")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = load_config(getattr(args, "config", None))
        if hasattr(args, "seed"):
            config.seed = args.seed
        out = getattr(args, "out", None) or config.out
        fmt = getattr(args, "format", None) or config.format
        code = EXIT_OK
        if args.command == "eval":
            payload = cmd_eval(config, args.vector, args.level)
            if fmt == "csv":
                rows = payload if isinstance(payload, list) else [payload]
                text = _rows_csv([{k: r[k] for k in ("value", "oracle", "tail_bound", "level")}
                                  for r in rows])
            else:
                text = json.dumps(payload, indent=2) + "\n"
        elif args.command == "slice":
            poly = cmd_slice(config, args.u, args.v, args.level, args.resolution)
            text = json.dumps(poly.to_dict()) + "\n" if fmt == "json" else poly.to_csv()
        elif args.command == "verify":
            reports, code = cmd_verify(config, args.check, args.samples, args.tol,
                                       args.epsilon, args.base_dim)
            text = json.dumps(reports, indent=2) + "\n"
        else:
            rows = cmd_schedule(config)
            if fmt == "json":
                text = json.dumps({"schedule": config.schedule.to_dict(), "table": rows},
                                  indent=2) + "\n"
            elif fmt == "csv":
                text = _rows_csv(rows)
            else:
                eq = equivalence_constants(config.space(), config.schedule.levels)
                text = (f"backend: {kernels.BACKEND}\n" + _text_table(rows)
                        + f"product bound over all levels: {eq.product * eq.tail_bound:.12g}\n")
        _emit(text, out)
        return code
    except UsageError as exc:
        print(f"towernorm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"towernorm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"towernorm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
