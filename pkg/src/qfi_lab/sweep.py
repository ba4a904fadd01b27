"""Declarative parameter sweeps with deterministic, order-preserving output."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from .dynamics import DetectorConfig, bloch_state
from .fisher import qfi_acceleration, qfi_asymptotic_a, qfi_theta
from .response import DEFAULT_QUAD, NonConvergence, QuadratureOptions, kossakowski, response
from .trajectory import TrajectoryKind, TrajectoryParams, classify

COLUMNS = ("kind", "bbar", "a", "theta", "tau", "target", "value", "err_estimate", "method", "status")
TARGETS = ("qfi_a", "qfi_theta", "qfi_asy", "response", "bloch")
# bbar used when a trajectory entry names only its kind
DEFAULT_BBAR = {
    TrajectoryKind.LINEAR: 0.0,
    TrajectoryKind.CATENARY: 0.5,
    TrajectoryKind.CUSPED: 1.0,
    TrajectoryKind.CIRCULAR: 2.0,
}
WORKERS_ENV = "QFI_LAB_WORKERS"


class ConfigError(ValueError):
    pass


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class TrajectorySpec:
    kind: TrajectoryKind
    bbar: float

    @classmethod
    def parse(cls, entry) -> "TrajectorySpec":
        if isinstance(entry, TrajectorySpec):
            return entry
        if isinstance(entry, str):
            kind, bbar = entry, None
        elif isinstance(entry, dict):
            kind, bbar = entry.get("kind"), entry.get("bbar")
        elif isinstance(entry, (list, tuple)) and 1 <= len(entry) <= 2:
            kind, bbar = entry[0], entry[1] if len(entry) == 2 else None
        else:
            raise ConfigError(f"cannot read trajectory entry {entry!r}")
        try:
            kind = TrajectoryKind(kind)
        except ValueError:
            raise ConfigError(f"unknown trajectory kind {kind!r}") from None
        if kind is TrajectoryKind.HELIX:
            raise ConfigError("helix motion has no dynamics in this package")
        bbar = DEFAULT_BBAR[kind] if bbar is None else float(bbar)
        if classify(TrajectoryParams.from_bbar(1.0, bbar)) is not kind:
            raise ConfigError(f"bbar={bbar} does not describe a {kind.value} worldline")
        return cls(kind, bbar)

    def params(self, a: float) -> TrajectoryParams:
        return TrajectoryParams.from_bbar(a, self.bbar)


@dataclass(frozen=True)
class SweepConfig:
    trajectories: tuple[TrajectorySpec, ...]
    a_grid: tuple[float, ...]
    theta_grid: tuple[float, ...] = (0.0,)
    tau_grid: tuple[float, ...] = (0.0,)
    targets: tuple[str, ...] = ("qfi_a",)
    quad: QuadratureOptions = DEFAULT_QUAD
    output_path: str | None = None
    format: OutputFormat = OutputFormat.CSV
    omega: float = 1.0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "trajectories", tuple(TrajectorySpec.parse(t) for t in self.trajectories))
        for name in ("a_grid", "theta_grid", "tau_grid"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise ConfigError(f"{name} must not be empty")
            if not all(math.isfinite(v) for v in vals):
                raise ConfigError(f"{name} has non-finite entries")
            object.__setattr__(self, name, vals)
        if not self.trajectories:
            raise ConfigError("trajectories must not be empty")
        if not all(a > 0 for a in self.a_grid):
            raise ConfigError("every acceleration must be positive")
        if not all(t >= 0 for t in self.tau_grid):
            raise ConfigError("evolution times must be non-negative")
        targets = tuple(self.targets)
        if not targets:
            raise ConfigError("targets must not be empty")
        bad = [t for t in targets if t not in TARGETS]
        if bad:
            raise ConfigError(f"unknown targets {bad}; choose from {list(TARGETS)}")
        object.__setattr__(self, "targets", targets)
        try:
            object.__setattr__(self, "format", OutputFormat(self.format))
        except ValueError:
            raise ConfigError(f"unknown format {self.format!r}") from None
        if not (self.omega != 0 and math.isfinite(self.omega)):
            raise ConfigError("omega must be finite and non-zero")
        if self.omega < 0 and set(targets) - {"response"}:
            raise ConfigError("a negative omega only makes sense for the response target")
        if not (isinstance(self.workers, int) and self.workers >= 1):
            raise ConfigError("workers must be a positive integer")

    @classmethod
    def from_mapping(cls, data: dict, **overrides) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
        extra = set(merged) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if isinstance(merged.get("quad"), dict):
            try:
                merged["quad"] = QuadratureOptions(**merged["quad"])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad quadrature options: {exc}") from None
        try:
            return cls(**merged)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, path: str | os.PathLike, **overrides) -> "SweepConfig":
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return cls.from_mapping(data, **overrides)


@dataclass(frozen=True)
class Row:
    kind: str
    bbar: float
    a: float
    theta: float
    tau: float
    target: str
    value: float
    err_estimate: float
    method: str
    status: str = "ok"


@dataclass
class SweepResult:
    rows: list[Row]
    metadata: dict = field(default_factory=dict)

    @property
    def n_failed(self) -> int:
        return sum(r.status != "ok" for r in self.rows)


@lru_cache(maxsize=4096)
def _pair(omega_gap: float, a: float, bbar: float, quad: QuadratureOptions):
    return kossakowski(omega_gap, TrajectoryParams.from_bbar(a, bbar), quad)


def _method_of_pair(kind: TrajectoryKind) -> str:
    return "closed_form" if kind in (TrajectoryKind.LINEAR, TrajectoryKind.CUSPED) else "quadrature"


def _evaluate(cfg: SweepConfig, spec: TrajectorySpec, a: float, theta: float, tau: float) -> list[Row]:
    base = dict(kind=spec.kind.value, bbar=spec.bbar, a=a, theta=theta, tau=tau)
    out = []
    for target in cfg.targets:
        names = ("bloch_w1", "bloch_w2", "bloch_w3") if target == "bloch" else (target,)
        try:
            if target == "response":
                r = response(cfg.omega, spec.params(a), cfg.quad)
                vals = [(r.value, r.err_estimate, r.method.value)]
            else:
                pair = _pair(cfg.omega, a, spec.bbar, cfg.quad)
                dc = DetectorConfig(theta=theta, omega_gap=cfg.omega, pair=pair)
                if target == "bloch":
                    st = bloch_state(tau, dc)
                    m = _method_of_pair(spec.kind)
                    vals = [(st.w1, 0.0, m), (st.w2, 0.0, m), (st.w3, 0.0, m)]
                else:
                    fn = {"qfi_a": lambda: qfi_acceleration(tau, dc),
                          "qfi_theta": lambda: qfi_theta(tau, dc),
                          "qfi_asy": lambda: qfi_asymptotic_a(dc)}[target]
                    q = fn()
                    vals = [(q.value, q.err_estimate, q.method.value)]
            out.extend(Row(**base, target=n, value=v, err_estimate=e, method=m)
                       for n, (v, e, m) in zip(names, vals))
        except NonConvergence as exc:
            value = exc.value if target == "response" else math.nan
            out.extend(Row(**base, target=n, value=value, err_estimate=exc.err_estimate,
                           method="quadrature", status="nonconvergence") for n in names)
        except (ValueError, ArithmeticError) as exc:
            status = "error: " + str(exc).replace("\n", " ").replace(",", ";")
            out.extend(Row(**base, target=n, value=math.nan, err_estimate=math.nan,
                           method="none", status=status) for n in names)
    return out


def grid_points(cfg: SweepConfig) -> list[tuple]:
    """Grid in output order: trajectory, then a, theta, tau as listed."""
    return [(s, a, th, t) for s in cfg.trajectories for a in cfg.a_grid
            for th in cfg.theta_grid for t in cfg.tau_grid]


def run_sweep(cfg: SweepConfig) -> SweepResult:
    points = grid_points(cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(lambda p: _evaluate(cfg, *p), points))
    else:
        chunks = [_evaluate(cfg, *p) for p in points]
    rows = [r for chunk in chunks for r in chunk]
    meta = {
        "omega": cfg.omega,
        "units": "all quantities in units of the detector gap (Omega = 1); F_Q(a) is F_Q(a) Omega^2",
        "quad": asdict(cfg.quad),
    }
    return SweepResult(rows, meta)


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV}={raw!r} is not an integer") from None
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be at least 1")
    return n


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def render_csv(rows: Iterable[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([fmt(getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


def _json_float(x):
    return None if isinstance(x, float) and not math.isfinite(x) else x


def render_json(result: SweepResult) -> str:
    rows = [{c: _json_float(getattr(r, c)) for c in COLUMNS} for r in result.rows]
    return json.dumps({"metadata": result.metadata, "rows": rows}, indent=1, sort_keys=False) + "\n"


def render(result: SweepResult, format: OutputFormat | str) -> str:
    if OutputFormat(format) is OutputFormat.CSV:
        return render_csv(result.rows)
    return render_json(result)


def write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def rows_table(rows: Sequence[Row]) -> dict[str, list]:
    """Column-major view, convenient for tests and scripts."""
    return {c: [getattr(r, c) for r in rows] for c in COLUMNS}
