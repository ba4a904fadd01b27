"""Data recipes for the standard figure families (no plotting)."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .response import DEFAULT_QUAD, QuadratureOptions
from .sweep import (
    ConfigError,
    SweepConfig,
    SweepResult,
    TrajectorySpec,
    _pair,
    render_csv,
    run_sweep,
    write_text,
)
from .trajectory import TrajectoryKind

TAU_POINTS = 200
TAU_START = 1e-3
TAU_END_DECAY = 40.0  # grid ends where 4 A tau reaches this
A_GRID = tuple(np.geomspace(0.1, 50.0, 60))
THETA_GRID = tuple(np.arange(201) * (math.pi / 100))


class FigureName(str, enum.Enum):
    FAT = "fat"  # F_Q(a) vs tau
    FAA = "faa"  # F_Q(a) vs a
    FATH = "fath"  # F_Q(a) vs theta
    FASYM = "fasym"  # asymptotic F_Q(a) vs a
    FTHT = "ftht"  # F_Q(theta) vs tau
    FTHA = "ftha"  # F_Q(theta) vs a
    FTHTH = "fthth"  # F_Q(theta) vs theta


# axis, target, and the default fixed-parameter sets
_LAYOUT = {
    FigureName.FAT: ("tau", "qfi_a", dict(a=(0.5, 10.0), theta=(math.pi / 4, math.pi))),
    FigureName.FAA: ("a", "qfi_a", dict(theta=(math.pi / 4, math.pi), tau=(1.0,))),
    FigureName.FATH: ("theta", "qfi_a", dict(a=(0.5, 1.0, 5.0), tau=(1.0,))),
    FigureName.FASYM: ("a", "qfi_asy", dict()),
    FigureName.FTHT: ("tau", "qfi_theta", dict(a=(1.0, 10.0), theta=(math.pi / 4, math.pi))),
    FigureName.FTHA: ("a", "qfi_theta", dict(theta=(math.pi / 4, math.pi), tau=(1.0,))),
    FigureName.FTHTH: ("theta", "qfi_theta", dict(a=(0.5, 1.0, 5.0), tau=(1.0,))),
}


@dataclass(frozen=True)
class FigureRecipe:
    """A figure family plus optional overrides of its fixed parameters.

    ``a``, ``theta`` and ``tau`` replace the default fixed-parameter sets
    (ignored for the swept axis); ``catenary_bbar`` and ``circular_bbar``
    pick the members of those families, which no caption states.
    """

    name: FigureName
    a: tuple[float, ...] | None = None
    theta: tuple[float, ...] | None = None
    tau: tuple[float, ...] | None = None
    catenary_bbar: float = 0.5
    circular_bbar: float = 2.0
    points: int | None = None
    quad: QuadratureOptions = DEFAULT_QUAD
    workers: int = 1

    def __post_init__(self):
        try:
            object.__setattr__(self, "name", FigureName(self.name))
        except ValueError:
            names = ", ".join(n.value for n in FigureName)
            raise ConfigError(f"unknown figure {self.name!r}; choose from {names}") from None
        for k in ("a", "theta", "tau"):
            v = getattr(self, k)
            if v is not None:
                object.__setattr__(self, k, tuple(float(x) for x in np.atleast_1d(v)))
        if self.points is not None and self.points < 2:
            raise ConfigError("a curve needs at least two points")

    def trajectories(self) -> tuple[TrajectorySpec, ...]:
        return (
            TrajectorySpec.parse((TrajectoryKind.LINEAR, 0.0)),
            TrajectorySpec.parse((TrajectoryKind.CATENARY, self.catenary_bbar)),
            TrajectorySpec.parse((TrajectoryKind.CUSPED, 1.0)),
            TrajectorySpec.parse((TrajectoryKind.CIRCULAR, self.circular_bbar)),
        )


@dataclass
class Curve:
    spec: TrajectorySpec
    fixed: dict
    axis: str
    target: str
    result: SweepResult

    @property
    def x(self) -> np.ndarray:
        return np.array([getattr(r, self.axis) for r in self.result.rows])

    @property
    def y(self) -> np.ndarray:
        return np.array([r.value for r in self.result.rows])


@dataclass
class FigureData:
    recipe: FigureRecipe
    curves: list[Curve] = field(default_factory=list)

    def select(self, **fixed) -> list[Curve]:
        return [c for c in self.curves if all(math.isclose(c.fixed[k], v) for k, v in fixed.items())]


def _tau_grid(recipe: FigureRecipe, spec: TrajectorySpec, a: float) -> tuple[float, ...]:
    A = _pair(1.0, a, spec.bbar, recipe.quad).A
    n = recipe.points or TAU_POINTS
    return tuple(np.geomspace(TAU_START, TAU_END_DECAY / (4 * A), n))


def _axis_grid(recipe: FigureRecipe, axis: str):
    n = recipe.points
    if axis == "a":
        return A_GRID if n is None else tuple(np.geomspace(A_GRID[0], A_GRID[-1], n))
    return THETA_GRID if n is None else tuple(np.linspace(0.0, 2 * math.pi, n))


def figure(recipe: FigureRecipe) -> FigureData:
    axis, target, defaults = _LAYOUT[recipe.name]
    fixed_sets = {k: getattr(recipe, k) or v for k, v in defaults.items() if k != axis}
    keys = list(fixed_sets)
    combos = [dict()]
    for k in keys:
        combos = [{**c, k: v} for c in combos for v in fixed_sets[k]]
    data = FigureData(recipe)
    for fixed in combos:
        for spec in recipe.trajectories():
            grids = {"a": (fixed.get("a", 1.0),), "theta": (fixed.get("theta", 0.0),),
                     "tau": (fixed.get("tau", 0.0),)}
            if axis == "tau":
                grids["tau"] = _tau_grid(recipe, spec, fixed["a"])
            else:
                grids[axis] = _axis_grid(recipe, axis)
            cfg = SweepConfig(
                trajectories=(spec,), a_grid=grids["a"], theta_grid=grids["theta"],
                tau_grid=grids["tau"], targets=(target,), quad=recipe.quad, workers=recipe.workers,
            )
            data.curves.append(Curve(spec, fixed, axis, target, run_sweep(cfg)))
    return data


def _label(v: float) -> str:
    return format(v, ".6g")


def write_figure(data: FigureData, out_dir: str | Path) -> list[Path]:
    """One CSV per curve plus manifest.json; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = data.recipe.name.value
    paths, manifest = [], []
    for i, c in enumerate(data.curves):
        tag = "_".join(f"{k}{_label(v)}" for k, v in c.fixed.items())
        fname = f"{name}_{c.spec.kind.value}" + (f"_{tag}" if tag else "") + ".csv"
        path = out_dir / fname
        write_text(path, render_csv(c.result.rows))
        paths.append(path)
        manifest.append({
            "file": fname, "kind": c.spec.kind.value, "bbar": c.spec.bbar, "axis": c.axis,
            "target": c.target, "fixed": c.fixed, "failed_points": c.result.n_failed,
        })
    r = data.recipe
    meta = {
        "figure": name,
        "curves": manifest,
        "assumptions": {
            "catenary_bbar": r.catenary_bbar,
            "circular_bbar": r.circular_bbar,
            "note": "figure captions do not state the catenary or circular bbar; these are defaults",
        },
        "units": "Omega = 1, so F_Q(a) Omega^2 equals the emitted F_Q(a)",
        "tau_grid": f"{TAU_POINTS} log-spaced points from {TAU_START} to 4 A tau = {TAU_END_DECAY}",
    }
    mpath = out_dir / "manifest.json"
    write_text(mpath, json.dumps(meta, indent=1) + "\n")
    return paths + [mpath]


def with_overrides(recipe: FigureRecipe, **kw) -> FigureRecipe:
    return replace(recipe, **{k: v for k, v in kw.items() if v is not None})
