"""Parameter sweeps over scenarios, simulation and detection settings."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .embedding import LayoutConfig
from .pipeline import MODES, DetectionConfig, coordinates, detect
from .scenarios import KINDS, build_scenario
from .similarity import SimilarityParams
from .simulation import SimParams, run

log = logging.getLogger(__name__)

GEOMETRY_KEYS = ("width", "amplitude", "wavelength", "separation", "size")
SIM_KEYS = ("p", "q", "density", "max_timesteps", "w_max")
SIMILARITY_KEYS = ("score", "window", "horizon")
DBSCAN_KEYS = ("min_pts", "include_self")
PIPELINE_KEYS = ("radius",)
SWEEPABLE = GEOMETRY_KEYS + SIM_KEYS + SIMILARITY_KEYS + DBSCAN_KEYS + PIPELINE_KEYS

RESULTS_HEADER = ["scenario", "param", "value", "epsilon", "rep", "mean_nmi"]

_INT_KEYS = {"max_timesteps", "window", "min_pts"}


def coerce(name: str, value):
    if name == "score":
        return str(value)
    if name == "include_self":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
    if name in _INT_KEYS:
        return int(float(value))
    return float(value)


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter against a grid of epsilons, repeated over seeds.

    ``param`` may be ``"none"`` to evaluate only the base configuration.
    Repetition ``r`` uses seed ``seed + r`` for simulation, embedding and the
    clustering order.
    """

    scenario: str = "straight"
    geometry: dict = field(default_factory=dict)
    param: str = "none"
    values: tuple = (None,)
    epsilons: tuple[float, ...] = tuple(range(5, 45, 5))
    repetitions: int = 5
    seed: int = 0
    sim: SimParams = field(default_factory=SimParams)
    similarity: SimilarityParams = SimilarityParams()
    min_pts: int = 15
    include_self: bool = False
    mode: str = "raw"
    radius: float = 25.0
    layout: LayoutConfig = LayoutConfig()
    stride: int = 1

    def __post_init__(self):
        if self.scenario not in KINDS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.param != "none" and self.param not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.param!r}; choose from {SWEEPABLE}")
        if not self.values:
            raise ValueError("empty value grid")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    def cell(self, value, rep: int):
        """Concrete configuration for one grid value and repetition."""
        overrides = {} if self.param == "none" else {self.param: coerce(self.param, value)}
        geometry = dict(self.geometry)
        geometry.update({k: v for k, v in overrides.items() if k in GEOMETRY_KEYS})
        seed = self.seed + rep
        sim = replace(self.sim, seed=seed, **{k: v for k, v in overrides.items() if k in SIM_KEYS})
        similarity = replace(self.similarity, **{k: v for k, v in overrides.items() if k in SIMILARITY_KEYS})
        detection = DetectionConfig(
            similarity=similarity,
            epsilons=tuple(float(e) for e in self.epsilons),
            min_pts=overrides.get("min_pts", self.min_pts),
            include_self=overrides.get("include_self", self.include_self),
            seed=seed,
            stride=self.stride,
        )
        radius = overrides.get("radius", self.radius)
        return geometry, sim, detection, radius


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def _run_rep(spec: SweepSpec, rep: int) -> list[tuple]:
    rows = []
    cache: dict = {}
    for vi, value in enumerate(spec.values):
        geometry, sim, detection, radius = spec.cell(value, rep)
        key = (tuple(sorted(geometry.items())), repr(sim), radius)
        if key not in cache:
            cache.clear()
            trace = run(build_scenario(spec.scenario, **geometry), sim)
            pos, active = coordinates(trace, spec.mode, radius, sim.seed, spec.layout)
            cache[key] = (trace, pos, active)
        trace, pos, active = cache[key]
        result = detect(pos, active, trace.lanes, detection)
        for eps, mean in result.means().items():
            rows.append((vi, eps, rep, mean))
        log.info("%s %s=%s rep %d done", spec.scenario, spec.param, value, rep)
    return rows


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[dict]:
    """Mean NMI for every (value, epsilon, repetition); deterministic in the seeds."""
    reps = range(spec.repetitions)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_rep, [spec] * spec.repetitions, reps))
    else:
        chunks = [_run_rep(spec, r) for r in reps]
    flat = sorted(row for chunk in chunks for row in chunk)
    return [
        {
            "scenario": spec.scenario,
            "param": spec.param,
            "value": _format_value(spec.values[vi]),
            "epsilon": _format_value(eps),
            "rep": rep,
            "mean_nmi": mean,
        }
        for vi, eps, rep, mean in flat
    ]


def format_results(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for row in rows:
        writer.writerow([row["scenario"], row["param"], row["value"], row["epsilon"], row["rep"],
                         repr(float(row["mean_nmi"]))])
    return buf.getvalue()


def summarize(rows: list[dict]) -> dict[tuple[str, str], float]:
    """Average over repetitions: ``(value, epsilon) -> mean NMI``."""
    acc: dict[tuple[str, str], list[float]] = {}
    for row in rows:
        acc.setdefault((row["value"], row["epsilon"]), []).append(float(row["mean_nmi"]))
    return {k: sum(v) / len(v) for k, v in acc.items()}
