"""Grid crowd model with controlled lane formation.

Walkers live on integer cells.  Random walkers idle inside a crowd region and
lane walkers follow polyline paths; each timestep every active walker makes
at most one cardinal step, and a walker may push a blocker aside once.

Random draw order (one xoshiro256** stream seeded with ``SimParams.seed``):

1. spawning, group by group (crowd first, then lanes in order): a partial
   Fisher-Yates shuffle of the region's cells, one draw per walker;
2. per timestep: a Fisher-Yates shuffle of the active walkers (top down),
   then for each walker in that order its intent draws followed by at most
   one draw to pick a push destination when two or more cells are free.

Intent draws: a random walker outside its region draws only to break an
equal-violation tie; inside it draws ``u < p`` and, on a step, a direction in
(E, N, W, S) order.  A lane walker draws ``u < q``; following the lane costs
one quantization draw, otherwise it wanders like a random walker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _pykernels as ref
from . import kernels
from .rng import PortableRNG


class ConfigError(ValueError):
    """Invalid scenario or parameter configuration."""


@dataclass(frozen=True)
class GridPoint:
    x: int
    y: int

    def neighbours(self) -> list["GridPoint"]:
        return [GridPoint(self.x + dx, self.y + dy) for dx, dy in ref.DIRECTIONS]


@dataclass(frozen=True)
class PlanarPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class RectRegion:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ConfigError(f"degenerate region {self}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def cell_bounds(self) -> tuple[int, int, int, int]:
        """Inclusive integer bounds of the cells ``x_min <= x < x_max`` (same for y)."""
        return (math.ceil(self.x_min), math.ceil(self.x_max) - 1,
                math.ceil(self.y_min), math.ceil(self.y_max) - 1)

    def cells(self) -> list[tuple[int, int]]:
        x_lo, x_hi, y_lo, y_hi = self.cell_bounds()
        return [(x, y) for y in range(y_lo, y_hi + 1) for x in range(x_lo, x_hi + 1)]

    def contains_cell(self, x: int, y: int) -> bool:
        x_lo, x_hi, y_lo, y_hi = self.cell_bounds()
        return x_lo <= x <= x_hi and y_lo <= y <= y_hi


class LanePath:
    """Polyline a lane follows, from its first to its last vertex."""

    def __init__(self, points):
        pts = np.asarray([(p.x, p.y) if isinstance(p, PlanarPoint) else p for p in points],
                         dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise ConfigError("a lane path needs at least two points")
        seg = np.diff(pts, axis=0)
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(lengths == 0):
            raise ConfigError("consecutive path points must be distinct")
        self.points = np.ascontiguousarray(pts)
        self.cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
        self.tangents = seg / lengths[:, None]

    @property
    def length(self) -> float:
        return float(self.cumulative[-1])

    def closest_point(self, b: PlanarPoint) -> tuple[PlanarPoint, PlanarPoint, float]:
        return closest_point_on_path(self, b)

    def __eq__(self, other):
        return isinstance(other, LanePath) and np.array_equal(self.points, other.points)

    def __repr__(self):
        return f"LanePath({len(self.points)} points, length={self.length:.3f})"


@dataclass(frozen=True, eq=False)
class LaneSpec:
    spawn_region: RectRegion
    path: LanePath
    width: float


@dataclass(frozen=True, eq=False)
class Scenario:
    crowd_region: RectRegion
    lanes: tuple[LaneSpec, ...] = ()
    name: str = "custom"


@dataclass
class SimParams:
    """Model parameters.  ``p`` is the probability of a random step.

    ``w_max`` overrides the lane half-width; by default each lane uses half
    its scenario width.
    """

    p: float = 0.2
    q: float = 0.5
    density: float = 0.3
    max_timesteps: int = 1000
    seed: int = 0
    w_max: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.q <= 1.0:
            raise ConfigError(f"q must lie in [0, 1], got {self.q}")
        if not 0.0 < self.density <= 1.0:
            raise ConfigError(f"density must lie in (0, 1], got {self.density}")
        if self.w_max is not None and self.w_max <= 0:
            raise ConfigError(f"w_max must be positive, got {self.w_max}")
        if self.max_timesteps < 0:
            raise ConfigError("max_timesteps must be non-negative")

    def lane_half_width(self, lane: LaneSpec) -> float:
        return self.w_max if self.w_max is not None else lane.width / 2.0


@dataclass
class WalkerState:
    id: int
    lane: int | None  # None for a random walker
    pos: GridPoint
    active: bool = True

    @property
    def is_random(self) -> bool:
        return self.lane is None

    @property
    def label(self) -> str:
        return "R" if self.lane is None else f"L{self.lane}"


def label_name(lane_index: int) -> str:
    return "R" if lane_index < 0 else f"L{lane_index}"


def parse_label(label: str) -> int:
    if label == "R":
        return -1
    if label.startswith("L") and label[1:].isdigit():
        return int(label[1:])
    raise ValueError(f"unknown walker label {label!r}")


def spawn_count(density: float, area: float) -> int:
    return int(math.floor(density * area + 0.5))


def spawn_walkers(scenario: Scenario, params: SimParams, rng: PortableRNG) -> list[WalkerState]:
    """Place each group uniformly on distinct cells of its region."""
    groups = [(None, scenario.crowd_region)] + [(k, lane.spawn_region)
                                                for k, lane in enumerate(scenario.lanes)]
    taken: set[tuple[int, int]] = set()
    walkers: list[WalkerState] = []
    for lane, region in groups:
        cells = region.cells()
        if taken.intersection(cells):
            raise ConfigError("spawn regions overlap")
        count = spawn_count(params.density, region.area)
        if count > len(cells):
            raise ConfigError(f"{count} walkers requested but region has {len(cells)} cells")
        for i in range(count):
            j = i + rng.below(len(cells) - i)
            cells[i], cells[j] = cells[j], cells[i]
            walkers.append(WalkerState(len(walkers), lane, GridPoint(*cells[i])))
        taken.update(cells)
    return walkers


def grid_quantize_step(direction: PlanarPoint, rng: PortableRNG) -> GridPoint:
    """Cardinal unit step whose expectation is ``direction / (|dx| + |dy|)``."""
    if direction.x == 0 and direction.y == 0:
        raise ValueError("cannot quantize a zero direction")
    return GridPoint(*ref.quantize(direction.x, direction.y, rng))


def closest_point_on_path(path: LanePath, b: PlanarPoint) -> tuple[PlanarPoint, PlanarPoint, float]:
    ax, ay, tx, ty, arc = ref.closest_point(path.points.tolist(), path.cumulative.tolist(),
                                            float(b.x), float(b.y))
    return PlanarPoint(ax, ay), PlanarPoint(tx, ty), arc


def random_walker_intent(w: WalkerState, region: RectRegion, params: SimParams,
                         rng: PortableRNG) -> GridPoint:
    dx, dy = ref.random_intent(w.pos.x, w.pos.y, region.cell_bounds(), params.p, rng)
    return GridPoint(w.pos.x + dx, w.pos.y + dy)


def lane_walker_intent(w: WalkerState, path: LanePath, params: SimParams, rng: PortableRNG,
                       w_max: float | None = None) -> GridPoint:
    if w_max is None:
        if params.w_max is None:
            raise ConfigError("lane half-width unknown: pass w_max or set params.w_max")
        w_max = params.w_max
    dx, dy = ref.lane_intent(w.pos.x, w.pos.y, path.points.tolist(), path.cumulative.tolist(),
                             w_max, params.p, params.q, rng)
    return GridPoint(w.pos.x + dx, w.pos.y + dy)


ARENA_MARGIN = 64


@dataclass
class SimState:
    """Mutable simulation state: positions, activity, lane index and occupancy.

    Occupancy is a dense grid over an arena enclosing every region and path
    with a margin; cells beyond the arena count as blocked.
    """

    pos: np.ndarray  # (n, 2) int32
    active: np.ndarray  # (n,) uint8
    lane: np.ndarray  # (n,) int32, -1 for random walkers
    occ: np.ndarray  # (rows, cols) int32 walker index or -1
    origin: tuple[int, int]
    rng: PortableRNG
    t: int = 0

    @classmethod
    def from_walkers(cls, walkers: list[WalkerState], scenario: Scenario,
                     rng: PortableRNG) -> "SimState":
        xs = [scenario.crowd_region.x_min, scenario.crowd_region.x_max]
        ys = [scenario.crowd_region.y_min, scenario.crowd_region.y_max]
        for lane in scenario.lanes:
            xs += [lane.spawn_region.x_min, lane.spawn_region.x_max]
            ys += [lane.spawn_region.y_min, lane.spawn_region.y_max]
            xs += lane.path.points[:, 0].tolist()
            ys += lane.path.points[:, 1].tolist()
        for w in walkers:
            xs.append(w.pos.x)
            ys.append(w.pos.y)
        ox = math.floor(min(xs)) - ARENA_MARGIN
        oy = math.floor(min(ys)) - ARENA_MARGIN
        cols = math.ceil(max(xs)) + ARENA_MARGIN - ox + 1
        rows = math.ceil(max(ys)) + ARENA_MARGIN - oy + 1
        occ = np.full((rows, cols), -1, dtype=np.int32)
        n = len(walkers)
        pos = np.zeros((n, 2), dtype=np.int32)
        active = np.zeros(n, dtype=np.uint8)
        lane_idx = np.full(n, -1, dtype=np.int32)
        for i, w in enumerate(walkers):
            pos[i] = (w.pos.x, w.pos.y)
            lane_idx[i] = -1 if w.lane is None else w.lane
            if w.active:
                if occ[w.pos.y - oy, w.pos.x - ox] >= 0:
                    raise ConfigError(f"two walkers on cell {w.pos}")
                active[i] = 1
                occ[w.pos.y - oy, w.pos.x - ox] = i
        return cls(pos, active, lane_idx, occ, (ox, oy), rng)

    def walker(self, i: int) -> WalkerState:
        k = int(self.lane[i])
        return WalkerState(i, None if k < 0 else k, GridPoint(int(self.pos[i, 0]), int(self.pos[i, 1])),
                           bool(self.active[i]))

    def occupant(self, cell: GridPoint) -> int:
        ox, oy = self.origin
        r, c = cell.y - oy, cell.x - ox
        if 0 <= r < self.occ.shape[0] and 0 <= c < self.occ.shape[1]:
            return int(self.occ[r, c])
        return -1

    def lane_walkers_active(self) -> int:
        return int(np.count_nonzero(self.active.astype(bool) & (self.lane >= 0)))


def resolve_move(state: SimState, mover_id: int, target: GridPoint, rng: PortableRNG | None = None) -> bool:
    """Move ``mover_id`` onto the cardinal neighbour ``target``, pushing any occupant.

    The occupant goes to a random free cell among its three neighbours other
    than the mover's cell; when none is free the move fails.  Returns whether
    the mover moved.
    """
    rng = rng if rng is not None else state.rng
    x0, y0 = int(state.pos[mover_id, 0]), int(state.pos[mover_id, 1])
    dx, dy = target.x - x0, target.y - y0
    if abs(dx) + abs(dy) != 1:
        raise ValueError(f"target {target} is not a cardinal neighbour of ({x0}, {y0})")
    arr = rng.state_array()
    moved = kernels.resolve_move(arr, state.pos, state.occ, state.origin[0], state.origin[1],
                                 mover_id, dx, dy)
    rng.load_state(arr)
    return bool(moved)


@dataclass
class _PathTable:
    points: np.ndarray
    offsets: np.ndarray
    cumulative: np.ndarray
    w_max: np.ndarray

    @classmethod
    def build(cls, scenario: Scenario, params: SimParams) -> "_PathTable":
        if not scenario.lanes:
            return cls(np.zeros((0, 2)), np.zeros(1, dtype=np.int64), np.zeros(0), np.zeros(0))
        pts = np.concatenate([lane.path.points for lane in scenario.lanes])
        cum = np.concatenate([lane.path.cumulative for lane in scenario.lanes])
        offsets = np.cumsum([0] + [len(lane.path.points) for lane in scenario.lanes]).astype(np.int64)
        wmax = np.array([params.lane_half_width(lane) for lane in scenario.lanes], dtype=np.float64)
        return cls(np.ascontiguousarray(pts), offsets, np.ascontiguousarray(cum), wmax)


def step(state: SimState, scenario: Scenario, params: SimParams, _paths: _PathTable | None = None) -> SimState:
    """Advance ``state`` by one timestep in place and return it."""
    paths = _paths if _paths is not None else _PathTable.build(scenario, params)
    arr = state.rng.state_array()
    kernels.sim_step(arr, state.pos, state.active, state.lane, state.occ,
                     state.origin[0], state.origin[1], scenario.crowd_region.cell_bounds(),
                     float(params.p), float(params.q),
                     paths.points, paths.offsets, paths.cumulative, paths.w_max)
    state.rng.load_state(arr)
    state.t += 1
    return state


@dataclass
class SimTrace:
    """Positions and ground truth for timesteps ``0..T_end``.

    ``positions[t, i]`` is only meaningful where ``active[t, i]`` is set.
    """

    positions: np.ndarray  # (T+1, n, 2) int32
    active: np.ndarray  # (T+1, n) bool
    lanes: np.ndarray  # (n,) int32, -1 random
    node_ids: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.node_ids is None:
            self.node_ids = np.arange(self.positions.shape[1], dtype=np.int64)

    @property
    def n_timesteps(self) -> int:
        return self.positions.shape[0]

    @property
    def t_end(self) -> int:
        return self.positions.shape[0] - 1

    @property
    def n_nodes(self) -> int:
        return self.positions.shape[1]

    def labels(self) -> list[str]:
        return [label_name(int(k)) for k in self.lanes]

    def frame(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        """Indices and positions of the walkers active at ``t``."""
        idx = np.flatnonzero(self.active[t])
        return idx, self.positions[t, idx]

    def __eq__(self, other):
        return (isinstance(other, SimTrace)
                and np.array_equal(self.positions * self.active[..., None],
                                   other.positions * other.active[..., None])
                and np.array_equal(self.active, other.active)
                and np.array_equal(self.lanes, other.lanes)
                and np.array_equal(self.node_ids, other.node_ids))


def run(scenario: Scenario, params: SimParams) -> SimTrace:
    """Simulate until no lane walker is left or ``max_timesteps`` is reached."""
    rng = PortableRNG(params.seed)
    walkers = spawn_walkers(scenario, params, rng)
    state = SimState.from_walkers(walkers, scenario, rng)
    paths = _PathTable.build(scenario, params)
    frames = [state.pos.copy()]
    actives = [state.active.astype(bool)]
    while state.t < params.max_timesteps and state.lane_walkers_active() > 0:
        step(state, scenario, params, paths)
        frames.append(state.pos.copy())
        actives.append(state.active.astype(bool))
    n = len(walkers)
    positions = np.stack(frames) if n else np.zeros((len(frames), 0, 2), dtype=np.int32)
    active = np.stack(actives) if n else np.zeros((len(frames), 0), dtype=bool)
    return SimTrace(positions, active, state.lane.copy())
