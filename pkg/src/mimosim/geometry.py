"""Indoor-office floor plan, base-station deployments, arrays, and UE drops.

The building is an axis-aligned tiling of rectangular rooms and corridors.
Interior walls are derived from tile adjacency and span floor to ceiling, so
wall crossings of a 3-D link are decided by its 2-D footprint projection.
Wall counts between two points take the minimum over the direct segment and
all two-segment detours through points sampled on corridor centerlines.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError
from .units import SPEED_OF_LIGHT, dbm_to_watts

AREA_TOL_M2 = 1e-6
_GEOM_TOL = 1e-9
_POINT_DEDUPE_M = 1e-6
_WAYPOINT_SPACING_M = 1.0

DEPLOYMENT_NAMES = (
    "single-central",
    "two-indoor",
    "four-indoor",
    "forty-indoor",
    "outdoor",
    "indoor-outdoor",
)

RECTANGULAR_CEILING = "rectangular-ceiling"
ULA_OUTDOOR = "ula-outdoor"


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle with (x0, y0) the southwest corner."""

    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def depth(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.depth

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def contains(self, x: float, y: float, tol: float = 0.0) -> bool:
        return (
            self.x0 - tol <= x <= self.x1 + tol
            and self.y0 - tol <= y <= self.y1 + tol
        )

    def overlap_area(self, other: "Rect") -> float:
        w = min(self.x1, other.x1) - max(self.x0, other.x0)
        d = min(self.y1, other.y1) - max(self.y0, other.y0)
        return max(0.0, w) * max(0.0, d)


@dataclass(frozen=True)
class Wall:
    """Axis-aligned wall segment, endpoints ordered lexicographically."""

    ax: float
    ay: float
    bx: float
    by: float

    @property
    def is_vertical(self) -> bool:
        return abs(self.ax - self.bx) <= _GEOM_TOL


def _make_wall(ax: float, ay: float, bx: float, by: float) -> Wall:
    if (bx, by) < (ax, ay):
        ax, ay, bx, by = bx, by, ax, ay
    return Wall(ax, ay, bx, by)


@dataclass(frozen=True)
class FloorConfig:
    """Grid parameters describing the rectangular room/corridor tiling."""

    rooms_per_row: int = 10
    room_rows: int = 4
    room_width_m: float = 10.0
    room_depth_m: float = 10.0
    num_corridors: int = 2
    corridor_width_m: float = 5.0
    ceiling_height_m: float = 3.0


@dataclass(frozen=True, eq=False)
class FloorPlan:
    """Immutable building geometry; all derived arrays are precomputed."""

    width_m: float
    depth_m: float
    rooms: tuple[Rect, ...]
    corridors: tuple[Rect, ...]
    interior_walls: tuple[Wall, ...]
    ceiling_height_m: float = 3.0
    _vwalls: np.ndarray = field(init=False, repr=False)
    _hwalls: np.ndarray = field(init=False, repr=False)
    _waypoints: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        vw, hw = [], []
        for wall in self.interior_walls:
            if wall.is_vertical:
                lo, hi = sorted((wall.ay, wall.by))
                vw.append((wall.ax, lo, hi))
            else:
                lo, hi = sorted((wall.ax, wall.bx))
                hw.append((wall.ay, lo, hi))
        object.__setattr__(self, "_vwalls", np.array(vw, float).reshape(-1, 3))
        object.__setattr__(self, "_hwalls", np.array(hw, float).reshape(-1, 3))
        object.__setattr__(self, "_waypoints", _corridor_waypoints(self.corridors))

    @property
    def tiles(self) -> tuple[Rect, ...]:
        return self.rooms + self.corridors

    @property
    def corridor_waypoints(self) -> np.ndarray:
        """(N, 2) sample points on corridor centerlines, 1 m apart."""
        return self._waypoints

    def envelope_walls(self) -> tuple[Wall, ...]:
        w, d = self.width_m, self.depth_m
        return (
            _make_wall(0.0, 0.0, w, 0.0),
            _make_wall(w, 0.0, w, d),
            _make_wall(0.0, d, w, d),
            _make_wall(0.0, 0.0, 0.0, d),
        )


def _corridor_waypoints(corridors: tuple[Rect, ...]) -> np.ndarray:
    points = []
    offset = 0.5 * _WAYPOINT_SPACING_M
    for c in corridors:
        if c.width >= c.depth:
            yc = 0.5 * (c.y0 + c.y1)
            xs = np.arange(c.x0 + offset, c.x1 - offset + 1e-12, _WAYPOINT_SPACING_M)
            points.append(np.column_stack([xs, np.full(xs.shape, yc)]))
        else:
            xc = 0.5 * (c.x0 + c.x1)
            ys = np.arange(c.y0 + offset, c.y1 - offset + 1e-12, _WAYPOINT_SPACING_M)
            points.append(np.column_stack([np.full(ys.shape, xc), ys]))
    if not points:
        return np.zeros((0, 2))
    return np.concatenate(points, axis=0)


def _derive_interior_walls(tiles: tuple[Rect, ...]) -> tuple[Wall, ...]:
    walls = []
    for i, a in enumerate(tiles):
        for b in tiles[i + 1 :]:
            for lo_t, hi_t in ((a, b), (b, a)):
                if abs(lo_t.x1 - hi_t.x0) <= _GEOM_TOL:
                    ylo = max(lo_t.y0, hi_t.y0)
                    yhi = min(lo_t.y1, hi_t.y1)
                    if yhi - ylo > _GEOM_TOL:
                        walls.append(_make_wall(lo_t.x1, ylo, lo_t.x1, yhi))
                if abs(lo_t.y1 - hi_t.y0) <= _GEOM_TOL:
                    xlo = max(lo_t.x0, hi_t.x0)
                    xhi = min(lo_t.x1, hi_t.x1)
                    if xhi - xlo > _GEOM_TOL:
                        walls.append(_make_wall(xlo, lo_t.y1, xhi, lo_t.y1))
    return tuple(sorted(set(walls), key=lambda w: (w.ax, w.ay, w.bx, w.by)))


def make_floor_plan(
    width_m: float,
    depth_m: float,
    rooms: list[Rect] | tuple[Rect, ...],
    corridors: list[Rect] | tuple[Rect, ...],
    ceiling_height_m: float = 3.0,
) -> FloorPlan:
    """Validate a tiling and derive its interior walls."""
    if width_m <= 0 or depth_m <= 0 or ceiling_height_m <= 0:
        raise ConfigurationError("floor dimensions must be positive")
    tiles = tuple(rooms) + tuple(corridors)
    if not tiles:
        raise ConfigurationError("floor plan needs at least one tile")
    for t in tiles:
        if t.width <= 0 or t.depth <= 0:
            raise ConfigurationError(f"degenerate tile {t}")
        if (
            t.x0 < -_GEOM_TOL
            or t.y0 < -_GEOM_TOL
            or t.x1 > width_m + _GEOM_TOL
            or t.y1 > depth_m + _GEOM_TOL
        ):
            raise ConfigurationError(f"tile {t} extends outside the footprint")
    for i, a in enumerate(tiles):
        for b in tiles[i + 1 :]:
            if a.overlap_area(b) > AREA_TOL_M2:
                raise ConfigurationError(f"tiles overlap: {a} and {b}")
    total = sum(t.area for t in tiles)
    if abs(total - width_m * depth_m) > AREA_TOL_M2:
        raise ConfigurationError(
            f"tiles cover {total} m^2, footprint is {width_m * depth_m} m^2"
        )
    return FloorPlan(
        width_m=width_m,
        depth_m=depth_m,
        rooms=tuple(rooms),
        corridors=tuple(corridors),
        interior_walls=_derive_interior_walls(tiles),
        ceiling_height_m=ceiling_height_m,
    )


def build_floor_plan(config: FloorConfig | None = None) -> FloorPlan:
    """Build the rectangular office tiling described by ``config``.

    Room rows are grouped into blocks separated by full-width corridors;
    extra rows beyond an even split go to the middle blocks.  The default
    is 40 rooms of 10 m x 10 m in four rows of ten with two 100 m x 5 m
    corridors, a 100 m x 50 m footprint and a 3 m ceiling.
    """
    cfg = config or FloorConfig()
    if cfg.rooms_per_row < 1 or cfg.room_rows < 1 or cfg.num_corridors < 0:
        raise ConfigurationError("room grid counts must be positive")
    if cfg.num_corridors >= cfg.room_rows + 1 and cfg.num_corridors > 0:
        raise ConfigurationError("more corridors than room-row gaps")
    num_blocks = cfg.num_corridors + 1
    base, extra = divmod(cfg.room_rows, num_blocks)
    blocks = [base] * num_blocks
    order = sorted(range(num_blocks), key=lambda i: (abs(i - (num_blocks - 1) / 2), i))
    for k in range(extra):
        blocks[order[k]] += 1
    if min(blocks) < 1:
        raise ConfigurationError("not enough room rows to separate the corridors")

    width = cfg.rooms_per_row * cfg.room_width_m
    rooms: list[Rect] = []
    corridors: list[Rect] = []
    y = 0.0
    for b, rows in enumerate(blocks):
        for _ in range(rows):
            for c in range(cfg.rooms_per_row):
                rooms.append(
                    Rect(c * cfg.room_width_m, y, (c + 1) * cfg.room_width_m, y + cfg.room_depth_m)
                )
            y += cfg.room_depth_m
        if b < cfg.num_corridors:
            corridors.append(Rect(0.0, y, width, y + cfg.corridor_width_m))
            y += cfg.corridor_width_m
    return make_floor_plan(width, y, rooms, corridors, cfg.ceiling_height_m)


# ---------------------------------------------------------------------------
# Wall counting


def _crossing_fields(plan: FloorPlan, p0: np.ndarray, p1: np.ndarray):
    """Candidate wall crossings for each leg.

    ``p0``/``p1`` have shape (L, 2).  Returns (t, px, py, valid), each of
    shape (L, W): the leg parameter, crossing point, and validity per wall.
    """
    parts_t, parts_x, parts_y, parts_v = [], [], [], []
    for walls, axis in ((plan._vwalls, 0), (plan._hwalls, 1)):
        if walls.shape[0] == 0:
            continue
        plane = walls[:, 0][None, :]
        lo = walls[:, 1][None, :]
        hi = walls[:, 2][None, :]
        d0 = p0[:, axis][:, None] - plane
        d1 = p1[:, axis][:, None] - plane
        opp = ((d0 > _GEOM_TOL) & (d1 < -_GEOM_TOL)) | (
            (d0 < -_GEOM_TOL) & (d1 > _GEOM_TOL)
        )
        denom = d0 - d1
        t = d0 / np.where(denom == 0.0, 1.0, denom)
        o0 = p0[:, 1 - axis][:, None]
        o1 = p1[:, 1 - axis][:, None]
        c = o0 + t * (o1 - o0)
        valid = opp & (c >= lo - _GEOM_TOL) & (c <= hi + _GEOM_TOL)
        inplane = (np.abs(d0) <= _GEOM_TOL) & (np.abs(d1) <= _GEOM_TOL)
        if inplane.any():
            # A leg lying inside the wall plane touches that wall once if
            # the spans overlap.
            lo_leg = np.minimum(o0, o1)
            hi_leg = np.maximum(o0, o1)
            touch = inplane & (np.minimum(hi_leg, hi) - np.maximum(lo_leg, lo) >= -_GEOM_TOL)
            mid = 0.5 * (np.maximum(lo_leg, lo) + np.minimum(hi_leg, hi))
            span = o1 - o0
            t_mid = np.where(
                np.abs(span) > _GEOM_TOL,
                (mid - o0) / np.where(span == 0.0, 1.0, span),
                0.0,
            )
            t = np.where(touch, t_mid, t)
            c = np.where(touch, mid, c)
            valid = valid | touch
        plane_b = np.broadcast_to(plane, t.shape)
        px = plane_b if axis == 0 else c
        py = c if axis == 0 else plane_b
        parts_t.append(np.where(valid, t, np.inf))
        parts_x.append(np.where(valid, px, 0.0))
        parts_y.append(np.where(valid, py, 0.0))
        parts_v.append(valid)
    return (
        np.concatenate(parts_t, axis=1),
        np.concatenate(parts_x, axis=1),
        np.concatenate(parts_y, axis=1),
        np.concatenate(parts_v, axis=1),
    )


def _distinct_counts(t, px, py, valid) -> np.ndarray:
    """Count distinct crossing points per leg (same point = one wall)."""
    order = np.argsort(t, axis=1, kind="stable")
    vs = np.take_along_axis(valid, order, axis=1)
    xs = np.take_along_axis(px, order, axis=1)
    ys = np.take_along_axis(py, order, axis=1)
    n = vs.sum(axis=1)
    if t.shape[1] >= 2:
        dup = (
            vs[:, 1:]
            & vs[:, :-1]
            & (np.abs(np.diff(xs, axis=1)) <= _POINT_DEDUPE_M)
            & (np.abs(np.diff(ys, axis=1)) <= _POINT_DEDUPE_M)
        )
        n = n - dup.sum(axis=1)
    return n.astype(np.int64)


def _count_legs(plan: FloorPlan, p0: np.ndarray, p1: np.ndarray, chunk: int = 400_000) -> np.ndarray:
    n_walls = plan._vwalls.shape[0] + plan._hwalls.shape[0]
    legs = p0.shape[0]
    if n_walls == 0 or legs == 0:
        return np.zeros(legs, np.int64)
    out = np.empty(legs, np.int64)
    step = max(1, chunk // n_walls)
    for s in range(0, legs, step):
        e = min(legs, s + step)
        out[s:e] = _distinct_counts(*_crossing_fields(plan, p0[s:e], p1[s:e]))
    return out


def count_walls_batch(plan: FloorPlan, a, bs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Wall counts from one point ``a`` to many points ``bs``.

    Returns ``(num_walls, los, direct)`` where ``num_walls`` is the minimum
    over the direct segment and every two-segment corridor detour,
    ``los`` marks pairs whose direct segment crosses no wall, and
    ``direct`` is the direct-segment count itself.
    """
    a2 = np.asarray(a, float).ravel()[:2]
    b2 = np.atleast_2d(np.asarray(bs, float))[:, :2]
    n = b2.shape[0]
    direct = _count_legs(plan, np.broadcast_to(a2, (n, 2)), b2)
    best = direct
    way = plan.corridor_waypoints
    if way.shape[0]:
        n_way = way.shape[0]
        to_way = _count_legs(plan, np.broadcast_to(a2, (n_way, 2)), way)
        p0 = np.repeat(way, n, axis=0)
        p1 = np.tile(b2, (n_way, 1))
        from_way = _count_legs(plan, p0, p1).reshape(n_way, n)
        detour = (to_way[:, None] + from_way).min(axis=0)
        best = np.minimum(direct, detour)
    return best, direct == 0, direct


def count_walls_pairwise(plan: FloorPlan, a_pts, b_pts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Wall counts for paired points: one source per destination.

    Same contract as :func:`count_walls_batch` but row j pairs
    ``a_pts[j]`` with ``b_pts[j]``.
    """
    a2 = np.atleast_2d(np.asarray(a_pts, float))[:, :2]
    b2 = np.atleast_2d(np.asarray(b_pts, float))[:, :2]
    if a2.shape != b2.shape:
        raise ValueError("paired point arrays must have matching shapes")
    n = a2.shape[0]
    direct = _count_legs(plan, a2, b2)
    best = direct
    way = plan.corridor_waypoints
    if way.shape[0]:
        n_way = way.shape[0]
        to_way = _count_legs(
            plan, np.repeat(a2, n_way, axis=0), np.tile(way, (n, 1))
        ).reshape(n, n_way)
        from_way = _count_legs(
            plan, np.tile(way, (n, 1)), np.repeat(b2, n_way, axis=0)
        ).reshape(n, n_way)
        best = np.minimum(direct, (to_way + from_way).min(axis=1))
    return best, direct == 0, direct


def count_walls(plan: FloorPlan, a, b) -> tuple[int, bool]:
    """Minimum wall count between two points and direct-path LOS flag."""
    num, los, _ = count_walls_batch(plan, a, [np.asarray(b, float).ravel()[:2]])
    return int(num[0]), bool(los[0])


def nearest_envelope_point(plan: FloorPlan, p) -> np.ndarray:
    """Closest point on the building's outer wall to ``p`` (2-D)."""
    x, y = float(p[0]), float(p[1])
    cx = min(max(x, 0.0), plan.width_m)
    cy = min(max(y, 0.0), plan.depth_m)
    if 0.0 < cx < plan.width_m and 0.0 < cy < plan.depth_m:
        # Interior point: project to the nearest of the four walls.
        candidates = [
            (cx, (0.0, cy)),
            (plan.width_m - cx, (plan.width_m, cy)),
            (cy, (cx, 0.0)),
            (plan.depth_m - cy, (cx, plan.depth_m)),
        ]
        _, best = min(candidates, key=lambda item: item[0])
        return np.array(best, float)
    return np.array([cx, cy], float)


# ---------------------------------------------------------------------------
# Deployments and arrays


@dataclass(frozen=True, eq=False)
class BsSite:
    position: np.ndarray
    array_kind: str
    num_antennas: int
    power_budget: float
    antenna_positions: np.ndarray


@dataclass(frozen=True, eq=False)
class Deployment:
    name: str
    sites: tuple[BsSite, ...]
    total_antennas: int

    @property
    def num_sites(self) -> int:
        return len(self.sites)

    @property
    def site_slices(self) -> tuple[slice, ...]:
        """Row ranges of each site's antennas in the stacked antenna axis."""
        out, start = [], 0
        for s in self.sites:
            out.append(slice(start, start + s.num_antennas))
            start += s.num_antennas
        return tuple(out)

    def stacked_antenna_positions(self) -> np.ndarray:
        return np.concatenate([s.antenna_positions for s in self.sites], axis=0)

    @property
    def total_power_watts(self) -> float:
        return float(sum(s.power_budget for s in self.sites))


def build_array(position, array_kind: str, num_antennas: int, carrier_hz: float = 2.1e9) -> np.ndarray:
    """Antenna coordinates for one site, spaced at half a wavelength.

    ``rectangular-ceiling``: ceil(sqrt(M)) columns per row, row-major fill
    in a horizontal plane at the site height (last row may be partial),
    centered on the site.  ``ula-outdoor``: M colinear points along the
    building's long (x) axis at the site height, centered on the site.
    """
    if num_antennas < 1:
        raise ConfigurationError("array needs at least one antenna")
    pos = np.asarray(position, float).ravel()
    spacing = 0.5 * SPEED_OF_LIGHT / carrier_hz
    if array_kind == RECTANGULAR_CEILING:
        ncols = math.isqrt(num_antennas)
        if ncols * ncols < num_antennas:
            ncols += 1
        k = np.arange(num_antennas)
        offsets = np.column_stack(
            [
                (k % ncols) * spacing,
                (k // ncols) * spacing,
                np.zeros(num_antennas),
            ]
        )
    elif array_kind == ULA_OUTDOOR:
        xs = (np.arange(num_antennas) - 0.5 * (num_antennas - 1)) * spacing
        offsets = np.column_stack([xs, np.zeros(num_antennas), np.zeros(num_antennas)])
    else:
        raise ConfigurationError(f"unknown array kind: {array_kind!r}")
    offsets = offsets - offsets.mean(axis=0, keepdims=True)
    return pos[None, :] + offsets


def _site_anchors(
    plan: FloorPlan,
    name: str,
    outdoor_offset_m: float,
    outdoor_height_m: float,
) -> list[tuple[float, float, float, str]]:
    cx, cy = 0.5 * plan.width_m, 0.5 * plan.depth_m
    z_in = plan.ceiling_height_m

    def southwest_central() -> list[tuple[float, float, float, str]]:
        candidates = [
            r
            for r in plan.rooms
            if r.x1 <= cx + _GEOM_TOL and r.y1 <= cy + _GEOM_TOL
        ]
        if not candidates:
            raise ConfigurationError("no room southwest of the building center")
        room = max(candidates, key=lambda r: (r.x1, r.y1))
        return [(room.x1 - 0.5, room.y1 - 0.5, z_in, RECTANGULAR_CEILING)]

    def corridor_centers() -> list[tuple[float, float, float, str]]:
        if not plan.corridors:
            raise ConfigurationError(f"deployment {name!r} needs corridors")
        out = []
        for c in sorted(plan.corridors, key=lambda c: c.center[::-1]):
            x, y = c.center
            out.append((x, y, z_in, RECTANGULAR_CEILING))
        return out

    def corridor_quarters() -> list[tuple[float, float, float, str]]:
        if not plan.corridors:
            raise ConfigurationError(f"deployment {name!r} needs corridors")
        out = []
        for c in sorted(plan.corridors, key=lambda c: c.center[::-1]):
            yc = c.center[1]
            if c.width >= c.depth:
                out.append((c.x0 + 0.25 * c.width, yc, z_in, RECTANGULAR_CEILING))
                out.append((c.x0 + 0.75 * c.width, yc, z_in, RECTANGULAR_CEILING))
            else:
                xc = c.center[0]
                out.append((xc, c.y0 + 0.25 * c.depth, z_in, RECTANGULAR_CEILING))
                out.append((xc, c.y0 + 0.75 * c.depth, z_in, RECTANGULAR_CEILING))
        return sorted(out, key=lambda p: (p[1], p[0]))

    def room_centers() -> list[tuple[float, float, float, str]]:
        return [(r.center[0], r.center[1], z_in, RECTANGULAR_CEILING) for r in plan.rooms]

    def outdoor_sites() -> list[tuple[float, float, float, str]]:
        # Mid-points of the two long outside walls, pushed outward.
        if plan.width_m >= plan.depth_m:
            return [
                (cx, -outdoor_offset_m, outdoor_height_m, ULA_OUTDOOR),
                (cx, plan.depth_m + outdoor_offset_m, outdoor_height_m, ULA_OUTDOOR),
            ]
        return [
            (-outdoor_offset_m, cy, outdoor_height_m, ULA_OUTDOOR),
            (plan.width_m + outdoor_offset_m, cy, outdoor_height_m, ULA_OUTDOOR),
        ]

    if name == "single-central":
        return southwest_central()
    if name == "two-indoor":
        return corridor_centers()
    if name == "four-indoor":
        return corridor_quarters()
    if name == "forty-indoor":
        return room_centers()
    if name == "outdoor":
        return outdoor_sites()
    if name == "indoor-outdoor":
        return southwest_central() + outdoor_sites()
    raise ConfigurationError(
        f"unknown deployment {name!r}; expected one of {DEPLOYMENT_NAMES}"
    )


def place_deployment(
    plan: FloorPlan,
    name: str,
    total_antennas: int,
    p_sum_dbm: float = 26.0,
    carrier_hz: float = 2.1e9,
    outdoor_offset_m: float = 15.0,
    outdoor_height_m: float = 10.0,
) -> Deployment:
    """Instantiate one of the named deployments with ``total_antennas`` split
    evenly across its sites and the sum power budget split evenly in dB."""
    anchors = _site_anchors(plan, name, outdoor_offset_m, outdoor_height_m)
    n_sites = len(anchors)
    if total_antennas < n_sites or total_antennas % n_sites != 0:
        raise ConfigurationError(
            f"deployment {name!r}: {total_antennas} antennas not divisible by {n_sites} sites"
        )
    m_i = total_antennas // n_sites
    p_i_watts = float(dbm_to_watts(p_sum_dbm - 10.0 * math.log10(n_sites)))
    sites = []
    for x, y, z, kind in anchors:
        pos = np.array([x, y, z], float)
        sites.append(
            BsSite(
                position=pos,
                array_kind=kind,
                num_antennas=m_i,
                power_budget=p_i_watts,
                antenna_positions=build_array(pos, kind, m_i, carrier_hz),
            )
        )
    return Deployment(name=name, sites=tuple(sites), total_antennas=total_antennas)


# ---------------------------------------------------------------------------
# UE placement and export


@dataclass(frozen=True, eq=False)
class UeDrop:
    positions: np.ndarray
    drop_index: int
    seed: object


def sample_ue_drop(
    plan: FloorPlan,
    num_ues: int,
    seed,
    drop_index: int = 0,
    ue_height_m: float = 1.5,
) -> UeDrop:
    """Place UEs uniformly over the union of rooms and corridors.

    Rejection-free: a tile is first chosen with probability proportional to
    its area, then the point is drawn uniformly inside it.
    """
    if num_ues < 1:
        raise ConfigurationError("need at least one UE")
    tiles = plan.tiles
    areas = np.array([t.area for t in tiles], float)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(tiles), size=num_ues, p=areas / areas.sum())
    u = rng.random((num_ues, 2))
    x0 = np.array([t.x0 for t in tiles])[idx]
    y0 = np.array([t.y0 for t in tiles])[idx]
    w = np.array([t.width for t in tiles])[idx]
    d = np.array([t.depth for t in tiles])[idx]
    eps = 1e-9
    x = np.clip(x0 + u[:, 0] * w, eps, plan.width_m - eps)
    y = np.clip(y0 + u[:, 1] * d, eps, plan.depth_m - eps)
    z = np.full(num_ues, ue_height_m)
    return UeDrop(positions=np.column_stack([x, y, z]), drop_index=drop_index, seed=seed)


def export_walls(plan: FloorPlan, path) -> None:
    """Write all wall segments (outer envelope plus interior) as CSV."""
    segments = sorted(
        plan.envelope_walls() + plan.interior_walls,
        key=lambda w: (w.ax, w.ay, w.bx, w.by),
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "y1", "x2", "y2"])
        for seg in segments:
            writer.writerow([repr(seg.ax), repr(seg.ay), repr(seg.bx), repr(seg.by)])
