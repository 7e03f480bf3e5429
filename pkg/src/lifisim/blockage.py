"""Link occlusion by people modeled as vertical rectangular prisms.

Two blocker kinds exist: the user's own body, standing a fixed distance
behind the device opposite the facing direction, and other people
scattered uniformly over the room at a given density. A link is blocked
when the open segment between its endpoints meets a prism's closed
volume; the test is an exact slab intersection in the prism's frame.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Blocker:
    """Vertical prism standing on the floor.

    The footprint is a rectangle centered on ``center``: extent
    ``width`` along the facing direction (body depth) and ``length``
    across it (shoulder span). The prism spans z in [0, height].
    """

    center: tuple                 # (x, y) on the floor, m
    facing_deg: float
    length: float = 0.7           # L_b
    width: float = 0.2            # W_b
    height: float = 1.75          # H_b
    kind: str = "non-user"

    def __post_init__(self):
        if min(self.length, self.width, self.height) <= 0:
            raise ValueError("blocker dimensions must be positive")


@dataclass(frozen=True)
class BlockageConfig:
    """Density and geometry of blockers around the user."""

    kappa_b: float = 0.0          # non-user blockers per m^2
    d_p: float = 0.3              # device-to-body distance, m
    length: float = 0.7
    width: float = 0.2
    height: float = 1.75
    self_blocker: bool = True

    def __post_init__(self):
        if self.kappa_b < 0:
            raise ValueError("kappa_b must be nonnegative")
        if self.d_p <= 0:
            raise ValueError("d_p must be positive")


def place_blockers(cfg, room, pose, rng):
    """Sample the blocker population for one channel realization.

    The self-blocker stands d_p behind the device against the facing
    direction and faces the device. round(kappa_b * floor area) further
    prisms are placed uniformly with uniform facings.
    """
    blockers = []
    dims = dict(length=cfg.length, width=cfg.width, height=cfg.height)
    if cfg.self_blocker:
        omega = np.deg2rad(pose.omega_deg)
        cx = pose.position[0] - cfg.d_p * np.cos(omega)
        cy = pose.position[1] - cfg.d_p * np.sin(omega)
        blockers.append(Blocker(center=(float(cx), float(cy)),
                                facing_deg=float(pose.omega_deg),
                                kind="self", **dims))
    n_extra = int(np.floor(cfg.kappa_b * room.width * room.depth + 0.5))
    for _ in range(n_extra):
        x = rng.uniform(0.0, room.width)
        y = rng.uniform(0.0, room.depth)
        facing = rng.uniform(0.0, 360.0)
        blockers.append(Blocker(center=(float(x), float(y)),
                                facing_deg=float(facing), **dims))
    return blockers


def _segment_prism_hits(a, b, blocker):
    """Vectorized slab test of segments a->b against one prism.

    Args:
        a, b: (n, 3) segment endpoints.

    Returns:
        (n,) bool; True where the open segment (a, b) meets the closed
        prism volume. Touching only at an endpoint does not count.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    phi = np.deg2rad(blocker.facing_deg)
    c, s = np.cos(phi), np.sin(phi)
    # Local frame: u along facing, v across, z unchanged.
    cx, cy = blocker.center

    def to_local(p):
        dx = p[:, 0] - cx
        dy = p[:, 1] - cy
        return np.stack([c * dx + s * dy, -s * dx + c * dy, p[:, 2]], axis=1)

    p0 = to_local(a)
    p1 = to_local(b)
    d = p1 - p0
    lo = np.array([-blocker.width / 2, -blocker.length / 2, 0.0])
    hi = np.array([blocker.width / 2, blocker.length / 2, blocker.height])

    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (lo - p0) / d
        t2 = (hi - p0) / d
    tmin = np.minimum(t1, t2)
    tmax = np.maximum(t1, t2)
    # A degenerate axis constrains membership, not the parameter range.
    degenerate = d == 0.0
    inside = (p0 >= lo) & (p0 <= hi)
    tmin = np.where(degenerate, np.where(inside, -np.inf, np.inf), tmin)
    tmax = np.where(degenerate, np.where(inside, np.inf, -np.inf), tmax)

    t_enter = tmin.max(axis=1)
    t_exit = tmax.min(axis=1)
    return (t_enter <= t_exit) & (t_exit > 0.0) & (t_enter < 1.0)


def segment_blocked(a, b, blocker):
    """True when the open segment (a, b) intersects one prism."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.array_equal(a, b):
        raise ValueError("segment endpoints must differ")
    return bool(_segment_prism_hits(a[None, :], b[None, :], blocker)[0])


def segments_blocked(a, b, blockers):
    """(n,) bool: which of n segments any of the blockers occludes."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    hit = np.zeros(a.shape[0], dtype=bool)
    for blocker in blockers:
        hit |= _segment_prism_hits(a, b, blocker)
    return hit


def blockage_mask(tx_positions, rx_positions, blockers):
    """Occlusion matrix over all transmitter-receiver pairs.

    Entry (i, j) is True when any blocker cuts the segment from
    transmitter j to receiver i.
    """
    tx = np.atleast_2d(np.asarray(tx_positions, dtype=float))
    rx = np.atleast_2d(np.asarray(rx_positions, dtype=float))
    if tx.size == 0 or rx.size == 0:
        raise ValueError("position lists must be nonempty")
    n_tx = tx.shape[0]
    n_rx = rx.shape[0]
    a = np.tile(tx, (n_rx, 1))
    b = np.repeat(rx, n_tx, axis=0)
    return segments_blocked(a, b, blockers).reshape(n_rx, n_tx)
