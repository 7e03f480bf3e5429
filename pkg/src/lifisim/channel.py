"""Optical DC channel gains: line-of-sight and diffuse reflections.

A generalized-Lambertian source of order k illuminates a photodiode of
area A through the gain

    h = (k + 1) / (2 pi d^2) * A * cos^k(phi) * cos(psi)

for radiance angle phi at the source and incidence angle psi at the
detector, zero outside the detector field of view or behind either
face. The diffuse part bounces over a mesh of wall, floor and ceiling
elements that absorb with their full hemisphere and re-emit as order-1
Lambertian sources; summing every reflection order amounts to the
matrix equation

    h_nlos = r^T G_rho (I - E G_rho)^(-1) t

with E the element-to-element transfer matrix, G_rho the reflectivity
diagonal, t the source-to-element and r the element-to-detector gains.
The linear system is solved from a dense LU factorization computed once
per mesh; no explicit inverse is formed.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .blockage import segments_blocked


class RadiosityError(RuntimeError):
    """Raised when the reflection series does not converge."""


@dataclass(frozen=True)
class LambertianSource:
    """Emitter lobe and detector aperture parameters of one link end."""

    semiangle_deg: float = 60.0   # half-power semiangle Phi
    area: float = 0.25e-4         # detector physical area A, m^2
    fov_deg: float = 60.0         # detector field of view Psi

    def __post_init__(self):
        if not 0 < self.semiangle_deg < 90:
            raise ValueError("semiangle must lie in (0, 90) degrees")
        if self.area <= 0:
            raise ValueError("area must be positive")
        if not 0 < self.fov_deg <= 90:
            raise ValueError("fov must lie in (0, 90] degrees")

    @property
    def order(self):
        """Lambertian emission order k = -1 / log2(cos(semiangle))."""
        return -1.0 / np.log2(np.cos(np.deg2rad(self.semiangle_deg)))


def los_gain_matrix(tx_pos, tx_normal, rx_pos, rx_normal, order, area, fov_deg):
    """LOS gains between every transmitter-receiver pair.

    Args:
        tx_pos, tx_normal: (n_tx, 3) source positions and unit normals.
        rx_pos, rx_normal: (n_rx, 3) detector positions and unit normals.
        order: Lambertian order of the sources.
        area: detector area, m^2 (scalar or (n_rx,)).
        fov_deg: detector field of view (scalar or (n_rx,)).

    Returns:
        (n_rx, n_tx) array of nonnegative gains; zero where the
        incidence angle exceeds the FOV or either cosine is negative.
        Coincident positions yield zero gain.
    """
    tx_pos = np.atleast_2d(tx_pos)
    rx_pos = np.atleast_2d(rx_pos)
    tx_normal = np.atleast_2d(tx_normal)
    rx_normal = np.atleast_2d(rx_normal)

    diff = rx_pos[:, None, :] - tx_pos[None, :, :]      # (n_rx, n_tx, 3)
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    safe_d2 = np.where(d2 > 0.0, d2, 1.0)     # masked out of the result
    inv_d = 1.0 / np.sqrt(safe_d2)
    cos_phi = np.einsum("jk,ijk->ij", tx_normal, diff) * inv_d
    cos_psi = -np.einsum("ik,ijk->ij", rx_normal, diff) * inv_d

    cos_fov = np.cos(np.deg2rad(np.asarray(fov_deg, dtype=float)))
    if np.ndim(cos_fov) == 1:
        cos_fov = cos_fov[:, None]
    area = np.asarray(area, dtype=float)
    if np.ndim(area) == 1:
        area = area[:, None]

    visible = (cos_phi > 0) & (cos_psi > 0) & (cos_psi >= cos_fov) & (d2 > 0)
    cos_phi = np.clip(cos_phi, 0.0, 1.0)
    cos_psi = np.clip(cos_psi, 0.0, 1.0)
    gain = (order + 1) / (2 * np.pi * safe_d2) * area * cos_phi ** order * cos_psi
    return np.where(visible, gain, 0.0)


def los_gain(tx_pos, tx_normal, rx_pos, rx_normal, source):
    """Scalar LOS gain for a single link; see los_gain_matrix."""
    tx_pos = np.asarray(tx_pos, dtype=float)
    rx_pos = np.asarray(rx_pos, dtype=float)
    if np.array_equal(tx_pos, rx_pos):
        raise ValueError("transmitter and receiver positions must differ")
    g = los_gain_matrix(tx_pos[None, :], np.asarray(tx_normal, dtype=float)[None, :],
                        rx_pos[None, :], np.asarray(rx_normal, dtype=float)[None, :],
                        source.order, source.area, source.fov_deg)
    return float(g[0, 0])


@dataclass(frozen=True)
class SurfaceMesh:
    """Flat tiling of the room boundary into reflecting elements."""

    centers: np.ndarray       # (n, 3)
    normals: np.ndarray       # (n, 3), unit, pointing into the room
    areas: np.ndarray         # (n,)
    rho: np.ndarray           # (n,) reflectivities

    @property
    def n_elements(self):
        return self.centers.shape[0]


def build_environment_mesh(room, resolution=0.5):
    """Tile floor, ceiling and the four walls with a uniform grid.

    Each face is split into round(dim / resolution) cells per axis (at
    least one), so cell areas sum to the exact boundary area even when
    the resolution does not divide the face.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    w, d, h = room.width, room.depth, room.height

    faces = [
        # (origin, axis_u, axis_v, dims (len_u, len_v), normal, rho)
        ((0, 0, 0), (1, 0, 0), (0, 1, 0), (w, d), (0, 0, 1), room.rho_floor),
        ((0, 0, h), (1, 0, 0), (0, 1, 0), (w, d), (0, 0, -1), room.rho_ceiling),
        ((0, 0, 0), (0, 1, 0), (0, 0, 1), (d, h), (1, 0, 0), room.rho_walls),
        ((w, 0, 0), (0, 1, 0), (0, 0, 1), (d, h), (-1, 0, 0), room.rho_walls),
        ((0, 0, 0), (1, 0, 0), (0, 0, 1), (w, h), (0, 1, 0), room.rho_walls),
        ((0, d, 0), (1, 0, 0), (0, 0, 1), (w, h), (0, -1, 0), room.rho_walls),
    ]

    centers, normals, areas, rho = [], [], [], []
    for origin, au, av, (lu, lv), normal, r in faces:
        nu = max(1, round(lu / resolution))
        nv = max(1, round(lv / resolution))
        du, dv = lu / nu, lv / nv
        us = du / 2 + du * np.arange(nu)
        vs = dv / 2 + dv * np.arange(nv)
        gu, gv = np.meshgrid(us, vs, indexing="ij")
        pts = (np.asarray(origin, dtype=float)
               + gu.ravel()[:, None] * np.asarray(au, dtype=float)
               + gv.ravel()[:, None] * np.asarray(av, dtype=float))
        centers.append(pts)
        normals.append(np.tile(np.asarray(normal, dtype=float), (pts.shape[0], 1)))
        areas.append(np.full(pts.shape[0], du * dv))
        rho.append(np.full(pts.shape[0], r))

    return SurfaceMesh(
        centers=np.concatenate(centers),
        normals=np.concatenate(normals),
        areas=np.concatenate(areas),
        rho=np.concatenate(rho),
    )


# Surface elements absorb over the full hemisphere and re-emit as
# order-1 Lambertian sources.
ELEMENT_ORDER = 1.0
ELEMENT_FOV_DEG = 90.0


class RadiositySolver:
    """Infinite-reflection solver bound to one mesh.

    Builds the element-to-element transfer matrix and factorizes
    (I - E G_rho) once; gains for any transmitter/receiver poses then
    cost one triangular solve each.
    """

    def __init__(self, mesh):
        self.mesh = mesh
        e = los_gain_matrix(mesh.centers, mesh.normals, mesh.centers, mesh.normals,
                            ELEMENT_ORDER, mesh.areas, ELEMENT_FOV_DEG)
        np.fill_diagonal(e, 0.0)
        system = np.eye(mesh.n_elements) - e * mesh.rho[None, :]
        self._check_convergence(e * mesh.rho[None, :])
        self._lu = lu_factor(system)

    @staticmethod
    def _check_convergence(eg, n_iter=100, rng_seed=0):
        """Power iteration estimate of the spectral radius of E G_rho."""
        rng = np.random.default_rng(rng_seed)
        v = rng.uniform(0.5, 1.0, size=eg.shape[0])
        lam = 0.0
        for _ in range(n_iter):
            w = eg @ v
            norm = np.linalg.norm(w)
            if norm == 0.0:
                return
            lam = norm / np.linalg.norm(v)
            v = w / norm
        if lam >= 1.0:
            raise RadiosityError(
                f"reflection series diverges (spectral radius ~ {lam:.3f})")

    def solve(self, t):
        """x with (I - E G_rho) x = t; t may hold several columns."""
        return lu_solve(self._lu, t)

    def gains(self, t, r):
        """Diffuse gains for source-to-element t and element-to-detector r.

        Args:
            t: (n_elements, n_tx) LOS gains from each transmitter into
                the mesh (elements as detectors of their own area).
            r: (n_elements, n_rx) LOS gains from each element (as an
                order-1 emitter) to each receiver.

        Returns:
            (n_rx, n_tx) diffuse gain matrix.
        """
        x = self.solve(np.asarray(t, dtype=float))
        return (self.mesh.rho[:, None] * np.atleast_2d(r)).T @ x


def nlos_gain(tx_pos, tx_normal, tx_order, rx_pos, rx_normal, rx_area, rx_fov_deg,
              solver, blockers=()):
    """Diffuse gain matrix between transmitters and receivers.

    Blockage cuts the transmitter-to-element and element-to-receiver
    segments; shadowing between mesh elements is not modeled.
    """
    mesh = solver.mesh
    t = los_gain_matrix(tx_pos, tx_normal, mesh.centers, mesh.normals,
                        tx_order, mesh.areas, ELEMENT_FOV_DEG)
    r = los_gain_matrix(mesh.centers, mesh.normals, rx_pos, rx_normal,
                        ELEMENT_ORDER, rx_area, rx_fov_deg)
    if blockers:
        t = np.where(blockage_like(tx_pos, mesh.centers, blockers), 0.0, t)
        r = np.where(blockage_like(mesh.centers, rx_pos, blockers), 0.0, r)
    return solver.gains(t, r.T)


def blockage_like(tx_positions, rx_positions, blockers):
    """Occlusion mask with the same (rx, tx) layout as los_gain_matrix."""
    tx = np.atleast_2d(np.asarray(tx_positions, dtype=float))
    rx = np.atleast_2d(np.asarray(rx_positions, dtype=float))
    a = np.tile(tx, (rx.shape[0], 1))
    b = np.repeat(rx, tx.shape[0], axis=0)
    return segments_blocked(a, b, blockers).reshape(rx.shape[0], tx.shape[0])


@dataclass(frozen=True)
class ChannelMatrix:
    """DC gain matrix split into its LOS and diffuse parts."""

    h_los: np.ndarray
    h_nlos: np.ndarray

    @property
    def h(self):
        return self.h_los + self.h_nlos
