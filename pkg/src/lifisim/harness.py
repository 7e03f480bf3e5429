"""Seeded experiment orchestration and file emission.

Four experiment kinds cover the evaluation campaign:

* cdf map: lattice of positions x facing directions x orientation
  draws (sitting), required-SNR CDF of the configured downlink scheme;
* orwp run: mobility trajectory (walking) evaluated the same way;
* ber sweep: one location, bound and Monte Carlo BER against received
  SNR, with fixed or random orientation;
* uplink eval: transmit-SNR sweep with source selection, rate bounds
  and energy efficiency averaged over realizations.

Determinism contract: realization i draws all its randomness from
SeedSequence([seed, 1, i]); Monte Carlo noise for realization i at
sweep point g from SeedSequence([seed, 2, i, g]); the sequential
trajectory stream is SeedSequence([seed, 0]). Results are therefore
bit-identical for any worker count: workers only partition the
realization list, and the merge preserves order.
"""

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adaptive import (asm_select_downlink, led_selection_uplink,
                       mimo_required_snr, required_snr, strongest_columns)
from .blockage import blockage_mask, place_blockers
from .channel import (ChannelMatrix, RadiositySolver, build_environment_mesh,
                      los_gain_matrix, nlos_gain)
from .config import ConfigError, Scenario, scenario_hash
from .geometry import DevicePose, element_world_pose
from .orientation import orwp_generate, sample_static_orientation
from .rates import (energy_efficiency, mi_monte_carlo, rate_bounds)
from .sm import (build_constellation, build_mimo_constellation,
                 monte_carlo_ber, received_snr, union_bound_ber)
from .util import db_to_linear, linear_to_db, wilson_interval

CDF_COLUMNS = ["realization", "x", "y", "omega_deg", "alpha_deg", "beta_deg",
               "gamma_deg", "n_blockers", "n_active", "pam_order",
               "gamma_rx_db", "feasible"]
BER_COLUMNS = ["snr_db", "ber_bound", "ber_mc", "ci_low", "ci_high",
               "scheme", "N_a", "M"]
EE_COLUMNS = ["scheme", "config", "eta_rse", "eta_ee", "L1", "L2",
              "mi_mc", "stderr"]


@dataclass
class RunResult:
    """Tabular outcome of one experiment, ready for CSV emission."""

    kind: str
    columns: list
    rows: list
    scenario: Scenario
    meta: dict = field(default_factory=dict)

    def column(self, name):
        """One column as a float array (nan for non-numeric cells)."""
        out = []
        for row in self.rows:
            try:
                out.append(float(row[name]))
            except (TypeError, ValueError):
                out.append(np.nan)
        return np.asarray(out)


def grid_positions(width, depth, step, margin=0.25):
    """Evaluation lattice: points `step` apart, `margin` off the walls."""
    xs = np.arange(margin, width - margin + 1e-9, step)
    ys = np.arange(margin, depth - margin + 1e-9, step)
    return [(float(x), float(y)) for y in ys for x in xs]


def facing_directions(n):
    """n equally spaced facing directions starting East, degrees."""
    return [360.0 * i / n for i in range(n)]


def empirical_cdf(values):
    """Right-continuous empirical CDF (x sorted, P(X <= x))."""
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        raise ValueError("need at least one value")
    return x, np.arange(1, x.size + 1) / x.size


class ChannelBuilder:
    """Per-scenario channel factory shared across realizations.

    The environment mesh and its reflection-system factorization are
    built once here; each pose then costs two LOS matrices and one
    pair of triangular solves. Uplink channels keep only the LOS part.
    """

    def __init__(self, scenario):
        self.sc = scenario
        self.room = scenario.room()
        self.aps = scenario.aps()
        self.layout = scenario.layout()
        self.source = scenario.source()
        self.stats = scenario.stats()
        self.block_cfg = scenario.blockage()
        self.h_r = scenario.ue_height_m()
        self.solver = None
        if scenario.direction == "downlink" and scenario.include_nlos:
            mesh = build_environment_mesh(self.room,
                                          scenario.mesh_resolution)
            self.solver = RadiositySolver(mesh)

    def pose(self, x, y, omega_deg, angles_deg):
        return DevicePose(position=(x, y, self.h_r), omega_deg=omega_deg,
                          angles_deg=tuple(angles_deg))

    def channel(self, pose, blockers):
        elem_pos, elem_nrm = element_world_pose(pose, self.layout)
        sc = self.sc
        if sc.direction == "downlink":
            tx_pos, tx_nrm = self.aps.positions, self.aps.normals
            rx_pos, rx_nrm = elem_pos, elem_nrm
        else:
            tx_pos, tx_nrm = elem_pos, elem_nrm
            rx_pos, rx_nrm = self.aps.positions, self.aps.normals
        h_los = los_gain_matrix(tx_pos, tx_nrm, rx_pos, rx_nrm,
                                self.source.order, sc.pd_area, sc.fov_deg)
        if blockers:
            h_los = np.where(blockage_mask(tx_pos, rx_pos, blockers),
                             0.0, h_los)
        if self.solver is not None:
            h_nlos = nlos_gain(tx_pos, tx_nrm, self.source.order,
                               rx_pos, rx_nrm, sc.pd_area, sc.fov_deg,
                               self.solver, blockers)
        else:
            h_nlos = np.zeros_like(h_los)
        return ChannelMatrix(h_los=h_los, h_nlos=h_nlos)

    def realize(self, idx, x, y, omega_deg, angles_deg=None):
        """Orientation, blockers and channel for realization idx."""
        rng = np.random.default_rng(
            np.random.SeedSequence([self.sc.seed, 1, idx]))
        if angles_deg is None:
            angles_deg = sample_static_orientation(self.stats, omega_deg, rng)
        pose = self.pose(x, y, omega_deg, angles_deg)
        blockers = place_blockers(self.block_cfg, self.room, pose, rng)
        H = self.channel(pose, blockers).h
        return pose, blockers, H


# -- downlink per-realization evaluation ---------------------------------

def _downlink_operating_point(sc, H):
    """(feasible, n_active, M, gamma_rx_db) of the configured scheme."""
    R = int(sc.spectral_efficiency)
    if sc.scheme == "asm":
        d = asm_select_downlink(H, sc.target_ber, R)
        return d.feasible, d.n_active, d.M, d.gamma_rx_db
    if sc.scheme == "sm":
        n_a = sc.n_active
        M = 2 ** (R - int(np.log2(n_a)))
        idx = strongest_columns(H, n_a)
        res = required_snr(build_constellation(M, n_a), H[:, idx],
                           sc.target_ber)
        return res.feasible, n_a, M, res.gamma_rx_db
    res, _ = mimo_required_snr(H, sc.target_ber, R, n_streams=sc.n_active)
    return res.feasible, sc.n_active, 2 ** (R // sc.n_active), res.gamma_rx_db


def _downlink_record(builder, task):
    idx, x, y, omega, angles = task
    pose, blockers, H = builder.realize(idx, x, y, omega, angles)
    feasible, n_a, M, grx_db = _downlink_operating_point(builder.sc, H)
    a, b, g = pose.angles_deg
    return {
        "realization": idx, "x": x, "y": y, "omega_deg": omega,
        "alpha_deg": a, "beta_deg": b, "gamma_deg": g,
        "n_blockers": len(blockers), "n_active": n_a, "pam_order": M,
        "gamma_rx_db": grx_db if feasible else np.inf,
        "feasible": int(feasible),
    }


def _channel_record(builder, task):
    idx, x, y, omega, angles = task
    _, _, H = builder.realize(idx, x, y, omega, angles)
    return H


# -- uplink per-realization evaluation -----------------------------------

def _uplink_record(builder, task):
    """Selection, bound BER, rate bounds and EE across the SNR grid.

    Transmit power is normalized to I = 1, so gamma_tx = 1/sigma^2 and
    the absolute symbol energy enters only the efficiency denominator.
    """
    idx, x, y, omega, angles = task
    sc = builder.sc
    _, _, H = builder.realize(idx, x, y, omega, angles)
    M = sc.uplink_pam_order()
    n_tx = H.shape[1]
    grid = sc.uplink_snr_grid_db()
    n_g = grid.size

    out = {
        "outage": np.ones(n_g, dtype=bool),
        "n_active": np.zeros(n_g),
        "gamma_rx_db": np.full(n_g, np.nan),
        "ber": np.full(n_g, np.nan),
        "rate": np.full(n_g, np.nan),
        "ee": np.full(n_g, np.nan),
        "l1": np.full(n_g, np.nan),
        "l2": np.full(n_g, np.nan),
        "mi": np.full(n_g, np.nan),
        "mi_se": np.full(n_g, np.nan),
    }
    for g, gtx_db in enumerate(grid):
        gtx = db_to_linear(gtx_db)
        if sc.scheme == "asm":
            sel = led_selection_uplink(H, M, gtx, sc.target_ber)
            if sel.failed:
                continue
            active = list(sel.active_set)
        else:
            active = list(range(n_tx))
        H_sub = H[:, active]
        n_a = len(active)
        c = build_constellation(M, n_a)
        grx = received_snr(H_sub, n_a, gtx)
        if grx <= 0:
            continue
        sigma2 = 1.0 / gtx
        bounds = rate_bounds(c, H_sub, sigma2)
        e_s = sc.noise_power * gtx
        out["outage"][g] = False
        out["n_active"][g] = n_a
        out["gamma_rx_db"][g] = linear_to_db(grx)
        out["ber"][g] = union_bound_ber(c, H_sub, gtx)
        out["rate"][g] = bounds.rate
        out["ee"][g] = energy_efficiency(bounds.rate, e_s, sc.symbol_rate)
        out["l1"][g] = bounds.l1
        out["l2"][g] = bounds.l2
        if sc.mi_samples > 0:
            rng = np.random.default_rng(
                np.random.SeedSequence([sc.seed, 2, idx, g]))
            mi, se = mi_monte_carlo(c, H_sub, sigma2, sc.mi_samples, rng)
            out["mi"][g] = mi
            out["mi_se"][g] = se
    return out


# -- parallel dispatch ----------------------------------------------------

_BUILDER = None


def _worker_init(scenario):
    global _BUILDER
    _BUILDER = ChannelBuilder(scenario)


def _worker_chunk(payload):
    fn, tasks = payload
    return [fn(_BUILDER, t) for t in tasks]


def _run_tasks(scenario, fn, tasks, workers):
    """Map fn over tasks, preserving order; workers > 1 forks a pool."""
    if workers <= 1 or len(tasks) < 2:
        builder = ChannelBuilder(scenario)
        return [fn(builder, t) for t in tasks]
    n_chunks = min(len(tasks), workers * 4)
    chunks = [list(c) for c in np.array_split(np.arange(len(tasks)), n_chunks)]
    payloads = [(fn, [tasks[i] for i in c]) for c in chunks if c]
    results = []
    with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init,
                             initargs=(scenario,)) as pool:
        for part in pool.map(_worker_chunk, payloads):
            results.extend(part)
    return results


# -- experiment runners ---------------------------------------------------

def _static_tasks(sc):
    positions = grid_positions(sc.room_width, sc.room_depth, sc.grid_step)
    directions = facing_directions(sc.n_directions)
    tasks = []
    idx = 0
    for (x, y) in positions:
        for omega in directions:
            for _ in range(sc.orientations_per_point):
                tasks.append((idx, x, y, omega, None))
                idx += 1
    return tasks


def run_cdf_map(scenario, workers=1):
    """Required-SNR survey over the sitting lattice (downlink)."""
    if scenario.direction != "downlink":
        raise ConfigError("cdf-map evaluates the downlink")
    if scenario.activity != "sitting":
        raise ConfigError("cdf-map uses the sitting statistics")
    tasks = _static_tasks(scenario)
    rows = _run_tasks(scenario, _downlink_record, tasks, workers)
    outage = float(np.mean([r["feasible"] == 0 for r in rows]))
    return RunResult(kind="cdf", columns=CDF_COLUMNS, rows=rows,
                     scenario=scenario, meta={"outage_fraction": outage})


def run_orwp_eval(scenario, workers=1):
    """Required-SNR survey along a mobility trajectory (downlink)."""
    if scenario.direction != "downlink":
        raise ConfigError("orwp-run evaluates the downlink")
    if scenario.activity != "walking":
        raise ConfigError("orwp-run uses the walking statistics")
    rng = np.random.default_rng(np.random.SeedSequence([scenario.seed, 0]))
    samples = orwp_generate(scenario.orwp(), scenario.stats(), rng)
    tasks = [(i, s.position[0], s.position[1], s.omega_deg, s.angles_deg)
             for i, s in enumerate(samples)]
    rows = _run_tasks(scenario, _downlink_record, tasks, workers)
    outage = float(np.mean([r["feasible"] == 0 for r in rows]))
    return RunResult(kind="orwp", columns=CDF_COLUMNS, rows=rows,
                     scenario=scenario, meta={"outage_fraction": outage})


def run_ber_sweep(scenario, workers=1):
    """Bound and Monte Carlo BER against received SNR at one spot.

    The sweep grid is the target received SNR; every orientation draw
    is driven to that operating point through its own transmit SNR.
    Draws whose channel cannot carry any power (all entries blocked or
    out of view) count as coin-flip bit errors, which is what creates
    the high-SNR floors of LOS-only configurations.
    """
    sc = scenario
    if sc.direction != "downlink":
        raise ConfigError("ber-sweep evaluates the downlink")
    x, y = sc.location_xy()
    omega = sc.omega()
    stats = sc.stats()
    fixed = sc.orientation == "fixed"
    n_draws = 1 if fixed else sc.orientations_per_point
    tasks = []
    for i in range(n_draws):
        angles = stats.means(omega) if fixed else None
        tasks.append((i, x, y, omega, angles))
    channels = _run_tasks(sc, _channel_record, tasks, workers)

    R = int(sc.spectral_efficiency)
    if sc.scheme == "mimo":
        n_cols = sc.n_active
        M = 2 ** (R // n_cols)
        constellation = build_mimo_constellation(M, n_cols)
    else:
        n_cols = sc.n_active
        M = 2 ** (R - int(np.log2(n_cols)))
        constellation = build_constellation(M, n_cols)
    bits_ps = constellation.bits_per_symbol
    mc_per_draw = sc.mc_symbols if fixed else max(
        1000, sc.mc_symbols // n_draws)

    subsets = []
    factors = []
    for H in channels:
        H_sub = H[:, strongest_columns(H, n_cols)]
        subsets.append(H_sub)
        factors.append(received_snr(H_sub, n_cols, 1.0))

    rows = []
    for g, grx_db in enumerate(sc.snr_grid_db()):
        grx = db_to_linear(grx_db)
        bounds = []
        err_bits = 0.0
        total_bits = 0
        for i, H_sub in enumerate(subsets):
            if factors[i] <= 0.0:
                bounds.append(0.5)
                if sc.mc_symbols > 0:
                    err_bits += 0.5 * mc_per_draw * bits_ps
                    total_bits += mc_per_draw * bits_ps
                continue
            gtx = grx / factors[i]
            bounds.append(union_bound_ber(constellation, H_sub, gtx))
            if sc.mc_symbols > 0:
                rng = np.random.default_rng(
                    np.random.SeedSequence([sc.seed, 2, i, g]))
                ber, _ = monte_carlo_ber(constellation, H_sub, gtx,
                                         mc_per_draw, rng)
                err_bits += ber * mc_per_draw * bits_ps
                total_bits += mc_per_draw * bits_ps
        if total_bits:
            ber_mc = err_bits / total_bits
            ci_low, ci_high = wilson_interval(err_bits, total_bits)
        else:
            ber_mc, ci_low, ci_high = np.nan, np.nan, np.nan
        rows.append({
            "snr_db": float(grx_db), "ber_bound": float(np.mean(bounds)),
            "ber_mc": ber_mc, "ci_low": ci_low, "ci_high": ci_high,
            "scheme": sc.scheme, "N_a": n_cols, "M": M,
        })
    return RunResult(kind="ber", columns=BER_COLUMNS, rows=rows, scenario=sc)


def run_uplink_eval(scenario, workers=1):
    """Transmit-SNR sweep of the uplink: BER curve plus EE curve.

    Returns (ber_result, ee_result). Realizations follow the activity:
    a sitting lattice like the CDF map, or mobility samples when
    walking. Averages skip selection-failure realizations; their
    fraction is reported per sweep point in the meta/outage list.
    """
    sc = scenario
    if sc.direction != "uplink":
        raise ConfigError("uplink-ee evaluates the uplink")
    if sc.scheme not in ("sm", "asm"):
        raise ConfigError("uplink supports the sm and asm schemes")
    if sc.activity == "sitting":
        tasks = _static_tasks(sc)
    else:
        rng = np.random.default_rng(np.random.SeedSequence([sc.seed, 0]))
        samples = orwp_generate(sc.orwp(), sc.stats(), rng)
        tasks = [(i, s.position[0], s.position[1], s.omega_deg, s.angles_deg)
                 for i, s in enumerate(samples)]
    per_real = _run_tasks(sc, _uplink_record, tasks, workers)

    grid = sc.uplink_snr_grid_db()
    M = sc.uplink_pam_order()
    stack = {k: np.stack([r[k] for r in per_real]) for k in per_real[0]}
    ber_rows, ee_rows, outage_list = [], [], []
    for g, gtx_db in enumerate(grid):
        ok = ~stack["outage"][:, g]
        outage = 1.0 - float(np.mean(ok))
        outage_list.append(outage)
        if not np.any(ok):
            ber_rows.append({"snr_db": np.nan, "ber_bound": np.nan,
                             "ber_mc": np.nan, "ci_low": np.nan,
                             "ci_high": np.nan, "scheme": sc.scheme,
                             "N_a": np.nan, "M": M})
            ee_rows.append({"scheme": sc.scheme,
                            "config": f"gamma_tx_db={gtx_db:g}",
                            "eta_rse": np.nan, "eta_ee": np.nan,
                            "L1": np.nan, "L2": np.nan,
                            "mi_mc": np.nan, "stderr": np.nan})
            continue

        def avg(key):
            return float(np.mean(stack[key][ok, g]))

        ber_rows.append({
            "snr_db": avg("gamma_rx_db"), "ber_bound": avg("ber"),
            "ber_mc": np.nan, "ci_low": np.nan, "ci_high": np.nan,
            "scheme": sc.scheme, "N_a": avg("n_active"), "M": M,
        })
        if sc.mi_samples > 0:
            mi = avg("mi")
            se = float(np.sqrt(np.mean(stack["mi_se"][ok, g] ** 2)
                               / np.sum(ok)))
        else:
            mi, se = np.nan, np.nan
        ee_rows.append({
            "scheme": sc.scheme, "config": f"gamma_tx_db={gtx_db:g}",
            "eta_rse": avg("rate"), "eta_ee": avg("ee"),
            "L1": avg("l1"), "L2": avg("l2"), "mi_mc": mi, "stderr": se,
        })
    meta = {"outage": outage_list}
    ber = RunResult(kind="uplink_ber", columns=BER_COLUMNS, rows=ber_rows,
                    scenario=sc, meta=meta)
    ee = RunResult(kind="uplink_ee", columns=EE_COLUMNS, rows=ee_rows,
                   scenario=sc, meta=meta)
    return ber, ee


# -- emission --------------------------------------------------------------

def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".10g")
    return value


def write_csv(path, result):
    """CSV with reproducibility header comments, then the table."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# scenario_hash: {scenario_hash(result.scenario)}\n")
        fh.write(f"# seed: {result.scenario.seed}\n")
        for key, value in sorted(result.meta.items()):
            fh.write(f"# {key}: {value}\n")
        writer = csv.writer(fh)
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_fmt(row[c]) for c in result.columns])
    return path


def read_csv(path):
    """Inverse of write_csv: (header dict, columns, rows with floats)."""
    meta = {}
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = value
        elif line:
            body.append(line)
    rows = list(csv.reader(body))
    columns, data = rows[0], rows[1:]
    parsed = []
    for raw in data:
        row = {}
        for name, cell in zip(columns, raw):
            try:
                row[name] = float(cell)
            except ValueError:
                row[name] = cell
        parsed.append(row)
    return meta, columns, parsed


def _plot(result, path):
    """Optional SVG rendering; returns the path or None without mpl."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return None
    fig, ax = plt.subplots(figsize=(5, 4))
    if result.kind in ("ber", "uplink_ber"):
        x = result.column("snr_db")
        ax.semilogy(x, np.minimum(result.column("ber_bound"), 1.0),
                    label="union bound")
        mc = result.column("ber_mc")
        if np.isfinite(mc).any():
            ax.semilogy(x, mc, "o", label="Monte Carlo")
        ax.set_xlabel("received SNR (dB)")
        ax.set_ylabel("BER")
    elif result.kind in ("cdf", "orwp"):
        vals = result.column("gamma_rx_db")
        finite = vals[np.isfinite(vals)]
        if finite.size:
            x, p = empirical_cdf(finite)
            ax.plot(x, p)
        ax.set_xlabel("required received SNR (dB)")
        ax.set_ylabel("CDF")
    else:
        ax.plot(result.column("eta_rse"), result.column("eta_ee"), "s-")
        ax.set_yscale("log")
        ax.set_xlabel("achievable rate (bits/channel use)")
        ax.set_ylabel("energy efficiency (bits/J)")
    ax.grid(True, which="both", alpha=0.4)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def emit(result, out_dir, basename, plots=False):
    """Write the result CSV (and optional SVG); returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = [write_csv(os.path.join(out_dir, basename + ".csv"), result)]
    if plots:
        svg = _plot(result, os.path.join(out_dir, basename + ".svg"))
        if svg:
            written.append(svg)
    return written
