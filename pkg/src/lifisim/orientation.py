"""Random device orientation and orientation-aware mobility.

Static orientations are drawn per angle from measurement-fitted
distributions: Laplace for sitting users, Gaussian for walking users.
The yaw mean tracks the facing direction Omega as E[alpha] = Omega - 90
(degrees); pitch and roll have fixed means. Walking sessions evolve the
angles along a random-waypoint path as first-order autoregressive
processes sampled every coherence time.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter


@dataclass(frozen=True)
class OrientationStats:
    """Per-angle orientation statistics for one activity.

    The yaw mean is parameterized by the facing direction: the stored
    alpha_mean_offset is added to (Omega - 90). Standard deviations are
    in degrees and coherence_times (one per angle, seconds) govern the
    autoregressive stepping during mobility.
    """

    family: str                      # "laplace" or "gaussian"
    alpha_mean_offset: float
    beta_mean: float
    gamma_mean: float
    stds: tuple                      # (std_alpha, std_beta, std_gamma)
    coherence_times: tuple           # (Tc_alpha, Tc_beta, Tc_gamma)

    def __post_init__(self):
        if self.family not in ("laplace", "gaussian"):
            raise ValueError(f"unknown distribution family: {self.family!r}")
        if min(self.stds) <= 0 or min(self.coherence_times) <= 0:
            raise ValueError("stds and coherence times must be positive")

    def means(self, omega_deg):
        """Angle means (degrees) for a user facing direction omega_deg."""
        return (
            omega_deg - 90.0 + self.alpha_mean_offset,
            self.beta_mean,
            self.gamma_mean,
        )


# Measurement-fitted statistics for hand-held devices. Sitting angles
# follow a Laplace distribution, walking angles a Gaussian one.
SITTING_STATS = OrientationStats(
    family="laplace",
    alpha_mean_offset=0.0,
    beta_mean=40.78,
    gamma_mean=-0.84,
    stds=(3.67, 2.39, 2.21),
    coherence_times=(0.342, 0.377, 0.331),
)

WALKING_STATS = OrientationStats(
    family="gaussian",
    alpha_mean_offset=0.0,
    beta_mean=28.81,
    gamma_mean=-1.35,
    stds=(10.0, 3.26, 5.42),
    coherence_times=(0.131, 0.176, 0.142),
)

BUILTIN_STATS = {"sitting": SITTING_STATS, "walking": WALKING_STATS}


def sample_static_orientation(stats, omega_deg, rng):
    """Draw one (alpha, beta, gamma) triple in degrees.

    Laplace scale is std / sqrt(2) so the sample standard deviation
    matches the tabulated value.
    """
    means = stats.means(omega_deg)
    if stats.family == "laplace":
        scales = np.asarray(stats.stds) / np.sqrt(2.0)
        draws = rng.laplace(means, scales)
    else:
        draws = rng.normal(means, stats.stds)
    return tuple(float(v) for v in draws)


@dataclass(frozen=True)
class AR1Params:
    """Coefficients of x[k] = c0 + c1 x[k-1] + w[k], w ~ N(0, sigma_w^2)."""

    c0: float
    c1: float
    sigma_w: float

    def __post_init__(self):
        if not abs(self.c1) < 1.0:
            raise ValueError("|c1| must be < 1 for wide-sense stationarity")

    @property
    def mean(self):
        return self.c0 / (1.0 - self.c1)


def ar1_params(mean, std, t_coherence, t_sample):
    """AR(1) coefficients matching a stationary mean, std and decay.

    The lag-1 coefficient is chosen so the autocorrelation falls to
    0.05 after one coherence time: c1 = 0.05^(Ts/Tc). The bias and the
    innovation variance then reproduce the stationary moments exactly:
    c0 = (1 - c1) mean and sigma_w^2 = (1 - c1^2) std^2.
    """
    if t_sample <= 0 or t_coherence <= 0:
        raise ValueError("time constants must be positive")
    if std <= 0:
        raise ValueError("std must be positive")
    c1 = 0.05 ** (t_sample / t_coherence)
    c0 = (1.0 - c1) * mean
    sigma_w = np.sqrt(1.0 - c1 * c1) * std
    return AR1Params(c0=c0, c1=c1, sigma_w=sigma_w)


def ar1_step(prev, params, rng):
    """One recursion step of the AR(1) process."""
    return params.c0 + params.c1 * prev + rng.normal(0.0, params.sigma_w)


def ar1_sequence(n, params, rng, init=None):
    """Vectorized AR(1) sample path of length n.

    Equivalent to n repeated ar1_step calls starting from init (the
    stationary mean when omitted); implemented as an IIR filter over
    the innovation sequence for speed.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    x0 = params.mean if init is None else float(init)
    drive = params.c0 + rng.normal(0.0, params.sigma_w, size=n)
    # lfilter computes x[k] = drive[k] + c1 x[k-1]; zi carries x0 in.
    out, _ = lfilter([1.0], [1.0, -params.c1], drive, zi=np.array([params.c1 * x0]))
    return out


@dataclass(frozen=True)
class OrwpConfig:
    """Random-waypoint mobility settings over a rectangular footprint."""

    n_waypoints: int = 500
    speed: float = 1.0            # m/s
    width: float = 5.0            # footprint extent along x, m
    depth: float = 5.0            # footprint extent along y, m

    def __post_init__(self):
        if self.speed <= 0:
            raise ValueError("speed must be positive")
        if self.n_waypoints < 1:
            raise ValueError("need at least one waypoint")


@dataclass(frozen=True)
class TrajectorySample:
    """One mobility sample: previous and current position plus angles."""

    prev_position: tuple          # (x, y) m
    position: tuple               # (x, y) m
    speed: float                  # m/s
    angles_deg: tuple             # (alpha, beta, gamma)
    omega_deg: float              # leg direction, degrees from East


def orwp_generate(cfg, stats, rng):
    """Orientation-correlated random-waypoint trajectory.

    Waypoints are uniform over the footprint. Between consecutive
    waypoints the user moves on a straight line at constant speed,
    sampled every T_c = min of the three coherence times, so each
    inter-sample displacement has length v * T_c except the final
    partial step of a leg which lands exactly on the waypoint. Angles
    evolve as independent AR(1) processes, one per angle with its own
    coherence time entering c1; the yaw mean switches to the new leg
    direction from that leg's first sample. Processes start at their
    stationary means.

    Returns:
        list of TrajectorySample.
    """
    t_c = min(stats.coherence_times)
    step = cfg.speed * t_c
    hi = np.array([cfg.width, cfg.depth])

    pos = rng.uniform(0.0, 1.0, size=2) * hi
    angles = None
    samples = []
    for _ in range(cfg.n_waypoints):
        wp = rng.uniform(0.0, 1.0, size=2) * hi
        while np.allclose(wp, pos):
            wp = rng.uniform(0.0, 1.0, size=2) * hi
        delta = wp - pos
        omega = np.degrees(np.arctan2(delta[1], delta[0]))
        leg = float(np.hypot(*delta))
        direction = delta / leg

        means = stats.means(omega)
        params = tuple(
            ar1_params(means[i], stats.stds[i], stats.coherence_times[i], t_c)
            for i in range(3)
        )
        if angles is None:
            angles = [p.mean for p in params]

        n_full = int(np.floor(leg / step + 1e-12))
        remainder = leg - n_full * step
        for k in range(n_full):
            new_pos = pos + direction * step
            angles = [ar1_step(angles[i], params[i], rng) for i in range(3)]
            samples.append(TrajectorySample(
                prev_position=tuple(pos), position=tuple(new_pos),
                speed=cfg.speed, angles_deg=tuple(angles), omega_deg=float(omega),
            ))
            pos = new_pos
        if remainder > 1e-9:
            angles = [ar1_step(angles[i], params[i], rng) for i in range(3)]
            samples.append(TrajectorySample(
                prev_position=tuple(pos), position=tuple(wp),
                speed=cfg.speed, angles_deg=tuple(angles), omega_deg=float(omega),
            ))
        pos = wp
    return samples
