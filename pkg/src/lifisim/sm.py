"""Spatial modulation signal sets, detection and error-rate analysis.

One of N_a light sources is active per channel use and emits one of M
unipolar PAM levels I_m = 2 I m / (M + 1), m = 1..M, whose mean is the
average optical power I. The K = M N_a symbol vectors carry
log2(N_a) + log2(M) bits: the source index in natural binary followed
by the Gray-coded level index.

The transmit SNR convention ties the noise to the signal through the
mean optical power: gamma_tx = I^2 / sigma_n^2, which makes the
pairwise error probability of maximum-likelihood detection

    PEP = Q( sqrt( gamma_tx / (4 I^2) * ||H (s1 - s2)||^2 ) )

and the Hamming-weighted union bound over all ordered symbol pairs an
upper estimate of the bit error rate.
"""

from dataclasses import dataclass

import numpy as np

from .util import qfunc, wilson_interval


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


def gray_code(n):
    """Gray code of a nonnegative integer (or array)."""
    n = np.asarray(n)
    return n ^ (n >> 1)


def _bits(values, width):
    """(len(values), width) array of bits, most significant first."""
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8)


@dataclass(frozen=True)
class Constellation:
    """Symbol matrix and bit labels of one signal set.

    Attributes:
        S: (n_active, K) matrix whose columns are the symbol vectors.
        labels: (K, bits_per_symbol) bit labels.
        M: PAM order.
        n_active: number of usable light sources.
        mean_power: average emitted optical power I.
    """

    S: np.ndarray
    labels: np.ndarray
    M: int
    n_active: int
    mean_power: float

    @property
    def K(self):
        return self.S.shape[1]

    @property
    def bits_per_symbol(self):
        return self.labels.shape[1]


def pam_levels(M, mean_power):
    """Unipolar PAM levels 2 I m / (M + 1); their mean equals I."""
    m = np.arange(1, M + 1)
    return 2.0 * mean_power * m / (M + 1)


def build_constellation(M, n_active, mean_power=1.0):
    """Spatial-modulation signal set for n_active sources and M-PAM.

    Column k = (m - 1) n_active + a activates source a (0-based) at
    level I_m. Spatial bits are the natural binary source index; level
    bits are Gray coded so adjacent amplitudes differ in one bit.
    """
    if not _is_pow2(M) or M < 2:
        raise ValueError("M must be a power of two >= 2")
    if not _is_pow2(n_active):
        raise ValueError("n_active must be a power of two")
    if mean_power <= 0:
        raise ValueError("mean_power must be positive")

    levels = pam_levels(M, mean_power)
    K = M * n_active
    S = np.zeros((n_active, K))
    led = np.tile(np.arange(n_active), M)
    lvl = np.repeat(np.arange(M), n_active)
    S[led, np.arange(K)] = levels[lvl]

    spatial_bits = int(np.log2(n_active))
    level_bits = int(np.log2(M))
    parts = []
    if spatial_bits:
        parts.append(_bits(led, spatial_bits))
    parts.append(_bits(gray_code(lvl), level_bits))
    labels = np.concatenate(parts, axis=1)
    return Constellation(S=S, labels=labels, M=M, n_active=n_active,
                         mean_power=mean_power)


def build_mimo_constellation(M, n_streams, mean_power=1.0, max_symbols=4096):
    """Joint signal set of n_streams parallel M-PAM streams.

    Every stream is always on, carrying Gray-coded M-PAM. The levels
    are scaled so the total mean optical power summed over the streams
    equals I, the same illumination constraint the one-active-source
    sets satisfy; the joint alphabet has M**n_streams vectors and
    labels are the streams' labels concatenated.
    """
    if not _is_pow2(M) or M < 2:
        raise ValueError("M must be a power of two >= 2")
    if n_streams < 1:
        raise ValueError("n_streams must be >= 1")
    K = M ** n_streams
    if K > max_symbols:
        raise ValueError(f"joint symbol set too large ({K} > {max_symbols})")

    levels = pam_levels(M, mean_power / n_streams)
    level_bits = int(np.log2(M))
    grids = np.meshgrid(*[np.arange(M)] * n_streams, indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=0)    # (n_streams, K)
    S = levels[idx]
    labels = np.concatenate(
        [_bits(gray_code(idx[j]), level_bits) for j in range(n_streams)], axis=1)
    return Constellation(S=S, labels=labels, M=M, n_active=n_streams,
                         mean_power=mean_power)


def hamming_matrix(labels):
    """(K, K) pairwise Hamming distances between bit labels."""
    l = np.asarray(labels, dtype=np.int16)
    return np.abs(l[:, None, :] - l[None, :, :]).sum(axis=2)


def pairwise_sq_distances(points):
    """(K, K) squared Euclidean distances between the columns of points."""
    g = points.T @ points
    sq = np.diag(g)
    d2 = sq[:, None] + sq[None, :] - 2.0 * g
    return np.maximum(d2, 0.0)


def ml_detect(y, H, constellation):
    """Index of the maximum-likelihood symbol, ties to the lowest index."""
    x = H @ constellation.S
    d2 = np.sum((x - np.asarray(y, dtype=float)[:, None]) ** 2, axis=0)
    return int(np.argmin(d2))


def pep(s1, s2, H, gamma_tx, mean_power):
    """Pairwise error probability of mistaking symbol s1 for s2."""
    if gamma_tx <= 0:
        raise ValueError("gamma_tx must be positive")
    diff = H @ (np.asarray(s1, dtype=float) - np.asarray(s2, dtype=float))
    arg = np.sqrt(gamma_tx / (4.0 * mean_power ** 2) * np.dot(diff, diff))
    return float(qfunc(arg))


def union_bound_ber(constellation, H, gamma_tx):
    """Union-bound estimate of the ML bit error rate.

    (1 / (K log2 K)) * sum over all ordered pairs of
    d_H(b1, b2) Q(sqrt(gamma_tx / (4 I^2) ||H (s1 - s2)||^2)). Monotone
    decreasing in gamma_tx; may exceed 1 at low SNR.
    """
    d2, d_ham = _bound_tables(constellation, H)
    return _bound_from_tables(d2, d_ham, constellation, gamma_tx)


def _bound_tables(constellation, H):
    """Pairwise tables reused across SNR points of one channel."""
    x = H @ constellation.S
    return pairwise_sq_distances(x), hamming_matrix(constellation.labels)


def _bound_from_tables(d2, d_ham, constellation, gamma_tx):
    if gamma_tx <= 0:
        raise ValueError("gamma_tx must be positive")
    K = constellation.K
    args = np.sqrt(gamma_tx / (4.0 * constellation.mean_power ** 2) * d2)
    return float(np.sum(d_ham * qfunc(args)) / (K * constellation.bits_per_symbol))


def mimo_union_bound_ber(M, n_streams, H_sub, gamma_tx, mean_power=1.0):
    """Union-bound BER of full spatial multiplexing on H_sub.

    All n_streams columns transmit independent M-PAM; the bound runs
    over the M**n_streams joint symbol vectors with the same Q-function
    argument as the SM bound. n_streams = 1 reduces to the SM bound
    with a single source.
    """
    c = build_mimo_constellation(M, n_streams, mean_power)
    return union_bound_ber(c, H_sub, gamma_tx)


def received_snr(H, n_active, gamma_tx):
    """Received SNR aggregated over all detectors.

    gamma_rx = gamma_tx / N_a^2 * sum_i (sum_j h_ij)^2 for the active
    columns of H.
    """
    H = np.atleast_2d(H)
    if H.shape[1] != n_active:
        raise ValueError("H must hold exactly the active columns")
    row_sums = H.sum(axis=1)
    return gamma_tx / n_active ** 2 * float(np.dot(row_sums, row_sums))


def monte_carlo_ber(constellation, H, gamma_tx, n_symbols, rng,
                    chunk=100_000):
    """Simulated ML bit error rate with a Wilson confidence interval.

    Symbols are drawn uniformly; the noise standard deviation is
    calibrated to the transmit SNR as sigma = I / sqrt(gamma_tx). The
    interval treats bit errors as independent Bernoulli trials.

    Returns:
        (ber, (ci_low, ci_high))
    """
    if n_symbols < 1:
        raise ValueError("n_symbols must be >= 1")
    if gamma_tx <= 0:
        raise ValueError("gamma_tx must be positive")
    x = H @ constellation.S                       # (n_r, K)
    sigma = constellation.mean_power / np.sqrt(gamma_tx)
    half_sq = 0.5 * np.sum(x * x, axis=0)         # (K,)
    labels = constellation.labels

    n_bit_errors = 0
    remaining = n_symbols
    while remaining > 0:
        n = min(chunk, remaining)
        remaining -= n
        ks = rng.integers(0, constellation.K, size=n)
        y = x[:, ks] + sigma * rng.standard_normal((x.shape[0], n))
        scores = x.T @ y - half_sq[:, None]       # (K, n)
        khat = np.argmax(scores, axis=0)
        n_bit_errors += int(np.count_nonzero(labels[ks] != labels[khat]))

    n_bits = n_symbols * constellation.bits_per_symbol
    ber = n_bit_errors / n_bits
    return ber, wilson_interval(n_bit_errors, n_bits)
