"""Monte-Carlo ground truth for the finite-disk downlink.

Each trial drops N APs uniformly in the disk, draws Rayleigh fading and
lognormal shadowing for every link, associates the user with the nearest
AP and records the exact SINR.

Reproducibility: trials are processed in fixed blocks of ``BLOCK`` trials.
Block ``b`` draws from a Philox (counter-based) generator keyed by
``(seed, b, stream)``, one stream per kind of variate. Results therefore
depend only on the seed and the trial count, never on how many worker
threads evaluate the blocks.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import os

import numpy as np

from .coverage import CoverageQuery
from .errors import DomainError
from .geometry import EvalPoint

__all__ = [
    "SimConfig",
    "ChannelDraw",
    "SimEstimate",
    "substream",
    "sample_ap_positions",
    "draw_channels",
    "realize_sinr",
    "simulate_links",
    "simulate_sinr",
    "estimate_coverage",
    "estimate_ergodic",
    "sample_interferer_distances",
    "conditional_interference_samples",
    "estimate_interference_moments",
    "conditional_sir_samples",
]

BLOCK = 4096
_STREAM_POSITIONS, _STREAM_FADING, _STREAM_SHADOW = 0, 1, 2
_STREAM_CONDITIONAL = 3


@dataclass(frozen=True)
class SimConfig:
    trials: int = 100_000
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class ChannelDraw:
    """Per-AP channel variates: unit-mean exponential fading power and shadowing in dB."""

    rayleigh_power: np.ndarray
    shadow_db: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.rayleigh_power) < 0):
            raise DomainError("rayleigh_power must be non-negative")


@dataclass(frozen=True)
class SimEstimate:
    value: float
    std_error: float
    trials: int


def substream(seed, block, stream):
    """Philox generator for one (seed, block, stream) key."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(block), int(stream)))
    return np.random.Generator(np.random.Philox(ss))


def _workers():
    try:
        return max(1, int(os.environ.get("FINITENET_THREADS", "1")))
    except ValueError:
        return 1


def sample_ap_positions(n_aps, disk, rng, size=None):
    """Uniform points in the disk via ``r = R sqrt(u)``, ``theta = 2 pi v``.

    Returns shape ``(n_aps, 2)``, or ``(size, n_aps, 2)`` when ``size`` is given.
    """
    if n_aps < 1:
        raise DomainError("n_aps must be at least 1")
    shape = (n_aps,) if size is None else (size, n_aps)
    r = disk.radius_km * np.sqrt(rng.random(shape))
    theta = 2.0 * math.pi * rng.random(shape)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


def draw_channels(shape, shadow_std_db, rng_fading, rng_shadow, antithetic=False):
    """Fading powers and shadowing (dB) for an array of links."""
    fading = rng_fading.exponential(1.0, size=shape)
    if antithetic and shape[0] > 1:
        half = (shape[0] + 1) // 2
        first = rng_shadow.normal(0.0, 1.0, size=(half,) + tuple(shape[1:]))
        shadow = np.concatenate([first, -first])[: shape[0]]
    else:
        shadow = rng_shadow.normal(0.0, 1.0, size=shape)
    return ChannelDraw(fading, shadow_std_db * shadow)


def _received(dist, draws, model):
    """Received powers ``P |h|^2 r^-alpha z`` in the km path-loss frame."""
    z = 10.0 ** (-np.asarray(draws.shadow_db) / 10.0)
    with np.errstate(divide="ignore"):
        return model.tx_power_mw * np.asarray(draws.rayleigh_power) * dist ** -model.alpha * z


def _sinr_from_received(dist, rx, model):
    """SINR per row given distances and received powers of shape (B, N)."""
    serving = np.argmin(dist, axis=-1)
    rows = np.arange(dist.shape[0])
    if np.any(dist[rows, serving] == 0.0):
        raise DomainError("an AP coincides with the user; resample")
    signal = rx[rows, serving]
    # sum the other links directly; total minus signal cancels when the serving AP is very close
    others = np.arange(dist.shape[-1]) != serving[:, None]
    interference = np.where(others, rx, 0.0).sum(axis=-1)
    noise = model.noise_mw_effective
    denom = noise + interference
    with np.errstate(divide="ignore"):
        return np.where(denom > 0, signal / np.where(denom > 0, denom, 1.0), np.inf)


def _distances(positions, point):
    return np.hypot(positions[..., 0] - point.d_km, positions[..., 1])


def realize_sinr(point, positions, draws, model):
    """Exact SINR of one realization (positions ``(N, 2)``, per-AP draws).

    The serving AP is the nearest one, ties to the lowest index. A single AP
    without noise returns ``inf``.
    """
    positions = np.asarray(positions, dtype=float)
    dist = _distances(positions, point)[None, :]
    draws2 = ChannelDraw(np.asarray(draws.rayleigh_power)[None, :],
                         np.asarray(draws.shadow_db)[None, :])
    return float(_sinr_from_received(dist, _received(dist, draws2, model), model)[0])


def _block_sizes(trials):
    full, rest = divmod(trials, BLOCK)
    return [BLOCK] * full + ([rest] if rest else [])


def _simulate_block(b, size, point, model, sim):
    pos = sample_ap_positions(model.n_aps, model.disk, substream(sim.seed, b, _STREAM_POSITIONS),
                              size=size)
    dist = _distances(pos, point)
    draws = draw_channels(dist.shape, model.shadow_std_db,
                          substream(sim.seed, b, _STREAM_FADING),
                          substream(sim.seed, b, _STREAM_SHADOW), sim.antithetic)
    return dist, _received(dist, draws, model)


def simulate_links(point, model, sim, reducer):
    """Run all blocks and apply ``reducer(dist, rx)`` to each; results in block order."""
    point = point if isinstance(point, EvalPoint) else EvalPoint(float(point))
    if point.d_km > model.disk.radius_km:
        raise DomainError("evaluation point outside the disk")
    sizes = _block_sizes(sim.trials)

    def run(args):
        b, size = args
        return reducer(*_simulate_block(b, size, point, model, sim))

    workers = _workers()
    if workers == 1:
        return [run(a) for a in enumerate(sizes)]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(run, enumerate(sizes)))


def _check_sim_model(model):
    if model.n_aps < 2 and model.interference_limited:
        raise DomainError("a single AP without noise has unbounded SINR; add noise or APs")


def simulate_sinr(point, model, sim):
    """SINR of every trial, in trial order."""
    _check_sim_model(model)
    parts = simulate_links(point, model, sim, lambda d, rx: _sinr_from_received(d, rx, model))
    return np.concatenate(parts)


def _proportion(hits, n):
    p = hits / n
    return SimEstimate(float(p), float(math.sqrt(max(p * (1.0 - p), 0.0) / n)), int(n))


def estimate_coverage(query, point, model, sim, sinr=None):
    """Fraction of trials with SINR above the threshold, with binomial standard error.

    ``query`` is a CoverageQuery or a linear threshold. Pre-computed
    ``sinr`` samples may be passed to reuse one simulation for many thresholds.
    """
    T = query.sinr_threshold(model.n_aps) if isinstance(query, CoverageQuery) else float(query)
    if sinr is None:
        sinr = simulate_sinr(point, model, sim)
    return _proportion(int(np.count_nonzero(sinr > T)), sinr.size)


def estimate_ergodic(point, model, sim, sinr=None):
    """Mean of ``N log2(1 + SINR)`` over trials with the standard error of the mean."""
    if sinr is None:
        sinr = simulate_sinr(point, model, sim)
    cap = model.n_aps * np.log2(1.0 + sinr)
    return SimEstimate(float(cap.mean()), float(cap.std(ddof=1) / math.sqrt(cap.size)),
                       int(cap.size))


def sample_interferer_distances(r1, count, n_interferers, point, disk, rng):
    """Distances of interferers placed uniformly in the disk outside radius ``r1`` of the user.

    Rejection sampling from the disk; returns shape ``(count, n_interferers)``.
    """
    point = point if isinstance(point, EvalPoint) else EvalPoint(float(point))
    need = count * n_interferers
    out = np.empty(0)
    while out.size < need:
        batch = max(1024, int(1.3 * (need - out.size)) + 64)
        pts = sample_ap_positions(batch, disk, rng)
        dist = _distances(pts, point)
        out = np.concatenate([out, dist[dist > r1]])
    return out[:need].reshape(count, n_interferers)


def conditional_interference_samples(r1, point, model, draws, seed=0):
    """Interference power samples with the nearest AP pinned at distance ``r1``."""
    if model.n_aps < 2:
        raise DomainError("no interferers with a single AP")
    n_int = model.n_aps - 1
    parts = []
    for b, size in enumerate(_block_sizes(draws)):
        dist = sample_interferer_distances(r1, size, n_int, point, model.disk,
                                           substream(seed, b, _STREAM_CONDITIONAL))
        ch = draw_channels(dist.shape, model.shadow_std_db, substream(seed, b, _STREAM_FADING),
                           substream(seed, b, _STREAM_SHADOW))
        parts.append(_received(dist, ch, model).sum(axis=1))
    return np.concatenate(parts)


def estimate_interference_moments(r1, point, model, draws, seed=0):
    """Sample estimates of ``E[I | r1]`` and ``E[I^2 | r1]`` with standard errors."""
    inter = conditional_interference_samples(r1, point, model, draws, seed)
    sq = inter * inter
    n = inter.size
    return (SimEstimate(float(inter.mean()), float(inter.std(ddof=1) / math.sqrt(n)), n),
            SimEstimate(float(sq.mean()), float(sq.std(ddof=1) / math.sqrt(n)), n))


def conditional_sir_samples(r1, point, model, draws, seed=0):
    """Exact SIR samples with the serving AP at distance ``r1``."""
    inter = conditional_interference_samples(r1, point, model, draws, seed)
    rng_f = substream(seed, 0, 10)
    rng_s = substream(seed, 0, 11)
    sig = ChannelDraw(rng_f.exponential(1.0, size=draws),
                      model.shadow_std_db * rng_s.normal(size=draws))
    signal = _received(np.full(draws, float(r1)), sig, model)
    return signal / (model.noise_mw_effective + inter)
