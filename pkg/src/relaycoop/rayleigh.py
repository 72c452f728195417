"""Ergodic bounds and rates under fast Rayleigh fading.

Power gains are iid unit-mean exponentials. Expectations of the form
``E[log2(1 + P (a X + b Y))]`` have exact expressions through the
exponential integral E1, and those are what the ``EXACT`` mode uses. The
``HISNR`` mode evaluates the high-SNR closed forms where ``log(1 + xP)`` is
replaced by ``log(xP)``. The compress-and-forward rate has no closed form
and is estimated with a seeded, block-indexed Monte Carlo engine.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .core import NetworkConfig, PowerSplit, RateResult, classify_branch
from .scalar_opt import grid_then_refine, solve_balance

EULER_GAMMA = 0.57721566490153286060651209008240243
LOG2E = 1.0 / math.log(2.0)

_E1_SERIES_TERMS = 30
_E1_CF_MAX_ITER = 500
_TINY = 1e-300
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


class FadingMode(enum.Enum):
    EXACT = "exact"
    HISNR = "hisnr"


# --- exponential integral ------------------------------------------------------


def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, _E1_SERIES_TERMS + 1):
        term = term * (-x) / k
        total = total + term / k
    return -EULER_GAMMA - np.log(x) - total


def _exp_e1_cf(x):
    # e^x E1(x) by modified Lentz on the even continued fraction
    b = x + 1.0
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _E1_CF_MAX_ITER + 1):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h


def exp_e1_scaled(x):
    """``exp(x) * E1(x)`` for ``x > 0``; finite where E1 alone would underflow."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("E1 is defined here for x > 0 only")
    out = np.empty_like(x)
    small = x <= 1.0
    if np.any(small):
        xs = x[small]
        out[small] = np.exp(xs) * _e1_series(xs)
    if np.any(~small):
        out[~small] = _exp_e1_cf(x[~small])
    return out if out.ndim else float(out)


def exp_integral_e1(x):
    """Exponential integral ``E1(x) = int_x^inf exp(-t)/t dt`` for ``x > 0``.

    Power series for ``x <= 1``, continued fraction above.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("E1 is defined here for x > 0 only")
    out = np.empty_like(x)
    small = x <= 1.0
    if np.any(small):
        out[small] = _e1_series(x[small])
    if np.any(~small):
        xl = x[~small]
        out[~small] = _exp_e1_cf(xl) * np.exp(-xl)
    return out if out.ndim else float(out)


# --- exact expectations --------------------------------------------------------


def _ln_single(c):
    """``E[ln(1 + c X)]`` in nats for ``c >= 0``, X ~ Exp(1)."""
    c = np.asarray(c, dtype=float)
    out = np.zeros_like(c)
    pos = c > 0
    if np.any(pos):
        out[pos] = exp_e1_scaled(1.0 / c[pos])
    return out


def _ln_single_dd(c):
    """Derivative of ``c -> c * E[ln(1 + c X)]`` (nats).

    Equals ``E[ln(1 + c G)]`` for G ~ Gamma(2, 1).
    """
    c = np.asarray(c, dtype=float)
    out = np.zeros_like(c)
    pos = c > 0
    if np.any(pos):
        q = 1.0 / c[pos]
        out[pos] = 1.0 + (1.0 - q) * exp_e1_scaled(q)
    return out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_PAIR_EQUAL_RTOL = 1e-8
_PAIR_QUAD_RTOL = 0.25


def _ln_pair(a, b, P):
    """``E[ln(1 + P (a X + b Y))]`` in nats for independent unit exponentials.

    Partial fractions give the divided difference of ``c -> c S(c)`` with
    S the single-exponential expectation. Near-equal weights integrate its
    derivative with Gauss-Legendre instead, avoiding the cancellation, and
    equal weights use the Gamma(2) closed form.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    hi, lo = np.maximum(a, b), np.minimum(a, b)
    out = np.zeros(hi.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(hi + lo > 0, (hi - lo) / (hi + lo), 0.0)
    pos = hi > 0

    eq = pos & (rel < _PAIR_EQUAL_RTOL)
    if np.any(eq):
        out[eq] = _ln_single_dd(0.5 * (hi[eq] + lo[eq]) * P)

    near = pos & ~eq & (rel < _PAIR_QUAD_RTOL)
    if np.any(near):
        m = 0.5 * (hi[near] + lo[near])
        h = 0.5 * (hi[near] - lo[near])
        nodes = (m[:, None] + h[:, None] * _GL_NODES[None, :]) * P
        out[near] = 0.5 * (_ln_single_dd(nodes) @ _GL_WEIGHTS)

    far = pos & ~eq & ~near
    if np.any(far):
        ah, al = hi[far], lo[far]
        out[far] = (ah * _ln_single(ah * P) - al * _ln_single(al * P)) / (ah - al)
    return out if out.ndim else float(out)


def ergodic_c_single(a, P):
    """``E[log2(1 + a P X)]`` with X ~ Exp(1); zero gain gives zero."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0) or not P > 0:
        raise ValueError("need a >= 0 and P > 0")
    out = LOG2E * _ln_single(a * P)
    return out if out.ndim else float(out)


def ergodic_c_pair(a, b, P):
    """``E[log2(1 + P (a X + b Y))]`` with X, Y iid Exp(1)."""
    a_arr, b_arr = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if np.any(a_arr < 0) or np.any(b_arr < 0) or not P > 0:
        raise ValueError("need a, b >= 0 and P > 0")
    if np.any(a_arr + b_arr <= 0):
        raise ValueError("at least one of a, b must be positive")
    out = LOG2E * np.asarray(_ln_pair(a_arr, b_arr, P))
    return out if out.ndim else float(out)


def noncoop_ergodic(cfg: NetworkConfig, mode: FadingMode = FadingMode.EXACT) -> float:
    """Ergodic capacity of the direct link alone."""
    if mode is FadingMode.EXACT:
        return ergodic_c_single(1.0, cfg.power_P)
    return math.log2(cfg.power_P) - EULER_GAMMA * LOG2E


# --- high-SNR closed forms ----------------------------------------------------


def _xlogx_slope(a, b):
    """``(a log2 a - b log2 b) / (a - b)`` with its limits at ``a = b`` and 0.

    Written around the midpoint so near-equal weights lose no precision.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    m = 0.5 * (a + b)
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(m > 0, (a - b) / (2.0 * m), 0.0)
        ad = np.abs(delta)
        # mean of ln(1 + delta s) over s in [-1, 1], plus 1
        series = 1.0 - delta**2 / 6.0 - delta**4 / 20.0 - delta**6 / 42.0 - delta**8 / 72.0
        xl = (1.0 + ad) * np.log1p(ad)
        yl = (1.0 - ad) * np.log1p(-np.minimum(ad, _BELOW_ONE))
        exact = (xl - yl) / (2.0 * np.where(ad > 0, ad, 1.0))
        bracket = np.where(ad < 1e-3, series, exact)
        out = np.log2(m) + LOG2E * bracket
    if out.ndim == 0:
        return float(out)
    return out


def hisnr_log_pair(a, b):
    """High-SNR kernel ``E[log2(a X + b Y)]`` for X, Y iid Exp(1)."""
    return _xlogx_slope(a, b) - EULER_GAMMA * LOG2E


def hi_snr_tx_terms(alpha, g, P) -> Tuple[float, float]:
    """High-SNR values of the two terms of the transmitter cut-set bound.

    term1 = log P + log alpha + g log g / (g - 1) - log e^gamma
    term2 = log P + (alpha log alpha - (1-alpha) log(1-alpha)) / (2 alpha - 1) - log e^gamma,
    with ``log P + log e^(1-gamma) - 1`` at alpha = 1/2. At g = 1 the first
    term takes its limit ``log2 e``.
    """
    alpha_a = np.asarray(alpha, dtype=float)
    if np.any(alpha_a <= 0) or np.any(alpha_a >= 1):
        raise ValueError("alpha must lie strictly inside (0, 1)")
    if not g > 0:
        raise ValueError("g must be positive")
    lp = math.log2(P)
    t1 = lp + np.log2(alpha_a) + _xlogx_slope(g, 1.0) - EULER_GAMMA * LOG2E
    t2 = lp + _xlogx_slope(alpha_a, 1.0 - alpha_a) - EULER_GAMMA * LOG2E
    if alpha_a.ndim == 0:
        return float(t1), float(t2)
    return t1, t2


def hi_snr_df_term(alpha, g, P):
    """High-SNR value of the relay-decoding term ``E[C(alpha g gamma2)]``."""
    alpha = np.asarray(alpha, dtype=float)
    return math.log2(P) + np.log2(alpha * g) - EULER_GAMMA * LOG2E


def hi_snr_rx_terms(alpha, g, P):
    """High-SNR values of the two terms of the receiver cut-set bound.

    term1 = log P + log alpha + log e^(1-gamma)
    term2 = log P + (g(1-alpha) log(g(1-alpha)) - alpha log alpha)
                    / (g(1-alpha) - alpha) - log e^gamma
    term2 takes the Gamma(2) limit when ``g (1-alpha) = alpha``.
    """
    alpha_a = np.asarray(alpha, dtype=float)
    if np.any(alpha_a <= 0) or np.any(alpha_a >= 1):
        raise ValueError("alpha must lie strictly inside (0, 1)")
    lp = math.log2(P)
    t1 = lp + np.log2(alpha_a) + (1.0 - EULER_GAMMA) * LOG2E
    t2 = lp + _xlogx_slope(g * (1.0 - alpha_a), alpha_a) - EULER_GAMMA * LOG2E
    if alpha_a.ndim == 0:
        return float(t1), float(t2)
    return t1, t2


# --- fading bounds and DF rate -------------------------------------------------

# HiSNR forms diverge at alpha in {0, 1}; optimize on a slightly shrunken interval.
_HISNR_EPS = 1e-9


def _tx_terms(alpha, cfg: NetworkConfig, mode: FadingMode):
    g, P = cfg.gain_g, cfg.power_P
    alpha = np.asarray(alpha, dtype=float)
    if mode is FadingMode.HISNR:
        return hi_snr_tx_terms(alpha, g, P)
    t1 = LOG2E * np.asarray(_ln_pair(alpha * g, alpha, P))
    t2 = LOG2E * np.asarray(_ln_pair(alpha, 1.0 - alpha, P))
    return t1, t2


def _df_terms(alpha, cfg: NetworkConfig, mode: FadingMode):
    g, P = cfg.gain_g, cfg.power_P
    alpha = np.asarray(alpha, dtype=float)
    if mode is FadingMode.HISNR:
        return hi_snr_df_term(alpha, g, P), hi_snr_tx_terms(alpha, g, P)[1]
    t1 = LOG2E * _ln_single(alpha * g * P)
    t2 = LOG2E * np.asarray(_ln_pair(alpha, 1.0 - alpha, P))
    return t1, t2


def _rx_terms(alpha, cfg: NetworkConfig, mode: FadingMode):
    g, P = cfg.gain_g, cfg.power_P
    alpha = np.asarray(alpha, dtype=float)
    if mode is FadingMode.HISNR:
        return hi_snr_rx_terms(alpha, g, P)
    t1 = LOG2E * np.asarray(_ln_pair(alpha, alpha, P))
    t2 = LOG2E * np.asarray(_ln_pair(alpha, (1.0 - alpha) * g, P))
    return t1, t2


def _alpha_range(mode: FadingMode) -> Tuple[float, float]:
    if mode is FadingMode.HISNR:
        return _HISNR_EPS, 1.0 - _HISNR_EPS
    return 0.0, 1.0


def _result(terms_fn, alpha: float, cfg, mode) -> RateResult:
    t1, t2 = terms_fn(np.array([alpha]), cfg, mode)
    t1, t2 = float(np.asarray(t1)[0]), float(np.asarray(t2)[0])
    # high-SNR forms can dip below zero at low P; a rate cannot
    rate = max(min(t1, t2), 0.0)
    return RateResult(rate=rate, alpha_star=alpha, branch=classify_branch(t1, t2), terms=(t1, t2))


def _maximize_min(terms_fn, cfg, mode) -> float:
    lo, hi = _alpha_range(mode)

    def objective(alpha):
        t1, t2 = terms_fn(alpha, cfg, mode)
        return np.minimum(t1, t2)

    return grid_then_refine(objective, lo, hi).argmax


def _split_alpha(split: PowerSplit, mode: FadingMode) -> float:
    alpha = split.fixed_alpha()
    if mode is FadingMode.HISNR and not 0.0 < alpha < 1.0:
        raise ValueError("high-SNR forms need alpha strictly inside (0, 1)")
    return alpha


def fading_tx_cutset(
    split: PowerSplit, cfg: NetworkConfig, mode: FadingMode = FadingMode.EXACT
) -> RateResult:
    """Ergodic transmitter-cooperation cut-set bound (no CSIT, rho = 0).

    The expectation is taken on each min-term separately.
    """
    if split.is_optimized:
        alpha = _maximize_min(_tx_terms, cfg, mode)
    else:
        alpha = _split_alpha(split, mode)
    return _result(_tx_terms, alpha, cfg, mode)


def fading_df_rate(
    split: PowerSplit, cfg: NetworkConfig, mode: FadingMode = FadingMode.EXACT
) -> RateResult:
    """Ergodic decode-and-forward transmitter-cooperation rate."""
    if split.is_optimized:
        alpha = _maximize_min(_df_terms, cfg, mode)
    else:
        alpha = _split_alpha(split, mode)
    return _result(_df_terms, alpha, cfg, mode)


class BalanceError(RuntimeError):
    """The receiver cut-set terms do not cross exactly once."""


_BALANCE_GRID = 1001


def rx_balance_alpha(cfg: NetworkConfig, mode: FadingMode = FadingMode.EXACT) -> float:
    """Power split equating the two receiver cut-set terms (g >= 1).

    The difference of the terms is checked for a single sign change on a
    grid before bisecting.
    """
    lo, hi = _alpha_range(mode)
    grid = np.linspace(lo, hi, _BALANCE_GRID)
    t1, t2 = _rx_terms(grid, cfg, mode)
    s = np.sign(np.asarray(t1) - np.asarray(t2))
    s = s[s != 0]
    changes = int(np.count_nonzero(s[1:] != s[:-1]))
    if changes != 1:
        raise BalanceError(
            f"expected one crossing of the receiver cut-set terms, found {changes} "
            f"(g={cfg.gain_g}, P={cfg.power_P}, mode={mode.value})"
        )
    return solve_balance(
        lambda a: _rx_terms(a, cfg, mode)[0],
        lambda a: _rx_terms(a, cfg, mode)[1],
        lo,
        hi,
        1e-13,
    )


def fading_rx_cutset(
    split: PowerSplit, cfg: NetworkConfig, mode: FadingMode = FadingMode.EXACT
) -> RateResult:
    """Ergodic receiver-cooperation cut-set bound.

    With an optimized split and ``g >= 1`` the optimum equates the two terms
    (first increasing, second decreasing in alpha); below ``g = 1`` both
    terms grow with alpha and a direct search is used.
    """
    if split.is_optimized:
        if cfg.gain_g >= 1.0:
            alpha = rx_balance_alpha(cfg, mode)
        else:
            alpha = _maximize_min(_rx_terms, cfg, mode)
    else:
        alpha = _split_alpha(split, mode)
    return _result(_rx_terms, alpha, cfg, mode)


# --- Monte Carlo engine ----------------------------------------------------------

STREAM_RELAY_MAC = 1
STREAM_CF_RATE = 2
STREAM_CLUSTER = 3
STREAM_CHECK = 4


@dataclass(frozen=True)
class McConfig:
    """Sample count, seed and blocking of a Monte Carlo estimate.

    Sample ``i`` lives in block ``i // block_size`` and its draws come from
    a generator seeded by ``(seed, stream, block)``. Results depend on
    ``(seed, n, block_size)`` only, never on ``workers``.
    """

    n: int = 100_000
    seed: int = 0
    block_size: int = 32_768
    workers: int = 1

    REFERENCE_N = 1000

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.block_size < 1 or self.workers < 1:
            raise ValueError("block_size and workers must be positive")

    @classmethod
    def reference_preset(cls, seed: int = 0, workers: int = 1) -> "McConfig":
        """The 1000-realization setting used for the published curves."""
        return cls(n=cls.REFERENCE_N, seed=seed, workers=workers)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n": self.n, "seed": self.seed}


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream, block))))


def mc_moments(
    fn: Callable[[np.ndarray], np.ndarray], k_draws: int, mc: McConfig, stream: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Sample mean and standard error of ``fn`` over iid Exp(1) draws.

    ``fn`` maps a ``(k_draws, m)`` array of draws to values of shape
    ``(..., m)``; moments are returned with the leading shape. Per-block
    statistics are merged in block order (Chan et al.), so the result does
    not depend on how blocks are spread over workers.
    """
    n_blocks = -(-mc.n // mc.block_size)

    def run(b):
        m = min(mc.block_size, mc.n - b * mc.block_size)
        draws = block_generator(mc.seed, stream, b).standard_exponential((k_draws, m))
        vals = np.asarray(fn(draws), dtype=float)
        mean = vals.mean(axis=-1)
        m2 = ((vals - mean[..., None]) ** 2).sum(axis=-1)
        return m, mean, m2

    if mc.workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    else:
        parts = [run(b) for b in range(n_blocks)]

    count, mean, m2 = parts[0]
    for nb, mb, m2b in parts[1:]:
        tot = count + nb
        delta = mb - mean
        mean = mean + delta * (nb / tot)
        m2 = m2 + m2b + delta**2 * (count * nb / tot)
        count = tot
    if count > 1:
        stderr = np.sqrt(m2 / (count - 1) / count)
    else:
        stderr = np.zeros_like(mean)
    return mean, stderr


def mc_expectation(fn, k_draws: int, mc: McConfig, stream: int = STREAM_CHECK) -> McEstimate:
    """Scalar convenience wrapper around :func:`mc_moments`."""
    mean, se = mc_moments(fn, k_draws, mc, stream)
    return McEstimate(float(mean), float(se), mc.n, mc.seed)


# --- compress-and-forward under fading ---------------------------------------------


def _relay_mac_values(alphas: np.ndarray, g: float, P: float):
    def fn(draws):
        g1, g3 = draws[0], draws[1]
        a = alphas[:, None]
        return np.log1p((1.0 - a) * g * g3 * P / (a * g1 * P + 1.0)) * LOG2E

    return fn


def _cf_values(alphas: np.ndarray, r3: np.ndarray, P: float):
    with np.errstate(divide="ignore"):
        # D/(1-D) with D = 2^-R3, written to stay accurate as R3 -> 0
        odds = np.where(r3 > 0, 1.0 / np.expm1(np.maximum(r3, _TINY) / LOG2E), np.inf)

    def fn(draws):
        g1, g2 = draws[0], draws[1]
        a = alphas[:, None]
        noise = odds[:, None] * (a * g2 * P + 1.0)
        relay = np.where(np.isfinite(noise), a * g2 / (1.0 + noise), 0.0)
        return np.log1p(P * (a * g1 + relay)) * LOG2E

    return fn


@dataclass(frozen=True)
class CfGrid:
    alphas: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    relay_rate: np.ndarray
    n: int
    seed: int

    def estimate(self, i: int) -> McEstimate:
        return McEstimate(float(self.mean[i]), float(self.stderr[i]), self.n, self.seed)


def cf_fading_grid(alphas: Sequence[float], cfg: NetworkConfig, mc: McConfig) -> CfGrid:
    """CF rate estimates on a set of power splits with common random numbers.

    Phase one estimates the relay's multiple-access rate R3 per split; the
    compression distortion ``D = 2^-R3`` then fixes the compression noise
    ``N = D/(1-D) (alpha gamma2 P + 1)`` realization by realization in phase
    two. ``R3 <= 0`` removes the relay contribution instead of producing a
    negative noise variance.
    """
    alphas = np.asarray(alphas, dtype=float).reshape(-1)
    if np.any((alphas < 0) | (alphas > 1)):
        raise ValueError("alpha must lie in [0, 1]")
    g, P = cfg.gain_g, cfg.power_P
    r3, _ = mc_moments(_relay_mac_values(alphas, g, P), 2, mc, STREAM_RELAY_MAC)
    mean, se = mc_moments(_cf_values(alphas, r3, P), 2, mc, STREAM_CF_RATE)
    return CfGrid(alphas, mean, se, r3, mc.n, mc.seed)


def cf_fading_rate(alpha: float, cfg: NetworkConfig, mc: McConfig = McConfig()) -> McEstimate:
    """Monte Carlo estimate of the compress-and-forward rate at one split."""
    return cf_fading_grid([alpha], cfg, mc).estimate(0)


def alpha_grid(step: float = 0.01) -> np.ndarray:
    k = int(round(1.0 / step))
    if k < 1 or abs(k * step - 1.0) > 1e-9:
        raise ValueError(f"alpha step must divide 1, got {step!r}")
    return np.arange(k + 1) / k


def optimize_cf_alpha(
    cfg: NetworkConfig, mc: McConfig = McConfig(), step: float = 0.01
) -> Tuple[float, McEstimate]:
    """Best CF rate over the discrete split grid ``{0, step, ..., 1}``."""
    grid = cf_fading_grid(alpha_grid(step), cfg, mc)
    i = int(np.argmax(grid.mean))
    return float(grid.alphas[i]), grid.estimate(i)
