"""Monte Carlo BER estimation with a stopping rule and reproducible seeding.

Frames are simulated in fixed-size blocks.  Block ``k`` of grid point ``i``
draws its randomness from

    np.random.SeedSequence(master_seed, spawn_key=(i, k))

so its content does not depend on which worker ran it or how many workers
there were.  Blocks are merged in index order and the stopping rule is
evaluated after each one; blocks computed speculatively beyond the stopping
block are discarded.  The result is therefore a pure function of
``(scenario, ebn0, rule, master_seed, point_index)``.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .schemes import Scheme, simulate_block, slot_and_bandwidth

METRICS = ("end_to_end", "relay")
DEFAULT_BLOCK_FRAMES = 20_000
WORKERS_ENV = "DCSK_RELAY_WORKERS"


@dataclass(frozen=True)
class StoppingRule:
    """Stop once ``min_errors`` errors are counted or ``max_bits`` are sent."""

    min_errors: int = 100
    max_bits: int = 10**7
    block_frames: int = DEFAULT_BLOCK_FRAMES

    def __post_init__(self):
        if self.min_errors < 1:
            raise ValueError("min_errors must be >= 1")
        if self.max_bits < self.min_errors:
            raise ValueError("max_bits must be >= min_errors")
        if self.block_frames < 1:
            raise ValueError("block_frames must be >= 1")

    def block_size(self, index):
        """Bits in block ``index``; the last block is trimmed to ``max_bits``."""
        return max(0, min(self.block_frames, self.max_bits - index * self.block_frames))


@dataclass(frozen=True)
class BerEstimate:
    point_ebn0_db: float
    errors: int
    bits: int
    min_errors: int = 100

    @property
    def ber(self):
        return self.errors / self.bits if self.bits else 0.0

    @property
    def ci95_halfwidth(self):
        p = self.ber
        return 1.96 * math.sqrt(p * (1.0 - p) / self.bits) if self.bits else math.inf

    @property
    def flagged(self):
        """Too few errors for the CI to mean much (zero errors: upper bound only)."""
        return self.errors < self.min_errors

    def covers(self, p):
        return abs(self.ber - p) <= self.ci95_halfwidth


def worker_count(workers=None):
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError("worker count must be >= 1")
    return workers


def block_rng(master_seed, point_index, block_index):
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(point_index), int(block_index)))
    return np.random.default_rng(ss)


def run_until(trial, rule, master_seed, point_index=0, workers=None):
    """Generic stopping-rule driver.

    ``trial(n_bits, rng) -> errors`` simulates one block.  Returns the
    total ``(errors, bits)`` over the shortest prefix of blocks that
    satisfies ``rule``.
    """
    workers = worker_count(workers)
    errors = bits = 0
    index = 0

    def one(k):
        return trial(rule.block_size(k), block_rng(master_seed, point_index, k))

    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while True:
            sizes = []
            k = index
            while len(sizes) < workers and rule.block_size(k) > 0:
                sizes.append(rule.block_size(k))
                k += 1
            if not sizes:
                break
            ks = range(index, index + len(sizes))
            results = list(pool.map(one, ks)) if pool else [one(k) for k in ks]
            for size, err in zip(sizes, results):
                errors += int(err)
                bits += size
                index += 1
                if errors >= rule.min_errors or bits >= rule.max_bits:
                    return errors, bits
    finally:
        if pool is not None:
            pool.shutdown()
    return errors, bits


def _scenario_trial(scenario, metric):
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")

    def trial(n, rng):
        outcome = simulate_block(scenario, n, rng)
        return outcome.end_to_end_errors() if metric == "end_to_end" else outcome.relay_errors()

    return trial


def estimate_point(scenario, ebn0_db, rule=StoppingRule(), master_seed=0, point_index=0,
                   metric="end_to_end", workers=None):
    """Simulate ``scenario`` at ``ebn0_db`` until ``rule`` fires.

    ``metric="end_to_end"`` counts errors of the bit user B recovers for
    user A; ``"relay"`` counts the relay's network-coded decision instead
    (not defined for ANC).
    """
    sc = scenario.at(ebn0_db)
    if metric == "relay" and sc.scheme is Scheme.ANC:
        raise ValueError("the ANC relay makes no decision")
    errors, bits = run_until(_scenario_trial(sc, metric), rule, master_seed, point_index, workers)
    return BerEstimate(float(ebn0_db), errors, bits, rule.min_errors)


def analytic_ber(scenario, ebn0_db, include_term_c=False, metric="end_to_end"):
    """Closed-form BER of the multiplexed schemes; None for PNC1/ANC.

    ``metric="relay"`` gives the relay's network-coded decision only.
    """
    if not scenario.scheme.multiplexed:
        return None
    ebn0 = analysis.db_to_linear(ebn0_db)
    t = analysis.link_bers(scenario.hop1_a, scenario.hop1_b, scenario.hop2_b, ebn0,
                           scenario.beta, include_term_c)
    if metric == "relay":
        return analysis.relay_ber(t.ber_1a, t.ber_1b)
    return analysis.end_to_end_ber(t)


@dataclass
class SeriesRow:
    estimate: BerEstimate
    ber_analytic: float | None
    throughput_sim: float
    throughput_analytic: float | None
    efficiency_sim: float | None
    efficiency_analytic: float | None

    @property
    def ebn0_db(self):
        return self.estimate.point_ebn0_db


@dataclass
class MetricSeries:
    scheme: Scheme
    beta: int
    rows: list = field(default_factory=list)

    @property
    def flagged(self):
        return any(r.estimate.flagged for r in self.rows)


def check_grid(grid):
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("Eb/N0 grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("Eb/N0 grid must be strictly ascending")
    return grid


def sweep(scenario, ebn0_grid_db, rule=StoppingRule(), master_seed=0, include_term_c=False,
          metric="end_to_end", workers=None):
    """One estimate per grid point plus the derived analytic/throughput columns."""
    grid = check_grid(ebn0_grid_db)
    _, t_n, _ = slot_and_bandwidth(scenario.scheme, scenario.beta)
    series = MetricSeries(scenario.scheme, scenario.beta)
    for i, db in enumerate(grid):
        est = estimate_point(scenario, db, rule, master_seed, i, metric, workers)
        ana = analytic_ber(scenario, db, include_term_c, metric)
        mux = scenario.scheme.multiplexed
        series.rows.append(SeriesRow(
            est,
            ana,
            analysis.throughput(est.ber, t_n),
            None if ana is None else analysis.throughput(ana, t_n),
            analysis.spectral_efficiency(scenario.scheme, est.ber, scenario.beta) if mux else None,
            analysis.spectral_efficiency(scenario.scheme, ana, scenario.beta) if mux else None,
        ))
    return series
