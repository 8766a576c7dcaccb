"""Repeated coexistence game engine.

Run ``i`` of a master seed ``s`` draws from its own
``Generator(PCG64(SeedSequence(s, spawn_key=key + (i,))))``. Every stage
consumes, in this order, one uniform for the coordination device, one per AON
node and one per TON node, whatever the stage game being played. Runs are
simulated in lockstep batches ("chunks") over those streams, so a run's
outcome depends neither on the number of runs, the chunk size nor the number
of worker threads.
"""
import enum
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from . import signals
from .equilibrium import cooperative_tau_aon, msne_tau_aon, ton_access_probability
from .exceptions import ParameterError
from .model import (AccessProfile, ActionProfile, AgeState, Mode, Recommendation,
                    ScenarioParams, SlotKind, advance_ages, classify_slot_batch,
                    expected_network_throughput, expected_node_age,
                    slot_probabilities_competitive, slot_probabilities_cooperative)

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_RUNS = 250

ACCUMULATE_REALIZED = 'realized'
ACCUMULATE_EXPECTED = 'expected'
ACCUMULATE_CHOICES = (ACCUMULATE_REALIZED, ACCUMULATE_EXPECTED)

#: tau_A within this distance of 1 counts as an aggressive stage
UNIT_TOLERANCE = 1e-12

MAX_SEED = 2 ** 64 - 1


class Phase(enum.Enum):
    COMPETITIVE = 'competitive'
    COOPERATIVE = 'cooperative'
    FORCED = 'forced'


@dataclass(frozen=True)
class ForcedStage:
    """A stage whose action profile is imposed regardless of the device."""
    stage: int
    recommendation: Recommendation
    actions: ActionProfile


@dataclass(frozen=True)
class Schedule:
    """Stage game played at each stage of a run.

    ``compete_from`` is the first stage of permanent competition (grim
    trigger); forced stages take precedence over both modes.
    """
    mode: Mode
    forced: Tuple[ForcedStage, ...] = ()
    compete_from: Optional[int] = None

    def forced_at(self, stage):
        for entry in self.forced:
            if entry.stage == stage:
                return entry
        return None

    def phase(self, stage):
        if self.forced_at(stage) is not None:
            return Phase.FORCED
        if self.compete_from is not None and stage >= self.compete_from:
            return Phase.COMPETITIVE
        if self.mode is Mode.COMPETITIVE:
            return Phase.COMPETITIVE
        return Phase.COOPERATIVE


@dataclass(frozen=True)
class RunConfig:
    params: ScenarioParams
    n_stages: int
    mode: Mode = Mode.COMPETITIVE
    seed: int = 0
    chunk_runs: int = DEFAULT_CHUNK_RUNS
    accumulate: str = ACCUMULATE_REALIZED

    def __post_init__(self):
        if isinstance(self.n_stages, bool) or not isinstance(self.n_stages, int) or self.n_stages < 1:
            raise ParameterError('n_stages must be a positive integer, got %r' % (self.n_stages,))
        if not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise ParameterError('seed must be an unsigned 64-bit integer, got %r' % (self.seed,))
        if not isinstance(self.chunk_runs, int) or self.chunk_runs < 1:
            raise ParameterError('chunk_runs must be a positive integer, got %r' % (self.chunk_runs,))
        if self.accumulate not in ACCUMULATE_CHOICES:
            raise ParameterError('accumulate must be one of %s, got %r'
                                 % (', '.join(ACCUMULATE_CHOICES), self.accumulate))
        if not isinstance(self.mode, Mode):
            raise ParameterError('invalid mode %r' % (self.mode,))


class StageRecord(NamedTuple):
    stage: int
    network_age: float
    tau_aon: float
    tau_ton: float
    phase: Phase
    recommendation: Recommendation
    actions: ActionProfile
    kind: SlotKind
    node: Optional[int]
    u_aon: float
    u_ton: float

    @property
    def selected(self):
        """Network(s) allowed on the medium: 'aon', 'ton', 'both' or 'none'."""
        aon, ton = self.actions.aon_access, self.actions.ton_access
        if aon and ton:
            return 'both'
        if aon:
            return 'aon'
        return 'ton' if ton else 'none'


class Chunk(NamedTuple):
    u_aon_stream: np.ndarray
    u_ton_stream: np.ndarray
    tau_one: np.ndarray
    tau_zero: np.ndarray
    counted: np.ndarray
    ages: np.ndarray
    records: Optional[List[StageRecord]]


def discount_weights(alpha, n_stages):
    """(1 - alpha) * alpha**(n - 1) for n = 1..n_stages."""
    return (1.0 - alpha) * np.power(alpha, np.arange(n_stages, dtype=float))


def discounted(stream, alpha):
    """Average discounted payoff of a finite stage payoff stream."""
    stream = np.asarray(stream, dtype=float)
    return float(np.dot(discount_weights(alpha, stream.shape[-1]), stream))


def _expected_payoffs(params, phase, tau_aon, tau_ton, aon_on, ton_on, network_age):
    sizes, slots = params.sizes, params.slots
    if phase is Phase.COOPERATIVE:
        probs = slot_probabilities_cooperative(sizes, AccessProfile(tau_aon, tau_ton), params.p_r)
    else:
        probs = slot_probabilities_competitive(
            sizes, AccessProfile(tau_aon * aon_on, tau_ton * ton_on))
    return (-expected_node_age(probs, network_age, slots),
            expected_network_throughput(probs, slots, params.rate))


def play(params, n_stages, schedule, uniforms, accumulate=ACCUMULATE_REALIZED, trace=False):
    """Simulate runs in lockstep from their ``(runs, stages, 1 + N_A + N_T)`` uniforms."""
    sizes, slots = params.sizes, params.slots
    batch = uniforms.shape[0]
    if uniforms.shape[1] < n_stages or uniforms.shape[2] != stage_width(sizes):
        raise ParameterError('uniforms of shape %r do not cover %d stages'
                             % (uniforms.shape, n_stages))
    ages = np.full((batch, sizes.n_aon), float(params.initial_age))
    u_aon = np.empty((batch, n_stages))
    u_ton = np.empty((batch, n_stages))
    tau_one = np.zeros(batch, dtype=np.int64)
    tau_zero = np.zeros(batch, dtype=np.int64)
    counted = np.zeros(batch, dtype=np.int64)
    tau_ton = ton_access_probability(sizes)
    success_bits = slots.sigma_success * params.rate / sizes.n_ton
    everyone = np.ones(batch, dtype=bool)
    records = [] if trace else None

    for index in range(n_stages):
        stage = index + 1
        network_age = ages.mean(axis=1)
        drawn = uniforms[:, index]
        heads = drawn[:, 0] < params.p_r
        phase = schedule.phase(stage)
        forced = None
        if phase is Phase.COMPETITIVE:
            tau_aon = msne_tau_aon(sizes, slots, network_age)
            aon_on = ton_on = selected = everyone
        elif phase is Phase.COOPERATIVE:
            tau_aon = cooperative_tau_aon(sizes, slots, network_age)
            aon_on, ton_on = heads, ~heads
            selected = heads
        else:
            forced = schedule.forced_at(stage)
            tau_aon = cooperative_tau_aon(sizes, slots, network_age)
            aon_on = np.full(batch, forced.actions.aon_access)
            ton_on = np.full(batch, forced.actions.ton_access)
            selected = None
        tau_aon = np.broadcast_to(np.asarray(tau_aon, dtype=float), (batch,))

        if selected is not None:
            tau_one += selected & (np.abs(tau_aon - 1.0) <= UNIT_TOLERANCE)
            tau_zero += selected & (tau_aon == 0.0)
            counted += selected

        draw = classify_slot_batch(drawn[:, 1:1 + sizes.n_aon], drawn[:, 1 + sizes.n_aon:],
                                   tau_aon, np.full(batch, tau_ton), aon_on, ton_on)
        if accumulate == ACCUMULATE_EXPECTED:
            u_aon[:, index], u_ton[:, index] = _expected_payoffs(
                params, phase, tau_aon, tau_ton, aon_on, ton_on, network_age)
        advance_ages(ages, draw.kinds, draw.nodes, slots)
        if accumulate == ACCUMULATE_REALIZED:
            u_ton[:, index] = np.where(draw.kinds == SlotKind.SUCCESS_TON, success_bits, 0.0)
            u_aon[:, index] = -ages.mean(axis=1)

        if trace:
            kind = SlotKind(int(draw.kinds[0]))
            if forced is not None:
                recommendation = forced.recommendation
            else:
                recommendation = Recommendation.HEADS if heads[0] else Recommendation.TAILS
            records.append(StageRecord(
                stage=stage,
                network_age=float(network_age[0]),
                tau_aon=float(tau_aon[0]),
                tau_ton=tau_ton,
                phase=phase,
                recommendation=recommendation,
                actions=ActionProfile(bool(aon_on[0]), bool(ton_on[0])),
                kind=kind,
                node=int(draw.nodes[0]) if draw.nodes[0] >= 0 else None,
                u_aon=float(u_aon[0, index]),
                u_ton=float(u_ton[0, index]),
            ))

    return Chunk(u_aon, u_ton, tau_one, tau_zero, counted, ages, records)


def stage_width(sizes):
    """Uniforms consumed per stage: device, then AON nodes, then TON nodes."""
    return 1 + sizes.n_aon + sizes.n_ton


def run_generator(seed, key, run_index):
    spawn_key = tuple(key) + (int(run_index),)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def run_uniforms(seed, key, runs, n_stages, sizes):
    """Stacked per-run uniforms for the run indices ``runs``."""
    shape = (n_stages, stage_width(sizes))
    return np.stack([run_generator(seed, key, i).random(shape) for i in runs])


def chunk_ranges(n_runs, chunk_runs):
    if isinstance(n_runs, bool) or not isinstance(n_runs, int) or n_runs < 1:
        raise ParameterError('n_runs must be a positive integer, got %r' % (n_runs,))
    return [range(start, min(start + chunk_runs, n_runs))
            for start in range(0, n_runs, chunk_runs)]


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float

    @classmethod
    def of(cls, values):
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise ParameterError('cannot estimate from an empty sample')
        if np.all(values == values[0]):
            return cls(float(values[0]), 0.0)
        return cls(float(np.mean(values)),
                   float(np.std(values, ddof=1) / np.sqrt(values.size)))


@dataclass(frozen=True)
class Aggregate:
    n_runs: int
    u_aon: Estimate
    u_ton: Estimate
    freq_tau_one: Estimate
    freq_tau_zero: Estimate


@dataclass(frozen=True, eq=False)
class RunResult:
    u_aon_discounted: float
    u_ton_discounted: float
    freq_tau_one: float
    freq_tau_zero: float
    final_ages: AgeState
    u_aon_stream: np.ndarray
    u_ton_stream: np.ndarray


class RunBatch(object):
    """Per-run outcomes of a set of chunks, in chunk order."""

    def __init__(self, chunks):
        self.u_aon_stream = np.concatenate([c.u_aon_stream for c in chunks])
        self.u_ton_stream = np.concatenate([c.u_ton_stream for c in chunks])
        self.tau_one = np.concatenate([c.tau_one for c in chunks])
        self.tau_zero = np.concatenate([c.tau_zero for c in chunks])
        self.counted = np.concatenate([c.counted for c in chunks])
        self.ages = np.concatenate([c.ages for c in chunks])

    def __len__(self):
        return self.ages.shape[0]

    @property
    def n_stages(self):
        return self.u_aon_stream.shape[1]

    def discounted(self, alpha):
        weights = discount_weights(alpha, self.n_stages)
        return self.u_aon_stream @ weights, self.u_ton_stream @ weights

    def frequencies(self):
        one = np.zeros(len(self))
        zero = np.zeros(len(self))
        seen = self.counted > 0
        np.divide(self.tau_one, self.counted, out=one, where=seen)
        np.divide(self.tau_zero, self.counted, out=zero, where=seen)
        return one, zero

    def result(self, index, alpha):
        u_aon, u_ton = self.discounted(alpha)
        one, zero = self.frequencies()
        return RunResult(
            u_aon_discounted=float(u_aon[index]),
            u_ton_discounted=float(u_ton[index]),
            freq_tau_one=float(one[index]),
            freq_tau_zero=float(zero[index]),
            final_ages=AgeState(tuple(self.ages[index])),
            u_aon_stream=self.u_aon_stream[index].copy(),
            u_ton_stream=self.u_ton_stream[index].copy(),
        )

    def aggregate(self, alpha):
        u_aon, u_ton = self.discounted(alpha)
        one, zero = self.frequencies()
        return Aggregate(len(self), Estimate.of(u_aon), Estimate.of(u_ton),
                         Estimate.of(one), Estimate.of(zero))


def simulate_runs(params, n_stages, schedule, n_runs, seed=0, chunk_runs=DEFAULT_CHUNK_RUNS,
                  accumulate=ACCUMULATE_REALIZED, threads=1, key=()):
    """Simulate ``n_runs`` runs of ``schedule``; ``key`` prefixes the run spawn keys."""
    ranges = chunk_ranges(n_runs, chunk_runs)
    key = tuple(key)

    def task(index):
        uniforms = run_uniforms(seed, key, ranges[index], n_stages, params.sizes)
        chunk = play(params, n_stages, schedule, uniforms, accumulate)
        signals.chunk_finished.send(schedule, index=index, runs=len(ranges[index]))
        return chunk

    if threads <= 1 or len(ranges) == 1:
        chunks = [task(index) for index in range(len(ranges))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(task, range(len(ranges))))
    return RunBatch(chunks)


def _run_one(config, mode):
    if config.mode is not mode:
        raise ParameterError('expected a %s run config, got %s' % (mode.value, config.mode.value))
    batch = simulate_runs(config.params, config.n_stages, Schedule(config.mode), 1,
                          seed=config.seed, chunk_runs=config.chunk_runs,
                          accumulate=config.accumulate)
    return batch.result(0, config.params.alpha)


def run_competition(config):
    """One run in which both networks play the stage equilibrium every stage."""
    return _run_one(config, Mode.COMPETITIVE)


def run_cooperation(config):
    """One run in which both networks obey the coordination device every stage."""
    return _run_one(config, Mode.COOPERATIVE)


def monte_carlo(config, n_runs, threads=1):
    logger.debug('monte carlo: %s, %d runs x %d stages, seed %d',
                 config.mode.value, n_runs, config.n_stages, config.seed)
    batch = simulate_runs(config.params, config.n_stages, Schedule(config.mode), n_runs,
                          seed=config.seed, chunk_runs=config.chunk_runs,
                          accumulate=config.accumulate, threads=threads)
    return batch.aggregate(config.params.alpha)


def run_trace(config):
    """Per-stage records of run 0 of ``config``."""
    uniforms = run_uniforms(config.seed, (), [0], config.n_stages, config.params.sizes)
    chunk = play(config.params, config.n_stages, Schedule(config.mode), uniforms,
                 config.accumulate, trace=True)
    return chunk.records


def gain_of_cooperation(params, alpha, p_r, n_runs, n_stages, seed=0,
                        reference=Mode.COMPETITIVE, threads=1,
                        chunk_runs=DEFAULT_CHUNK_RUNS, accumulate=ACCUMULATE_REALIZED):
    """(gain_aon, gain_ton) of cooperating over ``reference`` under a shared seed."""
    scenario = replace(params, alpha=alpha, p_r=p_r)
    estimates = []
    for mode in (Mode.COOPERATIVE, reference):
        config = RunConfig(scenario, n_stages, mode, seed, chunk_runs, accumulate)
        estimates.append(monte_carlo(config, n_runs, threads))
    together, apart = estimates
    return (together.u_aon.mean - apart.u_aon.mean,
            together.u_ton.mean - apart.u_ton.mean)
