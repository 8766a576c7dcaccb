"""Slot model of an age-optimizing network (AON) and a throughput-optimizing
network (TON) sharing one slotted collision channel.

A slot is idle when no node transmits, a success when exactly one node
transmits and a collision otherwise. Every probability kernel below accepts
scalars or numpy arrays for the access probabilities so the equilibrium oracle
and the Monte Carlo engine can evaluate whole grids at once.
"""
import enum
import numbers
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .exceptions import ParameterError

#: tolerance of the probability partition checks
TOLERANCE = 1e-12


class Mode(enum.Enum):
    COMPETITIVE = 'competitive'
    COOPERATIVE = 'cooperative'


class Network(enum.Enum):
    AON = 'aon'
    TON = 'ton'


class Recommendation(enum.Enum):
    """Outcome of the coordination device's coin (heads selects the AON)."""
    HEADS = 'H'
    TAILS = 'T'


class SlotKind(enum.IntEnum):
    IDLE = 0
    SUCCESS_AON = 1
    SUCCESS_TON = 2
    COLLISION = 3


def _check_probability(name, value):
    array = np.asarray(value, dtype=float)
    if not np.all((array >= 0.0) & (array <= 1.0)):
        raise ParameterError('%s must lie in [0, 1], got %r' % (name, value))


def _check_count(name, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ParameterError('%s must be a positive integer, got %r' % (name, value))


@dataclass(frozen=True)
class SlotLengths:
    sigma_idle: float
    sigma_success: float
    sigma_collision: float

    def __post_init__(self):
        for name in ('sigma_idle', 'sigma_success', 'sigma_collision'):
            value = getattr(self, name)
            if not value > 0:
                raise ParameterError('%s must be positive, got %r' % (name, value))
        if not self.sigma_idle < self.sigma_success:
            raise ParameterError(
                'idle slot (%r) must be shorter than a successful slot (%r)'
                % (self.sigma_idle, self.sigma_success))

    @classmethod
    def from_beta(cls, beta, collision_ratio):
        """Idle slot of length beta, unit packets, collision slot scaled from success."""
        sigma_success = 1.0 + beta
        return cls(beta, sigma_success, collision_ratio * sigma_success)

    @property
    def collision_ratio(self):
        return self.sigma_collision / self.sigma_success

    def mean_length(self, probs):
        """Expected slot length p_I*sigma_I + p_S*sigma_S + p_C*sigma_C."""
        return (probs.p_idle * self.sigma_idle
                + probs.p_success_total * self.sigma_success
                + probs.p_collision * self.sigma_collision)


@dataclass(frozen=True)
class NetworkSizes:
    n_aon: int
    n_ton: int

    def __post_init__(self):
        _check_count('n_aon', self.n_aon)
        _check_count('n_ton', self.n_ton)


@dataclass(frozen=True)
class ScenarioParams:
    sizes: NetworkSizes
    slots: SlotLengths
    rate: float = 1.0
    alpha: float = 0.9
    p_r: float = 0.5
    initial_age: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError('alpha must lie in (0, 1), got %r' % (self.alpha,))
        _check_probability('p_r', self.p_r)
        if not self.rate > 0:
            raise ParameterError('rate must be positive, got %r' % (self.rate,))
        if self.initial_age is None:
            # a fresh update delivered in a successful slot
            object.__setattr__(self, 'initial_age', self.slots.sigma_success)
        elif not self.initial_age >= 0:
            raise ParameterError('initial_age must be >= 0, got %r' % (self.initial_age,))


@dataclass(frozen=True)
class AccessProfile:
    """Per-node transmit probabilities of the two networks (scalars or arrays)."""
    tau_aon: float
    tau_ton: float

    def __post_init__(self):
        _check_probability('tau_aon', self.tau_aon)
        _check_probability('tau_ton', self.tau_ton)


@dataclass(frozen=True)
class ActionProfile:
    """Stage action of each network: access (A) when true, back off (B) otherwise."""
    aon_access: bool
    ton_access: bool

    def __str__(self):
        return '(%s,%s)' % ('A' if self.aon_access else 'B',
                            'A' if self.ton_access else 'B')


@dataclass(frozen=True, eq=False)
class SlotProbabilities:
    p_idle: float
    p_success_total: float
    p_success_node_aon: float
    p_success_node_ton: float
    p_busy_aon: float
    p_busy_ton: float
    p_collision: float

    def fields(self):
        return (self.p_idle, self.p_success_total, self.p_success_node_aon,
                self.p_success_node_ton, self.p_busy_aon, self.p_busy_ton,
                self.p_collision)

    def __eq__(self, other):
        if not isinstance(other, SlotProbabilities):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.fields(), other.fields()))

    def check(self, sizes, tolerance=TOLERANCE):
        """Raise ParameterError unless every partition invariant holds."""
        for value in self.fields():
            array = np.asarray(value)
            if np.any(array < -tolerance) or np.any(array > 1 + tolerance):
                raise ParameterError('slot probability outside [0, 1]: %r' % (value,))
        total = self.p_idle + self.p_success_total + self.p_collision
        aon = self.p_success_node_aon + self.p_busy_aon + self.p_idle + self.p_collision
        ton = self.p_success_node_ton + self.p_busy_ton + self.p_idle + self.p_collision
        split = (sizes.n_aon * self.p_success_node_aon
                 + sizes.n_ton * self.p_success_node_ton)
        for label, value, expected in (('slot', total, 1.0), ('aon node', aon, 1.0),
                                       ('ton node', ton, 1.0),
                                       ('success split', split, self.p_success_total)):
            if np.any(np.abs(np.asarray(value) - expected) > tolerance):
                raise ParameterError('%s partition violated' % label)
        return self


def _silent(tau, n):
    """Probability that none of n nodes transmits."""
    return (1.0 - tau) ** n


def _alone(tau, n):
    """Probability that a given node transmits and its n-1 peers stay silent.

    Evaluated on the exact power, so tau in {0, 1} needs no limit argument:
    for n == 1 the peer term is 1 and for tau == 1, n > 1 it is 0.
    """
    return tau * (1.0 - tau) ** (n - 1)


def _assemble(sizes, p_idle, node_aon, node_ton):
    n_aon, n_ton = sizes.n_aon, sizes.n_ton
    p_success = n_aon * node_aon + n_ton * node_ton
    p_collision = np.clip(1.0 - p_success - p_idle, 0.0, 1.0)
    if np.ndim(p_collision) == 0:
        p_collision = float(p_collision)
    return SlotProbabilities(
        p_idle=p_idle,
        p_success_total=p_success,
        p_success_node_aon=node_aon,
        p_success_node_ton=node_ton,
        p_busy_aon=(n_aon - 1) * node_aon + n_ton * node_ton,
        p_busy_ton=(n_ton - 1) * node_ton + n_aon * node_aon,
        p_collision=p_collision,
    )


def slot_probabilities_competitive(sizes, profile):
    """Both networks contend in the same slot."""
    tau_a, tau_t = profile.tau_aon, profile.tau_ton
    _check_probability('tau_aon', tau_a)
    _check_probability('tau_ton', tau_t)
    silent_a = _silent(tau_a, sizes.n_aon)
    silent_t = _silent(tau_t, sizes.n_ton)
    return _assemble(sizes,
                     p_idle=silent_a * silent_t,
                     node_aon=_alone(tau_a, sizes.n_aon) * silent_t,
                     node_ton=_alone(tau_t, sizes.n_ton) * silent_a)


def slot_probabilities_cooperative(sizes, profile, p_r):
    """The device grants the slot to the AON with probability p_r, else to the TON."""
    tau_a, tau_t = profile.tau_aon, profile.tau_ton
    _check_probability('tau_aon', tau_a)
    _check_probability('tau_ton', tau_t)
    _check_probability('p_r', p_r)
    return _assemble(sizes,
                     p_idle=(p_r * _silent(tau_a, sizes.n_aon)
                             + (1.0 - p_r) * _silent(tau_t, sizes.n_ton)),
                     node_aon=p_r * _alone(tau_a, sizes.n_aon),
                     node_ton=(1.0 - p_r) * _alone(tau_t, sizes.n_ton))


def slot_probabilities_for_actions(sizes, profile, actions):
    """Competitive kernel with the backing-off network silenced."""
    return slot_probabilities_competitive(sizes, AccessProfile(
        profile.tau_aon if actions.aon_access else 0.0,
        profile.tau_ton if actions.ton_access else 0.0))


def expected_node_age(probs, prior_age, slots, network=Network.AON):
    """Expected age of an AON node's update at the end of a slot."""
    if network is not Network.AON:
        raise ParameterError('age is only defined for AON nodes, got %s' % (network,))
    if np.any(np.asarray(prior_age) < 0):
        raise ParameterError('prior age must be >= 0, got %r' % (prior_age,))
    return (1.0 - probs.p_success_node_aon) * prior_age + slots.mean_length(probs)


def expected_network_throughput(probs, slots, rate):
    """Mean over the (identical) TON nodes of the bits delivered in a slot."""
    return probs.p_success_node_ton * slots.sigma_success * rate


@dataclass(frozen=True)
class AgeState:
    ages: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'ages', tuple(float(age) for age in self.ages))

    @classmethod
    def initial(cls, n_aon, initial_age):
        _check_count('n_aon', n_aon)
        return cls((float(initial_age),) * n_aon)

    @property
    def network_age(self):
        return network_age(self)

    def as_array(self):
        return np.array(self.ages, dtype=float)


def network_age(state):
    """Arithmetic mean of the per-node ages."""
    if not state.ages:
        raise ParameterError('age vector is empty')
    return float(np.mean(state.ages))


@dataclass(frozen=True)
class SlotEvent:
    kind: SlotKind
    node: Optional[int] = None

    @classmethod
    def idle(cls):
        return cls(SlotKind.IDLE)

    @classmethod
    def collision(cls):
        return cls(SlotKind.COLLISION)

    @classmethod
    def success_aon(cls, node):
        return cls(SlotKind.SUCCESS_AON, node)

    @classmethod
    def success_ton(cls, node):
        return cls(SlotKind.SUCCESS_TON, node)


class SlotDraw(NamedTuple):
    """Outcome of one slot in each run of a batch."""
    kinds: np.ndarray
    nodes: np.ndarray
    aon_transmitters: np.ndarray
    ton_transmitters: np.ndarray


def sample_slot_batch(rng, sizes, tau_aon, tau_ton, aon_on=None, ton_on=None):
    """Realize one slot per run from independent per-node Bernoulli draws.

    ``tau_aon``/``tau_ton`` hold one probability per run; ``aon_on``/``ton_on``
    mask the networks allowed to contend. One uniform per node is consumed
    whether or not its network is eligible, which keeps the random streams of
    branches with different action profiles aligned.
    """
    tau_aon = np.atleast_1d(np.asarray(tau_aon, dtype=float))
    tau_ton = np.atleast_1d(np.asarray(tau_ton, dtype=float))
    batch = max(tau_aon.shape[0], tau_ton.shape[0])
    tau_aon = np.broadcast_to(tau_aon, (batch,))
    tau_ton = np.broadcast_to(tau_ton, (batch,))
    aon_on = np.ones(batch, bool) if aon_on is None else np.broadcast_to(aon_on, (batch,))
    ton_on = np.ones(batch, bool) if ton_on is None else np.broadcast_to(ton_on, (batch,))
    return classify_slot_batch(rng.random((batch, sizes.n_aon)), rng.random((batch, sizes.n_ton)),
                               tau_aon, tau_ton, aon_on, ton_on)


def classify_slot_batch(draws_aon, draws_ton, tau_aon, tau_ton, aon_on, ton_on):
    """Slot outcome per run from given uniforms, one column per node."""
    batch = draws_aon.shape[0]
    tx_aon = (draws_aon < tau_aon[:, None]) & aon_on[:, None]
    tx_ton = (draws_ton < tau_ton[:, None]) & ton_on[:, None]
    count_aon = tx_aon.sum(axis=1)
    count_ton = tx_ton.sum(axis=1)
    total = count_aon + count_ton

    kinds = np.full(batch, SlotKind.COLLISION, dtype=np.int8)
    kinds[total == 0] = SlotKind.IDLE
    solo = total == 1
    kinds[solo & (count_aon == 1)] = SlotKind.SUCCESS_AON
    kinds[solo & (count_ton == 1)] = SlotKind.SUCCESS_TON

    nodes = np.full(batch, -1, dtype=np.int64)
    aon_rows = kinds == SlotKind.SUCCESS_AON
    ton_rows = kinds == SlotKind.SUCCESS_TON
    nodes[aon_rows] = np.argmax(tx_aon[aon_rows], axis=1)
    nodes[ton_rows] = np.argmax(tx_ton[ton_rows], axis=1)
    return SlotDraw(kinds, nodes, count_aon, count_ton)


def sample_slot(rng, sizes, profile, recommendation=None):
    """Draw one slot; ``recommendation`` None means both networks compete."""
    aon_on = recommendation is None or recommendation is Recommendation.HEADS
    ton_on = recommendation is None or recommendation is Recommendation.TAILS
    draw = sample_slot_batch(rng, sizes, profile.tau_aon, profile.tau_ton,
                             np.array([aon_on]), np.array([ton_on]))
    kind = SlotKind(int(draw.kinds[0]))
    if kind in (SlotKind.SUCCESS_AON, SlotKind.SUCCESS_TON):
        return SlotEvent(kind, int(draw.nodes[0]))
    return SlotEvent(kind)


def advance_ages(ages, kinds, nodes, slots):
    """Apply one realized slot per row of ``ages`` in place."""
    increment = np.where(kinds == SlotKind.IDLE, slots.sigma_idle,
                         np.where(kinds == SlotKind.COLLISION, slots.sigma_collision,
                                  slots.sigma_success))
    ages += increment[:, None]
    rows = np.nonzero(kinds == SlotKind.SUCCESS_AON)[0]
    ages[rows, nodes[rows]] = slots.sigma_success
    return ages


def apply_slot(state, event, slots):
    """Age update of one slot; a successful AON node resets to sigma_S."""
    n_aon = len(state.ages)
    if event.kind is SlotKind.SUCCESS_AON and not 0 <= event.node < n_aon:
        raise ParameterError('AON node %r outside 0..%d' % (event.node, n_aon - 1))
    ages = state.as_array()[None, :]
    node = -1 if event.node is None else event.node
    advance_ages(ages, np.array([event.kind]), np.array([node]), slots)
    return AgeState(tuple(ages[0]))
