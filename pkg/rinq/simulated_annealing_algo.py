""" The Simulated Annealing (recuit simulé) algorithm over QUBO matrices, and its brute force oracle """
import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .const import *  # pylint: disable=wildcard-import, unused-wildcard-import
from .qubo import QuboMatrix, qubo_energy

_LOGGER = logging.getLogger(__name__)

DEBUG = False


@dataclass(frozen=True)
class AnnealSchedule:
    """The parameters of an anneal. jobs only changes the speed, never the result"""

    beta_min: float = DEFAULT_BETA_MIN
    beta_max: float = DEFAULT_BETA_MAX
    sweeps: int = DEFAULT_SWEEPS
    reads: int = DEFAULT_READS
    interpolation: str = DEFAULT_INTERPOLATION
    seed: int = DEFAULT_SEED
    jobs: int = DEFAULT_JOBS

    def __post_init__(self):
        if not 0 < self.beta_min < self.beta_max:
            raise UsageError(f"expected 0 < beta_min < beta_max, got {self.beta_min} and {self.beta_max}", stage=STAGE_ANNEAL)
        if self.sweeps < 1 or self.reads < 1:
            raise UsageError(f"sweeps and reads must be >= 1, got {self.sweeps} and {self.reads}", stage=STAGE_ANNEAL)
        if self.interpolation not in INTERPOLATIONS:
            raise UsageError(f"unknown interpolation '{self.interpolation}' (expected one of {INTERPOLATIONS})", stage=STAGE_ANNEAL)
        if self.seed < 0:
            raise UsageError(f"the seed must be >= 0, got {self.seed}", stage=STAGE_ANNEAL)

    @classmethod
    def from_config(cls, config: dict) -> "AnnealSchedule":
        """Build a schedule from a validated schedule_schema mapping"""
        return cls(
            beta_min=config[CONF_BETA_MIN],
            beta_max=config[CONF_BETA_MAX],
            sweeps=config[CONF_SWEEPS],
            reads=config[CONF_READS],
            interpolation=config[CONF_INTERPOLATION],
            seed=config[CONF_SEED],
            jobs=config[CONF_JOBS],
        )

    def betas(self) -> np.ndarray:
        """One nondecreasing beta per sweep"""
        if self.sweeps == 1:
            return np.array([self.beta_max])
        if self.interpolation == INTERPOLATION_LINEAR:
            return np.linspace(self.beta_min, self.beta_max, self.sweeps)
        return np.geomspace(self.beta_min, self.beta_max, self.sweeps)

    def as_dict(self) -> dict:
        """The schedule provenance (jobs excluded since it does not change results)"""
        return {
            CONF_BETA_MIN: self.beta_min,
            CONF_BETA_MAX: self.beta_max,
            CONF_SWEEPS: self.sweeps,
            CONF_READS: self.reads,
            CONF_INTERPOLATION: self.interpolation,
            CONF_SEED: self.seed,
        }


@dataclass(frozen=True)
class Sample:
    """A distinct final state with its energy and the number of reads which ended in it"""

    bits: tuple[int, ...]
    energy: float
    occurrences: int = 1

    @property
    def popcount(self) -> int:
        """The number of selected variables"""
        return sum(self.bits)

    @property
    def selected(self) -> list[int]:
        """The selected indexes"""
        return [i for i, b in enumerate(self.bits) if b]

    @property
    def bitstring(self) -> str:
        """bits rendered index-0-first"""
        return bits_to_string(self.bits)


def sample_order_key(sample: Sample) -> tuple:
    """Canonical order: energy, then the lexicographically smallest selection"""
    return (sample.energy, selection_key(sample.bits))


@dataclass(frozen=True)
class SampleSet:
    """Distinct samples in canonical order"""

    samples: tuple[Sample, ...]
    schedule: AnnealSchedule | None
    qubo_digest: str
    num_reads: int = 0
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.samples)

    def first(self) -> Sample | None:
        """The lowest energy sample"""
        return self.samples[0] if self.samples else None

    def lowest(self, k: int) -> list[Sample]:
        """The k lowest energy distinct samples"""
        return list(self.samples[:k])

    def valid_fraction(self, tau: int) -> float:
        """The share of reads ending with exactly tau selected variables"""
        total = sum(sample.occurrences for sample in self.samples)
        if total == 0:
            return 0.0
        return sum(sample.occurrences for sample in self.samples if sample.popcount == tau) / total

    def to_dict(self) -> dict:
        """The JSON document of the sample set"""
        return {
            "qubo_digest": self.qubo_digest,
            "schedule": self.schedule.as_dict() if self.schedule else None,
            "num_reads": self.num_reads,
            "samples": [{"bits": s.bitstring, "energy": s.energy, "occurrences": s.occurrences} for s in self.samples],
        }

    def to_json(self) -> str:
        """Serialize to JSON"""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _block_sizes(reads: int, block: int) -> list[int]:
    return [min(block, reads - start) for start in range(0, reads, block)]


def _anneal_block(entries: np.ndarray, betas: np.ndarray, num_reads: int, seed_sequence: np.random.SeedSequence, check_energy_delta: bool) -> np.ndarray:
    """Anneal num_reads independent reads. Returns their final states, one per row"""
    rng = np.random.default_rng(seed_sequence)
    n = entries.shape[0]
    diagonal = np.diag(entries)
    reads = np.arange(num_reads)

    states = rng.integers(0, 2, size=(num_reads, n)).astype(np.float64)
    # fields[r, i] = (Q x_r)_i, kept up to date on every accepted flip
    fields = states @ entries

    for sweep, beta in enumerate(betas):
        order = rng.permuted(np.tile(np.arange(n), (num_reads, 1)), axis=1)
        for step in range(n):
            variables = order[:, step]
            delta = 1.0 - 2.0 * states[reads, variables]
            energy_delta = 2.0 * delta * fields[reads, variables] + diagonal[variables]
            threshold = rng.random(num_reads)
            accept = (energy_delta <= 0) | (threshold < np.exp(-beta * np.maximum(energy_delta, 0.0)))

            accepted = np.flatnonzero(accept)
            if accepted.size == 0:
                continue

            flipped = variables[accepted]
            signs = delta[accepted]
            if check_energy_delta:
                before = np.einsum("ri,ij,rj->r", states[accepted], entries, states[accepted])

            states[accepted, flipped] += signs
            fields[accepted] += signs[:, None] * entries[flipped]

            if check_energy_delta:
                after = np.einsum("ri,ij,rj->r", states[accepted], entries, states[accepted])
                assert np.allclose(after - before, energy_delta[accepted], rtol=0, atol=1e-9), "incremental energy delta differs from the full evaluation"

        if DEBUG:
            _LOGGER.debug("sweep %d beta=%.4f mean energy=%.4f", sweep, beta, float(np.einsum("ri,ri->r", states, fields).mean()))

    return states.astype(np.int8)


class SimulatedAnnealingAlgorithm:
    """The class which implements Metropolis simulated annealing over a QUBO"""

    _schedule: AnnealSchedule
    _reads_per_block: int
    _check_energy_delta: bool

    def __init__(self, schedule: AnnealSchedule, reads_per_block: int = DEFAULT_READS_PER_BLOCK, check_energy_delta: bool = False):
        """Initialize the algorithm with a schedule

        Args:
            schedule: the beta range, the number of sweeps and reads and the master seed
            reads_per_block: reads annealed together from one RNG substream. It does not depend on the number of jobs
            check_energy_delta: if True, check every accepted incremental energy delta against a full evaluation
        """
        if reads_per_block < 1:
            raise UsageError(f"reads_per_block must be >= 1, got {reads_per_block}", stage=STAGE_ANNEAL)
        self._schedule = schedule
        self._reads_per_block = reads_per_block
        self._check_energy_delta = check_energy_delta
        _LOGGER.info(
            "Initializing the SimulatedAnnealingAlgorithm with beta_min=%.2f beta_max=%.2f sweeps=%d reads=%d interpolation=%s seed=%d jobs=%d",
            schedule.beta_min,
            schedule.beta_max,
            schedule.sweeps,
            schedule.reads,
            schedule.interpolation,
            schedule.seed,
            schedule.jobs,
        )

    @property
    def schedule(self) -> AnnealSchedule:
        """The schedule of the algorithm"""
        return self._schedule

    def anneal(self, qubo: QuboMatrix) -> SampleSet:
        """Run all the reads and return the merged distinct final states"""
        entries = np.ascontiguousarray(qubo.entries, dtype=np.float64)
        if entries.shape[0] < 1:
            raise UsageError("cannot anneal an empty QUBO", stage=STAGE_ANNEAL)

        betas = self._schedule.betas()
        sizes = _block_sizes(self._schedule.reads, self._reads_per_block)
        seeds = np.random.SeedSequence(self._schedule.seed).spawn(len(sizes))

        blocks = Parallel(n_jobs=self._schedule.jobs)(
            delayed(_anneal_block)(entries, betas, size, seed, self._check_energy_delta) for size, seed in zip(sizes, seeds)
        )
        states, counts = np.unique(np.concatenate(blocks), axis=0, return_counts=True)

        samples = [Sample(bits=tuple(int(b) for b in state), energy=qubo_energy(entries, state), occurrences=int(count)) for state, count in zip(states, counts)]
        samples.sort(key=sample_order_key)

        sample_set = SampleSet(samples=tuple(samples), schedule=self._schedule, qubo_digest=qubo.digest(), num_reads=self._schedule.reads)
        best = sample_set.first()
        _LOGGER.info("Anneal finished: %d reads, %d distinct samples, lowest energy %.6f", self._schedule.reads, len(samples), best.energy)
        return sample_set


def anneal(qubo: QuboMatrix, schedule: AnnealSchedule) -> SampleSet:
    """Anneal qubo with schedule"""
    return SimulatedAnnealingAlgorithm(schedule).anneal(qubo)


def _best_of(candidates) -> Sample | None:
    """Lowest energy, ties (within ENERGY_TIE_TOL) broken by the lexicographically smallest selection"""
    candidates = list(candidates)
    if not candidates:
        return None
    lowest = min(sample.energy for sample in candidates)
    tied = [sample for sample in candidates if sample.energy - lowest <= ENERGY_TIE_TOL]
    return min(tied, key=lambda sample: selection_key(sample.bits))


def filter_valid(samples: SampleSet, tau: int) -> Sample | None:
    """The best sample with exactly tau selected variables, None when there is none"""
    best = _best_of(sample for sample in samples.samples if sample.popcount == tau)
    if best is None:
        _LOGGER.warning("No sample with exactly %d selected variables among %d distinct samples", tau, len(samples.samples))
    return best


def _chunks(iterable, size: int):
    iterator = iter(iterable)
    while chunk := list(itertools.islice(iterator, size)):
        yield chunk


def brute_force_solve(qubo, tau: int | None = None) -> Sample:
    """Exhaustive minimum over every binary vector, or every vector with tau ones"""
    entries = qubo.entries if isinstance(qubo, QuboMatrix) else np.asarray(qubo, dtype=float)
    n = entries.shape[0]

    best_energy, best_state = math.inf, None
    if tau is None:
        if n > BRUTE_FORCE_MAX_UNCONSTRAINED:
            raise InstanceTooLargeError(f"unconstrained brute force is limited to n <= {BRUTE_FORCE_MAX_UNCONSTRAINED}, got n={n}")
        shifts = np.arange(n)
        for start in range(0, 1 << n, BRUTE_FORCE_CHUNK):
            numbers = np.arange(start, min(start + BRUTE_FORCE_CHUNK, 1 << n), dtype=np.int64)
            states = ((numbers[:, None] >> shifts) & 1).astype(np.float64)
            energies = np.einsum("ri,ij,rj->r", states, entries, states)
            best_energy, best_state = _keep_lowest(best_energy, best_state, energies, states)
    else:
        if not 0 <= tau <= n:
            raise UsageError(f"tau must be between 0 and {n}, got {tau}", stage=STAGE_ANNEAL)
        if math.comb(n, tau) > BRUTE_FORCE_MAX_COMBINATIONS:
            raise InstanceTooLargeError(f"C({n},{tau}) exceeds the brute force limit of {BRUTE_FORCE_MAX_COMBINATIONS}")
        for chunk in _chunks(itertools.combinations(range(n), tau), BRUTE_FORCE_CHUNK):
            states = np.zeros((len(chunk), n))
            if tau:
                index = np.array(chunk)
                states[np.arange(len(chunk))[:, None], index] = 1.0
            energies = np.einsum("ri,ij,rj->r", states, entries, states)
            best_energy, best_state = _keep_lowest(best_energy, best_state, energies, states)

    best = Sample(bits=tuple(int(b) for b in best_state), energy=qubo_energy(entries, best_state.astype(np.int8)))
    _LOGGER.debug("Brute force (n=%d, tau=%s) found energy %.6f", n, tau, best.energy)
    return best


def _keep_lowest(best_energy: float, best_state: np.ndarray | None, energies: np.ndarray, states: np.ndarray):
    """Merge a chunk into the running minimum. Only one state is kept: among those within ENERGY_TIE_TOL
    of the minimum, the one with the lexicographically smallest selection"""
    lowest = min(best_energy, float(energies.min()))
    tied = states[energies <= lowest + ENERGY_TIE_TOL]
    if best_state is not None and best_energy <= lowest + ENERGY_TIE_TOL:
        tied = np.vstack([best_state[None, :], tied])
    # lexsort sorts on its last key first: column 0 of 1 - x must come last
    first = np.lexsort((1.0 - tied).T[::-1])[0]
    return lowest, tied[first].copy()
