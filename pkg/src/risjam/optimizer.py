"""
Genetic-algorithm solver for constrained energy-efficiency maximization.

Decision variables are the per-user transmit powers, per-element RIS phases
and amplification factors, the blocklength and the replica count. The
objective is to minimize 1/eta subject to the URLLC delay and reliability
thresholds, queue stability, SIC power ordering and box bounds.

Constraint handling is feasibility dominance: a feasible candidate always
outranks an infeasible one, feasible candidates compare by objective and
infeasible ones by total constraint violation. Box bounds hold by
construction of the genome decoding, so they never appear as residuals.
"""

from dataclasses import dataclass

import numpy as np

from .link import BeamformConfig, PowerAllocation, co_phasing_phases
from .model import SystemModel, MetricsReport

# Stand-in objective when the metric chain yields no usable efficiency
# (unstable queue or zero reliability). Large but finite so ranking
# arithmetic stays well defined.
INFEASIBLE_OBJECTIVE = 1e30

# Strictness margin for the rho_k < 1 constraint: the residual activates at
# rho = 1 - STRICT_MARGIN so that rho == 1 is never accepted as feasible.
STRICT_MARGIN = 1e-9

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ConstraintSet:
    """Thresholds and box bounds of the optimization problem.

    ``p_min``/``nb_min``/``nb_max`` bound the search box for quantities whose
    lower/upper limits the problem statement leaves open (powers must merely
    be positive, blocklength merely a positive integer).
    """

    delay_thr: float = 1e-3
    rel_thr: float = 0.99999
    beta_max: float = 100.0
    p_max: float = 0.1
    l_max: int = 10
    p_min: float = 1e-6
    nb_min: int = 1
    nb_max: int = 1000

    def __post_init__(self):
        if self.delay_thr <= 0 or self.beta_max <= 0 or self.p_max <= 0:
            raise ValueError("thresholds and bounds must be positive")
        if not 0 < self.rel_thr < 1:
            raise ValueError("reliability threshold must lie in (0, 1)")
        if self.l_max < 1:
            raise ValueError("maximum retransmission count must be at least 1")
        if not 0 < self.p_min <= self.p_max:
            raise ValueError("need 0 < p_min <= p_max")
        if not 1 <= self.nb_min <= self.nb_max:
            raise ValueError("need 1 <= nb_min <= nb_max")


@dataclass(frozen=True)
class GaSettings:
    """Population, operator and stopping configuration of the GA.

    ``mutation_rate`` of None means one expected mutation per genome
    (1/dimension). Tolerances below machine epsilon request exact
    feasibility and disable stall detection.
    """

    population_size: int = 200
    max_generations: int = 100
    crossover_rate: float = 0.9
    mutation_rate: float | None = None
    elite_count: int = 2
    rng_seed: int = 12345
    constraint_tolerance: float = 1e-30
    function_tolerance: float = 1e-30
    co_phasing_fraction: float = 0.1
    mutation_sigma: float = 0.1
    mutation_decay: float = 0.99
    stall_generations: int = 50

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population must not be empty")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError("elite count must be smaller than the population")
        if self.max_generations < 0:
            raise ValueError("generation count must be non-negative")
        if not 0 <= self.crossover_rate <= 1:
            raise ValueError("crossover rate must be a probability")
        if self.mutation_rate is not None and not 0 <= self.mutation_rate <= 1:
            raise ValueError("mutation rate must be a probability")
        if not 0 <= self.co_phasing_fraction <= 1:
            raise ValueError("co-phasing seed fraction must be a probability")
        if self.constraint_tolerance < 0 or self.function_tolerance < 0:
            raise ValueError("tolerances must be non-negative")


@dataclass(frozen=True)
class DecisionVector:
    """One decoded operating point of the network."""

    user_powers: tuple[float, ...]
    phases: tuple[float, ...]
    amplitudes: tuple[float, ...]
    blocklength: int
    retransmissions: int

    @property
    def dimension(self) -> int:
        return len(self.user_powers) + 2 * len(self.phases) + 2


@dataclass
class OptimizationResult:
    best_solution: DecisionVector
    best_eta: float | None
    best_objective: float
    fitness_history: list[float]
    mean_history: list[float]
    feasible_fraction_history: list[float]
    feasible: bool
    constraint_violations: dict[str, float]
    best_report: MetricsReport
    generations_run: int


# ----------------------------------------------------------------------------
#  Genome encoding
# ----------------------------------------------------------------------------
# Layout: [powers (K) | phases (N) | amplitudes (N) | blocklength | replicas],
# every gene normalized to [0, 1] and affinely mapped to its bounds at decode.

def genome_dimension(n_users: int, n_elements: int) -> int:
    return n_users + 2 * n_elements + 2


def decode(genome: np.ndarray, n_users: int, n_elements: int,
           constraints: ConstraintSet) -> DecisionVector:
    """Map a normalized genome to a decision vector inside all box bounds."""
    k, n = n_users, n_elements
    if genome.shape != (genome_dimension(k, n),):
        raise ValueError("genome length does not match problem dimension")
    g = np.clip(genome, 0.0, 1.0)

    powers = np.minimum(constraints.p_min + g[:k] * (constraints.p_max - constraints.p_min),
                        constraints.p_max)
    phases = np.minimum(g[k:k + n] * TWO_PI, TWO_PI)
    amplitudes = np.minimum(g[k + n:k + 2 * n] * constraints.beta_max,
                            constraints.beta_max)

    nb_span = constraints.nb_max - constraints.nb_min
    blocklength = constraints.nb_min + int(np.floor(g[k + 2 * n] * nb_span + 0.5))
    blocklength = min(max(blocklength, constraints.nb_min), constraints.nb_max)

    l_span = constraints.l_max - 1
    retransmissions = 1 + int(np.floor(g[k + 2 * n + 1] * l_span + 0.5))
    retransmissions = min(max(retransmissions, 1), constraints.l_max)

    return DecisionVector(
        user_powers=tuple(float(p) for p in powers),
        phases=tuple(float(t) for t in phases),
        amplitudes=tuple(float(b) for b in amplitudes),
        blocklength=blocklength,
        retransmissions=retransmissions,
    )


# ----------------------------------------------------------------------------
#  Fitness and ranking
# ----------------------------------------------------------------------------

def evaluate_fitness(x: DecisionVector, model: SystemModel,
                     constraints: ConstraintSet) -> tuple[float, dict[str, float]]:
    """Objective 1/eta and non-negative residuals of the coupled constraints.

    An unstable queue is not an error here: it yields the large finite
    stand-in objective plus a positive utilization residual, so the search
    can still rank such candidates.
    """
    beam = BeamformConfig(np.asarray(x.amplitudes), np.asarray(x.phases))
    powers = PowerAllocation(x.user_powers)
    report = model.evaluate(beam, powers, x.blocklength, x.retransmissions)

    violations = {
        "delay": sum(max(0.0, tau - constraints.delay_thr)
                     for tau in report.mean_delay if tau is not None),
        "reliability": sum(max(0.0, constraints.rel_thr - rel)
                           for rel in report.reliability),
        "utilization": sum(max(0.0, rho - (1.0 - STRICT_MARGIN))
                           for rho in report.utilization),
        "power_ordering": sum(max(0.0, x.user_powers[i] - x.user_powers[i + 1])
                              for i in range(len(x.user_powers) - 1)),
    }

    if report.energy_efficiency is None or report.energy_efficiency <= 0.0:
        objective = INFEASIBLE_OBJECTIVE
    else:
        objective = min(1.0 / report.energy_efficiency, INFEASIBLE_OBJECTIVE)
    return objective, violations


def _dominance_key(objective: float, total_violation: float,
                   tolerance: float) -> tuple[int, float]:
    if total_violation <= tolerance:
        return (0, objective)
    return (1, total_violation)


def rank(objectives, total_violations, tolerance: float) -> list[int]:
    """Feasibility-dominance ordering of a population, best first.

    Any candidate within the constraint tolerance outranks every infeasible
    one; feasible candidates compare by objective, infeasible ones by total
    violation; exact ties keep the lower index first.
    """
    keys = [_dominance_key(o, v, tolerance)
            for o, v in zip(objectives, total_violations)]
    return sorted(range(len(keys)), key=lambda i: keys[i])  # stable sort


def _merit(objective: float, total_violation: float, tolerance: float) -> float:
    """Scalar ranking value recorded in the convergence trace.

    Equals the objective once feasible; infeasible candidates sit above
    every feasible one by construction, ordered by violation.
    """
    if total_violation <= tolerance:
        return objective
    return INFEASIBLE_OBJECTIVE + total_violation


# ----------------------------------------------------------------------------
#  GA driver
# ----------------------------------------------------------------------------

class _Evaluated:
    __slots__ = ("objective", "violations", "total")

    def __init__(self, objective: float, violations: dict[str, float]):
        self.objective = objective
        self.violations = violations
        self.total = sum(violations.values())


def _evaluate_population(pop: np.ndarray, model: SystemModel,
                         constraints: ConstraintSet) -> list[_Evaluated]:
    out = []
    for genome in pop:
        x = decode(genome, model.n_users, model.n_elements, constraints)
        objective, violations = evaluate_fitness(x, model, constraints)
        out.append(_Evaluated(objective, violations))
    return out


def run_ga(model: SystemModel, constraints: ConstraintSet,
           settings: GaSettings) -> OptimizationResult:
    """Evolve a population and return the best-ranked operating point.

    Tournament selection of size 2 under the dominance rule, uniform
    crossover, Gaussian mutation with decaying spread; phase genes wrap,
    all others clip to their box. The same seed reproduces the run bit for
    bit; with at least one elite the recorded best value never worsens.
    """
    k, n = model.n_users, model.n_elements
    dim = genome_dimension(k, n)
    rng = np.random.default_rng(settings.rng_seed)
    mutation_rate = settings.mutation_rate if settings.mutation_rate is not None else 1.0 / dim
    tol = settings.constraint_tolerance
    eps = float(np.finfo(float).eps)
    stall_enabled = settings.function_tolerance >= eps

    pop = rng.random((settings.population_size, dim))
    n_seeded = int(round(settings.co_phasing_fraction * settings.population_size))
    for i in range(min(n_seeded, settings.population_size)):
        user = (i % k) + 1
        aligned = co_phasing_phases(model.bs_channel, model.ue_channels[user - 1])
        pop[i, k:k + n] = aligned / TWO_PI

    evals = _evaluate_population(pop, model, constraints)
    order = rank([e.objective for e in evals], [e.total for e in evals], tol)

    def key_of(e: _Evaluated) -> tuple[int, float]:
        return _dominance_key(e.objective, e.total, tol)

    best_genome = pop[order[0]].copy()
    best_eval = evals[order[0]]

    fitness_history: list[float] = []
    mean_history: list[float] = []
    feasible_fraction_history: list[float] = []

    sigma = settings.mutation_sigma
    stall_count = 0
    generations_run = 0

    for _generation in range(settings.max_generations):
        new_pop = np.empty_like(pop)
        for slot in range(settings.elite_count):
            new_pop[slot] = pop[order[slot]]

        for slot in range(settings.elite_count, settings.population_size):
            i1, i2 = rng.integers(0, settings.population_size, size=2)
            p1 = min(int(i1), int(i2), key=lambda i: (key_of(evals[i]), i))
            j1, j2 = rng.integers(0, settings.population_size, size=2)
            p2 = min(int(j1), int(j2), key=lambda i: (key_of(evals[i]), i))

            if rng.random() < settings.crossover_rate:
                mask = rng.random(dim) < 0.5
                child = np.where(mask, pop[p1], pop[p2])
            else:
                child = pop[p1].copy()

            mutate = rng.random(dim) < mutation_rate
            child = child + mutate * rng.normal(0.0, sigma, dim)
            child[k:k + n] = np.mod(child[k:k + n], 1.0)  # phases wrap
            child[:k] = np.clip(child[:k], 0.0, 1.0)
            child[k + n:] = np.clip(child[k + n:], 0.0, 1.0)
            new_pop[slot] = child

        pop = new_pop
        evals = _evaluate_population(pop, model, constraints)
        order = rank([e.objective for e in evals], [e.total for e in evals], tol)
        generations_run += 1
        sigma *= settings.mutation_decay

        gen_best = evals[order[0]]
        if key_of(gen_best) < key_of(best_eval):
            best_eval = gen_best
            best_genome = pop[order[0]].copy()

        best_merit = _merit(best_eval.objective, best_eval.total, tol)
        prev = fitness_history[-1] if fitness_history else None
        fitness_history.append(best_merit)
        mean_history.append(float(np.mean([_merit(e.objective, e.total, tol)
                                           for e in evals])))
        feasible_fraction_history.append(
            float(np.mean([e.total <= tol for e in evals])))

        if stall_enabled:
            if prev is not None and prev - best_merit < settings.function_tolerance:
                stall_count += 1
            else:
                stall_count = 0
            if stall_count >= settings.stall_generations:
                break

    best = decode(best_genome, k, n, constraints)
    objective, violations = evaluate_fitness(best, model, constraints)
    beam = BeamformConfig(np.asarray(best.amplitudes), np.asarray(best.phases))
    report = model.evaluate(beam, PowerAllocation(best.user_powers),
                            best.blocklength, best.retransmissions)
    feasible = sum(violations.values()) <= tol

    return OptimizationResult(
        best_solution=best,
        best_eta=report.energy_efficiency,
        best_objective=objective,
        fitness_history=fitness_history,
        mean_history=mean_history,
        feasible_fraction_history=feasible_fraction_history,
        feasible=feasible,
        constraint_violations=violations,
        best_report=report,
        generations_run=generations_run,
    )
