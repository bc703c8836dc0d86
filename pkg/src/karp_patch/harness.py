"""Seeded Monte Carlo runs of the AP -> cycle cover -> patching pipeline."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .assignment import solve_assignment, solve_assignment_pruned
from .errors import ConfigError, DegreeInfeasible, Infeasible, Stuck
from .graph import CostKind, CostModel, Topology, degree_bound, generate_instance
from .oracles import BRUTE_FORCE_MAX_N, HELD_KARP_MAX_N, brute_force_ap, held_karp_atsp
from .patching import patch_to_tour, permutation_to_cover, verify_tour

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "trial", "seed", "n", "alpha", "v_ap", "v_tour", "ratio", "nu_c", "n_patches",
    "max_ap_edge_cost", "sum_inv_delta", "max_patch_delta", "outcome", "wall_ms",
)

OK, INFEASIBLE, STUCK = "ok", "infeasible", "stuck"


def cycle_threshold(n: int) -> float:
    """sqrt(n) * (ln n)^3, the high-probability ceiling on AP cycle count."""
    return math.sqrt(n) * math.log(n) ** 3


def edge_threshold(n: int) -> float:
    """(ln n)^4 / n, the high-probability ceiling on costs used by the AP optimum."""
    return math.log(n) ** 4 / n


def expected_cycles_bound(n: int, alpha: float) -> float:
    """4 * sqrt(nu1 * n / alpha) with nu1 = 2 (ln n)^4."""
    nu1 = 2 * math.log(n) ** 4
    return 4 * math.sqrt(nu1 * n / alpha)


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    alpha: float
    trials: int = 1
    seed: int = 0
    cost_model: CostKind = CostKind.UNIFORM01
    topology: Topology = Topology.COMPLETE
    prune: bool = False
    cutoff: float | None = None  # overrides the default (ln n)^4 / n when pruning
    check: bool = False  # cross-check pruned optimum and small-n oracles
    format: str = "csv"
    parallel: int = 1
    timing: bool = True

    def __post_init__(self):
        try:
            object.__setattr__(self, "cost_model", CostKind(self.cost_model))
            object.__setattr__(self, "topology", Topology(self.topology))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not isinstance(self.n, int) or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n!r}")
        if not 0 < self.alpha <= 1:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha}")
        if degree_bound(self.n, self.alpha) > self.n - 1:
            raise ConfigError(f"ceil(alpha*n) exceeds n-1 for n={self.n}, alpha={self.alpha}")
        if self.topology is Topology.HALL_DEFICIENT and 2 * degree_bound(self.n, self.alpha) + 1 > self.n:
            raise ConfigError("hall_deficient topology needs 2*ceil(alpha*n)+1 <= n")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.parallel < 1:
            raise ConfigError(f"parallel must be >= 1, got {self.parallel}")
        if self.cutoff is not None and not self.cutoff > 0:
            raise ConfigError(f"cutoff must be positive, got {self.cutoff}")

    @property
    def effective_cutoff(self) -> float:
        return self.cutoff if self.cutoff is not None else edge_threshold(self.n)


def trial_seed(seed: int, trial: int) -> int:
    """Per-trial seed as a pure function of the experiment seed and trial index."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, dtype=np.uint64)[0])


@dataclass
class TrialRecord:
    trial: int
    seed: int
    n: int
    alpha: float
    outcome: str
    v_ap: float | None = None
    v_tour: float | None = None
    ratio: float | None = None
    nu_c: int | None = None
    n_patches: int | None = None
    max_ap_edge_cost: float | None = None
    sum_inv_delta: float | None = None
    max_patch_delta: float | None = None
    patch_deltas: list[float] = field(default_factory=list)
    wall_ms: int = 0
    # "off", "used" or "fallback" (pruned AP infeasible, unpruned solve used)
    prune_status: str = "off"
    v_ap_unpruned: float | None = None
    v_ap_exact: float | None = None
    v_atsp_exact: float | None = None


def run_trial(config: ExperimentConfig, trial_index: int) -> TrialRecord:
    """Generate one instance and push it through solve, cover, patch and verify.

    Infeasible and stuck instances come back as records with that outcome.
    """
    start = time.perf_counter()
    seed = trial_seed(config.seed, trial_index)
    rec = TrialRecord(trial=trial_index, seed=seed, n=config.n, alpha=config.alpha, outcome=OK)
    try:
        g = generate_instance(
            config.n, config.alpha, CostModel(config.cost_model, seed), config.topology
        )
    except DegreeInfeasible as exc:
        raise ConfigError(str(exc)) from None

    try:
        if config.prune:
            try:
                report = solve_assignment_pruned(g, config.effective_cutoff)
                rec.prune_status = "used"
            except Infeasible:
                rec.prune_status = "fallback"
                report = solve_assignment(g)
            if config.check:
                rec.v_ap_unpruned = solve_assignment(g).matching.cost
        else:
            report = solve_assignment(g)
    except Infeasible:
        rec.outcome = INFEASIBLE
        rec.wall_ms = _elapsed_ms(start, config)
        return rec

    phi = report.matching.phi
    rec.v_ap = math.fsum(g.arc_cost(i, j) for i, j in enumerate(phi))
    rec.max_ap_edge_cost = max(g.arc_cost(i, j) for i, j in enumerate(phi))
    rec.sum_inv_delta = report.sum_inv_delta
    cover = permutation_to_cover(g, phi)
    rec.nu_c = len(cover.cycles)

    if config.check and config.n <= BRUTE_FORCE_MAX_N:
        rec.v_ap_exact = brute_force_ap(g).value
    if config.check and config.n <= HELD_KARP_MAX_N:
        rec.v_atsp_exact = held_karp_atsp(g).value

    try:
        tour, trace = patch_to_tour(g, cover)
    except Stuck as exc:
        rec.outcome = STUCK
        rec.patch_deltas = exc.trace.deltas
        rec.n_patches = len(exc.trace)
        rec.max_patch_delta = max(rec.patch_deltas, default=None)
        rec.wall_ms = _elapsed_ms(start, config)
        return rec

    rec.v_tour = verify_tour(g, tour)
    rec.ratio = rec.v_tour / rec.v_ap
    rec.patch_deltas = trace.deltas
    rec.n_patches = len(trace)
    rec.max_patch_delta = max(rec.patch_deltas, default=None)
    rec.wall_ms = _elapsed_ms(start, config)
    return rec


def _elapsed_ms(start: float, config: ExperimentConfig) -> int:
    return round((time.perf_counter() - start) * 1000) if config.timing else 0


def _describe(values: list[float]) -> dict:
    if not values:
        return {"mean": None, "std": None, "max": None}
    return {
        "mean": statistics.fmean(values),
        "std": statistics.stdev(values) if len(values) > 1 else 0.0,
        "max": max(values),
    }


@dataclass
class Summary:
    n: int
    alpha: float
    trials: int
    ok: int
    infeasible: int
    stuck: int
    prune_fallback: int
    ratio: dict
    nu_c: dict
    max_ap_edge_cost: dict
    sum_inv_delta: dict
    mean_v_ap: float | None
    cycle_threshold: float
    cycle_threshold_exceeded: int
    edge_threshold: float
    edge_threshold_exceeded: int
    expected_cycles_bound: float
    expected_cycles_bound_exceeded: int
    # sample mean of (sum 1/delta_r - nu_c) and its standard error
    inv_delta_gap_mean: float | None
    inv_delta_gap_stderr: float | None
    inv_delta_check: bool | None

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(n: int, alpha: float, records: list[TrialRecord]) -> Summary:
    solved = [r for r in records if r.outcome != INFEASIBLE]
    done = [r for r in records if r.outcome == OK]
    ell0, a0, bound = cycle_threshold(n), edge_threshold(n), expected_cycles_bound(n, alpha)
    gaps = [r.sum_inv_delta - r.nu_c for r in solved]
    gap_mean = statistics.fmean(gaps) if gaps else None
    gap_se = statistics.stdev(gaps) / math.sqrt(len(gaps)) if len(gaps) > 1 else None
    if gap_mean is None:
        check = None
    else:
        check = gap_mean >= -3 * (gap_se or 0.0)
    return Summary(
        n=n,
        alpha=alpha,
        trials=len(records),
        ok=len(done),
        infeasible=sum(r.outcome == INFEASIBLE for r in records),
        stuck=sum(r.outcome == STUCK for r in records),
        prune_fallback=sum(r.prune_status == "fallback" for r in records),
        ratio=_describe([r.ratio for r in done]),
        nu_c=_describe([r.nu_c for r in solved]),
        max_ap_edge_cost=_describe([r.max_ap_edge_cost for r in solved]),
        sum_inv_delta=_describe([r.sum_inv_delta for r in solved]),
        mean_v_ap=statistics.fmean([r.v_ap for r in solved]) if solved else None,
        cycle_threshold=ell0,
        cycle_threshold_exceeded=sum(r.nu_c > ell0 for r in solved),
        edge_threshold=a0,
        edge_threshold_exceeded=sum(r.max_ap_edge_cost > a0 for r in solved),
        expected_cycles_bound=bound,
        expected_cycles_bound_exceeded=sum(r.nu_c > bound for r in solved),
        inv_delta_gap_mean=gap_mean,
        inv_delta_gap_stderr=gap_se,
        inv_delta_check=check,
    )


def _run_one(args):
    return run_trial(*args)


def run_experiment(config: ExperimentConfig) -> tuple[Summary, list[TrialRecord]]:
    jobs = [(config, t) for t in range(config.trials)]
    if config.parallel == 1:
        records = [_run_one(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.parallel) as pool:
            records = list(pool.map(_run_one, jobs))
    records.sort(key=lambda r: r.trial)
    summary = summarize(config.n, config.alpha, records)
    log.info(
        "n=%d alpha=%g: %d ok, %d infeasible, %d stuck",
        config.n, config.alpha, summary.ok, summary.infeasible, summary.stuck,
    )
    return summary, records


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit(records: list[TrialRecord], format: str = "csv") -> bytes:
    """Serialize records ordered by trial index.

    CSV has the fixed :data:`CSV_COLUMNS` with floats at 12 significant
    digits; JSON carries every field at full precision.
    """
    records = sorted(records, key=lambda r: r.trial)
    if format == "json":
        return json.dumps([asdict(r) for r in records], indent=1).encode()
    if format != "csv":
        raise ConfigError(f"unknown format {format!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([_fmt(getattr(r, col)) for col in CSV_COLUMNS])
    return buf.getvalue().encode()


def load_records(data: bytes) -> list[TrialRecord]:
    """Inverse of ``emit(records, "json")``."""
    names = {f.name for f in fields(TrialRecord)}
    return [TrialRecord(**{k: v for k, v in d.items() if k in names}) for d in json.loads(data)]
