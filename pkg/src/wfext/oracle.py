"""Independent checks: discrete Wright–Fisher Monte Carlo, finite-difference
residuals of the backward equation, and continuity probes across strata."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from wfext.enums import FillPolicy
from wfext.errors import ArgumentError, RangeError
from wfext.extension import PiecewiseSolution
from wfext.hierarchy import GlobalSolution, StratifiedFinalCondition
from wfext.logging import log_stage, logger
from wfext.simplex import Face, PathSpec, SimplexPoint, sample_interior
from wfext.utils.parallel import ordered_map

# Replicates per Philox stream. Part of the stream layout: replicate r is
# row r % STREAM_BLOCK of stream (seed, r // STREAM_BLOCK).
STREAM_BLOCK = 1000
DEFAULT_EPSILONS = (1e-3, 1e-4, 1e-5)


@dataclass(frozen=True)
class MCConfig:
    """Discrete Wright–Fisher run: N individuals for round(horizon * N) generations"""

    pop_size: int
    p0: SimplexPoint
    horizon: float
    replicates: int
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 2:
            raise RangeError(f"Population size must be at least 2, got {self.pop_size}.")
        if self.horizon < 0:
            raise RangeError(f"Horizon must be nonnegative, got {self.horizon}.")
        if self.replicates < 1:
            raise RangeError(f"Need at least one replicate, got {self.replicates}.")

    @property
    def n(self) -> int:
        return self.p0.face.ambient_n

    @property
    def generations(self) -> int:
        return int(round(self.horizon * self.pop_size))

    def initial_counts(self) -> np.ndarray:
        """Allele counts of p0 by the largest-remainder rule"""
        raw = np.array([self.p0.coordinate(label) * self.pop_size for label in range(self.n + 1)])
        counts = np.floor(raw).astype(np.int64)
        remainder = self.pop_size - int(counts.sum())
        order = sorted(range(self.n + 1), key=lambda i: (-(raw[i] - counts[i]), i))
        for i in order[:remainder]:
            counts[i] += 1
        return counts

    def blocks(self) -> list[int]:
        """Streams covering the replicates; the last one is simulated in full and truncated"""
        return list(range(-(-self.replicates // STREAM_BLOCK)))


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    standard_error: float
    replicates: int
    absorbed_fraction_per_stratum: dict[Face, float] = field(default_factory=dict)

    def z_score(self, analytic: float) -> float:
        gap = self.mean - analytic
        if self.standard_error == 0:
            return 0.0 if gap == 0 else math.copysign(math.inf, gap)
        return gap / self.standard_error

    def fraction_by_dimension(self) -> dict[int, float]:
        result: dict[int, float] = {}
        for face, fraction in self.absorbed_fraction_per_stratum.items():
            result[face.dim] = result.get(face.dim, 0.0) + fraction
        return dict(sorted(result.items()))


def _run_block(cfg: MCConfig, block: int) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint counts and loss generations (-1 while present) of the STREAM_BLOCK replicates of one stream"""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, block])))
    counts = np.tile(cfg.initial_counts(), (STREAM_BLOCK, 1))
    lost_at = np.where(counts == 0, 0, -1)
    for generation in range(1, cfg.generations + 1):
        if np.all(np.count_nonzero(counts, axis=1) == 1):
            break
        counts = rng.multinomial(cfg.pop_size, counts / cfg.pop_size)
        lost_at = np.where((lost_at < 0) & (counts == 0), generation, lost_at)
    return counts, lost_at


def _simulate(cfg: MCConfig, workers: int) -> tuple[np.ndarray, np.ndarray]:
    results = ordered_map(lambda block: _run_block(cfg, block), cfg.blocks(), workers)
    counts = np.concatenate([c for c, _ in results])[: cfg.replicates]
    lost_at = np.concatenate([lost for _, lost in results])[: cfg.replicates]
    return counts, lost_at


def simulate_endpoints(cfg: MCConfig, workers: int = 1) -> np.ndarray:
    """(replicates, n + 1) terminal allele counts"""
    return _simulate(cfg, workers)[0]


def _endpoint(counts: np.ndarray, cfg: MCConfig) -> SimplexPoint:
    labels = tuple(int(i) for i in np.flatnonzero(counts))
    return SimplexPoint(Face(labels, cfg.n), tuple(int(counts[i]) / cfg.pop_size for i in labels))


def simulate_discrete_wf(cfg: MCConfig) -> SimplexPoint:
    """Endpoint of the first trajectory of the run"""
    counts, _ = _run_block(cfg, 0)
    return _endpoint(counts[0], cfg)


def _strata(counts: np.ndarray, n: int) -> dict[Face, np.ndarray]:
    present = counts > 0
    keys = present.astype(np.int64) @ (1 << np.arange(n + 1))
    strata = {}
    for key in np.unique(keys):
        rows = np.flatnonzero(keys == key)
        labels = tuple(i for i in range(n + 1) if (int(key) >> i) & 1)
        strata[Face(labels, n)] = rows
    return strata


def mc_backward_estimate(f: StratifiedFinalCondition, cfg: MCConfig, workers: int = 1) -> MCEstimate:
    """Monte Carlo mean of f at the endpoints; each endpoint uses the component of its own stratum"""
    if f.n != cfg.n:
        raise ArgumentError(f"Final condition has n = {f.n} but the start point has n = {cfg.n}.")
    if f.fill is FillPolicy.EXTEND:
        raise ArgumentError("Inherited final-condition components must be resolved before simulation.")
    counts = simulate_endpoints(cfg, workers)
    values = np.zeros(cfg.replicates)
    fractions = {}
    for face, rows in _strata(counts, cfg.n).items():
        fractions[face] = len(rows) / cfg.replicates
        poly = f.component(face)
        if poly is None or poly.is_zero():
            continue
        chart = counts[np.ix_(rows, face.chart.free_labels)] / cfg.pop_size
        values[rows] = poly.to_float().evaluate(chart)
    mean = float(np.sum(values) / cfg.replicates)
    stderr = float(np.std(values, ddof=1) / math.sqrt(cfg.replicates)) if cfg.replicates > 1 else 0.0
    log_stage(logger, "mc_backward_estimate", replicates=cfg.replicates, pop_size=cfg.pop_size, mean=mean)
    return MCEstimate(mean, stderr, cfg.replicates, fractions)


def mc_loss_order_estimate(cfg: MCConfig, path: PathSpec, workers: int = 1) -> MCEstimate:
    """Frequency of losing i_n, ..., i_1 strictly in that order while i_0 fixes"""
    if not path.base.is_vertex:
        raise ArgumentError(f"Loss orders start from a vertex, got base {path.base}.")
    if path.top != Face.full(cfg.n):
        raise ArgumentError(f"The path must cover all {cfg.n + 1} alleles.")
    counts, lost_at = _simulate(cfg, workers)
    sequence = path.sequence
    fixed = counts[:, path.anchor] == cfg.pop_size
    ordered = np.ones(cfg.replicates, dtype=bool)
    for earlier, later in zip(sequence[1:], sequence[2:]):
        # i_{j+1} must be lost strictly before i_j
        ordered &= (lost_at[:, later] >= 0) & (lost_at[:, later] < lost_at[:, earlier])
    hits = (fixed & ordered).astype(np.float64)
    mean = float(np.sum(hits) / cfg.replicates)
    stderr = math.sqrt(mean * (1 - mean) / cfg.replicates)
    return MCEstimate(mean, stderr, cfg.replicates, {k: len(v) / cfg.replicates for k, v in _strata(counts, cfg.n).items()})


def _solution_surface(solution) -> PiecewiseSolution:
    return solution.total if isinstance(solution, GlobalSolution) else solution


def pde_residual(solution, point: SimplexPoint, t: float, h: float) -> float:
    """Central-difference estimate of -d_t U - L* U in the chart of the point's face"""
    surface = _solution_surface(solution)
    point = point.classify()
    face = Face(point.face.indices, surface.n)
    x = np.array(face.chart.values(point))

    def u(values, time) -> float:
        shifted = np.asarray(values)
        if np.any(shifted <= 0) or math.fsum(shifted) >= 1:
            raise ArgumentError(f"The stencil of width {h} leaves the open face {face} at {list(values)}.")
        return surface.evaluate_chart(face, tuple(float(v) for v in shifted), time)

    if face.is_vertex:
        return -(surface.evaluate_chart(face, (), t + h) - surface.evaluate_chart(face, (), t - h)) / (2 * h)

    center = u(x, t)
    time_derivative = (u(x, t + h) - u(x, t - h)) / (2 * h)
    generator = 0.0
    d = len(x)
    for i in range(d):
        step_i = np.eye(d)[i] * h
        second = (u(x + step_i, t) - 2 * center + u(x - step_i, t)) / h**2
        generator += 0.5 * x[i] * (1 - x[i]) * second
        for j in range(i + 1, d):
            step_j = np.eye(d)[j] * h
            mixed = (
                u(x + step_i + step_j, t)
                - u(x + step_i - step_j, t)
                - u(x - step_i + step_j, t)
                + u(x - step_i - step_j, t)
            ) / (4 * h**2)
            generator -= x[i] * x[j] * mixed
    return -time_derivative - generator


@dataclass(frozen=True)
class ProbeResult:
    """Largest approach gap per offset epsilon"""

    face: Face
    subface: Face
    gaps: dict[float, float]

    @property
    def max_gap(self) -> float:
        return max(self.gaps.values(), default=0.0)


def continuity_probe(
    solution,
    face: Face,
    subface: Face,
    count: int = 20,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    t: float = -1.0,
    seed: int = 0,
    points: Optional[Sequence[SimplexPoint]] = None,
) -> ProbeResult:
    """Compare U at subface points q with U at (1 - eps) q + eps e_s inside ``face``"""
    surface = _solution_surface(solution)
    if subface.dim != face.dim - 1 or not subface.issubset(face):
        raise ArgumentError(f"Face {subface} is not a facet of {face}.")
    (lost,) = [label for label in face.indices if label not in subface]
    rng = np.random.default_rng(seed)
    samples = list(points) if points is not None else [sample_interior(subface, rng) for _ in range(count)]
    gaps = {}
    for eps in epsilons:
        worst = 0.0
        for q in samples:
            inside = {label: (1 - eps) * q.coordinate(label) for label in face.indices}
            inside[lost] = eps
            p = SimplexPoint(face, tuple(inside[label] for label in face.indices))
            worst = max(worst, abs(surface.evaluate(p, t) - surface.evaluate(q, t)))
        gaps[eps] = worst
    return ProbeResult(face, subface, gaps)
