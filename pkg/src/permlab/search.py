"""Numerical maximization of per(I - A) over fixed-sum doubly substochastic matrices.

The ascent runs in floating point on compiled kernels.  Restarts are
independent (each owns a generator seeded with ``seed + r``) and run on a
thread pool; the merge takes the maximum value with the lowest restart index
breaking ties, so results do not depend on scheduling.

``exhaustive_omega3`` is the exact counterpart for n = 3: it scores every
zero-diagonal matrix on a rational grid.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from permlab import _kernels
from permlab.bounds import (
    BRANCH_NOTE,
    COPY_NOTE,
    conjecture_values,
    omega3_a0_value,
    omega3_a1_value,
    theorem_bound,
)
from permlab.errors import OrderGuardError, PreconditionError
from permlab.matrix import Matrix, as_fraction, make_matrix
from permlab.permanent import per_i_minus, permanent_gray

MatrixClass = Literal["doubly_substochastic_fixed_sum", "doubly_stochastic"]
CLASSES = ("doubly_substochastic_fixed_sum", "doubly_stochastic")

SEARCH_MAX_N = 12
EXACT_RESCORE_MAX_N = 12
RATIONAL_GRID = 1 << 20
REPAIR_TOL = 1e-12
REPAIR_MAX_ROUNDS = 1000
GRID_STEP_FLOOR = Fraction(1, 16)


def default_budget(n: int) -> tuple[int, int]:
    """(restarts, steps per restart)."""
    if n <= 6:
        return 64, 20000
    return 32, 60000


@dataclass(frozen=True)
class SearchConfig:
    n: int
    s: float
    matrix_class: MatrixClass = field(default="doubly_substochastic_fixed_sum", metadata={"json": "class"})
    restarts: int = 0  # 0 = default_budget(n)
    steps_per_restart: int = 0
    initial_step: float = 0.5
    step_decay: float = 0.0  # 0 = decay to final_step over the run
    final_step: float = 1e-6
    tolerance: float = 1e-12
    seed: int = 20160901

    def __post_init__(self):
        if self.n < 2:
            raise PreconditionError(f"search needs n >= 2, got {self.n}")
        if self.matrix_class not in CLASSES:
            raise PreconditionError(f"unknown class {self.matrix_class!r}")
        if not 0 <= self.s <= self.n:
            raise PreconditionError(f"need 0 <= s <= n, got s={self.s}, n={self.n}")
        if self.matrix_class == "doubly_stochastic" and self.s != self.n:
            raise PreconditionError("doubly_stochastic needs s = n")
        if self.restarts < 0 or self.steps_per_restart < 0:
            raise PreconditionError("restarts and steps must be nonnegative")
        if self.tolerance <= 0:
            raise PreconditionError("tolerance must be positive")
        if not 0 <= self.step_decay < 1:
            raise PreconditionError("step_decay must lie in (0, 1), or be 0 for the automatic schedule")
        if not 0 < self.final_step <= self.initial_step:
            raise PreconditionError("need 0 < final_step <= initial_step")
        if not 0 <= self.seed < 1 << 64:
            raise PreconditionError("seed must be a 64-bit unsigned integer")

    @classmethod
    def for_class(cls, n: int, matrix_class: MatrixClass, s: float | None = None, **kw) -> SearchConfig:
        if s is None:
            s = float(n)
        return cls(n=n, s=float(s), matrix_class=matrix_class, **kw)

    def resolved(self) -> SearchConfig:
        """Copy with defaults filled in: budget and decay."""
        restarts, steps = default_budget(self.n)
        restarts = self.restarts or restarts
        steps = self.steps_per_restart or steps
        decay = self.step_decay or (self.final_step / self.initial_step) ** (1 / steps)
        return replace(self, restarts=restarts, steps_per_restart=steps, step_decay=decay)

    @property
    def stochastic(self) -> bool:
        # the fixed-sum slice at s = n is the doubly stochastic set
        return self.matrix_class == "doubly_stochastic" or self.s == self.n


@dataclass(frozen=True)
class SearchResult:
    config: SearchConfig
    best_matrix: np.ndarray
    best_value: float
    formula_value: float | None
    formula_source: str | None
    gap: float | None
    evaluations: int
    per_restart_bests: tuple[float, ...]
    best_restart: int
    feasible: bool
    violation: float
    exact_value: Fraction | None  # per(I - A) on the 1/2^20-rounded best matrix

    def __eq__(self, other):
        if not isinstance(other, SearchResult):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f), getattr(other, f)) if f == "best_matrix"
            else getattr(self, f) == getattr(other, f)
            for f in self.__dataclass_fields__
        )


def violation(m: np.ndarray, s: float | None = None, stochastic: bool = False) -> float:
    """Largest constraint violation: negativity, diagonal, line sums, and |sigma - s|."""
    worst = max(0.0, -float(m.min()), float(np.abs(np.diag(m)).max()))
    rows, cols = m.sum(axis=1), m.sum(axis=0)
    if stochastic:
        worst = max(worst, float(np.abs(rows - 1).max()), float(np.abs(cols - 1).max()))
    else:
        worst = max(worst, float((rows - 1).max()), float((cols - 1).max()))
    if s is not None:
        worst = max(worst, abs(float(m.sum()) - s))
    return worst


def repair(
    m, s: float, matrix_class: MatrixClass = "doubly_substochastic_fixed_sum",
    tol: float = REPAIR_TOL, max_rounds: int = REPAIR_MAX_ROUNDS,
) -> tuple[np.ndarray, bool]:
    """Project back onto the zero-diagonal class with total s, approximately.

    Rounds of clamp, zero the diagonal, cap rows, cap columns, rescale to s
    (Sinkhorn balancing for the doubly stochastic class).  Returns the last
    iterate and whether every violation is within ``tol``.
    """
    out = np.array(m, dtype=np.float64)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise PreconditionError(f"expected a square array, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise PreconditionError("repair: non-finite entries")
    if matrix_class not in CLASSES:
        raise PreconditionError(f"unknown class {matrix_class!r}")
    n = out.shape[0]
    stochastic = matrix_class == "doubly_stochastic" or s == n
    _, ok = _kernels.repair(out, float(s), stochastic, True, tol, max_rounds)
    return out, bool(ok)


def _start(cfg: SearchConfig, rng: np.random.Generator) -> np.ndarray:
    m = rng.random((cfg.n, cfg.n))
    np.fill_diagonal(m, 0.0)
    m *= cfg.s / m.sum()
    _kernels.repair(m, cfg.s, cfg.stochastic, True, REPAIR_TOL, REPAIR_MAX_ROUNDS)
    return m


def _restart(cfg: SearchConfig, r: int) -> tuple[np.ndarray, float, int]:
    rng = np.random.default_rng(cfg.seed + r)
    m = _start(cfg, rng)
    u = rng.random((cfg.steps_per_restart, 4))
    best_m, best, evals = _kernels.ascend(
        m, cfg.s, cfg.stochastic, True, cfg.tolerance, REPAIR_MAX_ROUNDS,
        cfg.initial_step, cfg.step_decay, u,
    )
    return best_m, float(best), int(evals)


def thread_count() -> int:
    env = os.environ.get("PERMLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise PreconditionError(f"PERMLAB_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def reference_value(n: int, s) -> tuple[Fraction | None, str | None]:
    """The proven bound when it applies, else the conjectured value (consistent reading)."""
    s = as_fraction(s)
    report = theorem_bound(n, s)
    if report.hypotheses_met:
        return report.value, "theorem"
    if n >= 3:
        _, consistent = conjecture_values("odd_substochastic", n, s)
        return consistent.value, "conjecture (consistent reading)"
    return None, None


def rationalize(m: np.ndarray, grid: int = RATIONAL_GRID) -> Matrix:
    return make_matrix(m.shape[0], [[Fraction(round(float(x) * grid), grid) for x in row] for row in m])


def maximize(config: SearchConfig, threads: int | None = None) -> SearchResult:
    if config.n > SEARCH_MAX_N:
        raise OrderGuardError("maximize", config.n, SEARCH_MAX_N)
    cfg = config.resolved()
    threads = threads or thread_count()
    if threads == 1:
        runs = [_restart(cfg, r) for r in range(cfg.restarts)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(lambda r: _restart(cfg, r), range(cfg.restarts)))
    best_r = max(range(len(runs)), key=lambda r: (runs[r][1], -r))
    best_m = runs[best_r][0]
    value = permanent_gray(np.eye(cfg.n) - best_m)
    formula, source = reference_value(cfg.n, Fraction(cfg.s))
    formula_f = float(formula) if formula is not None else None
    exact = per_i_minus(rationalize(best_m)) if cfg.n <= EXACT_RESCORE_MAX_N else None
    viol = violation(best_m, cfg.s, cfg.stochastic)
    return SearchResult(
        config=cfg,
        best_matrix=best_m,
        best_value=value,
        formula_value=formula_f,
        formula_source=source,
        gap=value - formula_f if formula_f is not None else None,
        evaluations=sum(r[2] for r in runs),
        per_restart_bests=tuple(r[1] for r in runs),
        best_restart=best_r,
        feasible=viol <= cfg.tolerance * 10,
        violation=viol,
        exact_value=exact,
    )


# -- exact grid search at n = 3 --------------------------------------------------


@dataclass(frozen=True)
class GridResult:
    s: Fraction
    grid_step: Fraction
    points: int  # feasible grid points scored
    best_value: Fraction
    best_matrix: Matrix
    candidate_values: tuple[Fraction, Fraction]  # (s^2 - 5s + 12)/4, 6 - 2s

    @property
    def envelope(self) -> Fraction:
        return max(self.candidate_values)

    @property
    def excess(self) -> Fraction:
        return self.best_value - self.envelope


def _grid_denominator(step) -> int:
    step = as_fraction(step)
    if step < GRID_STEP_FLOOR:
        raise PreconditionError(f"grid step {step} is below the floor {GRID_STEP_FLOOR}")
    if step <= 0 or step.numerator != 1:
        raise PreconditionError(f"grid step must be 1/m for an integer m, got {step}")
    return step.denominator


def exhaustive_omega3(s, grid_step=Fraction(1, 8)) -> GridResult:
    """Maximize per(I - A) over zero-diagonal 3x3 doubly substochastic grid matrices.

    Entries range over multiples of ``grid_step``; matrices whose total lies
    within half a step of ``s`` are kept and scored exactly.
    """
    s = as_fraction(s)
    if not 2 <= s <= 3:
        raise PreconditionError(f"need 2 <= s <= 3, got {s}")
    m = _grid_denominator(grid_step)
    # free entries in order (0,1) (0,2) (1,0) (1,2) (2,0) (2,1), scaled by m
    vals = np.arange(m + 1, dtype=np.int64)
    b02, b10, b12, b20, b21 = np.meshgrid(vals, vals, vals, vals, vals, indexing="ij", sparse=True)
    base = (
        (b10 + b12 <= m) & (b20 + b21 <= m) & (b10 + b20 <= m) & (b02 + b12 <= m)
    )
    points = 0
    best, best_idx = None, None
    # one slice per value of entry (0,1); lexicographic first maximizer wins
    for b01 in range(m + 1):
        total = b01 + b02 + b10 + b12 + b20 + b21
        ok = (
            base & (b01 + b02 <= m) & (b01 + b21 <= m)
            & (2 * np.abs(total * s.denominator - s.numerator * m) <= s.denominator)
        )
        count = int(np.count_nonzero(ok))
        if count == 0:
            continue
        points += count
        # per(mI - B) for zero-diagonal B
        per = m**3 + m * (b01 * b10 + b02 * b20 + b12 * b21) - b01 * b12 * b20 - b02 * b21 * b10
        per = np.where(ok, per, np.iinfo(np.int64).min)
        idx = np.unravel_index(int(np.argmax(per)), per.shape)
        if best is None or per[idx] > best:
            best, best_idx = int(per[idx]), (b01, *(int(v) for v in idx))
    if best is None:
        raise PreconditionError(f"no grid point with total within half a step of {s}")
    x01, x02, x10, x12, x20, x21 = (Fraction(v, m) for v in best_idx)
    best_m = make_matrix(3, [[0, x01, x02], [x10, 0, x12], [x20, x21, 0]])
    best = Fraction(best, m**3)
    return GridResult(s, Fraction(1, m), points, best, best_m, (omega3_a0_value(s), omega3_a1_value(s)))


@dataclass(frozen=True)
class SweepReport:
    grid_step: Fraction
    rows: tuple[GridResult, ...]
    notes: tuple[str, ...]

    @property
    def max_excess(self) -> Fraction:
        return max(r.excess for r in self.rows)


def omega3_sweep(s_values: Sequence, grid_step=Fraction(1, 8)) -> SweepReport:
    """Grid maxima against the two-candidate envelope, with the conjecture's known inconsistencies."""
    rows = tuple(exhaustive_omega3(s, grid_step) for s in s_values)
    return SweepReport(as_fraction(grid_step), rows, (BRANCH_NOTE, COPY_NOTE))


# -- odd-order evidence --------------------------------------------------------------


@dataclass(frozen=True)
class EvidenceRow:
    s: float
    observed: float
    block_grid: Fraction  # grid maximum over the 3x3 slice at s - n + 3
    conjectured_grid: Fraction  # 2^((n-3)/2) * block_grid
    conjectured_formula: Fraction  # consistent reading of the closed form
    conjectured_literal: Fraction
    best_matrix: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, EvidenceRow):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f), getattr(other, f)) if f == "best_matrix"
            else getattr(self, f) == getattr(other, f)
            for f in self.__dataclass_fields__
        )


@dataclass(frozen=True)
class EvidenceReport:
    n: int
    grid_step: Fraction
    rows: tuple[EvidenceRow, ...]
    notes: tuple[str, ...]


def evidence_report(
    n: int, s_grid: Sequence[float], grid_step=Fraction(1, 8), seed: int = 20160901,
    restarts: int = 0, steps_per_restart: int = 0, threads: int | None = None,
) -> EvidenceReport:
    if n not in (3, 5, 7):
        raise PreconditionError(f"evidence_report covers n in {{3, 5, 7}}, got {n}")
    rows = []
    for s in s_grid:
        sf = as_fraction(s)
        if not n - 1 < sf <= n:
            raise PreconditionError(f"need {n - 1} < s <= {n}, got {s}")
        cls = "doubly_stochastic" if sf == n else "doubly_substochastic_fixed_sum"
        cfg = SearchConfig(n=n, s=float(s), matrix_class=cls, seed=seed,
                           restarts=restarts, steps_per_restart=steps_per_restart)
        res = maximize(cfg, threads)
        block = exhaustive_omega3(sf - n + 3, grid_step).best_value
        literal, consistent = conjecture_values("odd_substochastic", n, sf)
        rows.append(EvidenceRow(float(s), res.best_value, block, 2 ** ((n - 3) // 2) * block,
                                consistent.value, literal.value, res.best_matrix))
    return EvidenceReport(n, as_fraction(grid_step), tuple(rows), (BRANCH_NOTE, COPY_NOTE))


def grid_points(lo, hi, step) -> list[Fraction]:
    """lo, lo + step, ..., hi as exact rationals (hi included when on the grid)."""
    lo, hi, step = as_fraction(lo), as_fraction(hi), as_fraction(step)
    count = math.floor((hi - lo) / step)
    return [lo + k * step for k in range(count + 1)]
