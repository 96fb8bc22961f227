"""Reconfiguration policies behind a single decision interface.

Each policy consumes one aggregated reading per control interval (max power,
mean work rate) and returns the configuration for the next interval.  The
safe-exploration policy refits its safety and objective models every interval
and restricts exploration to a neighborhood of the most recent safe
configuration; the comparison policies cover the usual alternatives: static,
frozen offline models, a frequency-stepping feedback loop, pure Bayesian
optimization, two-stage safe exploration, and a perfect-information oracle.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import ClassVar, Sequence

import numpy as np

from .model import (
    Dataset,
    GaussianProcess,
    GridKernel,
    ModelKind,
    ModelParams,
    OnlineGridGP,
    expected_improvement_vec,
    fit,
)
from .space import Configuration, ConfigSpace, candidate_ids

__all__ = [
    "PolicyKind",
    "IntervalReading",
    "SafeSetStats",
    "ControlState",
    "RunSetup",
    "Policy",
    "StaticPolicy",
    "ScopePolicy",
    "ScopeNoOperatorPolicy",
    "StageOptPolicy",
    "BoPolicy",
    "RaplLikePolicy",
    "OfflinePolicy",
    "OraclePolicy",
    "scope_step",
    "select_from_safe_set",
    "offline_choice",
]


class PolicyKind(str, Enum):
    STATIC = "static"
    OFFLINE = "offline"
    RAPL_LIKE = "rapl-like"
    BO = "bo"
    STAGEOPT = "stageopt"
    SCOPE_NO = "scope-no"
    SCOPE = "scope"
    ORACLE = "oracle"


@dataclass(frozen=True)
class IntervalReading:
    """Aggregated measurements for one control interval."""

    y: float  # max power observed over the interval, watts
    z: float  # mean work rate over the interval, units/sec
    violated: bool
    samples_taken: int

    def __post_init__(self) -> None:
        if self.samples_taken < 1:
            raise ValueError("an interval has at least one measurement")
        if not (math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError("readings must be finite")


@dataclass(frozen=True, eq=False)
class SafeSetStats:
    """Candidate and predicted-safe membership recorded at one interval."""

    interval_index: int
    candidate_ids: np.ndarray
    safe_ids: np.ndarray

    @property
    def n_candidates(self) -> int:
        return int(self.candidate_ids.shape[0])

    @property
    def n_safe(self) -> int:
        return int(self.safe_ids.shape[0])


@dataclass
class ControlState:
    """Accumulated training data and loop parameters for the safe explorer."""

    space: ConfigSpace
    current: Configuration  # configuration measured during the last interval
    x_s: Configuration      # most recent safe configuration
    gamma: float
    P: float
    N: int
    interval_index: int = 0
    sampled: list[tuple[Configuration, float, float]] = field(default_factory=list)

    def sampled_ids(self) -> np.ndarray:
        return np.fromiter((c.id for c, _, _ in self.sampled), dtype=int)


@dataclass(frozen=True)
class RunSetup:
    """Per-run context handed to a policy before the first interval."""

    space: ConfigSpace
    x0: Configuration
    P: float
    interval_sec: int
    n_max: int


class Policy(ABC):
    """One reconfiguration decision per interval; stateful across a run."""

    kind: ClassVar[PolicyKind]

    def __init__(self) -> None:
        self.last_stats: SafeSetStats | None = None

    @abstractmethod
    def begin(self, setup: RunSetup) -> None:
        """Reset per-run state; called once before the first interval."""

    @abstractmethod
    def decide(self, reading: IntervalReading) -> Configuration:
        """Consume the interval reading, return the next configuration."""


# ---------------------------------------------------------------------------
# model plumbing shared by the learning policies
# ---------------------------------------------------------------------------


def _fit_on_ids(
    kind: ModelKind,
    params: ModelParams,
    space: ConfigSpace,
    kern: GridKernel | None,
    ids: np.ndarray,
    targets: Sequence[float],
):
    X = space.norm_grid[ids]
    data = Dataset(X, targets)
    if kind is ModelKind.GAUSSIAN_PROCESS and kern is not None:
        return GaussianProcess(data, params, gram=kern.block(ids, ids))
    return fit(kind, data, params)


def _predict_ids(model, space: ConfigSpace, kern: GridKernel | None,
                 train_ids: np.ndarray, query_ids: np.ndarray):
    if isinstance(model, GaussianProcess) and kern is not None:
        return model.predict_gram(kern.block(query_ids, train_ids))
    return model.predict_batch(space.norm_grid[query_ids])


def select_from_safe_set(
    safe: Sequence[Configuration],
    candidates: Sequence[Configuration],
    f_y,
    f_z,
    fallback: Configuration,
) -> Configuration:
    """Pick from the safe set by best predicted objective, else the candidate
    with best predicted safety, else the fallback.  Ties go to the lowest
    grid id."""
    if safe:
        mu, _ = f_z.predict_batch(np.array([c.norm for c in safe]))
        best = min(range(len(safe)), key=lambda i: (-mu[i], safe[i].id))
        return safe[best]
    if candidates:
        mu, _ = f_y.predict_batch(np.array([c.norm for c in candidates]))
        best = min(range(len(candidates)), key=lambda i: (mu[i], candidates[i].id))
        return candidates[best]
    return fallback


def scope_step(
    state: ControlState,
    reading: IntervalReading,
    space: ConfigSpace | None = None,
    model_kind: ModelKind = ModelKind.GAUSSIAN_PROCESS,
    model_params: ModelParams = ModelParams(),
    kern: GridKernel | None = None,
) -> tuple[Configuration, SafeSetStats]:
    """One safe-exploration iteration.

    Records the interval sample, refits the safety model, updates the safe
    reference only on a strictly-safe reading, builds the locality-restricted
    candidate set, filters it by predicted safety, refits the objective model,
    and selects the next configuration (best predicted objective inside the
    safe set; best predicted safety among candidates when the safe set is
    empty; the safe reference when both are empty).
    """
    space = space or state.space
    state.sampled.append((state.current, reading.y, reading.z))
    ids = state.sampled_ids()
    ys = np.array([y for _, y, _ in state.sampled])
    zs = np.array([z for _, _, z in state.sampled])

    f_y = _fit_on_ids(model_kind, model_params, space, kern, ids, ys)
    if reading.y < state.P:
        state.x_s = state.current

    cand = candidate_ids(space, ids, state.x_s, state.gamma)
    if cand.size:
        mu_y, _ = _predict_ids(f_y, space, kern, ids, cand)
        safe = cand[mu_y < state.P]
    else:
        mu_y = np.empty(0)
        safe = cand

    f_z = _fit_on_ids(model_kind, model_params, space, kern, ids, zs)
    if safe.size:
        mu_z, _ = _predict_ids(f_z, space, kern, ids, safe)
        nxt = space.config(int(safe[np.argmax(mu_z)]))
    elif cand.size:
        nxt = space.config(int(cand[np.argmin(mu_y)]))
    else:
        nxt = state.x_s

    stats = SafeSetStats(
        interval_index=state.interval_index,
        candidate_ids=cand,
        safe_ids=safe,
    )
    state.current = nxt
    state.interval_index += 1
    return nxt, stats


# ---------------------------------------------------------------------------
# policies
# ---------------------------------------------------------------------------


class StaticPolicy(Policy):
    """Hold the starting configuration for the whole run."""

    kind = PolicyKind.STATIC

    def begin(self, setup: RunSetup) -> None:
        self.last_stats = None
        self._x0 = setup.x0

    def decide(self, reading: IntervalReading) -> Configuration:
        return self._x0


class ScopePolicy(Policy):
    """Safe exploration with the locality-preserving candidate operator."""

    kind = PolicyKind.SCOPE

    def __init__(
        self,
        gamma: float = 1.0,
        model_kind: ModelKind | str = ModelKind.GAUSSIAN_PROCESS,
        model_params: ModelParams = ModelParams(),
        kern: GridKernel | None = None,
    ):
        super().__init__()
        if gamma < 0:
            raise ValueError("gamma must be nonnegative")
        self.gamma = gamma
        self.model_kind = ModelKind(model_kind)
        self.model_params = model_params
        self._kern = kern

    def begin(self, setup: RunSetup) -> None:
        self.last_stats = None
        self.state = ControlState(
            space=setup.space,
            current=setup.x0,
            x_s=setup.x0,
            gamma=self.gamma,
            P=setup.P,
            N=setup.n_max,
        )

    def decide(self, reading: IntervalReading) -> Configuration:
        nxt, stats = scope_step(
            self.state,
            reading,
            model_kind=self.model_kind,
            model_params=self.model_params,
            kern=self._kern,
        )
        self.last_stats = stats
        return nxt


class ScopeNoOperatorPolicy(ScopePolicy):
    """Safe exploration over the whole unexplored grid (no locality bound)."""

    kind = PolicyKind.SCOPE_NO

    def __init__(
        self,
        model_kind: ModelKind | str = ModelKind.GAUSSIAN_PROCESS,
        model_params: ModelParams = ModelParams(),
        kern: GridKernel | None = None,
    ):
        super().__init__(math.inf, model_kind, model_params, kern)


class StageOptPolicy(Policy):
    """Two-stage safe exploration: expand a conservative safe set, then
    optimize the objective inside it without ever updating it again."""

    kind = PolicyKind.STAGEOPT

    def __init__(
        self,
        stage1_len: int,
        beta: float = 2.0,
        model_kind: ModelKind | str = ModelKind.GAUSSIAN_PROCESS,
        model_params: ModelParams = ModelParams(),
        kern: GridKernel | None = None,
    ):
        super().__init__()
        if stage1_len < 0:
            raise ValueError("stage1_len must be >= 0")
        self.stage1_len = stage1_len
        self.beta = beta
        self.model_kind = ModelKind(model_kind)
        self.model_params = model_params
        self._kern = kern

    def begin(self, setup: RunSetup) -> None:
        self.last_stats = None
        self._setup = setup
        self._space = setup.space
        self._current = setup.x0
        self._x_s = setup.x0
        self._interval = 0
        self._samples: list[tuple[int, float, float]] = []
        self._frozen: np.ndarray | None = None

    def _train_arrays(self):
        ids = np.fromiter((i for i, _, _ in self._samples), dtype=int)
        ys = np.array([y for _, y, _ in self._samples])
        zs = np.array([z for _, _, z in self._samples])
        return ids, ys, zs

    def _conservative_safe(self, ids: np.ndarray, ys: np.ndarray):
        """Unexplored points whose upper confidence bound stays under the cap."""
        f_y = _fit_on_ids(self.model_kind, self.model_params, self._space,
                          self._kern, ids, ys)
        mask = np.ones(len(self._space), dtype=bool)
        mask[ids] = False
        cand = np.nonzero(mask)[0]
        if cand.size == 0:
            return cand, cand, np.empty(0)
        mu, sd = _predict_ids(f_y, self._space, self._kern, ids, cand)
        keep = (mu + self.beta * sd) < self._setup.P
        return cand, cand[keep], sd[keep]

    def decide(self, reading: IntervalReading) -> Configuration:
        self._samples.append((self._current.id, reading.y, reading.z))
        if reading.y < self._setup.P:
            self._x_s = self._current
        ids, ys, zs = self._train_arrays()
        interval = self._interval
        self._interval += 1

        if interval < self.stage1_len:
            _, safe, sd = self._conservative_safe(ids, ys)
            if safe.size == 0:
                nxt = self._x_s
            else:
                nxt = self._space.config(int(safe[np.argmax(sd)]))
            self._current = nxt
            return nxt

        if self._frozen is None:
            _, safe, _ = self._conservative_safe(ids, ys)
            self._frozen = safe
        if self._frozen.size == 0:
            nxt = self._x_s
        else:
            f_z = _fit_on_ids(self.model_kind, self.model_params, self._space,
                              self._kern, ids, zs)
            mu_z, _ = _predict_ids(f_z, self._space, self._kern, ids, self._frozen)
            nxt = self._space.config(int(self._frozen[np.argmax(mu_z)]))
        self._current = nxt
        return nxt


class BoPolicy(Policy):
    """Bayesian optimization of the work rate with expected improvement.

    Safety-blind by interface: the decision path consumes only the objective
    component of the reading.
    """

    kind = PolicyKind.BO

    def __init__(
        self,
        model_params: ModelParams = ModelParams(),
        kern: GridKernel | None = None,
    ):
        super().__init__()
        self.model_params = model_params
        self._kern = kern

    def begin(self, setup: RunSetup) -> None:
        self.last_stats = None
        self._space = setup.space
        self._current = setup.x0
        if self._kern is not None:
            self._gp = OnlineGridGP(self._kern, self.model_params.noise_var)
        else:
            self._gp = None
            self._samples: list[tuple[int, float]] = []

    def decide(self, reading: IntervalReading) -> Configuration:
        return self._decide_objective(reading.z)

    def _decide_objective(self, z: float) -> Configuration:
        space = self._space
        if self._gp is not None:
            self._gp.add(self._current.id, z)
            mean, std = self._gp.predict_all()
            best = self._gp.best_target
            sampled = self._gp.observed_ids
        else:
            self._samples.append((self._current.id, z))
            ids = np.fromiter((i for i, _ in self._samples), dtype=int)
            zs = np.array([v for _, v in self._samples])
            gp = _fit_on_ids(ModelKind.GAUSSIAN_PROCESS, self.model_params,
                             space, None, ids, zs)
            mean, std = gp.predict_batch(space.norm_grid)
            best = float(zs.max())
            sampled = ids
        mask = np.ones(len(space), dtype=bool)
        mask[np.asarray(sampled, dtype=int)] = False
        cand = np.nonzero(mask)[0]
        if cand.size == 0:
            # Grid exhausted: hold the best configuration observed so far.
            nxt = self._best_observed()
        else:
            ei = expected_improvement_vec(mean[cand], std[cand], best)
            nxt = space.config(int(cand[np.argmax(ei)]))
        self._current = nxt
        return nxt

    def _best_observed(self) -> Configuration:
        if self._gp is not None:
            ids = self._gp.observed_ids
            zs = self._gp._y
        else:
            ids = [i for i, _ in self._samples]
            zs = [z for _, z in self._samples]
        return self._space.config(int(ids[int(np.argmax(zs))]))


class RaplLikePolicy(Policy):
    """Hysteresis frequency stepper: only CPU and uncore frequency move.

    Over the cap: step CPU frequency down one level, then uncore once CPU
    saturates.  Below 95% of the cap: step back up, CPU first.  Inside the
    deadband: hold.  All other parameters stay at the starting values.
    """

    kind = PolicyKind.RAPL_LIKE

    def __init__(self, freq_axis: int = 0, uncore_axis: int = 1):
        super().__init__()
        self.freq_axis = freq_axis
        self.uncore_axis = uncore_axis

    def begin(self, setup: RunSetup) -> None:
        self.last_stats = None
        self._space = setup.space
        self._P = setup.P
        raw = list(setup.x0.raw)
        freq_levels = setup.space.params[self.freq_axis].values
        uncore_levels = setup.space.params[self.uncore_axis].values
        self._freq_levels = freq_levels
        self._uncore_levels = uncore_levels
        self._raw = raw
        self._fi = freq_levels.index(raw[self.freq_axis])
        self._ui = uncore_levels.index(raw[self.uncore_axis])

    def _config(self) -> Configuration:
        raw = list(self._raw)
        raw[self.freq_axis] = self._freq_levels[self._fi]
        raw[self.uncore_axis] = self._uncore_levels[self._ui]
        return self._space.config_from_raw(raw)

    def decide(self, reading: IntervalReading) -> Configuration:
        if reading.y > self._P:
            if self._fi > 0:
                self._fi -= 1
            elif self._ui > 0:
                self._ui -= 1
        elif reading.y < 0.95 * self._P:
            if self._fi < len(self._freq_levels) - 1:
                self._fi += 1
            elif self._ui < len(self._uncore_levels) - 1:
                self._ui += 1
        return self._config()


def offline_choice(
    space: ConfigSpace, mu_y: np.ndarray, mu_z: np.ndarray, P: float
) -> Configuration:
    """Best predicted objective among predicted-safe points, else the point
    with the best predicted safety; ties to the lowest grid id."""
    safe = np.nonzero(mu_y < P)[0]
    if safe.size:
        return space.config(int(safe[np.argmax(mu_z[safe])]))
    return space.config(int(np.argmin(mu_y)))


class OfflinePolicy(Policy):
    """Reconfigure from models frozen after a pre-run profiling pass."""

    kind = PolicyKind.OFFLINE

    def __init__(self, mu_y_grid: np.ndarray, mu_z_grid: np.ndarray):
        super().__init__()
        if mu_y_grid.shape != mu_z_grid.shape:
            raise ValueError("prediction grids must align")
        self._mu_y = mu_y_grid
        self._mu_z = mu_z_grid

    def begin(self, setup: RunSetup) -> None:
        self.last_stats = None
        if self._mu_y.shape[0] != len(setup.space):
            raise ValueError("prediction grids do not match the space")
        self._choice = offline_choice(setup.space, self._mu_y, self._mu_z, setup.P)

    def decide(self, reading: IntervalReading) -> Configuration:
        return self._choice


class OraclePolicy(Policy):
    """Run the precomputed best truly-safe static configuration."""

    kind = PolicyKind.ORACLE

    def __init__(self, choice: Configuration):
        super().__init__()
        self._choice = choice

    def begin(self, setup: RunSetup) -> None:
        self.last_stats = None
        if not setup.space.contains(self._choice):
            raise ValueError("oracle choice is not in the space")

    def decide(self, reading: IntervalReading) -> Configuration:
        return self._choice
