"""Seedable surrogate of the cube-stacking environment.

Cubes are dropped in order onto a base cube; each one lands at its commanded
offset plus isotropic gaussian noise whose magnitude grows with drop height.
A cube rests when its landing offset stays inside the support window on both
axes, and the tower stays up only while, at every interface, the mean
position of everything above projects into that interface's (margined)
support region. Resting flags are recorded per action: a collapse while
dropping cube i counts as cube i's failure even when the root cause is the
accumulated offset of earlier cubes, which is exactly what makes such
failures time-shifted. Episodes terminate at the first failed stack.

Episodes are deterministic per (seed, episode index): every episode derives
its own random stream, so generation can be partitioned across workers and
replayed action-for-action with common random numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np
import pandas as pd

from .exceptions import CausalStackError
from .variables import (
    CAUSE, EFFECT, Dataset, Provenance, VariableSet, VariableSpec,
)

CUBE_SIZE = 0.05
DEFAULT_NOISE_PER_DROP = 0.1   # landing-noise sigma per meter of drop height
DEFAULT_MARGIN = 0.005         # support-window margin, meters


@dataclass(frozen=True)
class Sampling:
    """How one action variable is randomized: uniform over [low, high] or a
    gaussian re-sampled until it falls inside [low, high]."""

    kind: str  # "uniform" | "gaussian"
    low: float
    high: float
    mean: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "gaussian"):
            raise ValueError(f"unknown sampling kind {self.kind!r}")
        if not self.low < self.high:
            raise ValueError("sampling range must be non-empty")

    def draw(self, rng: np.random.Generator) -> float:
        if self.kind == "uniform":
            return float(rng.uniform(self.low, self.high))
        if self.sigma == 0.0:
            if not self.low <= self.mean <= self.high:
                raise ValueError("gaussian mean outside the truncation range")
            return self.mean
        while True:
            v = float(rng.normal(self.mean, self.sigma))
            if self.low <= v <= self.high:
                return v

    def to_json(self) -> dict:
        out = {"kind": self.kind, "low": self.low, "high": self.high}
        if self.kind == "gaussian":
            out["mean"] = self.mean
            out["sigma"] = self.sigma
        return out

    @classmethod
    def from_json(cls, obj) -> "Sampling":
        return cls(
            kind=obj["kind"], low=obj["low"], high=obj["high"],
            mean=obj.get("mean", 0.0), sigma=obj.get("sigma", 0.0),
        )


@dataclass(frozen=True)
class SimConfig:
    experiment: str  # "e1" | "e2"
    episodes: int
    seed: int = 0
    cubes: int = 1
    offset_sampling: Sampling = Sampling("uniform", -0.03, 0.03)
    drop_sampling: Sampling = Sampling("uniform", 0.005, 0.1)
    noise_per_drop: float = DEFAULT_NOISE_PER_DROP
    margin: float = DEFAULT_MARGIN
    cube_size: float = CUBE_SIZE

    def __post_init__(self):
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.noise_per_drop < 0:
            raise ValueError("noise coefficient must be >= 0")
        if not 0 <= self.margin < self.cube_size / 2:
            raise ValueError("margin must be in [0, cube_size/2)")

    @property
    def support_window(self) -> float:
        return self.cube_size / 2 - self.margin

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "episodes": self.episodes,
            "seed": self.seed,
            "cubes": self.cubes,
            "offset_sampling": self.offset_sampling.to_json(),
            "drop_sampling": self.drop_sampling.to_json(),
            "noise_per_drop": self.noise_per_drop,
            "margin": self.margin,
            "cube_size": self.cube_size,
        }

    @classmethod
    def from_json(cls, obj) -> "SimConfig":
        return cls(
            experiment=obj["experiment"],
            episodes=obj["episodes"],
            seed=obj.get("seed", 0),
            cubes=obj.get("cubes", 1),
            offset_sampling=Sampling.from_json(obj["offset_sampling"]),
            drop_sampling=Sampling.from_json(obj["drop_sampling"]),
            noise_per_drop=obj.get("noise_per_drop", DEFAULT_NOISE_PER_DROP),
            margin=obj.get("margin", DEFAULT_MARGIN),
            cube_size=obj.get("cube_size", CUBE_SIZE),
        )

    @classmethod
    def load(cls, path) -> "SimConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def e1_config(episodes: int = 40_000, seed: int = 0, **overrides) -> SimConfig:
    """Single stack, uniform offsets in [-3, 3] cm, drop height in [0.5, 10] cm.

    The noise and margin constants are tuned for this experiment's wide drop
    range: the failure rate lands in the reference regime (~73%) and the
    interval lattice separates sharply into correctable and safe cells,
    which is what makes the correction lookup effective.
    """
    cfg = SimConfig(
        experiment="e1", episodes=episodes, seed=seed, cubes=1,
        offset_sampling=Sampling("uniform", -0.03, 0.03),
        drop_sampling=Sampling("uniform", 0.005, 0.1),
        noise_per_drop=0.18, margin=0.009,
    )
    return replace(cfg, **overrides) if overrides else cfg


def e2_config(episodes: int = 200_000, seed: int = 0, **overrides) -> SimConfig:
    """Three stacks, gaussian offsets (sigma 2 cm) truncated to [-3, 3] cm,
    drop height uniform in [0.1, 3] cm."""
    cfg = SimConfig(
        experiment="e2", episodes=episodes, seed=seed, cubes=3,
        offset_sampling=Sampling("gaussian", -0.03, 0.03, mean=0.0, sigma=0.02),
        drop_sampling=Sampling("uniform", 0.001, 0.03),
    )
    return replace(cfg, **overrides) if overrides else cfg


def variable_set(config: SimConfig) -> VariableSet:
    specs = []
    off = config.offset_sampling
    drop = config.drop_sampling
    for i in range(1, config.cubes + 1):
        specs.append(VariableSpec(f"xOff{i}", CAUSE, "continuous", off.low, off.high))
        specs.append(VariableSpec(f"yOff{i}", CAUSE, "continuous", off.low, off.high))
        specs.append(VariableSpec(f"dropOff{i}", CAUSE, "continuous", drop.low, drop.high))
        specs.append(VariableSpec(f"onTop{i}", EFFECT, "boolean"))
    return VariableSet(specs)


@dataclass(frozen=True)
class StackAction:
    """Commanded placement of one cube, offsets relative to the cube below."""

    cube: int  # 1-based stacking order
    x_off: float
    y_off: float
    drop_off: float


@dataclass(frozen=True)
class TowerState:
    """Absolute (x, y) centers of the placed cubes and their resting flags;
    the base cube sits at the origin."""

    positions: tuple[tuple[float, float], ...] = ()
    on_top: tuple[bool, ...] = ()

    @property
    def failed(self) -> bool:
        return any(not flag for flag in self.on_top)


def _settle_with_noise(tower: TowerState, action: StackAction,
                       unit_noise: np.ndarray, config: SimConfig) -> TowerState:
    if tower.failed:
        raise CausalStackError(
            f"cannot stack cube {action.cube} onto a failed tower"
        )
    sigma = config.noise_per_drop * action.drop_off
    land_x = action.x_off + sigma * float(unit_noise[0])
    land_y = action.y_off + sigma * float(unit_noise[1])
    window = config.support_window

    if not (abs(land_x) < window and abs(land_y) < window):
        return TowerState(tower.positions, tower.on_top + (False,))

    sx, sy = tower.positions[-1] if tower.positions else (0.0, 0.0)
    positions = tower.positions + ((sx + land_x, sy + land_y),)
    # quasi-static check: any interface whose load projects outside its
    # support window brings the tower down, and the collapse is recorded
    # against the cube whose drop triggered it
    stable = True
    supports = ((0.0, 0.0),) + positions[:-1]
    for j, (jx, jy) in enumerate(supports):
        above = positions[j:]
        com_x = sum(p[0] for p in above) / len(above)
        com_y = sum(p[1] for p in above) / len(above)
        if not (abs(com_x - jx) < window and abs(com_y - jy) < window):
            stable = False
            break
    return TowerState(positions, tower.on_top + (stable,))


def settle(tower: TowerState, action: StackAction,
           rng: np.random.Generator, config: SimConfig) -> TowerState:
    """Drop one cube onto the tower; see the module docstring for the
    landing and toppling rules."""
    return _settle_with_noise(tower, action, rng.normal(size=2), config)


@dataclass(frozen=True)
class EpisodeDraws:
    """Everything random about one episode, drawn up front so corrected
    replays consume identical randomness."""

    actions: tuple[StackAction, ...]
    unit_noise: np.ndarray  # (cubes, 2)


def sample_actions(config: SimConfig, rng: np.random.Generator) -> tuple[StackAction, ...]:
    return tuple(
        StackAction(
            cube=i,
            x_off=config.offset_sampling.draw(rng),
            y_off=config.offset_sampling.draw(rng),
            drop_off=config.drop_sampling.draw(rng),
        )
        for i in range(1, config.cubes + 1)
    )


def episode_rng(config: SimConfig, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([config.seed, index]))


def episode_draws(config: SimConfig, index: int) -> EpisodeDraws:
    rng = episode_rng(config, index)
    actions = sample_actions(config, rng)
    noise = rng.normal(size=(config.cubes, 2))
    return EpisodeDraws(actions=actions, unit_noise=noise)


def execute(actions: Iterable[StackAction], unit_noise: np.ndarray,
            config: SimConfig) -> tuple[bool, ...]:
    """Run one episode: settle cubes in order, stop at the first failure,
    report one resting flag per cube (never-dropped cubes count as failed)."""
    actions = tuple(actions)
    tower = TowerState()
    for idx, action in enumerate(actions):
        tower = _settle_with_noise(tower, action, unit_noise[idx], config)
        if tower.failed:
            break
    flags = list(tower.on_top) + [False] * (len(actions) - len(tower.on_top))
    return tuple(flags)


def run_episodes(config: SimConfig) -> Dataset:
    """Generate the full dataset for a configuration: one row per episode
    with every commanded offset and every resting flag."""
    variables = variable_set(config)
    n = config.episodes
    cols: dict[str, np.ndarray] = {}
    for i in range(1, config.cubes + 1):
        cols[f"xOff{i}"] = np.empty(n)
        cols[f"yOff{i}"] = np.empty(n)
        cols[f"dropOff{i}"] = np.empty(n)
        cols[f"onTop{i}"] = np.empty(n, dtype=bool)

    for ep in range(n):
        draws = episode_draws(config, ep)
        flags = execute(draws.actions, draws.unit_noise, config)
        for action, flag in zip(draws.actions, flags):
            i = action.cube
            cols[f"xOff{i}"][ep] = action.x_off
            cols[f"yOff{i}"][ep] = action.y_off
            cols[f"dropOff{i}"][ep] = action.drop_off
            cols[f"onTop{i}"][ep] = flag

    frame = pd.DataFrame({name: cols[name] for name in variables.names})
    return Dataset(
        variables, frame,
        Provenance(
            generator=f"stack-sim-{config.experiment}",
            seed=config.seed, episodes=n,
        ),
    )
