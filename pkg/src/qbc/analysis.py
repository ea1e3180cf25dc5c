"""Numerical studies built on the scheme, attack and protocol modules."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .attack import AttackReport, synthesize, synthesize_uhlmann, verify_attack
from .choi import Strategy, run_protocol
from .qcore import StateVector, haar_random_state
from .scheme import CommitmentScheme, commit_state, concealment

WILSON_Z95 = 1.959963984540054


def _stats(x: np.ndarray) -> dict[str, float]:
    return {"min": float(x.min()), "mean": float(x.mean()), "max": float(x.max())}


@dataclass(frozen=True)
class SweepResult:
    bob_states: list[StateVector] = field(repr=False)
    concealment_fidelity: np.ndarray
    fixed_fidelity: np.ndarray
    adapted_fidelity: np.ndarray
    fixed_attack: AttackReport = field(repr=False)

    @property
    def samples(self) -> int:
        return len(self.bob_states)

    def aggregates(self) -> dict[str, dict[str, float]]:
        return {
            "concealment_fidelity": _stats(self.concealment_fidelity),
            "fixed_fidelity": _stats(self.fixed_fidelity),
            "adapted_fidelity": _stats(self.adapted_fidelity),
        }


def nonstatic_sweep(scheme: CommitmentScheme, n_samples: int, rng: np.random.Generator) -> SweepResult:
    """Compare a single cheat against per-state cheats over Haar Bob inputs.

    The fixed ``S_A`` is synthesized once from the first Bob state (diagonal
    construction when its condition holds, Uhlmann otherwise) and then reused
    unchanged; the adapted ``S_A`` is the Uhlmann optimum for each state.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    states = [haar_random_state(scheme.d_B, rng) for _ in range(n_samples)]
    fixed = synthesize(scheme, states[0])
    conceal, fixed_f, adapted_f = [], [], []
    for bob in states:
        phi0, phi1 = commit_state(scheme, 0, bob), commit_state(scheme, 1, bob)
        conceal.append(concealment(scheme, bob).fidelity)
        fixed_f.append(verify_attack(fixed.s_a, phi0, phi1))
        adapted_f.append(synthesize_uhlmann(phi0, phi1).achieved_fidelity)
    return SweepResult(states, np.array(conceal), np.array(fixed_f), np.array(adapted_f), fixed)


# --------------------------------------------------------------------------
# search for a distinguishing Bob state


def state_from_angles(angles: np.ndarray, d: int) -> StateVector:
    """Gauge-fixed parameterization: first amplitude real and non-negative.

    ``angles[:d-1]`` are hyperspherical polar angles for the moduli and
    ``angles[d-1:]`` the phases of components ``1..d-1``.
    """
    polar, phases = angles[:d - 1], angles[d - 1:]
    mags = np.empty(d)
    tail = 1.0
    for k in range(d - 1):
        mags[k] = tail * math.cos(polar[k])
        tail *= math.sin(polar[k])
    mags[d - 1] = tail
    amps = mags.astype(np.complex128)
    amps[1:] *= np.exp(1j * phases)
    if mags[0] < 0:
        amps = -amps
    return StateVector(amps / np.linalg.norm(amps))


def angles_from_state(psi: StateVector) -> np.ndarray:
    v = psi.amplitudes
    d = v.size
    if abs(v[0]) > 0:
        v = v * (abs(v[0]) / v[0])
    mags = np.abs(v)
    polar = np.empty(d - 1)
    tail = 1.0
    for k in range(d - 1):
        ratio = mags[k] / tail if tail > 1e-300 else 1.0
        polar[k] = math.acos(min(max(ratio, -1.0), 1.0))
        tail *= math.sin(polar[k])
    return np.concatenate([polar, np.angle(v[1:])])


@dataclass(frozen=True)
class SearchResult:
    best_bob_init: StateVector
    best_fidelity: float
    iterations: int


def find_distinguishing_bob_state(scheme: CommitmentScheme, budget: int, rng: np.random.Generator,
                                  initial_step: float = 0.25, min_step: float = 1e-4) -> SearchResult:
    """Minimize Bob's concealment fidelity over his initial state.

    The computational basis states are tried first, then a quarter of the
    budget goes to Haar-random restarts; the best starting point
    is then refined coordinate by coordinate on its angular parameters,
    halving the step (never below ``min_step``) after a pass without
    improvement; it stops when a pass at ``min_step`` fails or the budget
    runs out.  Heuristic: no global-optimality guarantee.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    d = scheme.d_B
    used = 0

    def cost(angles):
        nonlocal used
        used += 1
        return concealment(scheme, state_from_angles(angles, d)).fidelity

    starts = (angles_from_state(StateVector.basis(k, d)) for k in range(d))
    randoms = (angles_from_state(haar_random_state(d, rng)) for _ in range(max(1, budget // 4)))
    best_x, best_f = None, math.inf
    for x in itertools.chain(starts, randoms):
        if used >= budget:
            break
        f = cost(x)
        if f < best_f:
            best_x, best_f = x, f

    step = initial_step
    while d > 1 and used < budget:
        improved = False
        for k in range(best_x.size):
            for sign in (1.0, -1.0):
                if used >= budget:
                    break
                trial = best_x.copy()
                trial[k] += sign * step
                f = cost(trial)
                if f < best_f:
                    best_x, best_f, improved = trial, f, True
                    break
        if not improved:
            if step <= min_step:
                break
            step = max(step / 2, min_step)
    return SearchResult(state_from_angles(best_x, d), float(best_f), used)


# --------------------------------------------------------------------------
# protocol statistics


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z95) -> tuple[float, float]:
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # the bounds are exactly 0 and 1 at the extremes; avoid round-off there
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class CheatStatistics:
    accepts: int
    trials: int
    n_rounds: int
    ci_low: float
    ci_high: float

    @property
    def rate(self) -> float:
        return self.accepts / self.trials

    def to_dict(self) -> dict[str, Any]:
        return {"accepts": self.accepts, "trials": self.trials, "n_rounds": self.n_rounds,
                "rate": self.rate, "wilson95": [self.ci_low, self.ci_high]}


def cheat_statistics(n_rounds: int, n_trials: int, strategy: Strategy,
                     rng: np.random.Generator) -> CheatStatistics:
    """Empirical acceptance rate of ``strategy`` over independent protocol runs."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    accepts = 0
    for child in rng.spawn(n_trials):
        transcript = run_protocol(n_rounds, strategy, child, stop_on_reject=True)
        accepts += transcript.verdict == "Accept"
    lo, hi = wilson_interval(accepts, n_trials)
    return CheatStatistics(accepts, n_trials, n_rounds, lo, hi)
