"""Drift anticipation: shadow sub-rule pairs that track each principal rule.

Every principal rule carries an anticipated pair: a slow sub-rule (long
premise horizon) and a fast sub-rule (short horizon). Both start as copies
of the parent and adapt on the same samples the parent wins, so under a
stationary distribution they stay on top of each other, while under drift
the fast one slides toward the new data and the two centers separate. The
separation test compares the center gap against the sum of the ellipsoid
radii of the two sub-rule clusters along the gap direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fis import Premise, Rule
from .forgetting import DDFWindow


def _copy_premise(premise: Premise, horizon: int) -> Premise:
    """Deep-copy a premise under a new horizon, capping hits at that horizon.

    The cap makes a freshly spawned sub-rule exactly as plastic as one that
    had always lived at this horizon; without it a long-lived parent would
    pin the fast sub-rule's fading factor to 1/horizon from a history it is
    supposed to be able to abandon anyway.
    """
    return Premise(
        center=premise.center.copy(),
        cov=premise.cov.copy(),
        cov_inv=premise.cov_inv.copy(),
        hits=min(premise.hits, horizon),
        horizon=horizon,
    )


@dataclass
class SubRule:
    """One member of an anticipated pair: premise + private consequent/window."""

    premise: Premise
    consequent: "object"
    window: DDFWindow


@dataclass
class AnticipatedPair:
    """Slow/fast shadow pair attached to one principal rule."""

    slow: SubRule
    fast: SubRule
    samples_seen: int = 0

    def separation(self, radius_fn) -> float:
        """Center gap over summed directional radii; 0 while centers coincide.

        ``radius_fn(premise, unit_direction)`` must return the ellipsoid
        radius of the premise cluster along the given unit vector.
        """
        delta = self.fast.premise.center - self.slow.premise.center
        gap = float(delta @ delta) ** 0.5
        if gap == 0.0:
            return 0.0
        u = delta / gap
        spread = radius_fn(self.slow.premise, u) + radius_fn(self.fast.premise, u)
        if spread <= 0.0:
            return np.inf
        return gap / spread


def spawn_pair(rule: Rule, slow_horizon: int, fast_horizon: int,
               window_capacity: int, init: str = "parent") -> AnticipatedPair:
    """Create the shadow pair for a rule from the rule's current state.

    ``init`` selects the consequent seed: "parent" copies the rule's
    coefficients and correlation matrix, "zero" restarts them at the blank
    state (zero coefficients, omega * I correlation). Windows start empty
    either way: the correlation copy already embodies the parent's window
    history, and re-evicting those samples would double-count them.
    """
    def seed_consequent():
        if init == "parent":
            return rule.consequent.copy()
        if init == "zero":
            blank = rule.consequent.copy()
            blank.coeffs[:] = 0.0
            blank.corr[:] = blank.omega * np.eye(blank.corr.shape[0])
            return blank
        raise ValueError(f"unknown anticipation init {init!r}")

    slow = SubRule(
        premise=_copy_premise(rule.premise, slow_horizon),
        consequent=seed_consequent(),
        window=DDFWindow(window_capacity),
    )
    fast = SubRule(
        premise=_copy_premise(rule.premise, fast_horizon),
        consequent=seed_consequent(),
        window=DDFWindow(window_capacity),
    )
    return AnticipatedPair(slow=slow, fast=fast, samples_seen=0)


@dataclass
class DriftEvent:
    """One detector firing: where, on which rule, and how separated."""

    sample_index: int
    rule_id: int
    strategy: str
    separation: float
