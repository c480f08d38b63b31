"""Model serialization: versioned JSON snapshots and state hashing.

Snapshots capture the full learner state (rules, shadow pairs, windows,
counters, config) as plain JSON. Floats survive the round trip exactly
(repr-based encoding), so saving and reloading resumes the stream
bit-for-bit. Cached covariance inverses are not stored; they are
recomputed from the covariance, which is deterministic.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict

import numpy as np

from .anticipation import AnticipatedPair, DriftEvent, SubRule
from .config import LearnerConfig
from .fis import Consequent, Premise, Rule
from .forgetting import DDFWindow
from .learner import AnticipatingClassifier
from .linalg import regularized_inverse

FORMAT_NAME = "driftfis-model"
FORMAT_VERSION = 1


class SnapshotError(ValueError):
    """Snapshot file is missing, malformed, or from an unknown format."""


def _premise_to_dict(p: Premise) -> dict:
    return {
        "center": p.center.tolist(),
        "cov": p.cov.tolist(),
        "hits": p.hits,
        "horizon": p.horizon,
    }


def _premise_from_dict(d: dict) -> Premise:
    cov = np.array(d["cov"], dtype=float)
    return Premise(
        center=np.array(d["center"], dtype=float),
        cov=cov,
        cov_inv=regularized_inverse(cov),
        hits=int(d["hits"]),
        horizon=d["horizon"],
    )


def _consequent_to_dict(c: Consequent) -> dict:
    return {"coeffs": c.coeffs.tolist(), "corr": c.corr.tolist(), "omega": c.omega}


def _consequent_from_dict(d: dict) -> Consequent:
    return Consequent(
        coeffs=np.array(d["coeffs"], dtype=float),
        corr=np.array(d["corr"], dtype=float),
        omega=float(d["omega"]),
    )


def _window_to_dict(w: DDFWindow) -> dict:
    return {
        "capacity": w.capacity,
        "skipped": w.skipped,
        "entries": [[x.tolist(), weight] for x, weight in w.entries],
    }


def _window_from_dict(d: dict) -> DDFWindow:
    window = DDFWindow(int(d["capacity"]), skipped=int(d["skipped"]))
    for x_list, weight in d["entries"]:
        window.entries.append((np.array(x_list, dtype=float), float(weight)))
    return window


def _rule_to_dict(r: Rule) -> dict:
    return {
        "id": r.id,
        "born_class": r.born_class,
        "premise": _premise_to_dict(r.premise),
        "consequent": _consequent_to_dict(r.consequent),
        "window": _window_to_dict(r.window),
    }


def _rule_from_dict(d: dict) -> Rule:
    return Rule(
        id=int(d["id"]),
        premise=_premise_from_dict(d["premise"]),
        consequent=_consequent_from_dict(d["consequent"]),
        window=_window_from_dict(d["window"]),
        born_class=d["born_class"],
    )


def _sub_to_dict(s: SubRule) -> dict:
    return {
        "premise": _premise_to_dict(s.premise),
        "consequent": _consequent_to_dict(s.consequent),
        "window": _window_to_dict(s.window),
    }


def _sub_from_dict(d: dict) -> SubRule:
    return SubRule(
        premise=_premise_from_dict(d["premise"]),
        consequent=_consequent_from_dict(d["consequent"]),
        window=_window_from_dict(d["window"]),
    )


def _pair_to_dict(p: AnticipatedPair) -> dict:
    return {
        "samples_seen": p.samples_seen,
        "slow": _sub_to_dict(p.slow),
        "fast": _sub_to_dict(p.fast),
    }


def _pair_from_dict(d: dict) -> AnticipatedPair:
    return AnticipatedPair(
        slow=_sub_from_dict(d["slow"]),
        fast=_sub_from_dict(d["fast"]),
        samples_seen=int(d["samples_seen"]),
    )


def state_dict(learner: AnticipatingClassifier) -> dict:
    """Full model state as a JSON-serializable dictionary."""
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "n_features": learner.system.n_features,
        "n_classes": learner.system.n_classes,
        "config": asdict(learner.config),
        "samples_seen": learner.samples_seen,
        "next_rule_id": learner.next_rule_id,
        "seen_classes": sorted(learner.seen_classes),
        "rules": [_rule_to_dict(r) for r in learner.system.rules],
        "anticipations": {
            str(rule_id): _pair_to_dict(pair)
            for rule_id, pair in learner.anticipations.items()
        },
        "drift_log": [asdict(event) for event in learner.drift_log],
    }


def from_state_dict(state: dict) -> AnticipatingClassifier:
    """Rebuild a learner from a state dictionary (inverse of state_dict)."""
    if state.get("format") != FORMAT_NAME:
        raise SnapshotError(f"not a {FORMAT_NAME} snapshot")
    if state.get("version") != FORMAT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {state.get('version')!r}")
    config = LearnerConfig(**state["config"])
    learner = AnticipatingClassifier(
        int(state["n_features"]), int(state["n_classes"]), config)
    learner.samples_seen = int(state["samples_seen"])
    learner.next_rule_id = int(state["next_rule_id"])
    learner.seen_classes = {int(c) for c in state["seen_classes"]}
    learner.anticipations = {
        int(rule_id): _pair_from_dict(d)
        for rule_id, d in state["anticipations"].items()
    }
    learner.drift_log = [DriftEvent(**d) for d in state["drift_log"]]
    learner._sync_banks([_rule_from_dict(d) for d in state["rules"]])
    return learner


def save_model(learner: AnticipatingClassifier, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_dict(learner), fh)
        fh.write("\n")


def load_model(path: str) -> AnticipatingClassifier:
    try:
        with open(path, encoding="utf-8") as fh:
            state = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(state, dict):
        raise SnapshotError(f"{path}: expected a JSON object at top level")
    return from_state_dict(state)


def model_state_hash(learner: AnticipatingClassifier) -> str:
    """SHA-256 over the canonical JSON state; equal iff states are equal."""
    canonical = json.dumps(state_dict(learner), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
