"""Shot-level Monte Carlo simulation of the comparison protocols.

Campaigns draw fresh Haar devices per trial, sample one outcome record per
trial from the exact Born probabilities, classify it, and issue a verdict:
"different" iff the outcome class is conclusive for the campaign's test
state, else "inconclusive".

Determinism contract
--------------------
Trials are processed in fixed shards of SHARD_SIZE regardless of worker
count.  Shard s of the ground-truth stream t uses
``np.random.SeedSequence(seed, spawn_key=(t, s))``, and only integer counts
are aggregated, so campaign results (and their serialized form, which has
no timestamps and sorted keys) are byte-identical across runs and across
--workers settings.

Probabilities below PROB_CLAMP are clamped to zero and the row renormalized
before sampling; classes that are analytically forbidden therefore never
appear, making unambiguity exact in sampled campaigns, not just up to
floating noise.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ._version import __version__
from .comparison import (
    LABELED_CLASSES,
    UNLABELED_CLASSES,
    Observable,
    Scenario,
    TestState,
    conclusive_classes,
    kappa_state,
    labeled_outcome_distribution,
    optimal_test_state,
    pairwise_success_angle,
    unlabeled_outcome_distribution,
)
from .errors import ConfigError, ConsistencyError
from .haar import haar_unitaries, rng_from
from .tensors import Operator, Vector

#: trials per deterministic shard (fixed; independent of worker count)
SHARD_SIZE = 1 << 16
#: probabilities below this are treated as exact zeros before sampling
PROB_CLAMP = 1e-12
#: tolerance for the internal "probabilities sum to 1" cross-check
SUM_TOL = 1e-8

_STREAM = {"different": 0, "equal": 1, "sweep": 2}
_SUBCHUNK = 8192  # einsum batch granularity inside a shard


class Verdict(str, Enum):
    DIFFERENT = "different"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ShotRecord:
    """One simulated trial: raw outcomes, their class, and the verdict."""

    outcomes: Tuple[int, ...]
    outcome_class: str
    verdict: Verdict


@dataclass(frozen=True)
class CampaignConfig:
    scenario: Scenario
    trials: int
    seed: int
    ground_truth: str = "both"  # "different" | "equal" | "both"
    test_state: str = "optimal"  # "optimal" | "kappa[:J]" | path to .npy
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.ground_truth not in ("different", "equal", "both"):
            raise ConfigError(f"unknown ground truth {self.ground_truth!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        if int(self.seed) < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")


@dataclass(frozen=True)
class TruthResult:
    """Counts from the sub-campaign run under one ground truth."""

    ground_truth: str
    trials: int
    class_counts: Mapping[str, int]
    different_verdicts: int

    @property
    def inconclusive_verdicts(self) -> int:
        return self.trials - self.different_verdicts

    @property
    def different_rate(self) -> float:
        return self.different_verdicts / self.trials

    @property
    def different_rate_stderr(self) -> float:
        p = self.different_rate
        return float(np.sqrt(p * (1.0 - p) / self.trials))


@dataclass(frozen=True)
class CampaignResult:
    config: CampaignConfig
    conclusive: Tuple[str, ...]
    results: Mapping[str, TruthResult]
    version: str = __version__

    def to_json_dict(self) -> dict:
        out = {
            "format": "qmeter.campaign/1",
            "version": self.version,
            "scenario": {"kind": self.config.scenario.kind, "dim": self.config.scenario.dim},
            "seed": int(self.config.seed),
            "trials": self.config.trials,
            "ground_truth": self.config.ground_truth,
            "test_state": self.config.test_state,
            "shard_size": SHARD_SIZE,
            "conclusive_classes": list(self.conclusive),
            "results": {},
        }
        for truth, res in self.results.items():
            block = {
                "trials": res.trials,
                "class_counts": dict(res.class_counts),
                "different_verdicts": res.different_verdicts,
                "inconclusive_verdicts": res.inconclusive_verdicts,
            }
            if truth == "different":
                block["success_estimate"] = res.different_rate
                block["success_stderr"] = res.different_rate_stderr
            else:
                block["false_positives"] = res.different_verdicts
            out["results"][truth] = block
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


# ------------------------------------------------------------- test states

def resolve_test_state(spec: str, scenario: Scenario) -> TestState:
    """Turn a test-state spec string into a TestState.

    "optimal" selects the scenario's optimal state; "kappa" (or "kappa:J",
    J in 1..3) selects a kappa-family pure state (unlabeled only); any other
    value is read as a .npy file holding either a state vector or a density
    matrix on the protocol's full space (d^2 for labeled, 16 for unlabeled).
    """
    if spec == "optimal":
        return optimal_test_state(scenario)
    if spec == "kappa" or spec.startswith("kappa:"):
        if scenario.kind != "unlabeled":
            raise ConfigError("kappa test states belong to the unlabeled scenario")
        j = 1 if spec == "kappa" else _parse_kappa_index(spec)
        if not 1 <= j <= 3:
            raise ConfigError(f"bad kappa spec {spec!r}; expected kappa:1..3")
        return kappa_state(j)
    return _load_state_file(spec, scenario)


def _parse_kappa_index(spec: str) -> int:
    try:
        return int(spec.split(":", 1)[1])
    except ValueError as exc:
        raise ConfigError(f"bad kappa spec {spec!r}; expected kappa:1..3") from exc


def _load_state_file(path: str, scenario: Scenario) -> TestState:
    try:
        arr = np.load(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read test state file {path!r}: {exc}") from exc
    d, n = (scenario.dim, 2) if scenario.kind == "labeled" else (2, 4)
    dim = d ** n
    if arr.ndim == 1:
        if arr.shape != (dim,):
            raise ConfigError(
                f"state vector in {path!r} has shape {arr.shape}, expected ({dim},)"
            )
        return TestState.pure(Vector(arr, d, n), kind="custom")
    if arr.ndim == 2:
        if arr.shape != (dim, dim):
            raise ConfigError(
                f"density matrix in {path!r} has shape {arr.shape}, expected ({dim}, {dim})"
            )
        return TestState.from_matrix(arr, d, n, kind="custom")
    raise ConfigError(f"test state file {path!r} must hold a vector or a matrix")


# ---------------------------------------------------------- single trials

def _scenario_for(a: Observable, kind: str) -> Scenario:
    return Scenario(kind, a.d)

def _checked_flat_probs(p: np.ndarray) -> np.ndarray:
    flat = np.asarray(p, dtype=float).reshape(-1)
    total = flat.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise ConsistencyError(f"outcome probabilities sum to {total!r}, not 1")
    flat = np.where(flat < PROB_CLAMP, 0.0, flat)
    return flat / flat.sum()


def _sample_index(flat: np.ndarray, gen: np.random.Generator) -> int:
    cum = np.cumsum(flat)
    cum[-1] = 1.0
    return int(np.searchsorted(cum, gen.random(), side="right"))


def run_labeled_trial(
    a: Observable,
    b: Observable,
    state: Union[TestState, Operator],
    rng=None,
    conclusive: Optional[Tuple[str, ...]] = None,
) -> ShotRecord:
    """One shot of the labeled protocol with fixed devices a and b."""
    gen = rng_from(rng)
    d = a.d
    if conclusive is None:
        conclusive = conclusive_classes(_scenario_for(a, "labeled"), state)
    flat = _checked_flat_probs(labeled_outcome_distribution(a, b, state))
    idx = _sample_index(flat, gen)
    j, k = divmod(idx, d)
    cls = "same" if j == k else "diff"
    verdict = Verdict.DIFFERENT if cls in conclusive else Verdict.INCONCLUSIVE
    return ShotRecord(outcomes=(j, k), outcome_class=cls, verdict=verdict)


def run_unlabeled_trial(
    a: Observable,
    b: Observable,
    state: Union[TestState, Operator, None] = None,
    rng=None,
    conclusive: Optional[Tuple[str, ...]] = None,
) -> ShotRecord:
    """One trial of the unlabeled protocol: two shots of each device.

    Each device's outcomes pass through an (unknown) uniformly random
    relabeling before being recorded; outcome classes compare only outcomes
    of the same device, so they are unaffected.
    """
    gen = rng_from(rng)
    if state is None:
        state = optimal_test_state(_scenario_for(a, "unlabeled"))
    if conclusive is None:
        conclusive = conclusive_classes(_scenario_for(a, "unlabeled"), state)
    flat = _checked_flat_probs(unlabeled_outcome_distribution(a, b, state))
    idx = _sample_index(flat, gen)
    j, k, m, n = (idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
    ra, rb = int(gen.integers(0, 2)), int(gen.integers(0, 2))
    j, k, m, n = j ^ ra, k ^ ra, m ^ rb, n ^ rb
    cls = ("same" if j == k else "diff") + "_" + ("same" if m == n else "diff")
    verdict = Verdict.DIFFERENT if cls in conclusive else Verdict.INCONCLUSIVE
    return ShotRecord(outcomes=(j, k, m, n), outcome_class=cls, verdict=verdict)


# ------------------------------------------------------------ batched paths

def _labeled_probs_generic(us: np.ndarray, vs: np.ndarray,
                           weights: np.ndarray, vecs: np.ndarray, d: int) -> np.ndarray:
    """Born table p[b, j, k] = sum_r w_r |(U_b^dag M_r conj(V_b))_jk|^2."""
    p = np.zeros((us.shape[0], d, d))
    uc, vc = us.conj(), vs.conj()
    for w, vec in zip(weights, vecs):
        m = vec.reshape(d, d)
        g = np.einsum("bmj,mp,bpk->bjk", uc, m, vc, optimize=True)
        p += w * (g.real ** 2 + g.imag ** 2)
    return p


def _labeled_probs_antisym(us: np.ndarray, vs: np.ndarray, d: int) -> np.ndarray:
    """Exact shortcut for the antisymmetric state:
    p[b, j, k] = (1 - |(U_b^dag V_b)_jk|^2) / (d (d-1))."""
    w = np.einsum("bmj,bmk->bjk", us.conj(), vs, optimize=True)
    return (1.0 - (w.real ** 2 + w.imag ** 2)) / (d * (d - 1))


def _unlabeled_probs(us: np.ndarray, vs: np.ndarray,
                     weights: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Born table p[b, idx] over the 16 outcome tuples (j,k,m,n) of two shots
    of each qubit device."""
    b = us.shape[0]
    p = np.zeros((b, 16))
    uc, vc = us.conj(), vs.conj()
    for w, vec in zip(weights, vecs):
        psi = vec.reshape(2, 2, 2, 2)
        amp = np.einsum("mnpq,bmj,bnk,bpa,bqc->bjkac", psi, uc, uc, vc, vc, optimize=True)
        p += w * (amp.real ** 2 + amp.imag ** 2).reshape(b, 16)
    return p


def _sample_rows(p: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """Clamp, renormalize and sample one category per row."""
    totals = p.sum(axis=1)
    if np.max(np.abs(totals - 1.0)) > SUM_TOL:
        raise ConsistencyError(
            f"outcome probabilities sum to at worst {totals[np.argmax(np.abs(totals - 1))]!r}"
        )
    p = np.where(p < PROB_CLAMP, 0.0, p)
    p /= p.sum(axis=1, keepdims=True)
    cum = np.cumsum(p, axis=1)
    cum[:, -1] = 1.0
    u = gen.random(p.shape[0])
    return (u[:, None] >= cum).sum(axis=1)


_LABELED_CLASS_NAMES = LABELED_CLASSES
_UNLABELED_CLASS_NAMES = UNLABELED_CLASSES


def _unlabeled_class_of_index() -> np.ndarray:
    """Map flat outcome index (j,k,m,n bits) -> class index into UNLABELED_CLASSES."""
    idx = np.arange(16)
    j, k, m, n = (idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
    return ((j != k) << 1) | (m != n)  # 0 ss, 1 sd, 2 ds, 3 dd


_UNLABELED_CLASS_ORDER = ("same_same", "same_diff", "diff_same", "diff_diff")


def _shard_counts(task: tuple) -> Dict[str, int]:
    """Simulate one shard and return its outcome-class counts.

    `task` = (kind, d, truth, fast_antisym, weights, vecs, seed, shard, count).
    Deterministic in (seed, truth, shard) alone.
    """
    kind, d, truth, fast_antisym, weights, vecs, seed, shard, count = task
    seq = np.random.SeedSequence(seed, spawn_key=(_STREAM[truth], shard))
    gen = np.random.default_rng(seq)

    if kind == "labeled":
        if fast_antisym and truth == "equal":
            # U-independent table: uniform over the d(d-1) unequal pairs
            flat = (1.0 - np.eye(d)).reshape(-1) / (d * (d - 1))
            cum = np.cumsum(flat)
            cum[-1] = 1.0
            idx = np.searchsorted(cum, gen.random(count), side="right")
        else:
            us = haar_unitaries(d, count, gen)
            vs = haar_unitaries(d, count, gen) if truth == "different" else us
            if fast_antisym:
                p = _labeled_probs_antisym(us, vs, d)
            else:
                p = _labeled_probs_generic(us, vs, weights, vecs, d)
            idx = _sample_rows(p.reshape(count, -1), gen)
        j, k = idx // d, idx % d
        same = int(np.sum(j == k))
        return {"same": same, "diff": count - same}

    # unlabeled: process the shard in einsum-friendly sub-chunks
    counts = np.zeros(4, dtype=np.int64)
    cls_of = _unlabeled_class_of_index()
    done = 0
    while done < count:
        step = min(_SUBCHUNK, count - done)
        us = haar_unitaries(2, step, gen)
        vs = haar_unitaries(2, step, gen) if truth == "different" else us
        p = _unlabeled_probs(us, vs, weights, vecs)
        idx = _sample_rows(p, gen)
        counts += np.bincount(cls_of[idx], minlength=4)
        done += step
    return {name: int(c) for name, c in zip(_UNLABELED_CLASS_ORDER, counts)}


def _shards_for(trials: int) -> Sequence[Tuple[int, int]]:
    out = []
    start = 0
    shard = 0
    while start < trials:
        out.append((shard, min(SHARD_SIZE, trials - start)))
        shard += 1
        start += SHARD_SIZE
    return out


def run_campaign(config: CampaignConfig) -> CampaignResult:
    """Run the configured campaign and aggregate integer outcome counts.

    Ground truth "different" samples two independent Haar devices per trial;
    "equal" samples one device used twice; "both" runs the two sub-campaigns
    on independent seed streams.
    """
    scen = config.scenario
    state = resolve_test_state(config.test_state, scen)
    conclusive = conclusive_classes(scen, state)
    weights, vecs = state.pure_components()
    fast_antisym = scen.kind == "labeled" and state.kind == "antisymmetric"

    truths = ("different", "equal") if config.ground_truth == "both" else (config.ground_truth,)
    class_names = _LABELED_CLASS_NAMES if scen.kind == "labeled" else _UNLABELED_CLASS_NAMES

    results = {}
    for truth in truths:
        tasks = [
            (scen.kind, scen.dim, truth, fast_antisym, weights, vecs,
             int(config.seed), shard, count)
            for shard, count in _shards_for(config.trials)
        ]
        if config.workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                partials = list(pool.map(_shard_counts, tasks))
        else:
            partials = [_shard_counts(t) for t in tasks]
        totals = {name: 0 for name in class_names}
        for part in partials:
            for name, c in part.items():
                totals[name] += c
        different = sum(totals[name] for name in conclusive)
        results[truth] = TruthResult(
            ground_truth=truth,
            trials=config.trials,
            class_counts=totals,
            different_verdicts=different,
        )
    return CampaignResult(config=config, conclusive=conclusive, results=results)


# ------------------------------------------------------------------- sweeps

@dataclass(frozen=True)
class SweepPoint:
    theta: float
    trials: int
    empirical: float
    stderr: float
    analytic: float


def sweep_theta(thetas: Sequence[float], trials: int, seed: int) -> Tuple[SweepPoint, ...]:
    """Empirical vs analytic success across fixed qubit device pairs.

    Point i measures the pair (computational, rotated by theta_i) with the
    optimal test state, `trials` times, on seed stream (2, i).  Devices are
    fixed within a point, so the outcome counts follow one multinomial draw
    from the exact Born table, which is sampled directly.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    scen = Scenario("unlabeled", 2)
    state = optimal_test_state(scen)
    conclusive = conclusive_classes(scen, state)
    cls_of = _unlabeled_class_of_index()
    conc_idx = [i for i in range(16)
                if _UNLABELED_CLASS_ORDER[cls_of[i]] in conclusive]
    a = Observable.computational(2)
    points = []
    for i, theta in enumerate(thetas):
        b = Observable.qubit_angle(float(theta))
        flat = _checked_flat_probs(unlabeled_outcome_distribution(a, b, state))
        gen = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(_STREAM["sweep"], i)))
        counts = gen.multinomial(trials, flat)
        hits = int(counts[conc_idx].sum())
        emp = hits / trials
        stderr = float(np.sqrt(emp * (1.0 - emp) / trials))
        points.append(SweepPoint(
            theta=float(theta), trials=trials, empirical=emp,
            stderr=stderr, analytic=pairwise_success_angle(float(theta)),
        ))
    return tuple(points)


def sweep_to_csv(points: Sequence[SweepPoint]) -> str:
    """Serialize sweep points as CSV (header + one row per theta)."""
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta", "trials", "empirical", "stderr", "analytic"])
    for p in points:
        writer.writerow([repr(p.theta), p.trials, repr(p.empirical),
                         repr(p.stderr), repr(p.analytic)])
    return buf.getvalue()
