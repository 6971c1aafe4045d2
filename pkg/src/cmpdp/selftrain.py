"""Self-supervised training of the comparator.

The loop alternates two phases: (1) refresh a buffer of labeled graph pairs
by running the current comparator-guided solver on sampled training graphs,
taking sibling branch pairs from the recursion steps, and annotating each pair
with roll-out (or greedy-floored) size estimates; (2) several epochs of
mini-batch Adam on the pair classification loss. Labels always come from the
model's own roll-outs, never from an exact solver.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .dpsolve import (
    Comparator,
    derive_seed,
    learned_mis_comparator,
    mixed_estimate,
    rollout_estimate,
    solve_mis,
)
from .graph import Graph, graph_fingerprint
from .net import (
    CmpParams,
    adam_step,
    init_adam,
    init_params,
    pair_loss_and_grad,
    score_graph,
    zeros_like_params,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairSample:
    """One buffer record: a sibling branch pair, its size estimates, and the
    label (1 iff g_prime got the larger estimate; ties label 0)."""

    g: Graph
    g_prime: Graph
    label: int
    est_g: int
    est_gp: int
    origin: tuple[int, int]  # (harvest seed, recursion-step index)


@dataclass
class Buffer:
    train: list[PairSample] = field(default_factory=list)
    val: list[PairSample] = field(default_factory=list)
    capacity: int = 0  # configured ceiling for one refresh, for observability

    def __len__(self) -> int:
        return len(self.train) + len(self.val)


@dataclass
class TrainConfig:
    """Knobs of the self-training loop; defaults follow the evaluated setup."""

    total_epochs: int = 300
    batch_size: int = 32
    lr: float = 1e-3
    num_rollouts: int = 3
    mixed: bool = False
    graphs_per_refresh: int = 32
    pairs_per_graph: int = 8
    epochs_per_refresh: int = 10
    seed: int = 0
    rounds: int = 3
    width: int = 32
    head_layers: int = 4
    val_fraction: float = 0.2
    drop_ties: bool = False
    cross_pairs: bool = False
    consistency_pairs: int = 32

    def validate(self) -> None:
        for key in (
            "batch_size",
            "num_rollouts",
            "graphs_per_refresh",
            "pairs_per_graph",
            "epochs_per_refresh",
            "rounds",
            "width",
            "consistency_pairs",
        ):
            if getattr(self, key) < 1:
                raise ValueError(f"{key} must be positive")
        if self.total_epochs < 0:
            raise ValueError("total_epochs must be non-negative")
        if self.head_layers < 2:
            raise ValueError("head_layers must be at least 2")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in [0, 1)")


@dataclass
class MetricsRow:
    epoch: int
    refresh_index: int
    train_loss: float
    val_loss: float
    val_pair_accuracy: float
    consistency: float
    wall_seconds: float


METRICS_COLUMNS = (
    "epoch",
    "refresh_index",
    "train_loss",
    "val_loss",
    "val_pair_accuracy",
    "consistency",
    "wall_seconds",
)


def metrics_to_csv(rows: Iterable[MetricsRow]) -> str:
    lines = [",".join(METRICS_COLUMNS)]
    for r in rows:
        lines.append(
            f"{r.epoch},{r.refresh_index},{r.train_loss:.6f},{r.val_loss:.6f},"
            f"{r.val_pair_accuracy:.6f},{r.consistency:.6f},{r.wall_seconds:.3f}"
        )
    return "\n".join(lines) + "\n"


def _estimator(cfg: TrainConfig, comparator: Comparator) -> Callable[[Graph, int], int]:
    fn = mixed_estimate if cfg.mixed else rollout_estimate
    return lambda g, seed: fn(g, comparator, cfg.num_rollouts, seed)


def harvest_pairs(
    g_init: Graph, params: CmpParams, cfg: TrainConfig, seed: int
) -> list[PairSample]:
    """Run the solver once on ``g_init`` and turn up to ``pairs_per_graph``
    of its recursion steps into labeled samples."""
    comparator = learned_mis_comparator(params)
    _, traj = solve_mis(g_init, comparator, derive_seed(seed, "solve"))
    if not traj.steps:
        return []
    rng = random.Random(derive_seed(seed, "pick"))
    count = min(cfg.pairs_per_graph, len(traj.steps))
    indices = sorted(rng.sample(range(len(traj.steps)), count))
    estimate = _estimator(cfg, comparator)
    samples = []
    for idx in indices:
        step = traj.steps[idx]
        est0 = estimate(step.g0, derive_seed(seed, "est", idx, 0))
        est1 = estimate(step.g1, derive_seed(seed, "est", idx, 1))
        if cfg.drop_ties and est0 == est1:
            continue
        samples.append(
            PairSample(step.g0, step.g1, int(est0 < est1), est0, est1, (seed, idx))
        )
    return samples


def refresh_buffer(
    dataset: Sequence[Graph], params: CmpParams, cfg: TrainConfig, seed: int
) -> Buffer:
    """Rebuild the buffer from scratch with the current parameters and split
    it into train/validation parts."""
    if not dataset:
        raise ValueError("empty dataset")
    rng = random.Random(derive_seed(seed, "select"))
    if len(dataset) >= cfg.graphs_per_refresh:
        picks = rng.sample(range(len(dataset)), cfg.graphs_per_refresh)
    else:
        picks = [rng.randrange(len(dataset)) for _ in range(cfg.graphs_per_refresh)]
    samples: list[PairSample] = []
    for j, gi in enumerate(picks):
        samples.extend(harvest_pairs(dataset[gi], params, cfg, derive_seed(seed, "harvest", j)))
    if cfg.cross_pairs and len(samples) >= 2:
        samples.extend(_cross_pairs(samples, params, cfg, derive_seed(seed, "cross")))
    rng.shuffle(samples)
    n_val = int(len(samples) * cfg.val_fraction)
    capacity = cfg.graphs_per_refresh * cfg.pairs_per_graph * (2 if cfg.cross_pairs else 1)
    return Buffer(train=samples[n_val:], val=samples[:n_val], capacity=capacity)


def _cross_pairs(
    samples: list[PairSample], params: CmpParams, cfg: TrainConfig, seed: int
) -> list[PairSample]:
    """Extra pairs drawn across trajectories, reusing per-graph estimates."""
    comparator = learned_mis_comparator(params)
    estimate = _estimator(cfg, comparator)
    pool: list[Graph] = []
    for s in samples:
        pool.append(s.g)
        pool.append(s.g_prime)
    rng = random.Random(seed)
    cache: dict[Graph, int] = {}

    def est(g: Graph) -> int:
        if g not in cache:
            cache[g] = estimate(g, derive_seed(seed, "est", graph_fingerprint(g)))
        return cache[g]

    out = []
    for idx in range(len(samples)):
        a, b = rng.sample(range(len(pool)), 2)
        ga, gb = pool[a], pool[b]
        ea, eb = est(ga), est(gb)
        if cfg.drop_ties and ea == eb:
            continue
        out.append(PairSample(ga, gb, int(ea < eb), ea, eb, (seed, idx)))
    return out


def measure_consistency(
    params: CmpParams,
    pairs: Iterable,
    num_rollouts: int,
    seed: int,
) -> float:
    """Fraction of pairs where the comparator's verdict agrees with the
    ordering of fresh roll-out estimates under the same parameters.

    Roll-out seeds derive from each graph's fingerprint, so the two sides of
    an identical pair always get identical estimates. ``pairs`` may hold
    PairSample objects or plain (g, g_prime) tuples.
    """
    comparator = learned_mis_comparator(params)
    cache: dict[Graph, int] = {}

    def estimate(g: Graph) -> int:
        if g not in cache:
            cache[g] = rollout_estimate(
                g, comparator, num_rollouts, derive_seed(seed, graph_fingerprint(g))
            )
        return cache[g]

    return consistency_fraction(pairs, comparator, estimate)


def consistency_fraction(
    pairs: Iterable, comparator: Comparator, estimate: Callable[[Graph], int]
) -> float:
    """Agreement between comparator verdicts and estimate ordering; 1.0 for an
    empty pair collection."""
    total = 0
    agree = 0
    for pair in pairs:
        if hasattr(pair, "g"):
            g, gp = pair.g, pair.g_prime
        else:
            g, gp = pair
        total += 1
        if (comparator(g, gp) == 0) == (estimate(g) >= estimate(gp)):
            agree += 1
    return agree / total if total else 1.0


def train(dataset: Sequence[Graph], cfg: TrainConfig) -> tuple[CmpParams, list[MetricsRow]]:
    """Full self-training run; returns the best-validation-loss parameters and
    one metrics row per epoch.

    Consistency is measured at every buffer refresh (the first measurement,
    before any update, is the random-initialization value) and carried into
    the rows of that refresh. When the buffer has no validation split, the
    validation columns fall back to the train split.
    """
    cfg.validate()
    if not dataset:
        raise ValueError("empty dataset")
    params = init_params(cfg.rounds, cfg.width, cfg.head_layers, cfg.seed)
    state = init_adam(params)
    best_loss = float("inf")
    best_params = params.copy()
    rows: list[MetricsRow] = []
    started = time.monotonic()
    epoch = 0
    refresh_index = 0
    rng = random.Random(derive_seed(cfg.seed, "epochs"))
    while epoch < cfg.total_epochs:
        buffer = refresh_buffer(dataset, params, cfg, derive_seed(cfg.seed, "refresh", refresh_index))
        if len(buffer) == 0:
            log.warning("refresh %d produced an empty buffer", refresh_index)
        elif all(s.est_g == s.est_gp for s in buffer.train + buffer.val):
            log.warning("refresh %d produced only tied labels", refresh_index)
        probe = (buffer.val or buffer.train)[: cfg.consistency_pairs]
        consistency = measure_consistency(
            params, probe, cfg.num_rollouts, derive_seed(cfg.seed, "consistency", refresh_index)
        )
        val_split = buffer.val or buffer.train
        for _ in range(cfg.epochs_per_refresh):
            if epoch >= cfg.total_epochs:
                break
            order = list(buffer.train)
            rng.shuffle(order)
            losses: list[float] = []
            for start in range(0, len(order), cfg.batch_size):
                batch = order[start : start + cfg.batch_size]
                total = zeros_like_params(params)
                for sample in batch:
                    loss, grads = pair_loss_and_grad(params, sample.g, sample.g_prime, sample.label)
                    losses.append(loss)
                    for (_, acc), (_, gr) in zip(total.tensors(), grads.tensors()):
                        acc += gr
                for _, acc in total.tensors():
                    acc /= len(batch)
                params, state = adam_step(params, grads=total, state=state, lr=cfg.lr)
            train_loss = sum(losses) / len(losses) if losses else 0.0
            val_loss, val_acc = _validate(params, val_split)
            if val_loss < best_loss:
                best_loss = val_loss
                best_params = params.copy()
            rows.append(
                MetricsRow(
                    epoch=epoch,
                    refresh_index=refresh_index,
                    train_loss=train_loss,
                    val_loss=val_loss,
                    val_pair_accuracy=val_acc,
                    consistency=consistency,
                    wall_seconds=time.monotonic() - started,
                )
            )
            epoch += 1
        refresh_index += 1
    return best_params, rows


def _validate(params: CmpParams, split: list[PairSample]) -> tuple[float, float]:
    if not split:
        return 0.0, 0.0
    losses = []
    correct = 0
    for s in split:
        z0 = score_graph(params, s.g)[0]
        z1 = score_graph(params, s.g_prime)[0]
        d = z1 - z0
        losses.append(float(np.logaddexp(0.0, d) - s.label * d))
        if int(z0 < z1) == s.label:
            correct += 1
    return sum(losses) / len(losses), correct / len(split)
