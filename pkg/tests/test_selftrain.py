"""Pair harvesting, buffer refresh, the training loop, and consistency."""

import math
import random

import pytest

from cmpdp.classic import exact_mis_size, greedy_mis
from cmpdp.dpsolve import oracle_mis_comparator, random_comparator
from cmpdp.generators import GenSpec, generate
from cmpdp.graph import build_graph
from cmpdp.net import adam_step, init_adam, init_params, pair_loss_and_grad
from cmpdp.selftrain import (
    PairSample,
    TrainConfig,
    consistency_fraction,
    harvest_pairs,
    measure_consistency,
    metrics_to_csv,
    refresh_buffer,
    train,
)

from helpers import random_graph


def small_cfg(**overrides) -> TrainConfig:
    base = dict(
        total_epochs=4,
        batch_size=8,
        num_rollouts=2,
        graphs_per_refresh=4,
        pairs_per_graph=3,
        epochs_per_refresh=2,
        rounds=1,
        width=4,
        head_layers=2,
        seed=0,
        consistency_pairs=8,
    )
    base.update(overrides)
    return TrainConfig(**base)


def er_dataset(count: int, n: int, p: float, seed: int):
    return [generate(GenSpec("er", n=n, p=p, seed=seed + i)) for i in range(count)]


class TestHarvest:
    def test_edgeless_yields_nothing(self):
        params = init_params(1, 2, 2, seed=0)
        assert harvest_pairs(build_graph(5, []), params, small_cfg(), seed=1) == []

    def test_triangle_first_step(self):
        params = init_params(1, 2, 2, seed=0)
        samples = harvest_pairs(build_graph(3, [(0, 1), (1, 2), (0, 2)]), params, small_cfg(), 3)
        assert 1 <= len(samples) <= 2
        first = samples[0]
        # first branch pair: an edge-graph against a lone vertex, both with
        # optimum 1, hence a tie labeled 0
        assert {first.g.n, first.g_prime.n} == {2, 1}
        assert first.est_g == first.est_gp == 1
        assert first.label == 0

    def test_pairs_per_graph_cap(self):
        params = init_params(1, 2, 2, seed=0)
        g = random_graph(random.Random(4), 14, 0.4)
        samples = harvest_pairs(g, params, small_cfg(pairs_per_graph=1), seed=2)
        assert len(samples) == 1

    def test_label_law(self):
        params = init_params(1, 3, 2, seed=1)
        rng = random.Random(9)
        for trial in range(10):
            g = random_graph(rng, rng.randint(4, 12), 0.4)
            for s in harvest_pairs(g, params, small_cfg(), seed=trial):
                assert s.label == int(s.est_g < s.est_gp)

    def test_mixed_estimates_floor_at_greedy(self):
        params = init_params(1, 3, 2, seed=1)
        g = random_graph(random.Random(3), 12, 0.3)
        for s in harvest_pairs(g, params, small_cfg(mixed=True), seed=5):
            assert s.est_g >= len(greedy_mis(s.g))
            assert s.est_gp >= len(greedy_mis(s.g_prime))

    def test_drop_ties(self):
        params = init_params(1, 3, 2, seed=1)
        g = random_graph(random.Random(3), 12, 0.3)
        kept = harvest_pairs(g, params, small_cfg(drop_ties=True, pairs_per_graph=8), seed=5)
        assert all(s.est_g != s.est_gp for s in kept)


class TestRefreshBuffer:
    def test_size_bound(self):
        params = init_params(1, 2, 2, seed=0)
        cfg = small_cfg(graphs_per_refresh=2, pairs_per_graph=3)
        buf = refresh_buffer(er_dataset(5, 12, 0.3, seed=0), params, cfg, seed=1)
        assert buf.capacity == 6
        assert 0 < len(buf) <= buf.capacity

    def test_deterministic(self):
        params = init_params(1, 2, 2, seed=0)
        data = er_dataset(5, 12, 0.3, seed=0)
        a = refresh_buffer(data, params, small_cfg(), seed=7)
        b = refresh_buffer(data, params, small_cfg(), seed=7)
        assert a.train == b.train and a.val == b.val

    def test_validation_fraction(self):
        params = init_params(1, 2, 2, seed=0)
        cfg = small_cfg(graphs_per_refresh=5, pairs_per_graph=2)
        # force exactly 10 samples by harvesting from dense graphs
        data = er_dataset(5, 14, 0.6, seed=3)
        buf = refresh_buffer(data, params, cfg, seed=2)
        if len(buf) == 10:
            assert len(buf.val) == 2
        assert len(buf.val) == int(len(buf) * 0.2)
        assert not set(map(id, buf.val)) & set(map(id, buf.train))

    def test_cross_pairs_add_samples(self):
        params = init_params(1, 2, 2, seed=0)
        data = er_dataset(4, 10, 0.4, seed=1)
        plain = refresh_buffer(data, params, small_cfg(), seed=3)
        crossed = refresh_buffer(data, params, small_cfg(cross_pairs=True), seed=3)
        assert len(crossed) > len(plain)

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError, match="empty dataset"):
            refresh_buffer([], init_params(1, 2, 2, seed=0), small_cfg(), seed=0)


class TestConsistency:
    def test_identical_pairs_fully_consistent(self):
        params = init_params(1, 3, 2, seed=2)
        g = random_graph(random.Random(1), 9, 0.4)
        pairs = [(g, g)] * 5
        assert measure_consistency(params, pairs, num_rollouts=2, seed=0) == 1.0

    def test_oracle_with_exact_estimates(self):
        rng = random.Random(5)
        pairs = [
            (random_graph(rng, rng.randint(2, 10), 0.4), random_graph(rng, rng.randint(2, 10), 0.4))
            for _ in range(20)
        ]
        comparator = oracle_mis_comparator()
        assert consistency_fraction(pairs, comparator, exact_mis_size) == 1.0

    def test_random_comparator_near_half(self):
        rng = random.Random(6)
        pairs = []
        while len(pairs) < 200:
            a = random_graph(rng, rng.randint(2, 9), 0.5)
            b = random_graph(rng, rng.randint(2, 9), 0.5)
            if exact_mis_size(a) != exact_mis_size(b):
                pairs.append((a, b))
        value = consistency_fraction(pairs, random_comparator(11), exact_mis_size)
        assert 0.35 < value < 0.65

    def test_empty_pairs_vacuous(self):
        params = init_params(1, 2, 2, seed=0)
        assert measure_consistency(params, [], 1, seed=0) == 1.0

    def test_accepts_pair_samples(self):
        params = init_params(1, 2, 2, seed=0)
        g = random_graph(random.Random(2), 8, 0.3)
        sample = PairSample(g, g, 0, 1, 1, (0, 0))
        assert measure_consistency(params, [sample], 1, seed=0) == 1.0


class TestTrain:
    def test_zero_epochs_returns_initial(self):
        data = er_dataset(3, 10, 0.3, seed=0)
        cfg = small_cfg(total_epochs=0)
        params, rows = train(data, cfg)
        fresh = init_params(cfg.rounds, cfg.width, cfg.head_layers, cfg.seed)
        assert rows == []
        for (_, a), (_, b) in zip(params.tensors(), fresh.tensors()):
            assert (a == b).all()

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError, match="empty dataset"):
            train([], small_cfg())

    def test_single_pair_overfit_drops_below_ln2(self):
        # one distinguishable pair, trained repeatedly: loss must fall under
        # the coin-flip level
        g = build_graph(3, [(0, 1), (1, 2), (0, 2)])
        gp = build_graph(3, [(0, 1), (1, 2)])
        params = init_params(2, 4, 2, seed=0)
        state = init_adam(params)
        for _ in range(60):
            loss, grads = pair_loss_and_grad(params, g, gp, 1)
            params, state = adam_step(params, grads, state, lr=1e-3)
        final, _ = pair_loss_and_grad(params, g, gp, 1)
        assert final < math.log(2.0)

    def test_one_adam_step_decreases_pair_loss(self):
        g = random_graph(random.Random(1), 7, 0.4)
        gp = random_graph(random.Random(2), 8, 0.4)
        params = init_params(2, 4, 2, seed=3)
        loss0, grads = pair_loss_and_grad(params, g, gp, 0)
        params2, _ = adam_step(params, grads, init_adam(params), lr=1e-4)
        loss1, _ = pair_loss_and_grad(params2, g, gp, 0)
        assert loss1 < loss0

    def test_smoke_run_beats_random_guessing(self):
        data = er_dataset(20, 15, 0.2, seed=10)
        cfg = TrainConfig(
            total_epochs=50,
            batch_size=16,
            num_rollouts=2,
            mixed=True,
            graphs_per_refresh=10,
            pairs_per_graph=6,
            epochs_per_refresh=10,
            rounds=2,
            width=8,
            head_layers=3,
            seed=1,
            consistency_pairs=8,
        )
        params, rows = train(data, cfg)
        assert len(rows) == 50
        assert rows[-1].val_pair_accuracy > 0.5
        # rows are clean: epoch-monotone and finite
        assert [r.epoch for r in rows] == list(range(50))
        for r in rows:
            for value in (r.train_loss, r.val_loss, r.val_pair_accuracy, r.consistency):
                assert math.isfinite(value)
        assert all(b.wall_seconds >= a.wall_seconds for a, b in zip(rows, rows[1:]))

    def test_metrics_csv_schema(self):
        data = er_dataset(3, 10, 0.3, seed=0)
        _, rows = train(data, small_cfg(total_epochs=2))
        text = metrics_to_csv(rows)
        header, *body = text.strip().splitlines()
        assert header == "epoch,refresh_index,train_loss,val_loss,val_pair_accuracy,consistency,wall_seconds"
        assert len(body) == 2

    def test_degenerate_buffer_warns_but_trains(self, caplog):
        # triangles only: every harvested pair ties at estimate 1
        data = [build_graph(3, [(0, 1), (1, 2), (0, 2)])] * 3
        with caplog.at_level("WARNING"):
            _, rows = train(data, small_cfg(total_epochs=2))
        assert len(rows) == 2
        assert any("tie" in rec.message for rec in caplog.records)
