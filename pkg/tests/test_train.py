"""Batching, optimization, early stopping, and training determinism."""

import json

import numpy as np
import pytest

from helpers import encode_toy, toy_corpus
from treerel.checkpoint import Checkpoint, save_checkpoint
from treerel.features import FeatureConfig
from treerel.model import init_params
from treerel.train import (
    Adam,
    TrainConfig,
    compute_class_weights,
    fit,
    make_batches,
    make_optimizer,
    predict_labels,
    train_epoch,
)

FEATURES = FeatureConfig(use_dep=True, use_pos=True, use_entlen=True)


@pytest.fixture(scope="module")
def toy_sets():
    data = toy_corpus(n_train=20, n_val=12)
    train_set, val_set, vocab, emb = encode_toy(data, FEATURES)
    return train_set, val_set, vocab, emb


def input_size_of(instances):
    return next(iter(instances[0].inputs.values())).shape[0]


class TestMakeBatches:
    def test_33_into_16(self, toy_sets):
        train_set, val_set, _, _ = toy_sets
        instances = (train_set + val_set + train_set)[:33]
        batches = make_batches(instances, 16, seed=0, epoch=1)
        assert [len(b) for b in batches] == [16, 16, 1]

    def test_batch_size_one_preserves_shuffle_order(self, toy_sets):
        train_set, _, _, _ = toy_sets
        batches = make_batches(train_set, 1, seed=3, epoch=2)
        assert all(len(b) == 1 for b in batches)
        flat = [b[0] for b in batches]
        assert sorted(id(x) for x in flat) == sorted(id(x) for x in train_set)

    def test_same_seed_epoch_identical(self, toy_sets):
        train_set, _, _, _ = toy_sets
        a = make_batches(train_set, 4, seed=5, epoch=7)
        b = make_batches(train_set, 4, seed=5, epoch=7)
        assert [[id(x) for x in batch] for batch in a] == [
            [id(x) for x in batch] for batch in b
        ]

    def test_epochs_shuffle_differently(self, toy_sets):
        train_set, _, _, _ = toy_sets
        a = make_batches(train_set, 4, seed=5, epoch=1)
        b = make_batches(train_set, 4, seed=5, epoch=2)
        assert [[id(x) for x in batch] for batch in a] != [
            [id(x) for x in batch] for batch in b
        ]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            make_batches([], 4, seed=0, epoch=0)


class TestTrainEpoch:
    def test_zero_learning_rate_is_noop(self, toy_sets):
        train_set, _, _, _ = toy_sets
        for optimizer in ("adam", "sgd"):
            config = TrainConfig(
                batch_size=4, dropout=0.0, hidden_size=8,
                optimizer=optimizer, learning_rate=0.0, seed=1,
            )
            params = init_params(input_size_of(train_set), 8, seed=1)
            before = {name: arr.copy() for name, arr in params.tensors()}
            batches = make_batches(train_set, 4, seed=1, epoch=1)
            loss = train_epoch(params, batches, config)
            assert loss > 0.0
            for name, arr in params.tensors():
                np.testing.assert_array_equal(arr, before[name])

    def test_single_instance_memorization(self, toy_sets):
        train_set, _, _, _ = toy_sets
        single = [train_set[0]]
        config = TrainConfig(
            batch_size=1, dropout=0.0, hidden_size=16,
            learning_rate=5e-3, seed=3,
        )
        params = init_params(input_size_of(single), 16, seed=3)
        optimizer = make_optimizer(config, params)
        rng = np.random.default_rng(0)
        loss = None
        for epoch in range(1, 201):
            batches = make_batches(single, 1, config.seed, epoch)
            loss = train_epoch(params, batches, config, optimizer, rng)
        assert loss < 0.01

    def test_twenty_instance_overfit(self, toy_sets):
        train_set, _, _, _ = toy_sets
        config = TrainConfig(
            batch_size=16, dropout=0.2, hidden_size=24,
            learning_rate=1e-2, seed=3,
        )
        params = init_params(input_size_of(train_set), 24, seed=3)
        optimizer = make_optimizer(config, params)
        rng = np.random.default_rng(0)
        reached = None
        for epoch in range(1, 301):
            batches = make_batches(train_set, 16, config.seed, epoch)
            train_epoch(params, batches, config, optimizer, rng)
            preds = predict_labels(params, train_set)
            if all(p == inst.label for p, inst in zip(preds, train_set)):
                reached = epoch
                break
        assert reached is not None and reached <= 300

    def test_batch_order_invariance(self, toy_sets):
        train_set, _, _, _ = toy_sets
        batch = train_set[:8]
        results = []
        for order in (batch, list(reversed(batch))):
            config = TrainConfig(batch_size=8, dropout=0.0, hidden_size=8,
                                 learning_rate=1e-3, seed=2)
            params = init_params(input_size_of(batch), 8, seed=2)
            loss = train_epoch(params, [order], config)
            results.append((loss, {n: a.copy() for n, a in params.tensors()}))
        (loss_a, params_a), (loss_b, params_b) = results
        assert abs(loss_a - loss_b) < 1e-9
        for name in params_a:
            np.testing.assert_allclose(params_a[name], params_b[name], atol=1e-9)

    def test_non_finite_abort_names_instance(self, toy_sets):
        train_set, _, _, _ = toy_sets
        params = init_params(input_size_of(train_set), 8, seed=1)
        params.W_i[0, 0] = np.nan
        config = TrainConfig(batch_size=4, dropout=0.0, hidden_size=8, seed=1)
        batches = make_batches(train_set, 4, seed=1, epoch=1)
        with pytest.raises(ArithmeticError, match="batch 0, instance"):
            train_epoch(params, batches, config)


class TestAdam:
    def test_matches_reference_formula(self):
        # one Adam step on a 1-parameter problem, checked by hand:
        # m = 0.1g, v = 0.001g^2, mhat = g, vhat = g^2,
        # step = lr * g / (|g| + eps)
        params = init_params(2, 2, seed=0)
        opt = Adam(params, learning_rate=0.5)
        grads = params.copy()
        from treerel.model import ParamGrads

        g = ParamGrads.zeros_like(params)
        g.b_y[:] = np.array([3.0, -2.0, 0.0, 0.0, 0.0, 0.0])
        before = params.b_y.copy()
        opt.step(params, g)
        expected = before - 0.5 * g.b_y / (np.abs(g.b_y) + 1e-8)
        np.testing.assert_allclose(params.b_y, expected, atol=1e-12)
        del grads


class TestFit:
    def test_reaches_perfect_validation(self, toy_sets):
        train_set, val_set, _, _ = toy_sets
        config = TrainConfig(
            batch_size=16, dropout=0.2, hidden_size=24, learning_rate=1e-2,
            max_epochs=60, patience=10, seed=3, features=FEATURES,
        )
        params, log = fit(train_set, val_set, config)
        best = max(e.val_macro_f1 for e in log.entries)
        assert best == 1.0
        selected = [e for e in log.entries if e.selected]
        assert len(selected) == 1
        assert selected[0].val_macro_f1 == 1.0

    def test_monotone_selection(self, toy_sets):
        train_set, val_set, _, _ = toy_sets
        config = TrainConfig(
            batch_size=8, dropout=0.2, hidden_size=12, learning_rate=5e-3,
            max_epochs=12, patience=4, seed=9, features=FEATURES,
        )
        _, log = fit(train_set, val_set, config)
        selected = next(e for e in log.entries if e.selected)
        assert all(selected.val_macro_f1 >= e.val_macro_f1 for e in log.entries)
        # ties break to the earlier epoch
        first_best = next(
            e for e in log.entries if e.val_macro_f1 == selected.val_macro_f1
        )
        assert first_best.epoch == selected.epoch

    def test_patience_one_stops_on_first_decline(self, toy_sets, monkeypatch):
        train_set, val_set, _, _ = toy_sets
        scores = iter([0.9, 0.8, 0.7, 0.6])
        monkeypatch.setattr(
            "treerel.train._macro_f1", lambda params, instances: next(scores)
        )
        config = TrainConfig(
            batch_size=16, dropout=0.0, hidden_size=8, learning_rate=1e-3,
            max_epochs=50, patience=1, seed=1, features=FEATURES,
        )
        _, log = fit(train_set, val_set, config)
        assert len(log.entries) == 2
        assert [e.selected for e in log.entries] == [True, False]

    def test_zero_max_epochs_rejected(self, toy_sets):
        train_set, val_set, _, _ = toy_sets
        config = TrainConfig(max_epochs=0)
        with pytest.raises(ValueError, match="max_epochs"):
            fit(train_set, val_set, config)

    def test_empty_sets_rejected(self, toy_sets):
        train_set, val_set, _, _ = toy_sets
        with pytest.raises(ValueError, match="nonempty"):
            fit([], val_set, TrainConfig())
        with pytest.raises(ValueError, match="nonempty"):
            fit(train_set, [], TrainConfig())

    def test_full_run_determinism(self, toy_sets, tmp_path):
        train_set, val_set, vocab, emb = toy_sets
        config = TrainConfig(
            batch_size=16, dropout=0.2, hidden_size=16, learning_rate=1e-2,
            max_epochs=10, patience=5, seed=11, features=FEATURES,
        )
        files = []
        logs = []
        for run in ("a", "b"):
            params, log = fit(train_set, val_set, config)
            ckpt = Checkpoint(
                params=params, feature_config=FEATURES, vocab=vocab,
                emb_sources=emb.source_spec, emb_seed=emb.seed,
                case_fallback=emb.case_fallback, seed=config.seed,
            )
            path = tmp_path / f"{run}.ckpt"
            save_checkpoint(ckpt, path)
            files.append(path.read_bytes())
            logs.append(log.to_jsonl())
        assert files[0] == files[1]
        assert logs[0] == logs[1]

    def test_log_jsonl_shape(self, toy_sets, tmp_path):
        train_set, val_set, _, _ = toy_sets
        config = TrainConfig(
            batch_size=16, dropout=0.0, hidden_size=8, learning_rate=1e-3,
            max_epochs=3, patience=3, seed=0, features=FEATURES,
        )
        _, log = fit(train_set, val_set, config)
        path = tmp_path / "log.jsonl"
        log.write(path)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == len(log.entries)
        entry = json.loads(lines[0])
        assert set(entry) == {"epoch", "train_loss", "val_macro_f1", "selected"}


class TestClassWeights:
    def test_inverse_frequency(self, toy_sets):
        train_set, _, _, _ = toy_sets
        weights = compute_class_weights(train_set)
        from collections import Counter

        counts = Counter(inst.label for inst in train_set)
        from treerel.corpus import LABELS

        for idx, lab in enumerate(LABELS):
            expected = len(train_set) / (6 * counts[lab])
            assert abs(weights[idx] - expected) < 1e-12

    def test_weighted_training_runs(self, toy_sets):
        train_set, val_set, _, _ = toy_sets
        config = TrainConfig(
            batch_size=16, dropout=0.0, hidden_size=8, learning_rate=1e-3,
            max_epochs=2, patience=2, seed=0, features=FEATURES,
            class_weights=True,
        )
        _, log = fit(train_set, val_set, config)
        assert len(log.entries) >= 1
