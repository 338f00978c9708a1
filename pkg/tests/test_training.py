import pytest
import json
import math
import os

import numpy as np
import torch

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from streetforensics.errors import EmptyBatchError, NonFiniteGradientError, ShapeMismatchError
from streetforensics.models import Label, ModelConfig, TrainConfig
from streetforensics.network import build_network, read_checkpoint
from streetforensics.training import (
    BEST_CHECKPOINT,
    EarlyStopping,
    FrameSet,
    OptimizerState,
    StopReason,
    adam_step,
    compute_loss,
    train,
)

TINY = ModelConfig(input_height=32, input_width=32, width_multiplier=1 / 16, middle_module_count=0, seed=1)


def default_train_config(**overrides) -> TrainConfig:
    return TrainConfig(max_epochs=overrides.pop("max_epochs", 100), **overrides)


def tiny_frames(videos: int = 4, frames_per_video: int = 3, seed: int = 0) -> FrameSet:
    rng = np.random.default_rng(seed)
    arrays = [rng.uniform(-1, 1, size=(frames_per_video, 32, 32, 3)).astype(np.float32) for _ in range(videos)]
    labels = [index % 2 for index in range(videos)]
    return FrameSet(arrays, labels, [f"v{index}" for index in range(videos)])


def scripted(losses):
    """Validator returning a fixed loss per epoch."""
    def validator(network, frames, epoch):
        return losses[epoch - 1], 50.0
    return validator


class TestComputeLoss:

    def test_uniform_logits(self):
        output = compute_loss(torch.zeros((1, 2), dtype=torch.float64), [Label.FAKE])

        assert output.loss == pytest.approx(math.log(2), abs=1e-12)
        assert output.loss == pytest.approx(0.693147, abs=1e-6)

    def test_saturated_correct_logits(self):
        logits = torch.tensor([[-20.0, 20.0], [20.0, -20.0]], dtype=torch.float64)

        output = compute_loss(logits, [Label.FAKE, Label.REAL])

        assert output.loss < 1e-8
        assert output.correct == 2

    def test_gradient_matches_central_differences(self):
        generator = torch.Generator().manual_seed(0)
        logits = torch.randn((8, 2), generator=generator, dtype=torch.float64)
        labels = [0, 1, 1, 0, 1, 0, 0, 1]
        analytic = compute_loss(logits, labels).grad_logits
        step = 1e-6

        numeric = torch.zeros_like(logits)
        for row in range(8):
            for column in range(2):
                plus = logits.clone()
                minus = logits.clone()
                plus[row, column] += step
                minus[row, column] -= step
                numeric[row, column] = (compute_loss(plus, labels).loss
                                        - compute_loss(minus, labels).loss) / (2 * step)

        relative = (analytic - numeric).abs() / analytic.abs().clamp_min(1e-12)
        assert relative.max().item() <= 1e-6

    def test_gradient_rows_sum_to_zero(self):
        logits = torch.tensor([[1.0, -2.0], [0.5, 0.5], [3.0, 1.0]], dtype=torch.float64)

        output = compute_loss(logits, [1, 0, 1])

        assert torch.allclose(output.grad_logits.sum(dim=1), torch.zeros(3, dtype=torch.float64))

    def test_empty_batch(self):
        with pytest.raises(EmptyBatchError):
            compute_loss(torch.zeros((0, 2)), [])

    def test_label_count_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            compute_loss(torch.zeros((3, 2)), [0, 1])

    def test_rejects_non_binary_labels(self):
        with pytest.raises(ValueError):
            compute_loss(torch.zeros((1, 2)), [2])


class TestAdamStep:
    """Bias-corrected Adam against hand-evaluated and straight-line oracles."""

    @staticmethod
    def scalar(value: float) -> torch.Tensor:
        return torch.tensor([value], dtype=torch.float64)

    def test_zero_gradient_leaves_params(self):
        params = {"w": self.scalar(0.3), "b": torch.ones(2, 2, dtype=torch.float64)}
        grads = {name: torch.zeros_like(value) for name, value in params.items()}

        updated, state = adam_step(params, grads, OptimizerState.fresh(params), default_train_config())

        assert all(torch.equal(updated[name], params[name]) for name in params)
        assert state.t == 1

    def test_first_step_with_default_hyperparameters(self):
        params = {"w": self.scalar(0.0)}

        updated, _ = adam_step(params, {"w": self.scalar(1.0)}, OptimizerState.fresh(params), default_train_config())

        assert updated["w"].item() == pytest.approx(-1e-4 / (1 + 1e-8), abs=1e-18)
        assert updated["w"].item() == pytest.approx(-9.99999999e-5, rel=1e-9)

    def test_matches_scalar_recurrence(self):
        config = default_train_config()
        rng = np.random.default_rng(4)
        gradients = rng.normal(size=100)

        w, m, v = 0.25, 0.0, 0.0
        params = {"w": self.scalar(w)}
        state = OptimizerState.fresh(params)
        for t, g in enumerate(gradients, start=1):
            m = config.beta1 * m + (1 - config.beta1) * g
            v = config.beta2 * v + (1 - config.beta2) * g * g
            m_hat = m / (1 - config.beta1 ** t)
            v_hat = v / (1 - config.beta2 ** t)
            w = w - config.learning_rate * m_hat / (math.sqrt(v_hat) + config.epsilon)
            params, state = adam_step(params, {"w": self.scalar(float(g))}, state, config)

            assert params["w"].item() == pytest.approx(w, abs=1e-12)
        assert state.t == 100

    def test_two_constant_steps(self):
        config = default_train_config()
        params = {"w": self.scalar(0.0)}
        state = OptimizerState.fresh(params)
        for _ in range(2):
            params, state = adam_step(params, {"w": self.scalar(1.0)}, state, config)

        # m_hat = v_hat = 1 for constant unit gradients
        assert params["w"].item() == pytest.approx(-2 * 1e-4 / (1 + 1e-8), abs=1e-12)

    def test_inputs_are_not_modified(self):
        params = {"w": self.scalar(1.0)}
        state = OptimizerState.fresh(params)

        adam_step(params, {"w": self.scalar(0.5)}, state, default_train_config())

        assert params["w"].item() == 1.0
        assert state.t == 0
        assert state.m["w"].item() == 0.0

    @pytest.mark.parametrize("bad", [float("nan"), float("inf")])
    def test_non_finite_gradient_aborts(self, bad):
        params = {"w": self.scalar(1.0)}

        with pytest.raises(NonFiniteGradientError) as excinfo:
            adam_step(params, {"w": self.scalar(bad)}, OptimizerState.fresh(params), default_train_config())
        assert excinfo.value.parameter == "w"

    def test_gradient_shape_must_match(self):
        params = {"w": self.scalar(1.0)}

        with pytest.raises(ShapeMismatchError):
            adam_step(params, {"w": torch.zeros(2, dtype=torch.float64)}, OptimizerState.fresh(params), default_train_config())


class TestEarlyStopping:

    def test_scripted_plateau(self):
        stopper = EarlyStopping(patience=10)
        losses = [1.0, 0.9] + [0.95] * 20

        stopped_at = None
        for epoch, loss in enumerate(losses, start=1):
            stopper.update(epoch, loss)
            if stopper.should_stop:
                stopped_at = epoch
                break

        assert stopped_at == 12
        assert stopper.best_epoch == 2
        assert stopper.best_loss == 0.9

    def test_equal_loss_is_not_an_improvement(self):
        stopper = EarlyStopping(patience=2)

        assert stopper.update(1, 0.5)
        assert not stopper.update(2, 0.5)
        assert not stopper.update(3, 0.5)
        assert stopper.should_stop
        assert stopper.best_epoch == 1

    @pytest.mark.parametrize("plateau, stops", [(9, False), (10, True), (11, True)])
    def test_patience_boundary(self, plateau, stops):
        stopper = EarlyStopping(patience=10)
        stopper.update(1, 0.5)
        for epoch in range(2, 2 + plateau):
            if stopper.should_stop:
                break
            stopper.update(epoch, 0.6)

        assert stopper.should_stop is stops
        assert stopper.counter == min(plateau, 10)

    def test_improvement_resets_counter(self):
        stopper = EarlyStopping(patience=2)
        for epoch, loss in enumerate([1.0, 1.1, 0.8, 0.9], start=1):
            stopper.update(epoch, loss)

        assert stopper.counter == 1
        assert not stopper.should_stop

    def test_patience_must_be_positive(self):
        with pytest.raises(ValueError):
            EarlyStopping(0)


class TestFrameSet:

    def test_flat_indexing(self):
        frames = tiny_frames(videos=3, frames_per_video=2)

        batch, labels = frames.batch([0, 3, 5])

        assert len(frames) == 6
        assert tuple(batch.shape) == (3, 3, 32, 32)
        assert labels.tolist() == [0, 1, 0]
        assert frames.frame_labels().tolist() == [0, 0, 1, 1, 0, 0]

    def test_empty_batch(self):
        with pytest.raises(EmptyBatchError):
            tiny_frames().batch([])

    def test_mixed_frame_shapes(self):
        with pytest.raises(ShapeMismatchError):
            FrameSet([np.zeros((1, 32, 32, 3)), np.zeros((1, 16, 16, 3))], [0, 1], ["a", "b"])


class TestTrain:
    """The training loop with scripted validation losses."""

    def test_stops_after_patience_runs_out(self, tmp_path):
        losses = [1.0, 0.9] + [0.95] * 20

        result = train(build_network(TINY), tiny_frames(), tiny_frames(seed=1),
                       default_train_config(batch_size=8), tmp_path, validator=scripted(losses))

        assert result.epochs_run == 12
        assert result.best_epoch == 2
        assert result.best_val_loss == 0.9
        assert result.stop_reason is StopReason.EARLY_STOPPING
        assert [entry.epoch for entry in result.log] == list(range(1, 13))
        header, _ = read_checkpoint(tmp_path / BEST_CHECKPOINT)
        assert header.epoch == 2

    def test_runs_every_epoch_while_improving(self, tmp_path):
        losses = [1.0 / epoch for epoch in range(1, 51)]

        result = train(build_network(TINY), tiny_frames(), tiny_frames(seed=1),
                       default_train_config(batch_size=16, max_epochs=50), tmp_path, validator=scripted(losses))

        assert result.epochs_run == 50
        assert result.best_epoch == 50
        assert result.stop_reason is StopReason.MAX_EPOCHS

    def test_training_log_file(self, tmp_path):
        train(build_network(TINY), tiny_frames(), tiny_frames(seed=1),
              default_train_config(batch_size=4, max_epochs=3), tmp_path, validator=scripted([0.5, 0.4, 0.3]))

        lines = (tmp_path / "training_log.jsonl").read_text(encoding="utf-8").splitlines()
        entries = [json.loads(line) for line in lines]
        assert [entry["epoch"] for entry in entries] == [1, 2, 3]
        assert set(entries[0]) == {"epoch", "train_loss", "train_acc", "val_loss", "val_acc", "wall_seconds"}

    def test_same_seed_same_checkpoint(self, tmp_path):
        config = default_train_config(batch_size=4, max_epochs=2, learning_rate=1e-3)

        first = train(build_network(TINY), tiny_frames(), tiny_frames(seed=1), config, tmp_path / "a")
        second = train(build_network(TINY), tiny_frames(), tiny_frames(seed=1), config, tmp_path / "b")

        first_header, _ = read_checkpoint(first.last_checkpoint)
        second_header, _ = read_checkpoint(second.last_checkpoint)
        assert first_header.checkpoint_id == second_header.checkpoint_id
        assert [e.val_loss for e in first.log] == [e.val_loss for e in second.log]

    def test_parameters_change(self, tmp_path):
        network = build_network(TINY)
        before = {name: p.detach().clone() for name, p in network.named_parameters()}

        train(network, tiny_frames(), tiny_frames(seed=1), default_train_config(batch_size=4, max_epochs=1), tmp_path)

        assert any(not torch.equal(before[name], p.detach()) for name, p in network.named_parameters())

    def test_empty_training_split(self, tmp_path):
        empty = FrameSet([], [], [])

        with pytest.raises(EmptyBatchError):
            train(build_network(TINY), empty, tiny_frames(), default_train_config(), tmp_path)


class TestDescent:
    """One optimizer step with a small learning rate lowers the loss on the batch it was computed from."""

    def test_linear_model(self):
        generator = torch.Generator().manual_seed(3)
        features = torch.randn((8, 5), generator=generator, dtype=torch.float64)
        weight = torch.randn((5, 2), generator=generator, dtype=torch.float64) * 0.1
        labels = [Label.REAL, Label.FAKE] * 4

        before = compute_loss(features @ weight, labels)
        grads = {"weight": features.T @ before.grad_logits}
        params = {"weight": weight}
        updated, _ = adam_step(params, grads, OptimizerState.fresh(params), default_train_config(learning_rate=1e-3))
        after = compute_loss(features @ updated["weight"], labels)

        assert after.loss < before.loss

    def test_detector_network(self):
        network = build_network(TINY).double()
        network.eval()
        generator = torch.Generator().manual_seed(4)
        batch = torch.rand((4, 3, 32, 32), generator=generator, dtype=torch.float64) * 2 - 1
        labels = [Label.REAL, Label.FAKE, Label.REAL, Label.FAKE]
        params = dict(network.named_parameters())

        logits = network(batch)
        before = compute_loss(logits, labels)
        logits.backward(before.grad_logits)
        values = {name: p.detach() for name, p in params.items()}
        grads = {name: p.grad.detach() if p.grad is not None else torch.zeros_like(values[name])
                 for name, p in params.items()}
        updated, _ = adam_step(values, grads, OptimizerState.fresh(values), default_train_config(learning_rate=1e-6))
        with torch.no_grad():
            for name, p in params.items():
                p.copy_(updated[name])
            after = compute_loss(network(batch), labels)

        assert after.loss < before.loss


class TestNetworkGradient:
    """Loss gradients through the whole network against central differences."""

    GRADIENT_CONFIG = ModelConfig(input_height=64, input_width=128, width_multiplier=1 / 8,
                                  middle_module_count=2, seed=2)

    def test_directional_derivatives(self):
        network = build_network(self.GRADIENT_CONFIG).double()
        network.eval()
        generator = torch.Generator().manual_seed(0)
        batch = torch.rand((2, 3, 64, 128), generator=generator, dtype=torch.float64) * 2 - 1
        labels = [Label.REAL, Label.FAKE]
        params = [p for p in network.parameters()]

        logits = network(batch)
        logits.backward(compute_loss(logits, labels).grad_logits)
        analytic = [p.grad.detach().clone() for p in params]

        def loss_at(direction, step):
            with torch.no_grad():
                for p, d in zip(params, direction):
                    p.add_(d, alpha=step)
                value = compute_loss(network(batch), labels).loss
                for p, d in zip(params, direction):
                    p.sub_(d, alpha=step)
            return value

        step = 1e-5
        passed = 0
        for _ in range(20):
            direction = [torch.randn(p.shape, generator=generator, dtype=torch.float64) for p in params]
            norm = math.sqrt(sum(float((d ** 2).sum()) for d in direction))
            direction = [d / norm for d in direction]

            expected = sum(float((g * d).sum()) for g, d in zip(analytic, direction))
            numeric = (loss_at(direction, step) - loss_at(direction, -step)) / (2 * step)

            if abs(numeric - expected) <= 1e-4 * max(abs(expected), 1e-12):
                passed += 1

        assert passed >= 19
