import numpy as np
import pytest

from tensorcore import Adam, AdamState, DimensionError, Parameter, Tape, adam_step


class TestAdamStep:
    def test_first_step_moves_by_lr(self):
        params = {"w": np.array([1.0, -1.0, 0.5])}
        grads = {"w": np.array([0.3, -2.0, 1e-3])}
        adam_step(params, grads, AdamState(), lr=0.01)
        # bias correction makes the first update lr * sign(grad) up to eps
        np.testing.assert_allclose(params["w"], [0.99, -0.99, 0.49], atol=1e-5)

    def test_state_advances(self):
        state = AdamState()
        params, grads = {"w": np.zeros(2)}, {"w": np.ones(2)}
        adam_step(params, grads, state, lr=0.1)
        adam_step(params, grads, state, lr=0.1)
        assert state.step == 2
        np.testing.assert_allclose(state.m["w"], 1.0 - 0.9 ** 2)

    def test_updates_in_place(self):
        value = np.ones(3)
        adam_step({"w": value}, {"w": np.ones(3)}, AdamState(), lr=0.5)
        assert (value < 1.0).all()

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError, match="'w'"):
            adam_step({"w": np.zeros(3)}, {"w": np.zeros(2)}, AdamState(), lr=0.1)


class TestAdam:
    def test_minimises_quadratic(self):
        p = Parameter(np.array([3.0, -2.0]), name="p")
        optimizer = Adam([p], lr=0.05)
        for _ in range(400):
            optimizer.zero_grad()
            with Tape() as tape:
                loss = p.square().sum()
            tape.backward(loss)
            optimizer.step()
        assert np.abs(p.values).max() < 0.1

    def test_skips_parameters_without_gradient(self):
        used = Parameter(np.ones(2), name="used")
        idle = Parameter(np.ones(2), name="idle")
        optimizer = Adam([used, idle], lr=0.1)
        with Tape() as tape:
            loss = used.sum()
        tape.backward(loss)
        optimizer.step()
        np.testing.assert_array_equal(idle.values, 1.0)
        assert "idle" not in optimizer.state.m
        assert (used.values < 1.0).all()

    def test_zero_grad(self):
        p = Parameter(np.ones(2), name="p")
        p.accumulate_grad(np.ones(2))
        Adam([p], lr=0.1).zero_grad()
        assert p.grad is None
