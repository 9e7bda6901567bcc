import numpy as np
import pytest

from evaluation.gradsuite import GRAD_CASES, run_grad_suite
from tensorcore import ContractError, Tensor, grad_check


class TestGradCheck:
    def test_sum_is_exact(self):
        x = Tensor(np.random.default_rng(0).standard_normal((3, 4)))
        assert grad_check(lambda x_: x_.sum(), x) < 1e-8

    def test_non_scalar_output(self):
        with pytest.raises(ContractError, match="scalar"):
            grad_check(lambda x_: x_ * 2.0, Tensor(np.ones(3)))

    def test_restores_inputs(self):
        values = np.ones(3, dtype=np.float32)
        x = Tensor(values)
        grad_check(lambda x_: x_.square().sum(), x)
        assert x.values is values
        assert x.dtype == np.float32
        assert x.grad is None
        assert not x.requires_grad

    def test_detects_wrong_gradient(self):
        # the detached factor hides half of the true gradient from the tape
        x = Tensor(np.array([1.0, 2.0]))
        error = grad_check(lambda x_: (x_ * x_.detach()).sum(), x)
        assert error > 0.3


class TestGradSuite:
    def test_all_cases_pass(self):
        table = run_grad_suite(seed=0)
        assert list(table["case"]) == [case.name for case in GRAD_CASES]
        failed = table[~table["passed"]]
        assert failed.empty, failed.to_string()

    def test_covers_every_primitive_and_loss(self):
        names = {case.name for case in GRAD_CASES}
        for required in ("conv2d", "conv2d_transpose", "maxpool_unpool", "batchnorm", "activations", "l2", "berhu",
                         "cross_entropy", "lsgan_d", "lsgan_g", "latent_consistency", "combined_loss"):
            assert required in names
