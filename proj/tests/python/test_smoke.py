import numpy as np
import pytest

import ll1


def test_g1_penalty_matches_closed_form():
    # g(u) = -u^2/2 on [0, 1] gives F(x) = sum_i min(|x_i| - alpha/2, 0)
    x = np.array([0.3, -2.0, 0.0])
    alpha = 1.0
    expected = sum(min(abs(t) - alpha / 2, 0.0) for t in x)
    assert ll1.penalty(ll1.GSpec.g1(), alpha, x) == pytest.approx(expected, abs=1e-14)


def test_shrink():
    out = ll1.shrink(np.array([3.0, -0.5, -4.0]), np.array([1.0, 1.0, 1.0]))
    np.testing.assert_allclose(out, [2.0, 0.0, -3.0])


def test_u_minimize_g2():
    u = ll1.u_minimize(ll1.GSpec.g2(), 1.0, np.array([0.25, 2.0]))
    np.testing.assert_allclose(u, [0.75, 0.0], atol=1e-12)


def test_admm_recovers_sparse_signal():
    A, x_true, b = ll1.gen_instance("gaussian", 64, 256, 0.0, 5, seed=3)
    cfg = ll1.SolverConfig()
    cfg.eps = 1e-8
    cfg.record_traces = False
    res = ll1.admm_solve(ll1.GSpec.g2(), A, b, config=cfg, x_true=x_true)
    assert res.rel_err is not None and res.rel_err <= 1e-2
    assert ll1.metrics(res.x, x_true)["success"]


def test_dca_recovers_sparse_signal():
    A, x_true, b = ll1.gen_instance("gaussian", 32, 64, 0.0, 3, seed=5)
    cfg = ll1.DcaConfig()
    cfg.record_traces = False
    res = ll1.dca_solve(ll1.GSpec.g1(), A, b, config=cfg, x_true=x_true)
    assert res.rel_err <= 1e-2


def test_instances_are_deterministic():
    a1 = ll1.gen_instance("dct", 16, 40, 5.0, 3, seed=11, trial=2)
    a2 = ll1.gen_instance("dct", 16, 40, 5.0, 3, seed=11, trial=2)
    for u, v in zip(a1, a2):
        np.testing.assert_array_equal(u, v)


def test_l0_oracle_trivial():
    A = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    cert = ll1.l0_oracle(A, np.array([1.0, 1.0]))
    assert cert["s_star"] == 1
    support, x = cert["solutions"][0]
    assert support == [2]
    np.testing.assert_allclose(x, [0.0, 0.0, 1.0], atol=1e-12)


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError):
        ll1.admm_solve(ll1.GSpec.g1(), np.zeros((2, 3)), np.ones(2))


def test_verify_suite_passes():
    rows = ll1.verify()
    assert rows and all(passed for _, passed, _ in rows)
