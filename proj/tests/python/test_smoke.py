import json
import math

import pytest

import mwg_scaling as m


def test_theory_optimum():
    rwm = m.theory.optimal_l("rwm", 1.0, 1.0)
    assert round(rwm["accept"], 3) == 0.234
    assert rwm["l_hat"] == pytest.approx(2.381, rel=2e-4)
    mala = m.theory.optimal_l("mala", 0.5, 0.25)
    assert round(mala["accept"], 3) == 0.574
    assert m.theory.cost_optimal_c(1.0, 4.0) == 0.5
    assert m.theory.rwm_speed(1.0, 2.0) == pytest.approx(4.0 * m.theory.rwm_accept(1.0, 2.0))


def test_targets():
    assert m.log_density([1.0, 1.0], kind="exchangeable_normal", rho=0.5) == pytest.approx(-2.0 / 3.0)
    assert m.grad_log_density([3.0, -2.0], kind="laplace_iid") == [-1.0, 1.0]
    x = m.exact_sample(5, kind="student_t", rho=0.2, nu=10.0, seed=3)
    assert len(x) == 5
    assert x == m.exact_sample(5, kind="student_t", rho=0.2, nu=10.0, seed=3)


def test_chain_and_sweep_are_deterministic():
    acc, fose = m.run_chain(20, sigma2=2.381**2 / 20, steps=20000, seed=4)
    assert abs(acc - 0.234) < 0.08
    assert fose > 0.0
    a = m.sweep(10, points=4, iterations=2000, seed=9)
    b = m.sweep(10, points=4, iterations=2000, seed=9, threads=2)
    assert a["fose_raw"] == b["fose_raw"]
    assert len(a["sigma2"]) == 4


def test_tune_and_selftest():
    r = m.tune(20, budget=20000, seed=2)
    assert set(r) == {"l_tuned", "sigma2", "accept_final", "converged"}
    assert all(passed for _, passed, _ in m.selftest())


def test_command_outputs():
    files = m.command("theory-curve", "theory.l_values = 0, 2\n")
    assert files["theory_curve.csv"].splitlines()[0] == "l,sigma2,accept,speed"
    summary = json.loads(files["theory_curve.json"])
    assert math.isclose(summary["accept_at_l_hat"], 0.2338, abs_tol=5e-4)


def test_errors():
    with pytest.raises(ValueError):
        m.command("sweep", "no.such.key = 1\n")
    with pytest.raises(ValueError):
        m.theory.rwm_accept(0.0, 1.0)
    with pytest.raises(ValueError):
        m.exact_sample(3, kind="exchangeable_normal", rho=1.5)
