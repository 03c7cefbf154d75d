import math

import pytest

import lyapflow as lf


@pytest.fixture(scope="module")
def quad4():
    return lf.Objective.quadratic([1.0, 2.0, 5.0, 10.0], [0.0, 0.0, 0.0, 0.0], 0.0, 1.0)


@pytest.fixture(scope="module")
def nag4_trajectory(quad4):
    sys = lf.System.nag("4", quad4)
    return lf.integrate(
        sys,
        t0=0.1,
        x0=[1.0, -1.0, 0.5, -0.25],
        v0=[0.0, 0.0, 0.0, 0.0],
        t_end=100.0,
        rel_tol=1e-10,
        abs_tol=1e-22,
        samples=800,
    )


def test_objective_eval_and_grad(quad4):
    assert quad4.eval([0.0, 0.0, 0.0, 0.0]) == 0.0
    assert quad4.grad([1.0, 1.0, 1.0, 1.0]) == [1.0, 2.0, 5.0, 10.0]
    report = quad4.check_strong_convexity(n_pairs=100, seed=3)
    assert report.passed


def test_integration_follows_the_flow(quad4, nag4_trajectory):
    times = nag4_trajectory.times()
    gaps = nag4_trajectory.gaps()
    assert times[0] == pytest.approx(0.1)
    assert times[-1] == pytest.approx(100.0)
    assert all(t2 > t1 for t1, t2 in zip(times, times[1:]))
    assert gaps[-1] < 1e-4 * gaps[0]


def test_certifications_pass(nag4_trajectory):
    lyap = lf.Lyapunov.paper_nag("4", "1")
    assert lf.threshold_T(lyap) == pytest.approx(math.sqrt(32.0 / 9.0))
    for certify in (
        lf.certify_monotone,
        lf.certify_main_nonneg,
        lf.certify_velocity_bound,
        lf.certify_rate_bound,
        lf.check_weighted_boundedness,
    ):
        report = certify(nag4_trajectory, lyap)
        assert report.passed, report
    identity, growth = lf.certify_y_growth(nag4_trajectory, lyap)
    assert identity.passed and growth.passed


def test_mutation_is_detected(quad4):
    sys = lf.System.nag("6", quad4)
    traj = lf.integrate(
        sys,
        t0=0.1,
        x0=[1.0, -1.0, 0.5, -0.25],
        v0=[0.0, 0.0, 0.0, 0.0],
        t_end=100.0,
        rel_tol=1e-10,
        abs_tol=1e-22,
        samples=800,
    )
    corrupted = lf.Lyapunov.paper_nag("6", "1").with_scaled_g("2")
    assert not lf.certify_monotone(traj, corrupted).passed


def test_search_rediscovers_exactly():
    cands = lf.search(rho="6", beta="1", grid=["-2", "-1", "0"], mu="1")
    assert len(cands) == 1
    top = cands[0]
    assert top.gamma_prime == [("4", "-1")]
    assert top.g == [("2", "-2")]
    assert top.h == [("4", "-1")]
    assert top.threshold == ("8", "2")  # T^2 = 8, exactly

    alpha = lf.search(rho="3", beta="1/2", grid=["-3/2", "-1", "-1/2", "0"], mu="1")
    assert alpha[0].g == [("-1/2", "-3/2"), ("1", "-1")]
    assert alpha[0].threshold == ("2", "1")  # T = 2, exactly


def test_parameter_reconstruction():
    instances = []
    for r in ["3", "4", "6", "9"]:
        cands = lf.search(rho=r, beta="1", grid=["-2", "-1", "0"], mu="1")
        instances.append((r, cands[0]))
    dep = lf.reconstruct_parameter_dependence(instances)
    assert dep["g"][0]["formula"] == "(-1/3)*r + (1/9)*r^2"
    assert dep["h"][0]["formula"] == "(2/3)*r"


def test_rate_fit_and_comparison(nag4_trajectory):
    fit = lf.fit_rate(
        nag4_trajectory, "power-law", t_lo=10.0, t_hi=100.0, envelope=True
    )
    assert fit["slope"] < -8.0 / 3.0 + 0.3  # bound direction for 2r/3 at r=4

    cmp6 = lf.compare_rates(6.0)
    assert cmp6["strict_improvement"] and not cmp6["equality"]
    cmp3 = lf.compare_rates(3.0)
    assert cmp3["equality"] and not cmp3["strict_improvement"]
    cmpa = lf.compare_rates(3.0, alpha=0.5, epsilon=0.01)
    assert cmpa["ordering_ok"]
