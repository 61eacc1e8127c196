"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Tolerances are fixed here, not tuned at runtime.
"""

import numpy as np

from fjnet.core import FJModel, SusceptibilityProfile, system_matrix
from fjnet.dynamics import containment_bounds, simulate, steady_state, tv_simulate
from fjnet.fixtures import cycle_network, example1_schedule, example2_schedule
from fjnet.graphs import ClassParams, fj_class_min_s, natural_params
from fjnet.stability import (
    chain_row_sum_bound,
    corollary_bound,
    is_schur_stable,
    rho_star,
    spectral_radius,
)

from genmodels import (
    random_cfj_sequence,
    random_certified_schedule,
    random_schedule,
    random_sparse_model,
    random_stable_model,
    random_stochastic,
    random_substochastic,
)


def report(num, name, ok, detail=""):
    print(f"[criterion {num:02d}] {name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"criterion {num} failed {detail}"


def test_criterion_01_tight_bound_uniform_susceptibility():
    rng = np.random.default_rng(101)
    worst = 0.0
    exact_bound = True
    for trial in range(20):
        n = 5 if trial < 10 else 10
        delta = float(rng.uniform(0.05, 0.95))
        w = random_stochastic(rng, n)
        profile = SusceptibilityProfile(np.full(n, 1.0 - delta))
        rho = spectral_radius(system_matrix(profile, w))
        worst = max(worst, abs(rho - (1.0 - delta)))
        eps_any = float(rng.uniform(0.01, 1.0))
        exact_bound &= rho_star(ClassParams(delta, eps_any, 0)) == 1.0 - delta
    ok = worst <= 1e-8 and exact_bound
    report(1, "uniform susceptibility family is tight", ok, f"(worst rho error {worst:.2e})")


def test_criterion_02_tight_bound_cycle_family():
    worst_rho = 0.0
    worst_bound = 0.0
    for n in (2, 4, 8):
        for delta in (0.25, 0.5, 0.9):
            model = cycle_network(n, delta)
            rho = spectral_radius(model.system_matrix())
            exact = (1.0 - delta) ** (1.0 / n)
            bound = corollary_bound(model.profile, model.influence)
            worst_rho = max(worst_rho, abs(rho - exact))
            worst_bound = max(worst_bound, abs(rho - bound))
    ok = worst_rho <= 1e-8 and worst_bound <= 1e-8
    report(
        2,
        "cycle family attains the parameter-free bound",
        ok,
        f"(rho err {worst_rho:.2e}, bound gap {worst_bound:.2e})",
    )


def test_criterion_03_radius_bound_soundness_sweep():
    rng = np.random.default_rng(103)
    checked = 0
    worst = -np.inf
    ok = True
    for _ in range(1000):
        n = int(rng.integers(2, 13))
        model = random_stable_model(rng, n)
        rho = spectral_radius(model.system_matrix())
        eps0, delta0 = natural_params(model.profile, model.influence)
        for dm in (1.0, 0.5):
            for em in (1.0, 0.5, 2.0):
                delta = delta0 * dm
                eps = min(eps0 * em, 1.0)
                s = fj_class_min_s(model.profile, model.influence, delta, eps)
                if s is None:
                    continue
                margin = rho - rho_star(ClassParams(delta, eps, s))
                worst = max(worst, margin)
                checked += 1
                ok &= margin <= 1e-8
    report(
        3,
        "class bound dominates the radius on 1000 random models",
        ok and checked > 2000,
        f"({checked} grid points, worst margin {worst:.2e})",
    )


def test_criterion_04_graph_criterion_matches_radius():
    rng = np.random.default_rng(104)
    compared = 0
    disagreements = 0
    for _ in range(1000):
        n = int(rng.integers(2, 11))
        profile, w = random_sparse_model(rng, n)
        rho = spectral_radius(system_matrix(profile, w))
        oracle = float(np.abs(np.linalg.eigvals(system_matrix(profile, w).entries)).max())
        if 1.0 - 1e-6 < rho <= 1.0 or 1.0 - 1e-6 < oracle <= 1.0:
            continue  # excluded near-unit band
        stable, _ = is_schur_stable(profile, w)
        compared += 1
        if stable != (rho < 1.0 - 1e-6):
            disagreements += 1
        if stable != (oracle < 1.0 - 1e-6):
            disagreements += 1
    ok = disagreements == 0 and compared >= 300
    report(
        4,
        "graph stability test agrees with the spectral radius",
        ok,
        f"({compared} instances compared, {disagreements} disagreements)",
    )


def test_criterion_05_consensus_iff_equal_prejudices():
    rng = np.random.default_rng(105)
    worst_gap = 0.0
    breaks = 0
    ok = True
    for _ in range(100):
        n = int(rng.integers(3, 11))
        base = random_stable_model(rng, n)
        prejudiced = np.flatnonzero(base.profile.values < 1.0)
        u0 = float(rng.uniform(-1, 1))
        u = rng.uniform(-1, 1, n)
        u[prejudiced] = u0
        model = FJModel(base.influence, base.profile, u)
        traj = simulate(model, x0=rng.uniform(-2, 2, n), conv_tol=1e-11)
        ok &= traj.converged
        gap = float(np.max(np.abs(traj.limit - u0)))
        worst_gap = max(worst_gap, gap)
        ok &= gap <= 1e-7
        bumped = np.array(u)
        bumped[int(rng.choice(prejudiced))] += 0.1
        x_inf, _ = steady_state(FJModel(base.influence, base.profile, bumped))
        if float(x_inf.max() - x_inf.min()) > 1e-4:
            breaks += 1
    ok &= breaks >= 95
    report(
        5,
        "equal prejudices give consensus, a bump breaks it",
        ok,
        f"(worst consensus gap {worst_gap:.2e}, broken in {breaks}/100)",
    )


def test_criterion_06_outcome_map_is_stochastic():
    rng = np.random.default_rng(106)
    worst_sum = 0.0
    most_negative = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 11))
        model = random_stable_model(rng, n)
        _, v = steady_state(model)
        worst_sum = max(worst_sum, float(np.max(np.abs(v.sum(axis=1) - 1.0))))
        most_negative = min(most_negative, float(v.min()))
    ok = worst_sum <= 1e-9 and most_negative >= -1e-12
    report(
        6,
        "prejudice-to-outcome map is row-stochastic",
        ok,
        f"(worst row-sum error {worst_sum:.2e}, min entry {most_negative:.2e})",
    )


def test_criterion_07_switching_counterexamples_exact():
    ok = True
    schedule1, u1, x01 = example1_schedule()
    traj1 = tv_simulate(schedule1, x01, u1, 1000)
    for m in range(501):
        ok &= traj1.at(2 * m)[1] == 1.0
    schedule2, u2, x02 = example2_schedule()
    traj2 = tv_simulate(schedule2, x02, u2, 1000)
    for m in range(501):
        ok &= traj2.at(2 * m)[0] == 1.0
    radii = [
        spectral_radius(system_matrix(profile, w))
        for schedule in (schedule1, schedule2)
        for profile, w in schedule.period
    ]
    ok &= all(r < 1.0 for r in radii)
    report(
        7,
        "per-step stability cannot prevent the switching oscillation",
        ok,
        f"(per-step radii {[f'{r:.1g}' for r in radii]})",
    )


def test_criterion_08_averaging_law_properties():
    rng = np.random.default_rng(108)
    ok = True
    worst_linearity = 0.0
    for _ in range(500):
        n = int(rng.integers(2, 9))
        schedule = random_schedule(rng, n)
        lo, hi = np.sort(rng.uniform(-2.0, 2.0, 2))
        hi += 0.1
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        x0 = rng.uniform(lo, hi, n)
        u = rng.uniform(lo, hi, n)
        base = tv_simulate(schedule, x0, u, 100)
        ok &= base.states.min() >= lo - slack and base.states.max() <= hi + slack
        higher = tv_simulate(schedule, x0 + rng.uniform(0, 1, n), u + rng.uniform(0, 1, n), 100)
        ok &= bool(np.all(base.states <= higher.states))
        dx = rng.uniform(-0.5, 0.5, n)
        du = rng.uniform(-0.5, 0.5, n)
        moved = tv_simulate(schedule, x0 + dx, u + du, 100)
        pure = tv_simulate(schedule, dx, du, 100)
        gap = float(np.max(np.abs((moved.states - base.states) - pure.states)))
        worst_linearity = max(worst_linearity, gap)
        ok &= gap <= 1e-12
        diff = moved.states - base.states
        ok &= diff.min() >= -0.5 - 1e-12 and diff.max() <= 0.5 + 1e-12
    report(
        8,
        "box invariance, monotonicity, and linearity on 500 schedules",
        ok,
        f"(worst linearity gap {worst_linearity:.2e})",
    )


def test_criterion_09_chain_bound_and_certified_decay():
    rng = np.random.default_rng(109)
    ok = True
    worst_margin = -np.inf
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        s = int(rng.integers(0, 6))
        sequence, delta, eps = random_cfj_sequence(rng, n, s)
        out = chain_row_sum_bound(sequence, delta, eps)
        margin = out.max_row_sum - out.bound
        worst_margin = max(worst_margin, margin)
        ok &= margin <= 1e-12 and out.holds
    decayed = 0
    for _ in range(50):
        n = int(rng.integers(2, 9))
        schedule, _, _, _ = random_certified_schedule(rng, n)
        prod = np.eye(n)
        for k in range(10_000):
            profile, w = schedule.at(k)
            prod = (profile.values[:, None] * w.entries) @ prod
            if float(prod.sum(axis=1).max()) < 1e-6:
                decayed += 1
                break
    ok &= decayed == 50
    report(
        9,
        "chain row-sum bound and certified product decay",
        ok,
        f"(worst row-sum margin {worst_margin:.2e}, {decayed}/50 decayed by 1e4)",
    )


def test_criterion_10_deficiency_recursion():
    rng = np.random.default_rng(110)
    worst = 0.0
    from fjnet.core import SubstochasticMatrix, deficiency, deficiency_of_product

    for _ in range(1000):
        n = int(rng.integers(1, 51))
        a = random_substochastic(rng, n)
        b = random_substochastic(rng, n)
        direct = deficiency(SubstochasticMatrix(a.entries @ b.entries))
        gap = float(np.max(np.abs(deficiency_of_product(a, b) - direct)))
        worst = max(worst, gap)
    ok = worst <= 1e-12
    report(10, "deficiency recursion matches explicit products", ok, f"(worst gap {worst:.2e})")


def test_criterion_11_convergence_rate_matches_radius():
    rng = np.random.default_rng(111)
    ok = True
    worst_excess = -np.inf
    fitted = 0
    for _ in range(50):
        n = int(rng.integers(3, 11))
        model = random_stable_model(rng, n)
        rho = spectral_radius(model.system_matrix())
        x_inf, _ = steady_state(model)
        traj = simulate(model, x0=rng.uniform(-3, 3, n), max_steps=6000, conv_tol=1e-13, stride=1)
        errors = np.max(np.abs(traj.states - x_inf), axis=1)
        usable = np.flatnonzero((errors >= 1e-10) & (errors <= 1e-2))
        if usable.size < 6:
            continue  # converged too fast for a fit; rate is trivially fine
        fitted += 1
        slope = np.polyfit(traj.steps[usable], np.log(errors[usable]), 1)[0]
        excess = float(np.exp(slope)) - rho
        worst_excess = max(worst_excess, excess)
        ok &= excess <= 0.02
    ok &= fitted >= 30
    report(
        11,
        "fitted decay rate stays within 0.02 of the radius",
        ok,
        f"({fitted}/50 fitted, worst excess {worst_excess:+.4f})",
    )


def test_criterion_12_certified_schedules_reach_consensus():
    rng = np.random.default_rng(112)
    ok = True
    worst = 0.0
    contained = 0
    for _ in range(50):
        n = int(rng.integers(2, 9))
        schedule, _, _, _ = random_certified_schedule(rng, n)
        u_star = float(rng.uniform(-1, 1))
        traj = tv_simulate(schedule, rng.uniform(-3, 3, n), np.full(n, u_star), 10_000)
        gap = float(np.max(np.abs(traj.final - u_star)))
        worst = max(worst, gap)
        ok &= gap < 1e-6
        u = rng.uniform(-1, 1, n)
        tail = tv_simulate(schedule, rng.uniform(-3, 3, n), u, 2000)
        if containment_bounds(tail, u) == (True, True):
            contained += 1
    ok &= contained == 50
    report(
        12,
        "certified schedules reach consensus and stay contained",
        ok,
        f"(worst consensus gap {worst:.2e}, {contained}/50 contained)",
    )
