"""Acceptance suite: every headline requirement at its stated tolerance.

Each test prints one [PASS]/[FAIL] line (run with -s or -rP to see them all).
Long runs are shared through module-scoped fixtures; the flocking study
dominates the runtime at a few minutes.
"""

import numpy as np
import pytest

from vskinetic import (
    INVERSE_SQRT,
    MORSE_DEFAULT,
    Model,
    ModelParams,
    SolverConfig,
    build_grid,
    build_tables,
    make_state,
    moment_0,
    moment_1,
    phase_field,
    scalar_field,
)
from vskinetic.kernels import relaxation_lower_bound
from vskinetic.limiting import limit_velocity_threezone, run_limiting, stationary_profile
from vskinetic.linalg import weighted_cg
from vskinetic.presets import (
    EX1_NONOSC,
    EX2_CONSISTENCY,
    EX3_AP,
    EX4_APPLICATION,
    HOMOGENEOUS,
    build_preset,
    initial_phase_values,
)
from vskinetic.reference import run_direct
from vskinetic.rescaled import implicit_momentum_solve, implicit_omega_update, run, step

EPS_SWEEP = (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)

# The truncation monitor flags runs whose velocity-domain edges carry mass;
# expected for the long flocking run (the support stretches once the scaling
# collapses) and for the smallest-background data.
pytestmark = pytest.mark.filterwarnings("ignore:velocity-domain boundary")


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def l1(a: np.ndarray, b: np.ndarray, dx: float) -> float:
    return float(np.sum(np.abs(a - b)) * dx)


def mass_drift(records) -> float:
    masses = np.array([r.mass for r in records])
    return float(np.max(np.abs(masses - masses[0])) / masses[0])


@pytest.fixture(scope="module")
def ex1():
    """Ex1 runs over the full stability sweep; (state, records) per eps."""
    config = build_preset(EX1_NONOSC)
    grid = config.build_grid()
    tables = build_tables(grid, config.potential, config.influence)
    g0 = initial_phase_values(EX1_NONOSC, grid)
    out = {}
    for eps in EPS_SWEEP:
        out[eps] = run(
            make_state(g0), tables, config.params_for(eps), SolverConfig(), 1.0
        )
    return grid, out


@pytest.fixture(scope="module")
def ex3():
    """Ex3 runs over the full sweep plus the limiting reference."""
    config = build_preset(EX3_AP)
    grid = config.build_grid()
    tables = build_tables(grid, config.potential, config.influence)
    g0 = initial_phase_values(EX3_AP, grid)
    out = {}
    for eps in EPS_SWEEP:
        out[eps] = run(
            make_state(g0), tables, config.params_for(eps), SolverConfig(), 1.0
        )
    rho_lim, u_lim = run_limiting(moment_0(g0), tables, config.params_for(1.0), 1.0)
    return grid, out, (rho_lim, u_lim)


@pytest.fixture(scope="module")
def ex2():
    config = build_preset(EX2_CONSISTENCY)
    grid = config.build_grid()
    tables = build_tables(grid, config.potential, config.influence)
    params = config.params_for(1.0)
    state, records = run(
        make_state(initial_phase_values(EX2_CONSISTENCY, grid)),
        tables,
        params,
        SolverConfig(),
        config.t_final,
    )
    grid_v = build_grid(config.n_x, config.direct_n_v, config.xi_max)
    tables_v = build_tables(grid_v, config.potential, config.influence)
    f_final, history = run_direct(
        initial_phase_values(EX2_CONSISTENCY, grid_v), params, tables_v, config.t_final
    )
    return grid, state, records, f_final, history


@pytest.fixture(scope="module")
def ex4():
    """The flocking study: strong-interaction long run plus its limit profile."""
    config = build_preset(EX4_APPLICATION)
    grid = config.build_grid()
    tables = build_tables(grid, config.potential, config.influence)
    g0 = initial_phase_values(EX4_APPLICATION, grid)
    params = config.params_for(1e-4)
    state, records = run(
        make_state(g0), tables, params, SolverConfig(), config.t_final, diag_stride=200
    )
    stationary = stationary_profile(
        moment_0(g0),
        tables,
        params,
        t_long=config.stationary_t_long,
        settle_tol=config.stationary_settle_tol,
    )
    return grid, state, records, stationary


def test_homogeneous_exactness():
    config = build_preset(HOMOGENEOUS)
    grid = config.build_grid()
    tables = build_tables(grid, config.potential, config.influence)
    state = make_state(initial_phase_values(HOMOGENEOUS, grid))
    g0 = state.g.values.copy()
    params = config.params_for(1e-2)
    solver_config = SolverConfig()
    dt = grid.dx / 20
    for _ in range(1000):
        state = step(state, tables, params, solver_config, dt)
    dev = float(np.max(np.abs(state.g.values - g0)))
    report("homogeneous exactness", dev <= 1e-12, f"max|g - g0| = {dev:.3e} after 1000 steps")


def test_mass_conservation_all_runs(ex1, ex3, ex2, ex4):
    worst = 0.0
    for _, runs in (ex1[:2], ex3[:2]):
        for eps, (_, records) in runs.items():
            worst = max(worst, mass_drift(records))
    _, _, records2, _, history = ex2
    worst = max(worst, mass_drift(records2))
    masses = np.array([m for _, m in history])
    worst = max(worst, float(np.max(np.abs(masses - masses[0])) / masses[0]))
    worst = max(worst, mass_drift(ex4[2]))
    report("mass conservation", worst <= 1e-12, f"max relative drift {worst:.3e}")


def test_omega_decay_bound(ex1):
    grid, runs = ex1
    worst = 0.0
    for eps in (1e-2, 1e-3):
        _, records = runs[eps]
        ratios = [r.omega_max / r.omega_bound for r in records if r.omega_bound > 0]
        worst = max(worst, max(ratios))
    report(
        "scaling-factor decay bound",
        worst <= 1.0 + 1e-12,
        f"max omega_max/omega_bound = {worst:.15f}",
    )


def test_operator_oracles():
    grid = build_grid(16, 8, 6.0)
    tables = build_tables(grid, MORSE_DEFAULT, INVERSE_SQRT)
    rng = np.random.default_rng(2024)
    rho = rng.uniform(0.2, 2.0, 16)
    u = rng.normal(size=16)
    dx = grid.dx

    # velocity forcing against a brute-force double loop
    from vskinetic import compute_B

    params = ModelParams(Model.THREE_ZONE, 1e-3, MORSE_DEFAULT, INVERSE_SQRT)
    b_fast = compute_B(params, tables, scalar_field(grid, rho), scalar_field(grid, u)).values
    oracle = np.array(
        [
            sum(tables.phi[i, j] * (u[j] - u[i]) * rho[j] * dx for j in range(16))
            - sum(tables.gradK[i, j] * rho[j] * dx for j in range(16))
            for i in range(16)
        ]
    )
    err_b = np.max(np.abs(b_fast - oracle)) / max(np.max(np.abs(oracle)), 1e-30)

    # limiting velocity against a dense constrained solve
    u_cg = limit_velocity_threezone(tables, scalar_field(grid, rho), cg_rel_tol=1e-12).values
    L = np.diag(tables.phi @ rho * dx) - tables.phi * rho[None, :] * dx
    rhs = -(tables.gradK @ rho) * dx
    stacked = np.vstack([L, (rho * dx)[None, :]])
    dense, *_ = np.linalg.lstsq(stacked, np.concatenate([rhs, [0.0]]), rcond=None)
    err_u = np.max(np.abs(u_cg - dense)) / np.max(np.abs(dense))

    # alignment operator: symmetric and PSD in the density-weighted product
    def M_op(m):
        return (tables.phi @ rho * dx) * m - rho * (tables.phi @ m * dx)

    weight = 1.0 / rho
    sym_err, min_quad = 0.0, np.inf
    for _ in range(20):
        m1, m2 = rng.normal(size=16), rng.normal(size=16)
        lhs = np.sum(M_op(m1) * m2 * weight) * dx
        rhs_ip = np.sum(m1 * M_op(m2) * weight) * dx
        sym_err = max(sym_err, abs(lhs - rhs_ip) / max(abs(lhs), abs(rhs_ip), 1.0))
        min_quad = min(min_quad, np.sum(M_op(m1) * m1 * weight) * dx)

    ok = err_b <= 1e-8 and err_u <= 1e-8 and sym_err <= 1e-10 and min_quad >= -1e-12
    report(
        "operator correctness oracles",
        ok,
        f"forcing {err_b:.2e}, limit velocity {err_u:.2e}, "
        f"symmetry {sym_err:.2e}, min quad form {min_quad:.2e}",
    )


def test_consistency_with_direct_solver(ex2):
    grid, state, _, f_final, _ = ex2
    rho_d = moment_0(f_final).values
    m_d = moment_1(f_final).values
    err_rho = l1(state.rho.values, rho_d, grid.dx) / float(np.sum(np.abs(rho_d)) * grid.dx)
    err_m = l1(state.m.values, m_d, grid.dx) / float(np.sum(np.abs(m_d)) * grid.dx)
    ok = err_rho <= 0.05 and err_m <= 0.05
    report(
        "consistency with the direct solver",
        ok,
        f"relative L1: density {err_rho:.4f}, momentum {err_m:.4f} (tolerance 0.05)",
    )


def test_asymptotic_preserving_property(ex3):
    grid, runs, (rho_lim, u_lim) = ex3
    ladder = (1.0, 1e-1, 1e-2, 1e-3)
    d_rho, d_u = [], []
    for eps in ladder:
        state, _ = runs[eps]
        d_rho.append(l1(state.rho.values, rho_lim.values, grid.dx))
        d_u.append(l1(state.u.values, u_lim.values, grid.dx))
    decreasing = all(a > b for a, b in zip(d_rho, d_rho[1:])) and all(
        a > b for a, b in zip(d_u, d_u[1:])
    )
    rel_rho = d_rho[-1] / float(np.sum(np.abs(rho_lim.values)) * grid.dx)
    rel_u = d_u[-1] / float(np.sum(np.abs(u_lim.values)) * grid.dx)
    ok = decreasing and rel_rho <= 0.02 and rel_u <= 0.02
    report(
        "asymptotic-preserving limit",
        ok,
        f"distances rho {['%.2e' % d for d in d_rho]}, u {['%.2e' % d for d in d_u]}; "
        f"at eps=1e-3: rho {rel_rho:.4f}, u {rel_u:.4f} (tolerance 0.02)",
    )


def test_eps_uniform_stability(ex1, ex3):
    checked = 0
    for _, runs in (ex1[:2], ex3[:2]):
        for eps in EPS_SWEEP:
            state, records = runs[eps]
            assert np.all(np.isfinite(state.g.values))
            assert np.all(np.isfinite(state.omega.values))
            assert all(np.isfinite(r.as_row()).all() for r in records)
            checked += 1
    report(
        "stability uniform in the relaxation parameter",
        checked == 2 * len(EPS_SWEEP),
        f"{checked} runs at dt = dx/20 over eps in {EPS_SWEEP} stayed finite",
    )


def test_non_oscillatory_monitors(ex1):
    _, runs = ex1
    names = ("max_grad_u", "max_grad_rho_over_rho", "max_grad_P_over_rho")
    worst_rel, worst_bound = 0.0, 0.0
    for name in names:
        a = np.array([getattr(r, name) for r in runs[1e-3][1]])
        b = np.array([getattr(r, name) for r in runs[1e-4][1]])
        cap = 1.2 * max(getattr(r, name) for r in runs[1e-2][1])
        denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-30)
        worst_rel = max(worst_rel, float(np.max(np.abs(a - b) / denom)))
        worst_bound = max(worst_bound, a.max() / cap, b.max() / cap)
    ok = worst_rel <= 0.05 and worst_bound <= 1.0
    report(
        "non-oscillatory monitors",
        ok,
        f"max pointwise gap eps 1e-3 vs 1e-4: {worst_rel:.4f} (tol 0.05); "
        f"max curve / 1.2x eps=1e-2 cap: {worst_bound:.4f}",
    )


def test_flocking_application(ex4):
    grid, state, _, stationary = ex4
    mass = float(state.rho.values.sum() * grid.dx)
    peak_momentum = float(np.max(np.abs(state.m.values)))
    gap = l1(state.rho.values, stationary.rho.values, grid.dx) / float(
        np.sum(np.abs(stationary.rho.values)) * grid.dx
    )
    ok = peak_momentum <= 1e-4 * mass and gap <= 0.05
    report(
        "flocking long-time application",
        ok,
        f"max|rho u| = {peak_momentum:.3e} (cap {1e-4 * mass:.3e}); "
        f"density vs stationary profile {gap:.4f} relative L1 (tol 0.05)",
    )


def test_exact_small_recursions():
    grid = build_grid(8, 4)
    omega = scalar_field(grid, np.ones(8))
    at_rest = scalar_field(grid, np.zeros(8))
    unit_rate = scalar_field(grid, np.ones(8))
    dt, eps = 0.1, 1.0
    worst = 0.0
    w = omega
    for n in range(1, 26):
        w = implicit_omega_update(w, at_rest, unit_rate, dt, eps)
        closed = (1.0 + dt / eps) ** (-n)
        worst = max(worst, abs(w.values[0] - closed) / closed)

    config = build_preset(EX1_NONOSC)
    grid = config.build_grid()
    tables = build_tables(grid, config.potential, config.influence)
    g0 = initial_phase_values(EX1_NONOSC, grid)
    state = make_state(g0)
    state.m.values[:] = 0.1 * np.sin(grid.x_centers) * state.rho.values
    state.u.values[:] = state.m.values / state.rho.values
    params = ModelParams(Model.AGGREGATION, 1e-2, MORSE_DEFAULT)
    dt = grid.dx / 20
    ratio = dt / params.eps
    m_new, _ = implicit_momentum_solve(state, state.rho, tables, params, dt, SolverConfig())
    from vskinetic.rescaled import _momentum_rhs

    force = state.rho.values * (tables.gradK @ state.rho.values * grid.dx)
    residual = m_new.values * (1.0 + ratio) + ratio * force - _momentum_rhs(state, dt)
    res = float(np.max(np.abs(residual)) / max(np.max(np.abs(m_new.values)), 1e-30))
    ok = worst <= 1e-14 and res <= 1e-14
    report(
        "exact small recursions",
        ok,
        f"scaling-factor geometric decay {worst:.2e}; momentum closed-form residual {res:.2e}",
    )
