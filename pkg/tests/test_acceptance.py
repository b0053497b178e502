"""Exit criteria for the package, one test per criterion.

Each test prints a PASS/FAIL line (also collected in the terminal summary).
Criteria 7 and 8 run the optimizer comparison on ten n=8 instances and take
several minutes on one core.
"""
import csv
import io
import itertools
import json
import time

import numpy as np
import pytest

from annealsched.dynamics import EvolutionConfig, ScheduleEvaluator, evolve, fidelity
from annealsched.harness.cli import main as cli_main
from annealsched.optimizers import (
    ConvergenceRule,
    bfgs_minimize,
    central_difference,
    linear_baseline,
    mcts_optimize,
    multistart_bfgs,
)
from annealsched.problems import (
    CnfInstance,
    CutGraph,
    DiagonalHamiltonian,
    generate_hard_sat,
    maxcut_hamiltonian,
    sample_cubic_graph,
    sat_hamiltonian,
)
from annealsched.schedule import ActionGrid, FourierSchedule

from oracles import (
    cut_size,
    five_point_gradient,
    ode_evolve,
    overlap,
    reference_evolve,
    satisfying_assignments,
    violated_clauses,
)

COMPARISON_SEEDS = range(1000, 1010)
COMPARISON_T = (2.5, 5.0, 10.0, 20.0)
NFEV_T = 5.0
NFEV_M = (3, 5, 8)


def test_c01_simulator_oracle(acceptance_report):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 1.0
    for _ in range(50):
        n = int(rng.integers(1, 5))
        h = DiagonalHamiltonian(n, rng.uniform(0, n, 2**n))
        M = int(rng.integers(0, 4))
        s = FourierSchedule(float(rng.uniform(0.5, 10.0)), tuple(rng.uniform(-0.2, 0.2, M)))
        psi = evolve(h, s, EvolutionConfig(dt=0.05))
        worst = min(worst, overlap(psi, reference_evolve(h.diag, s, n)))
    elapsed = time.perf_counter() - start
    acceptance_report(1, "split-step vs dense reference, 50 cases",
                      worst >= 1 - 1e-6 and elapsed < 60,
                      f"worst infidelity {1 - worst:.2e}, {elapsed:.1f}s")


def test_c02_norm_conservation(acceptance_report, state_audit):
    rng = np.random.default_rng(7)
    for n in (2, 5, 8):
        h = DiagonalHamiltonian(n, rng.uniform(0, 3 * n, 2**n))
        for T in (0.3, 7.0, 40.0):
            evolve(h, FourierSchedule(T, tuple(rng.normal(0, 0.3, 4))))
    acceptance_report(2, "norm conservation on every evolved state in the session",
                      state_audit.states > 0 and state_audit.max_norm_error < 1e-9,
                      f"{state_audit.states} states so far, max |norm-1| "
                      f"{state_audit.max_norm_error:.1e}")


def test_c03_integrator_order(acceptance_report):
    h = DiagonalHamiltonian(3, [2.0, 1.0, 3.0, 0.0, 2.0, 1.0, 3.0, 2.0])
    s = FourierSchedule(5.0, (0.1, -0.05))
    exact = fidelity(ode_evolve(h.diag, s, 3), h.ground_indices)
    errors = [abs(fidelity(evolve(h, s, EvolutionConfig(dt=dt)), h.ground_indices) - exact)
              for dt in (0.2, 0.1, 0.05)]
    ratios = [errors[0] / errors[1], errors[1] / errors[2]]
    acceptance_report(3, "second-order convergence in dt",
                      all(3 <= r <= 5 for r in ratios),
                      "ratios " + ", ".join(f"{r:.3f}" for r in ratios))


def test_c04_encodings(acceptance_report):
    rng = np.random.default_rng(4)
    ok = True
    for _ in range(20):
        n = int(rng.integers(3, 9))
        clauses = tuple(
            tuple((int(v), bool(rng.integers(2))) for v in rng.choice(n, 3, replace=False) + 1)
            for _ in range(int(rng.integers(1, 5 * n)))
        )
        inst = CnfInstance(n, clauses)
        brute = [violated_clauses(inst, z) for z in range(2**n)]
        ok &= bool(np.array_equal(sat_hamiltonian(inst).diag, brute))
    for _ in range(10):
        n = int(rng.integers(2, 9))
        edges = tuple(e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5)
        g = CutGraph(n, edges)
        diag = maxcut_hamiltonian(g).diag
        brute = [2 * (len(edges) - cut_size(edges, z)) for z in range(2**n)]
        flipped = diag[(2**n - 1) ^ np.arange(2**n)]
        ok &= bool(np.array_equal(diag, brute) and np.array_equal(diag, flipped))
    acceptance_report(4, "3-SAT and Max-Cut diagonals match brute force", ok,
                      "20 CNF instances, 10 graphs")


def test_c05_hard_instances(acceptance_report):
    checked = 0
    ok = True
    for n in range(4, 11):
        for seed in (0, 1):
            inst = generate_hard_sat(n, seed)
            ok &= inst.num_clauses == 3 * n and len(satisfying_assignments(inst)) == 1
            checked += 1
    acceptance_report(5, "generated instances have m = 3n and a unique solution", ok,
                      f"{checked} instances, n = 4..10")


def test_c06_adiabatic_trend(acceptance_report):
    start = time.perf_counter()
    Ts = np.geomspace(2.0, 200.0, 5)
    rises, high = 0, 0
    finals = []
    for seed in range(600, 605):
        h = sat_hamiltonian(generate_hard_sat(6, seed))
        fids = [ScheduleEvaluator(h, T)(())[0] for T in Ts]
        rises += fids[-1] > fids[0]
        high += fids[-1] > 0.9
        finals.append(fids[-1])
    elapsed = time.perf_counter() - start
    acceptance_report(6, "linear-schedule fidelity grows with T (n=6)",
                      rises == 5 and high >= 4 and elapsed < 300,
                      f"F(T=200) = {', '.join(f'{f:.3f}' for f in finals)}; {elapsed:.1f}s")


@pytest.fixture(scope="module")
def comparison():
    """All optimizer runs shared by criteria 7 and 8."""
    start = time.perf_counter()
    results = {}
    for seed in COMPARISON_SEEDS:
        h = sat_hamiltonian(generate_hard_sat(8, seed))
        for T in COMPARISON_T:
            results["linear", seed, 5, T] = linear_baseline(ScheduleEvaluator(h, T))
        runs = {(5, T) for T in COMPARISON_T} | {(M, NFEV_T) for M in NFEV_M}
        for M, T in sorted(runs):
            results["bfgs", seed, M, T] = multistart_bfgs(ScheduleEvaluator(h, T), M, seed=seed)
            results["mcts", seed, M, T] = mcts_optimize(ScheduleEvaluator(h, T), M, seed=seed)
    return results, time.perf_counter() - start


def _mean(results, method, M, T, attr="best_fidelity"):
    return float(np.mean([getattr(results[method, s, M, T], attr) for s in COMPARISON_SEEDS]))


def test_c07_optimizer_dominance(acceptance_report, comparison):
    results, elapsed = comparison
    lines = []
    ok = elapsed < 1800
    for T in COMPARISON_T:
        b, m, lin = (_mean(results, meth, 5, T) for meth in ("bfgs", "mcts", "linear"))
        lines.append(f"T={T:g}: bfgs {b:.3f} mcts {m:.3f} linear {lin:.3f}")
        if T in COMPARISON_T[-2:]:
            ok &= b >= m >= lin
        for s in COMPARISON_SEEDS:
            ok &= (results["bfgs", s, 5, T].best_fidelity
                   >= results["linear", s, 5, T].best_fidelity)
    acceptance_report(7, "mean fidelity bfgs >= mcts >= linear at the two largest T", ok,
                      "; ".join(lines) + f"; {elapsed:.0f}s for the comparison")


def test_c08_nfev_scaling(acceptance_report, comparison):
    results, _ = comparison
    bfgs = [_mean(results, "bfgs", M, NFEV_T, "n_fev") for M in NFEV_M]
    mcts = [_mean(results, "mcts", M, NFEV_T, "n_fev") for M in NFEV_M]
    ok = bfgs[0] < bfgs[1] < bfgs[2] and max(mcts) < 2 * min(mcts)
    acceptance_report(8, "BFGS n_fev grows with M, MCTS n_fev roughly flat", ok,
                      f"T={NFEV_T:g}, M={NFEV_M}: bfgs {[round(v) for v in bfgs]}, "
                      f"mcts {[round(v, 1) for v in mcts]}")


def test_c09_mcts_exhaustive(acceptance_report):
    grid = ActionGrid()
    ok = True
    for seed in range(5):
        h = sat_hamiltonian(generate_hard_sat(6, 700 + seed))
        scan_ev = ScheduleEvaluator(h, 5.0)
        scan = [f for f, _ in scan_ev.evaluate_many([(v,) for v in grid.values])]
        res = mcts_optimize(ScheduleEvaluator(h, 5.0), 1, grid, budget=200,
                            convergence=ConvergenceRule.disabled(), seed=seed)
        ok &= res.stats["best_actions"] == (int(np.argmax(scan)),)
        ok &= res.best_fidelity == pytest.approx(max(scan), abs=1e-12)
        ok &= scan_ev.counter.count == 40 and res.n_fev == 200
    acceptance_report(9, "MCTS at M=1 finds the grid argmax", ok, "5 instances, budget 200")


def test_c10_bfgs_units(acceptance_report):
    a = np.array([0.3, -1.7, 2.5])
    quad = lambda x: float(np.sum((x - a) ** 2))  # noqa: E731
    rng = np.random.default_rng(10)
    quad_err = max(np.max(np.abs(bfgs_minimize(quad, rng.normal(0, 10, 3)).x - a))
                   for _ in range(5))

    def rosen(x):
        return (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2

    def rosen_grad(x):
        return np.array([-2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] ** 2),
                         200 * (x[1] - x[0] ** 2)])

    rosen_err = np.max(np.abs(bfgs_minimize(rosen, [-1.2, 1.0], grad=rosen_grad).x - 1.0))

    x = np.array([0.5, -1.0, 2.0])
    rel_quad = np.max(np.abs(central_difference(quad, x) - five_point_gradient(quad, x)))
    rel_quad /= np.max(np.abs(five_point_gradient(quad, x)))
    ev = ScheduleEvaluator(sat_hamiltonian(generate_hard_sat(4, 3)), 3.0)
    f = lambda y: 1 - ev(tuple(y))[0]  # noqa: E731
    y = np.array([0.05, -0.1])
    ref = five_point_gradient(f, y)
    rel_anneal = np.max(np.abs(central_difference(f, y) - ref)) / np.max(np.abs(ref))
    ok = quad_err < 1e-8 and rosen_err < 1e-6 and rel_quad < 1e-3 and rel_anneal < 1e-3
    acceptance_report(10, "BFGS on quadratic / Rosenbrock; finite-difference gradients", ok,
                      f"quadratic {quad_err:.1e}, Rosenbrock {rosen_err:.1e}, "
                      f"fd rel err {rel_quad:.1e} / {rel_anneal:.1e}")


def test_c11_energy_sandwich(acceptance_report, state_audit):
    rng = np.random.default_rng(11)
    problems = [sat_hamiltonian(generate_hard_sat(6, s)) for s in range(3)]
    problems += [maxcut_hamiltonian(sample_cubic_graph(8, s)) for s in range(2)]
    before = state_audit.sandwich_checks
    worst = np.inf
    for h in problems:
        e0, e1, emax = h.ground_energy, h.excited_energy(), float(h.diag.max())
        for T in (1.0, 5.0, 25.0):
            psi = evolve(h, FourierSchedule(T, tuple(rng.normal(0, 0.1, 3))))
            F = fidelity(psi, h.ground_indices)
            e = float(np.abs(psi) ** 2 @ h.diag) - e0
            worst = min(worst, e - (1 - F) * (e1 - e0), (1 - F) * (emax - e0) - e)
    ok = worst >= -1e-12 and state_audit.sandwich_checks > before
    acceptance_report(11, "(1-F)(E1-E0) <= <E>-E0 <= (1-F)(Emax-E0) for every evolved state", ok,
                      f"{state_audit.sandwich_checks} states audited, min margin {worst:.1e}")


def test_c12_sweep_determinism(acceptance_report, tmp_path, capsys):
    cfg = {"instance_sources": [{"n": 5, "count": 2, "seed": 4}],
           "methods": ["linear", "bfgs", "mcts"], "T_grid": [2.0, 4.0], "M_values": [2],
           "master_seed": 99, "optimizer": {"num_starts": 3, "mcts_budget": 100}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert cli_main(["sweep", "--config", str(path), "--out", str(out)]) == 0
        rows = list(csv.reader(io.StringIO((out / "results.csv").read_text())))
        drop = rows[0].index("wall_time_s")
        outputs.append("\n".join(",".join(r[:drop] + r[drop + 1:]) for r in rows))
    capsys.readouterr()
    acceptance_report(12, "sweep output is byte-identical across runs (wall time excluded)",
                      outputs[0] == outputs[1], f"{len(outputs[0].splitlines()) - 1} rows")
