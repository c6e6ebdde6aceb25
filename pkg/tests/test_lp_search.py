import math

import numpy as np
import pytest
from scipy.optimize import linprog

from udb import certificate as C
from udb.errors import ConvergenceError, DomainError, ExtractionError
from udb.lp_search import (
    LPSolution,
    RadialProfile,
    build_lp,
    config_rhs,
    extract_certificate,
    fixed_point_delta,
    frequency_grid,
    solve_lp,
    with_delta,
)
from udb.simplex import INFEASIBLE, OPTIMAL

# HiGHS optimum of the two-row program at L=200, eps=0.01
TWO_ROW_HIGHS = 0.28711907


def highs_value(lp):
    ub = [i for i, s in enumerate(lp.senses) if s != "="]
    eq = [i for i, s in enumerate(lp.senses) if s == "="]
    sign = np.array([1.0 if lp.senses[i] == "<=" else -1.0 for i in ub])
    kw = dict(A_eq=lp.matrix[eq], b_eq=lp.rhs[eq])
    if ub:
        kw.update(A_ub=lp.matrix[ub] * sign[:, None], b_ub=lp.rhs[ub] * sign)
    res = linprog(-lp.objective, bounds=(0, None), method="highs", **kw)
    return -res.fun if res.status == 0 else -math.inf


def test_grid_and_shape():
    assert len(frequency_grid(200.0, 0.01)) == 20001
    lp = build_lp(0.5, [], [], 200.0, 0.01)
    assert lp.shape == (2, 20001)
    with pytest.raises(DomainError):
        frequency_grid(1.0, 0.0)
    with pytest.raises(DomainError):
        build_lp(1.0, [], [], 10.0, 0.1)


def test_config_rhs():
    assert config_rhs(6, 0.26305) == pytest.approx(6 - 1 / 0.26305)
    assert config_rhs(6, 0.3, chung_m=2) == pytest.approx(12 - 3 / 0.3)


def test_rows(spindles, bundled_cert):
    cfgs = [c.config for c in bundled_cert.configs]
    lp = build_lp(0.26, spindles, cfgs, 20.0, 0.1)
    assert lp.shape == (2 + 3 + 5, 201)
    assert lp.senses == ["=", "="] + ["<="] * 3 + [">="] * 5
    assert np.all(np.isfinite(lp.matrix))
    # at t = 0 every kernel is 1: 7 vertices, 15 pairs
    assert lp.matrix[:, 0] == pytest.approx([1, 1, 7, 7, 7, 15, 15, 15, 15, 15])
    assert list(lp.rhs[2:5]) == [2.0, 2.0, 2.0]
    assert np.all(lp.rhs[5:] == config_rhs(6, 0.26))


def test_two_row_lp():
    sol = solve_lp(build_lp(0.5, [], [], 200.0, 0.01))
    assert sol.status == OPTIMAL
    assert sol.objective_value == pytest.approx(0.287, abs=0.002)
    assert sol.objective_value == pytest.approx(TWO_ROW_HIGHS, abs=1e-7)
    assert sol.primal_residual <= 1e-8
    assert sol.duality_gap <= 1e-7
    assert sol.primal.mass.sum() == pytest.approx(1.0)


def test_matches_highs_on_coarse_grid(spindles, bundled_cert):
    cfgs = [c.config for c in bundled_cert.configs]
    for delta in (0.25, 0.2588, 0.27):
        lp = build_lp(delta, spindles, cfgs, 60.0, 0.05)
        sol = solve_lp(lp)
        ref = highs_value(lp)
        if math.isinf(ref):
            assert sol.status == INFEASIBLE
        else:
            assert sol.objective_value == pytest.approx(ref, abs=1e-8)


def test_three_spindle_fixed_point(three_spindle):
    delta, sol = three_spindle
    assert delta == pytest.approx(0.26305, abs=0.001)
    assert sol.primal_residual <= 1e-8 and sol.duality_gap <= 1e-7


def test_full_fixed_point_and_extraction(spindles, bundled_cert):
    cfgs = [c.config for c in bundled_cert.configs]
    delta, sol = fixed_point_delta(spindles, cfgs, tolerance=1e-7)
    assert abs(delta - 0.258795) <= 5e-4
    assert abs(sol.objective_value - delta) <= 1e-7
    lp = build_lp(delta, spindles, cfgs, 200.0, 0.01)
    cert = extract_certificate(lp, sol)
    assert all(g.weight >= 0 for g in cert.graphs)
    assert all(c.weight >= 0 for c in cert.configs)
    # weak duality at the fixed point
    assert C.solve_delta(cert) >= sol.objective_value - 1e-5
    # LP optima are not unique; the coefficients still land near the published ones
    assert cert.v0 == pytest.approx(bundled_cert.v0, rel=0.2)
    W = C.witness_value(cert, lp.grid)
    assert W.min() >= -1e-8  # dual feasibility on the grid
    assert W[0] >= 1 - 1e-8


def test_two_row_certificate(three_spindle):
    lp = build_lp(0.5, [], [], 200.0, 0.01)
    sol = solve_lp(lp)
    cert = extract_certificate(lp, sol)
    assert cert.graphs == [] and cert.configs == []
    assert cert.v0 + cert.v1 == pytest.approx(1.0, abs=1e-9)
    assert C.solve_delta(cert) == pytest.approx(sol.objective_value, abs=1e-9)


def test_weak_duality_random_primal(spindles):
    lp = build_lp(0.3, spindles, [], 200.0, 0.01)
    sol = solve_lp(lp)
    cert = extract_certificate(lp, sol)
    W = C.witness_value(cert, lp.grid)
    rng = np.random.default_rng(12)
    ub = [i for i, s in enumerate(lp.senses) if s == "<="]
    for _ in range(5):
        # feasible primal vertices from random objectives
        res = linprog(rng.normal(size=len(lp.grid)), A_eq=lp.matrix[:2], b_eq=lp.rhs[:2],
                      A_ub=lp.matrix[ub], b_ub=lp.rhs[ub], bounds=(0, None), method="highs")
        x = res.x
        assert float(x @ W) >= x[0] - 1e-8


def test_grid_refinement_stability():
    coarse = solve_lp(build_lp(0.5, [], [], 200.0, 0.02)).objective_value
    fine = solve_lp(build_lp(0.5, [], [], 200.0, 0.01)).objective_value
    assert fine - coarse <= 1e-3


def test_adding_rows_never_increases(spindles, bundled_cert):
    cfgs = [c.config for c in bundled_cert.configs]
    values = [solve_lp(build_lp(0.26, spindles[:k], cfgs[:j], 100.0, 0.02)).objective_value
              for k, j in ((0, 0), (1, 0), (3, 0), (3, 2), (3, 5))]
    assert all(a >= b - 1e-10 for a, b in zip(values, values[1:]))


def test_fixed_point_map_non_increasing(spindles, bundled_cert):
    cfgs = [c.config for c in bundled_cert.configs]
    lp = build_lp(0.5, spindles, cfgs, 100.0, 0.02)
    vals = []
    for d in (0.24, 0.25, 0.255, 0.26, 0.27):
        s = solve_lp(with_delta(lp, d))
        vals.append(s.objective_value if s.status == OPTIMAL else -math.inf)
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_fixed_point_tolerance_guard():
    with pytest.raises(DomainError):
        fixed_point_delta([], [], tolerance=1e-8)


def test_extract_rejects_non_optimal():
    lp = build_lp(0.5, [], [], 10.0, 0.1)
    bad = LPSolution(RadialProfile([], []), np.zeros(2), INFEASIBLE, -math.inf)
    with pytest.raises(ExtractionError):
        extract_certificate(lp, bad)


def test_radial_profile_io(tmp_path):
    prof = RadialProfile(np.array([0.0, 3.77]), np.array([0.3, 0.7]))
    prof.save(tmp_path / "k.txt")
    back = RadialProfile.load(tmp_path / "k.txt")
    assert np.array_equal(back.t, prof.t) and np.array_equal(back.mass, prof.mass)
    with pytest.raises(DomainError):
        RadialProfile(np.array([0.0]), np.array([-1.0]))
