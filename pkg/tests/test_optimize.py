import math
from collections import defaultdict

import numpy as np
import pytest

from multient.detect import m_functional
from multient.errors import DimensionTooLarge
from multient.ghz import apply_local_unitary, ghz_canonicalize, random_circuit
from multient.optimize import (
    OptimizerConfig,
    bound_for,
    gradient_check,
    maximize_min_m,
    objective,
    objective_gradient,
    select_bipartitions,
)
from multient.statespace import basis_state, make_state, random_state


def test_objective_examples(ghz, w):
    assert abs(objective(ghz, 100, "single_part_only") - 1) <= 1e-3
    assert objective(ghz, 100, "single_part_only") == pytest.approx(1, abs=1e-12)
    for beta in (0.1, 10, 1e4):
        assert objective(basis_state([2, 2, 2], [0, 0, 0]), beta) == pytest.approx(0, abs=1e-15)
    assert objective(w, 1e6) == pytest.approx(8 / 9, abs=1e-9)


def test_objective_approaches_min():
    state = random_state([2, 2, 2, 2], 0)
    ms = [m_functional(state, bp) for bp in select_bipartitions(4)]
    gaps = [objective(state, beta) - min(ms) for beta in (1, 10, 100, 1000, 1e5)]
    # between the min and the mean, shrinking with beta
    assert all(0 <= g <= np.mean(ms) - min(ms) + 1e-12 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] <= math.log(len(ms)) / 1e5 + 1e-12


def test_select_bipartitions():
    assert select_bipartitions(3, "all") == select_bipartitions(3, "single_part_only")
    assert len(select_bipartitions(4, "all")) == 7
    assert len(select_bipartitions(4, "single_part_only")) == 4
    with pytest.raises(ValueError):
        select_bipartitions(3, "some")


def test_gradient_check_examples(ghz):
    assert gradient_check(random_state([2, 2], 0), 10, 1e-5) <= 1e-5
    assert gradient_check(random_state([2, 2, 2], 0), 50, 1e-5) <= 1e-4
    assert gradient_check(ghz, 10, 1e-5) <= 1e-4


@pytest.mark.parametrize("h", [1e-8, 1e-3, 0])
def test_gradient_check_step_range(h):
    with pytest.raises(ValueError):
        gradient_check(random_state([2, 2], 0), 10, h)


def test_gradient_matches_finite_difference_in_all_coordinates():
    state = random_state([2, 3], 2)
    grad = objective_gradient(state, 5.0)
    h = 1e-6
    for k in range(state.total_dim):
        for unit in (1, 1j):
            e = np.zeros(state.total_dim, complex)
            e[k] = unit * h
            # objective of an unnormalized vector through the raw soft-min
            plus = _raw(state.amps + e, state.dims)
            minus = _raw(state.amps - e, state.dims)
            assert (plus - minus) / (2 * h) == pytest.approx(np.real(np.vdot(grad, e / h)), abs=1e-6)


def _raw(amps, dims):
    from multient.optimize import _value_and_grad

    return _value_and_grad(amps, dims, select_bipartitions(len(dims)), 5.0)[0]


def test_config_validation():
    for bad in (dict(restarts=0), dict(max_iters=0), dict(step_init=0), dict(tol_grad=-1), dict(bipartition_set="x")):
        with pytest.raises(ValueError):
            OptimizerConfig(**bad)


def test_two_qubits_reach_bell_value():
    result = maximize_min_m([2, 2])
    assert result.best_min_m >= 0.999
    assert result.converged


def test_three_qubits_reach_ghz_class():
    result = maximize_min_m([2, 2, 2], OptimizerConfig(bipartition_set="single_part_only"))
    assert result.best_min_m >= 0.999
    _, trace = ghz_canonicalize(result.best_state)
    assert trace.fidelity >= 1 - 1e-3


def test_all_equals_single_part_for_three_parts():
    a = maximize_min_m([2, 2, 2], OptimizerConfig(restarts=3, bipartition_set="all"))
    b = maximize_min_m([2, 2, 2], OptimizerConfig(restarts=3, bipartition_set="single_part_only"))
    assert np.array_equal(a.best_state.amps, b.best_state.amps)
    assert a.best_min_m == b.best_min_m


def test_ascent_and_unit_norm():
    log = defaultdict(list)

    def record(restart, iteration, beta, value):
        log[(restart, beta)].append(value)

    maximize_min_m([2, 2, 2], OptimizerConfig(restarts=4, seed=3), callback=record)
    assert log
    for values in log.values():
        assert all(b >= a for a, b in zip(values, values[1:]))


def test_iterates_stay_normalized(monkeypatch):
    import multient.optimize as opt

    norms = []
    original = opt._value_and_grad

    def spy(amps, dims, bps, beta):
        norms.append(np.linalg.norm(amps))
        return original(amps, dims, bps, beta)

    monkeypatch.setattr(opt, "_value_and_grad", spy)
    maximize_min_m([2, 3], OptimizerConfig(restarts=2, max_iters=40))
    assert norms and max(abs(n - 1) for n in norms) <= 1e-10


def test_result_invariants():
    result = maximize_min_m([2, 2, 2, 2], OptimizerConfig(restarts=2, max_iters=200))
    assert result.best_min_m == pytest.approx(min(result.per_bipartition_m), abs=1e-12)
    recomputed = [m_functional(result.best_state, bp) for bp in result.bipartitions]
    np.testing.assert_allclose(recomputed, result.per_bipartition_m, atol=1e-10)
    assert result.best_min_m <= bound_for(result.best_state.dims, result.bipartitions) + 1e-9
    assert result.best_min_m == max(result.restart_min_m)
    assert 0 <= result.restart_index < 2


def test_upper_bound_respected():
    for dims in ([3, 3], [2, 4], [3, 2, 2]):
        result = maximize_min_m(dims, OptimizerConfig(restarts=2, max_iters=200))
        assert result.best_min_m <= bound_for(dims, result.bipartitions) + 1e-9
    assert maximize_min_m([3, 3], OptimizerConfig(restarts=2)).best_min_m == pytest.approx(4 / 3, abs=1e-6)


def test_deterministic_serial():
    config = OptimizerConfig(restarts=3, seed=5)
    a, b = maximize_min_m([2, 2, 2], config), maximize_min_m([2, 2, 2], config)
    assert a.to_json() == b.to_json()
    assert np.array_equal(a.best_state.amps, b.best_state.amps)


def test_deterministic_concurrent():
    serial = maximize_min_m([2, 2, 2], OptimizerConfig(restarts=6, seed=2))
    threaded = maximize_min_m([2, 2, 2], OptimizerConfig(restarts=6, seed=2, workers=3))
    assert abs(serial.best_min_m - threaded.best_min_m) <= 1e-12
    assert serial.restart_index == threaded.restart_index


def test_sixteen_of_sixteen_restarts_succeed():
    result = maximize_min_m([2, 2, 2], OptimizerConfig(restarts=16, seed=1))
    assert sum(m >= 0.999 for m in result.restart_min_m) == 16


def test_restart_seeds_follow_config_seed():
    # restart r of seed s starts where restart r-1 of seed s+1 starts
    a = maximize_min_m([2, 2], OptimizerConfig(restarts=2, seed=4))
    b = maximize_min_m([2, 2], OptimizerConfig(restarts=1, seed=5))
    assert a.restart_min_m[1] == b.restart_min_m[0]


def test_dimension_too_large():
    with pytest.raises(DimensionTooLarge):
        maximize_min_m([2] * 13)


def test_optimum_is_lu_invariant_value():
    result = maximize_min_m([2, 2, 2], OptimizerConfig(restarts=1, seed=1))
    rotated = apply_local_unitary(result.best_state, random_circuit([2, 2, 2], 0))
    for bp, m in zip(result.bipartitions, result.per_bipartition_m):
        assert m_functional(rotated, bp) == pytest.approx(m, abs=1e-9)


def test_result_json():
    import json

    result = maximize_min_m([2, 2], OptimizerConfig(restarts=1))
    data = json.loads(result.to_json())
    assert data["state"]["dims"] == [2, 2]
    assert data["best_min_m"] == result.best_min_m
    assert make_state([2, 2], np.array(data["state"]["amps"])[:, 0] + 1j * np.array(data["state"]["amps"])[:, 1]).allclose(result.best_state)
