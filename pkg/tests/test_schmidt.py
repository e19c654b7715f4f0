import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from helpers import TEST_DIMS, random_product
from multient.detect import m_functional, max_m, minor_sum
from multient.errors import (
    BadBipartition,
    InvalidDensityMatrix,
    NonOrthonormalRightStates,
    PhaseCountMismatch,
)
from multient.named import bell
from multient.schmidt import (
    DensityMatrix,
    max_entangled_state,
    purity,
    reduced_density,
    schmidt_decompose,
)
from multient.statespace import Bipartition, enumerate_bipartitions, make_state, random_state

CUT0 = Bipartition((0,), (1, 2))


def test_reduced_density_examples(ghz, w):
    np.testing.assert_allclose(reduced_density(ghz, CUT0).entries, np.diag([0.5, 0.5]), atol=1e-15)
    np.testing.assert_allclose(
        reduced_density(make_state([2, 2], [1, 0, 0, 0]), Bipartition((0,), (1,))).entries,
        np.diag([1, 0]),
    )
    rho = reduced_density(w, CUT0).entries
    np.testing.assert_allclose(rho, np.diag([2 / 3, 1 / 3]), atol=1e-15)
    np.testing.assert_allclose(rho, oracles.reduced_by_summation(w, [0]), atol=1e-15)


@pytest.mark.parametrize("dims", TEST_DIMS)
def test_reduced_density_matches_summation(dims):
    state = random_state(dims, 7)
    for bp in enumerate_bipartitions(len(dims)):
        np.testing.assert_allclose(
            reduced_density(state, bp, "left").entries,
            oracles.reduced_by_summation(state, list(bp.left)),
            atol=1e-14,
        )
        # A^dagger A is the transpose (conjugate) of the summed right reduction
        np.testing.assert_allclose(
            reduced_density(state, bp, "right").entries,
            np.array(oracles.reduced_by_summation(state, list(bp.right))).T,
            atol=1e-14,
        )


def test_reduced_density_bad_side(ghz):
    with pytest.raises(ValueError):
        reduced_density(ghz, CUT0, "middle")
    with pytest.raises(BadBipartition):
        reduced_density(ghz, Bipartition((0,), (1, 2, 3)))


def test_purity_examples():
    assert purity(DensityMatrix(np.diag([1.0, 0.0]))) == 1
    assert purity(DensityMatrix(np.diag([0.5, 0.5]))) == pytest.approx(0.5, abs=1e-15)
    p = purity(DensityMatrix(np.diag([2 / 3, 1 / 3])))
    assert p == pytest.approx(5 / 9, abs=1e-15)
    assert 2 * (1 - p) == pytest.approx(8 / 9, abs=1e-14)


@pytest.mark.parametrize(
    "entries",
    [
        [[1, 0, 0]],
        [[0.5, 0.1], [0.2, 0.5]],
        [[0.6, 0], [0, 0.6]],
        [[1.1, 0], [0, -0.1]],
    ],
)
def test_density_matrix_validation(entries):
    with pytest.raises(InvalidDensityMatrix):
        DensityMatrix(np.array(entries))


def test_schmidt_examples(ghz, w):
    plus = np.array([1, 1]) / math.sqrt(2)
    sd = schmidt_decompose(make_state([2, 2], np.kron([1, 0], plus)), Bipartition((0,), (1,)))
    np.testing.assert_allclose(sd.coefficients, [1])
    assert sd.rank == 1

    sd = schmidt_decompose(ghz, CUT0)
    np.testing.assert_allclose(sd.coefficients, [1 / math.sqrt(2)] * 2, atol=1e-15)
    # tie order: |0> before |1> on the left
    np.testing.assert_allclose(np.abs(sd.left_basis), np.eye(2), atol=1e-15)

    sd = schmidt_decompose(w, CUT0)
    np.testing.assert_allclose(sd.coefficients, [math.sqrt(2 / 3), math.sqrt(1 / 3)], atol=1e-15)


@pytest.mark.parametrize("dims", TEST_DIMS + [(3, 4), (4, 3, 2)])
def test_schmidt_invariants(dims):
    for seed in range(10):
        state = random_state(dims, seed)
        for bp in enumerate_bipartitions(len(dims)):
            sd = schmidt_decompose(state, bp)
            c = sd.coefficients
            assert abs(np.sum(c**2) - 1) <= 1e-10
            assert np.all(np.diff(c) <= 0)
            for basis in (sd.left_basis, sd.right_basis):
                np.testing.assert_allclose(basis.conj().T @ basis, np.eye(sd.rank), atol=1e-10)
            assert sd.reconstruct(dims).fidelity(state) >= 1 - 1e-10
            # gauge: first non-negligible left component real positive
            for j in range(sd.rank):
                col = sd.left_basis[:, j]
                lead = col[np.argmax(np.abs(col) > 1e-12)]
                assert abs(lead.imag) <= 1e-14 and lead.real > 0
            # coefficients are the square roots of the reduced spectrum
            ev = reduced_density(state, bp).eigenvalues()[: sd.rank]
            np.testing.assert_allclose(c, np.sqrt(np.clip(ev, 0, None)), atol=1e-10)


def test_schmidt_rank_of_products(rng):
    state = random_product((2, 3, 2), rng, [[0, 2], [1]])
    assert schmidt_decompose(state, Bipartition((0, 2), (1,))).rank == 1
    assert schmidt_decompose(state, CUT0).rank == 2


def test_schmidt_deterministic(ghz):
    for state in (ghz, random_state((2, 2, 2), 3), max_entangled_state([3, 3], Bipartition((0,), (1,)), [0, 1, 2])):
        bp = Bipartition((0,), tuple(range(1, state.n_parts)))
        a, b = schmidt_decompose(state, bp), schmidt_decompose(state, bp)
        for x, y in ((a.coefficients, b.coefficients), (a.left_basis, b.left_basis), (a.right_basis, b.right_basis)):
            assert np.array_equal(x, y)


@pytest.mark.parametrize("dims", TEST_DIMS)
def test_left_right_spectra_agree(dims):
    for seed in range(10):
        state = random_state(dims, seed)
        for bp in enumerate_bipartitions(len(dims)):
            left = reduced_density(state, bp, "left").eigenvalues()
            right = reduced_density(state, bp, "right").eigenvalues()
            k = min(len(left), len(right))
            np.testing.assert_allclose(left[:k], right[:k], atol=1e-10)
            assert np.all(np.abs(np.concatenate([left[k:], right[k:]])) <= 1e-10)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dims=st.sampled_from(TEST_DIMS + [(3, 3), (4, 2, 2)]))
def test_purity_identity_and_lower_bound(seed, dims):
    state = random_state(dims, seed)
    for bp in enumerate_bipartitions(len(dims)):
        p = purity(reduced_density(state, bp))
        d = min(bp.block_dims(dims))
        assert p >= 1 / d - 1e-12
        assert abs(minor_sum(state, bp) - 2 * (1 - p)) <= 1e-10
        assert abs(m_functional(state, bp) - 2 * (1 - p)) <= 1e-10


def test_max_entangled_examples(ghz):
    out = max_entangled_state([2, 2, 2], CUT0, [0, 0], right_states=[[1, 0, 0, 0], [0, 0, 0, 1]])
    assert out.allclose(ghz, atol=1e-15)
    b = max_entangled_state([2, 2], Bipartition((0,), (1,)), [0, 0])
    assert b.allclose(bell(), atol=1e-15)
    assert m_functional(b, Bipartition((0,), (1,))) == pytest.approx(1, abs=1e-12)
    q = max_entangled_state([3, 3], Bipartition((0,), (1,)), [0, 0, 0])
    assert m_functional(q, Bipartition((0,), (1,))) == pytest.approx(4 / 3, abs=1e-12)


@pytest.mark.parametrize(
    "dims, left",
    [((2, 2), (0,)), ((3, 3), (0,)), ((4, 4), (0,)), ((2, 3, 2), (0, 2)), ((2, 2, 2), (0, 1)), ((3, 2, 2), (0,)), ((2, 2, 2, 2), (0, 3))],
)
def test_max_entangled_saturates_bound(dims, left):
    bp = Bipartition.from_block(left, len(dims))
    d = min(bp.block_dims(dims))
    rng = np.random.default_rng(d)
    for _ in range(3):
        state = max_entangled_state(dims, bp, rng.uniform(0, 2 * math.pi, d))
        assert abs(m_functional(state, bp) - max_m(dims, bp)) <= 1e-12
        assert abs(purity(reduced_density(state, bp)) - 1 / d) <= 1e-10


def test_max_entangled_custom_right_states():
    from multient.ghz import random_unitary

    u = random_unitary(4, np.random.default_rng(0))
    bp = Bipartition((0,), (1, 2))
    state = max_entangled_state([2, 2, 2], bp, [0.3, 1.1], right_states=u[:2])
    assert m_functional(state, bp) == pytest.approx(1, abs=1e-12)


def test_purity_minimum_only_for_uniform_spectrum():
    bp = Bipartition((0,), (1,))
    for seed in range(20):
        p = purity(reduced_density(random_state([3, 3], seed), bp))
        assert p > 1 / 3 + 1e-10


def test_max_entangled_errors():
    bp = Bipartition((0,), (1, 2))
    with pytest.raises(PhaseCountMismatch):
        max_entangled_state([2, 2, 2], bp, [0, 0, 0])
    with pytest.raises(NonOrthonormalRightStates):
        max_entangled_state([2, 2, 2], bp, [0, 0], right_states=[[1, 0, 0, 0], [1, 0, 0, 0]])
    with pytest.raises(NonOrthonormalRightStates):
        max_entangled_state([2, 2, 2], bp, [0, 0], right_states=[[1, 0, 0], [0, 1, 0]])
