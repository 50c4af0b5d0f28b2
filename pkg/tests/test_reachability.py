"""Canonicalization, system extraction, and the two solvers."""

from __future__ import annotations

import numpy as np
import pytest
from conftest import random_pmc, random_problem

from pmcperturb import (
    ArityMismatchError,
    DistributionParameter,
    EmptyDestinationError,
    IndexOutOfRangeError,
    LinearSystem,
    NonConvergenceError,
    Pmc,
    ReachabilityProblem,
    Role,
    build_frog,
    build_zeroconf,
    canonicalize,
    extract_system,
    instantiate,
    reference_assignment,
    solve_reachability,
    total_probability,
)

RESIDUAL_HARD = 1e-10


def residual(system, p):
    return float(np.max(np.abs(p - (system.a @ p + system.b)))) if p.size else 0.0


class TestCanonicalize:
    def test_overlap_removed(self):
        pmc = random_pmc(np.random.default_rng(0), n=4, n_params=1)
        cp = canonicalize(pmc, ReachabilityProblem(frozenset({1, 2, 3}), frozenset({3})))
        assert cp.constraint_states == (1, 2)
        assert cp.destination_states == (3,)

    def test_frog_identity(self, frog):
        _, _, cp = frog
        assert cp.order == (1, 2, 3, 4)
        assert cp.n_constraint == 2
        assert cp.destination_start == 4

    def test_block_layout(self):
        pmc = random_pmc(np.random.default_rng(1), n=4, n_params=1)
        cp = canonicalize(pmc, ReachabilityProblem(frozenset({2, 4}), frozenset({1})))
        assert cp.permutation == (4, 1, 3, 2)
        assert cp.n_constraint == 2
        assert cp.destination_start == 4

    def test_empty_destination(self):
        pmc, _ = build_frog()
        with pytest.raises(EmptyDestinationError):
            canonicalize(pmc, ReachabilityProblem(frozenset({1}), frozenset()))

    def test_out_of_range(self):
        pmc, _ = build_frog()
        with pytest.raises(IndexOutOfRangeError):
            canonicalize(pmc, ReachabilityProblem(frozenset({1}), frozenset({9})))


class TestExtract:
    def test_frog_system(self, frog):
        pmc, _, cp = frog
        system = extract_system(pmc, cp)
        np.testing.assert_allclose(system.a, [[0.375, 0.125], [0.375, 0.125]])
        np.testing.assert_allclose(system.b, [0.25, 0.25])
        roles = [v.role for v in system.placements["hop"].variables]
        assert roles == [Role.CONSTRAINT_COLUMN, Role.CONSTRAINT_COLUMN,
                         Role.DROPPED, Role.DESTINATION_SUM]
        assert system.placements["hop"].variables[0].column == 1
        assert system.placements["hop"].variables[1].column == 2

    def test_zeroconf_system(self, zeroconf):
        pmc, _, cp = zeroconf
        system = extract_system(pmc, cp)
        expected = np.array([
            [0.0, 0.2, 0.0, 0.0, 0.0],
            [0.75, 0.0, 0.25, 0.0, 0.0],
            [0.75, 0.0, 0.0, 0.25, 0.0],
            [0.75, 0.0, 0.0, 0.0, 0.25],
            [0.75, 0.0, 0.0, 0.0, 0.0],
        ])
        np.testing.assert_allclose(system.a, expected)
        np.testing.assert_allclose(system.b, [0.8, 0, 0, 0, 0])
        last = system.placements["probe4"].variables
        assert last[0].role is Role.CONSTRAINT_COLUMN and last[0].column == 1
        assert last[1].role is Role.DROPPED

    def test_parameter_outside_constraint(self):
        pmc = Pmc(n=3, initial=(0.5, 0.5, 0.0),
                  concrete_rows={1: (0.2, 0.4, 0.4), 2: (0.3, 0.3, 0.4)},
                  parameters=(DistributionParameter("q", 3, (1, 2), (0.5, 0.5)),))
        cp = canonicalize(pmc, ReachabilityProblem(frozenset({1}), frozenset({2})))
        placement = extract_system(pmc, cp).placements["q"]
        assert placement.row is None
        assert placement.variables == ()


class TestSolve:
    def test_frog_direct_and_series(self, frog):
        pmc, _, cp = frog
        system = extract_system(pmc, cp)
        np.testing.assert_allclose(solve_reachability(system), [0.5, 0.5], atol=1e-12)
        np.testing.assert_allclose(solve_reachability(system, method="series"),
                                   [0.5, 0.5], atol=1e-12)

    def test_zero_matrix(self):
        b = np.array([0.3, 0.0, 0.7])
        system = LinearSystem(a=np.zeros((3, 3)), b=b, placements={})
        np.testing.assert_allclose(solve_reachability(system, method="series"), b)
        np.testing.assert_allclose(solve_reachability(system), b)

    def test_zeroconf_value(self, zeroconf):
        pmc, _, cp = zeroconf
        p = solve_reachability(extract_system(pmc, cp))
        assert p[0] == pytest.approx(0.999024390243902, abs=1e-12)

    def test_unreachable_states_exact_zero(self):
        # state 2 loops inside the constraint block and never reaches b > 0,
        # which also makes I - A singular before restriction
        a = np.array([[0.5, 0.2, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.4]])
        b = np.array([0.3, 0.0, 0.6])
        system = LinearSystem(a=a, b=b, placements={})
        p = solve_reachability(system)
        assert p[1] == 0.0
        assert residual(system, p) <= RESIDUAL_HARD
        series = solve_reachability(system, method="series", truncation=10_000)
        assert series[1] == 0.0
        np.testing.assert_allclose(p, series, atol=1e-9)

    def test_series_non_convergence(self):
        a = np.array([[0.99]])
        b = np.array([0.01])
        system = LinearSystem(a=a, b=b, placements={})
        with pytest.raises(NonConvergenceError) as excinfo:
            solve_reachability(system, method="series", truncation=5)
        assert excinfo.value.residual > 1e-10

    def test_series_iterates_monotone(self, zeroconf):
        pmc, _, cp = zeroconf
        system = extract_system(pmc, cp)
        direct = solve_reachability(system)
        term = system.b.copy()
        partial = system.b.copy()
        previous = np.zeros_like(partial)
        for _ in range(60):
            assert np.all(partial >= previous - 1e-15)
            assert np.all(partial <= direct + 1e-12)
            previous = partial.copy()
            term = system.a @ term
            partial = partial + term
        np.testing.assert_allclose(
            solve_reachability(system, method="series", truncation=60),
            partial, atol=1e-15)

    def test_direct_vs_series_random(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            pmc = random_pmc(rng, n=10, n_params=int(rng.integers(1, 3)))
            problem = random_problem(rng, 10)
            cp = canonicalize(pmc, problem)
            system = extract_system(pmc, cp)
            direct = solve_reachability(system)
            series = solve_reachability(system, method="series", truncation=10_000)
            np.testing.assert_allclose(direct, series, atol=1e-9)
            assert residual(system, direct) <= RESIDUAL_HARD
            assert residual(system, series) <= RESIDUAL_HARD
            assert np.all(direct >= 0.0) and np.all(direct <= 1.0)


class TestTotalProbability:
    def test_frog(self, frog):
        pmc, _, cp = frog
        p = solve_reachability(extract_system(pmc, cp))
        assert total_probability(pmc.initial, p, cp) == pytest.approx(0.5, abs=1e-12)

    def test_zeroconf(self, zeroconf):
        pmc, _, cp = zeroconf
        p = solve_reachability(extract_system(pmc, cp))
        assert total_probability(pmc.initial, p, cp) == pytest.approx(0.999024390243902,
                                                                      abs=1e-12)

    def test_initial_on_destination(self, frog):
        pmc, problem, cp = frog
        p = solve_reachability(extract_system(pmc, cp))
        assert total_probability((0, 0, 0, 1.0), p, cp) == 1.0

    def test_arity_errors(self, frog):
        pmc, _, cp = frog
        with pytest.raises(ArityMismatchError):
            total_probability((0.5, 0.5), np.array([0.5, 0.5]), cp)
        with pytest.raises(ArityMismatchError):
            total_probability(pmc.initial, np.array([0.5]), cp)
