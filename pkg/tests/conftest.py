"""Shared test helpers: random model generators and the finite-difference oracle.

The oracle probes the exact perturbation value along zero-sum pair
directions (entries +1/2 and -1/2) with central differences. Such probes
stay on the simplex, so they identify the coefficient vector of one
parameter up to an additive constant; the gauge is fixed by a support
position that is structurally absent from the extracted system (its
coefficient is zero by construction) whenever one exists, and pairwise
differences are checked otherwise. Condition numbers only depend on those
differences, so the check is complete for everything the bounds use.
"""

from __future__ import annotations

import numpy as np
import pytest

from pmcperturb import (
    Assignment,
    DistributionParameter,
    Pmc,
    ReachabilityProblem,
    Role,
    canonicalize,
    extract_system,
    perturbation_function_exact,
    reference_assignment,
)

FD_STEP = 1e-6
FD_TOL = 1e-6


def random_distribution(rng: np.random.Generator, k: int, min_entry: float = 0.02) -> np.ndarray:
    """Random simplex vector with every entry at least ``min_entry``."""
    assert k * min_entry < 1.0
    return rng.dirichlet(np.ones(k)) * (1.0 - k * min_entry) + min_entry


def random_pmc(rng: np.random.Generator, n: int, n_params: int,
               min_entry: float = 0.02) -> Pmc:
    """Random PMC with full-support parameters on distinct rows."""
    param_rows = sorted(int(r) + 1 for r in rng.choice(n, size=n_params, replace=False))
    parameters = tuple(
        DistributionParameter(id=f"p{i + 1}", row=row, support=tuple(range(1, n + 1)),
                              reference=random_distribution(rng, n, min_entry))
        for i, row in enumerate(param_rows)
    )
    concrete = {state: random_distribution(rng, n, min_entry)
                for state in range(1, n + 1) if state not in param_rows}
    return Pmc(n=n, initial=random_distribution(rng, n, min_entry),
               concrete_rows=concrete, parameters=parameters)


def random_problem(rng: np.random.Generator, n: int) -> ReachabilityProblem:
    """Random disjoint constraint/destination sets."""
    states = rng.permutation(n) + 1
    n_dest = int(rng.integers(1, 3))
    n_cons = int(rng.integers(1, n - n_dest + 1))
    return ReachabilityProblem(
        constraint=frozenset(int(s) for s in states[n_dest:n_dest + n_cons]),
        destination=frozenset(int(s) for s in states[:n_dest]),
    )


def random_case(rng: np.random.Generator, n: int, n_params: int,
                require_param_in_constraint: bool = True,
                min_constraint: int = 1):
    """A (pmc, problem, canonical) triple, redrawn until structurally useful."""
    while True:
        pmc = random_pmc(rng, n, n_params)
        problem = random_problem(rng, n)
        cp = canonicalize(pmc, problem)
        if cp.n_constraint < min_constraint:
            continue
        if require_param_in_constraint:
            rows = {p.row for p in pmc.parameters}
            if not rows & set(cp.constraint_states):
                continue
        return pmc, problem, cp


def zero_sum_direction(rng: np.random.Generator, k: int, budget: float) -> np.ndarray:
    """Random zero-sum vector with absolute norm ``budget``."""
    while True:
        d = rng.normal(size=k)
        d -= d.mean()
        norm = np.abs(d).sum()
        if norm > 1e-9:
            return d * (budget / norm)


def fd_pair_derivative(pmc: Pmc, cp, pid: str, j: int, k: int,
                       step: float = FD_STEP) -> float:
    """Central difference of the exact value along the (j, k) pair direction.

    Estimates ``(h[j] - h[k]) / 2`` for parameter ``pid`` (0-based entry
    indices here).
    """
    param = pmc.parameter(pid)
    direction = np.zeros(param.arity)
    direction[j] = 0.5
    direction[k] = -0.5
    base = dict(reference_assignment(pmc).vectors)
    plus = dict(base)
    plus[pid] = param.reference + step * direction
    minus = dict(base)
    minus[pid] = param.reference - step * direction
    value_plus = perturbation_function_exact(pmc, cp, Assignment(plus))
    value_minus = perturbation_function_exact(pmc, cp, Assignment(minus))
    return (value_plus - value_minus) / (2.0 * step)


def fd_reconstruct(pmc: Pmc, cp, pid: str, step: float = FD_STEP) -> np.ndarray | None:
    """Full finite-difference coefficient vector, when a zero anchor exists.

    Returns ``None`` if no support position of ``pid`` is structurally
    absent from the system (no gauge anchor); use pairwise checks then.
    """
    param = pmc.parameter(pid)
    placement = extract_system(pmc, cp).placements[pid]
    if placement.row is None:
        anchors = range(param.arity)  # whole row absent: every position anchors
    else:
        anchors = [j for j, var in enumerate(placement.variables)
                   if var.role is Role.DROPPED]
    if not anchors:
        return None
    anchor = anchors[0]
    h = np.zeros(param.arity)
    for j in range(param.arity):
        if j != anchor:
            h[j] = 2.0 * fd_pair_derivative(pmc, cp, pid, j, anchor, step)
    return h


def assert_gradient_matches_fd(pmc: Pmc, cp, gradients, step: float = FD_STEP,
                               tol: float = FD_TOL) -> None:
    """Check every ``h_i`` against the finite-difference oracle."""
    for pid, h in gradients.h.items():
        arity = h.size
        reconstructed = fd_reconstruct(pmc, cp, pid, step)
        if reconstructed is not None:
            np.testing.assert_allclose(h, reconstructed, atol=tol, rtol=0)
        for j in range(arity):
            for k in range(j + 1, arity):
                fd = fd_pair_derivative(pmc, cp, pid, j, k, step)
                assert abs((h[j] - h[k]) / 2.0 - fd) <= tol, (
                    f"parameter {pid!r} pair ({j}, {k}): "
                    f"closed form {(h[j] - h[k]) / 2.0!r} vs oracle {fd!r}")


@pytest.fixture
def frog():
    from pmcperturb import build_frog

    pmc, problem = build_frog()
    return pmc, problem, canonicalize(pmc, problem)


@pytest.fixture
def zeroconf():
    from pmcperturb import build_zeroconf

    pmc, problem = build_zeroconf()
    return pmc, problem, canonicalize(pmc, problem)
