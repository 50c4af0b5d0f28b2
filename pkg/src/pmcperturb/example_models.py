"""Built-in case-study models.

Two small PMCs used throughout the docs and the reference tables: a frog
hopping between four rocks whose jumps from the first rock form the single
distribution parameter, and an address-probing protocol over a noisy
channel whose four probe rows are parameterized by per-probe loss
distributions.
"""

from __future__ import annotations

from .errors import DomainError
from .model import DistributionParameter, Pmc
from .reachability import ReachabilityProblem


def build_frog() -> tuple[Pmc, ReachabilityProblem]:
    """Four-rock hopping-frog model.

    The frog starts on a uniformly random rock. Jumps from the first rock
    are the distribution parameter ``hop`` with reference
    ``(0.375, 0.125, 0.25, 0.25)``; the question asked of the model is the
    probability of reaching rock 4 without landing on rock 3, i.e.
    constraint ``{1, 2}`` and destination ``{4}``.
    """
    pmc = Pmc(
        n=4,
        initial=(0.25, 0.25, 0.25, 0.25),
        concrete_rows={
            2: (0.375, 0.125, 0.25, 0.25),
            3: (0.0, 0.5, 0.5, 0.0),
            4: (1 / 3, 0.0, 1 / 3, 1 / 3),
        },
        parameters=(
            DistributionParameter(
                id="hop", row=1, support=(1, 2, 3, 4),
                reference=(0.375, 0.125, 0.25, 0.25),
            ),
        ),
    )
    problem = ReachabilityProblem(constraint=frozenset({1, 2}),
                                  destination=frozenset({4}))
    return pmc, problem


def build_zeroconf(a: float = 0.2, loss_ref: float = 0.25) -> tuple[Pmc, ReachabilityProblem]:
    """Seven-state address-probing protocol with four probes.

    From state 1 a fresh address is already taken with probability ``a``
    (enter probing at state 2) and free with probability ``1 - a`` (straight
    to the success state 7). Each probe row ``i + 1`` is a distribution
    parameter ``probe{i}`` over (back to state 1, forward to the next probe)
    with reference ``(1 - loss_ref, loss_ref)``: a delivered reply returns
    to state 1, a lost probe moves on. Four lost probes end in state 6, the
    failure state. The question is the probability of avoiding failure:
    constraint ``{1..5}``, destination ``{7}``.

    Raises:
        DomainError: ``a`` or ``loss_ref`` outside the open interval (0, 1).
    """
    if not 0.0 < a < 1.0:
        raise DomainError(f"a must lie in (0, 1), got {a!r}")
    if not 0.0 < loss_ref < 1.0:
        raise DomainError(f"loss_ref must lie in (0, 1), got {loss_ref!r}")

    parameters = tuple(
        DistributionParameter(
            id=f"probe{i}", row=i + 1, support=(1, i + 2),
            reference=(1.0 - loss_ref, loss_ref),
        )
        for i in range(1, 5)
    )
    pmc = Pmc(
        n=7,
        initial=(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        concrete_rows={
            1: (0.0, a, 0.0, 0.0, 0.0, 0.0, 1.0 - a),
            6: (0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0),
            7: (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0),
        },
        parameters=parameters,
    )
    problem = ReachabilityProblem(constraint=frozenset(range(1, 6)),
                                  destination=frozenset({7}))
    return pmc, problem
