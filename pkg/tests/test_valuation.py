from fractions import Fraction
import pytest
from pareto_cat.category.rescat import make_target_category
from pareto_cat.category.summing import enumerate_summing_functors, make_functor
from pareto_cat.category.valuation import (
    ComposedValuation, ObjectDistribution, Objective, TableValuation, ValuationSystem, admissible, admissible_mass,
    frontier_terminals, frontier_via_chains, fx_minorizes, lambda_value, longest_strict_chains, minorizes,
    pareto_frontier, strict_minorization_set, validate_valuation_system,
)
from pareto_cat.core.exceptions import DistributionError, ValuationError
from tests.builders import chain_category, chain_target, discrete_target, trade_off_system


def _values(result):
    return {phi.values for phi in result.members}


def test_chain3_frontier(chain3):
    frontier = pareto_frontier(chain3.system)
    assert _values(frontier) == {(0, 1), (1, 0), (1, 1)}
    assert [c.representative.values for c in frontier.classes] == [(0, 1), (1, 0), (1, 1)]


@pytest.mark.parametrize("name", ["chain3", "cycle2", "staircase"])
def test_frontier_dual_characterization(name, request):
    instance = request.getfixturevalue(name)
    system, dist = instance.system, instance.distribution
    frontier = pareto_frontier(system).as_set()
    assert frontier_via_chains(system).as_set() == frontier
    zero_lambda = {phi for phi in enumerate_summing_functors(system.category, system.system_size)
                   if admissible(system, phi) and lambda_value(system, dist, phi) == 0}
    assert zero_lambda == frontier


def test_cycle_and_staircase_frontiers(cycle2, staircase):
    assert _values(pareto_frontier(cycle2.system)) == {(0, 0)}
    assert _values(pareto_frontier(staircase.system)) == {(0, 0)}


def test_lambda_chain3(chain3):
    phi = make_functor(chain3.category, (2, 0))
    # the strict minorizations are the functors with max 1
    assert lambda_value(chain3.system, chain3.distribution, phi) == pytest.approx(0.8**2 - 0.5**2)
    assert {psi.values for psi in strict_minorization_set(chain3.system, phi)} == {(0, 1), (1, 0), (1, 1)}


def test_lambda_exact(chain3):
    dist = ObjectDistribution((Fraction(1, 2), Fraction(3, 10), Fraction(1, 5)))
    phi = make_functor(chain3.category, (2, 2))
    assert lambda_value(chain3.system, dist, phi) == Fraction(39, 100)


def test_lambda_rejects_inadmissible(chain3):
    with pytest.raises(ValuationError) as exc:
        lambda_value(chain3.system, chain3.distribution, make_functor(chain3.category, (0, 0)))
    assert exc.value.code == "valuation.not_admissible"


def test_admissible_mass(chain3):
    assert admissible_mass(chain3.system, chain3.distribution) == pytest.approx(0.75)


def test_minorization_predicates(chain3):
    top, low = make_functor(chain3.category, (2, 2)), make_functor(chain3.category, (0, 1))
    assert minorizes(chain3.system, top, low, strict=True)
    assert fx_minorizes(chain3.system, top, low)
    assert not fx_minorizes(chain3.system, low, top)
    # (0, 0) is reachable from (2, 2) but misses the goal
    assert minorizes(chain3.system, top, make_functor(chain3.category, (0, 0)))
    assert not fx_minorizes(chain3.system, top, make_functor(chain3.category, (0, 0)))


def test_trade_off_frontier_keeps_both():
    system = trade_off_system()
    assert _values(pareto_frontier(system)) == {(0,), (1,)}
    assert len(pareto_frontier(system).classes) == 2


def test_frontier_terminals(chain3):
    result = frontier_terminals(chain3.system, make_functor(chain3.category, (2, 2)))
    assert _values(result) == {(0, 1), (1, 0), (1, 1)}


def test_longest_strict_chains(chain3):
    draws = [make_functor(chain3.category, v) for v in [(2, 2), (1, 1), (2, 0), (0, 1)]]
    assert longest_strict_chains(chain3.system, draws) == [(0, 1), (0, 3), (2, 3)]


def test_longest_strict_chains_without_minorizations(chain3):
    draws = [make_functor(chain3.category, v) for v in [(1, 1), (0, 1)]]
    assert longest_strict_chains(chain3.system, draws) == [(0,), (1,)]


@pytest.mark.parametrize("weights, code", [
    ((0.5, 0.3, 0.3), "distribution.sum"),
    ((0.5, 0.5, 0.0), "distribution.positive"),
    ((), "distribution.length"),
])
def test_distribution_errors(weights, code):
    with pytest.raises(DistributionError) as exc:
        ObjectDistribution(weights)
    assert exc.value.code == code


def test_table_length_is_validated():
    system = ValuationSystem(chain_category(3), 2, (Objective(chain_target(3), 0, TableValuation((0, 1, 2))),))
    assert [v.code for v in validate_valuation_system(system)] == ["valuation.table.length"]


def test_map_range_is_validated():
    system = ValuationSystem(chain_category(3), 1, (Objective(chain_target(2), 0, ComposedValuation((0, 1, 2))),))
    violations = validate_valuation_system(system)
    assert violations[0].code == "valuation.range"
    assert violations[0].path == "valuations[0].map"


def test_goal_is_validated():
    system = ValuationSystem(chain_category(3), 1, (Objective(discrete_target(3), 5, ComposedValuation((0, 1, 2))),))
    assert "valuation.goal" in {v.code for v in validate_valuation_system(system)}


def test_cycle_members_strictly_minorize_each_other(cycle2):
    one, two = make_functor(cycle2.category, (1, 1)), make_functor(cycle2.category, (2, 2))
    bottom = make_functor(cycle2.category, (0, 0))
    assert two in strict_minorization_set(cycle2.system, one)
    assert one in strict_minorization_set(cycle2.system, two)
    assert bottom in strict_minorization_set(cycle2.system, one) & strict_minorization_set(cycle2.system, two)
    assert not strict_minorization_set(cycle2.system, bottom)


def _sink_cycle_system():
    # 0 feeds a cycle 1 <-> 2 that has no way out
    hom = [[True, True, True], [False, True, True], [False, True, True]]
    objective = Objective(target=make_target_category(3, hom), goal=1, valuation=TableValuation((0, 1, 2)))
    return ValuationSystem(chain_category(3), 1, (objective,))


def test_sink_cycle_is_in_neither_frontier():
    system = _sink_cycle_system()
    assert all(admissible(system, phi) for phi in enumerate_summing_functors(system.category, 1))
    assert not pareto_frontier(system).members
    assert not frontier_via_chains(system).members
    one, two = make_functor(system.category, (1,)), make_functor(system.category, (2,))
    assert strict_minorization_set(system, one) == {two}
    assert strict_minorization_set(system, two) == {one}
