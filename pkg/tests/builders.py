"""Small hand-built categories and instances shared by the test modules."""
import json
from pareto_cat.category.rescat import make_resource_category, make_target_category
from pareto_cat.category.valuation import (
    ComposedValuation, ObjectDistribution, Objective, TableValuation, ValuationSystem,
)
from pareto_cat.scale.interleaving import ScaleData
from pareto_cat.services.instance_loader import Instance, fixture_path


def chain_hom(k):
    """hom(a, b) iff a >= b: every object converts down to the ones below it."""
    return [[a >= b for b in range(k)] for a in range(k)]


def max_tensor(k):
    return [[max(a, b) for b in range(k)] for a in range(k)]


def chain_category(k):
    return make_resource_category(k, chain_hom(k), max_tensor(k))


def chain_target(k):
    return make_target_category(k, chain_hom(k))


def z4_category():
    """Z/4 under addition; arrows between equal parities, which are also the iso classes."""
    hom = [[a % 2 == b % 2 for b in range(4)] for a in range(4)]
    tensor = [[(a + b) % 4 for b in range(4)] for a in range(4)]
    return make_resource_category(4, hom, tensor, unit=0, iso_classes=[[0, 2], [1, 3]])


def discrete_target(k):
    return make_target_category(k, [[a == b for b in range(k)] for a in range(k)])


def trade_off_system():
    """Two functors on one element, each better in one objective only."""
    cat = make_resource_category(2, [[True, False], [False, True]], [[0, 1], [1, 0]])
    objectives = (
        Objective(target=chain_target(2), goal=0, valuation=TableValuation((1, 0)), name="cost"),
        Objective(target=chain_target(2), goal=0, valuation=TableValuation((0, 1)), name="risk"),
    )
    return ValuationSystem(category=cat, system_size=1, objectives=objectives)


def single_object_instance(n=2):
    cat = make_resource_category(1, [[True]], [[0]])
    objective = Objective(target=chain_target(1), goal=0, valuation=ComposedValuation((0,)))
    system = ValuationSystem(category=cat, system_size=n, objectives=(objective,))
    scale = ScaleData(grid_len=2, scaled=(((0, 0),),))
    return Instance(category=cat, system=system, distribution=ObjectDistribution((1.0,)), scale=scale,
                    name="single")


def fixture_dict(name):
    return json.loads(fixture_path(name).read_text(encoding="utf-8"))


def write_instance(tmp_path, data, name="instance.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path
