import pytest
from hypothesis import given, strategies as st
from pareto_cat.category.rescat import fold_tensor
from pareto_cat.category.summing import (
    check_capacity, count_summing_functors, enumerate_summing_functors, evaluate, functor_at_rank, functor_rank,
    functors_isomorphic, iso_key, make_functor,
)
from pareto_cat.core.exceptions import CapacityError, FunctorError
from tests.builders import chain_category, z4_category


def test_enumeration_is_lexicographic():
    values = [phi.values for phi in enumerate_summing_functors(chain_category(3), 2)]
    assert len(values) == count_summing_functors(chain_category(3), 2) == 9
    assert values == sorted(values)
    assert values[0] == (0, 0) and values[-1] == (2, 2)


def test_enumeration_rank_range():
    cat = chain_category(3)
    part = [phi.values for phi in enumerate_summing_functors(cat, 2, start=3, stop=5)]
    assert part == [(1, 0), (1, 1)]


def test_capacity_error():
    with pytest.raises(CapacityError):
        list(enumerate_summing_functors(chain_category(3), 3, cap=26))
    assert check_capacity(chain_category(3), 3, cap=27) == 27


def test_evaluate_z4():
    phi = make_functor(z4_category(), (1, 3))
    assert evaluate(phi, {0, 1}) == 0
    assert evaluate(phi, {1}) == 3
    assert evaluate(phi, set()) == 0
    assert phi.whole() == 0


def test_evaluate_rejects_foreign_elements():
    phi = make_functor(z4_category(), (1, 3))
    with pytest.raises(FunctorError):
        evaluate(phi, {2})


def test_make_functor_range():
    with pytest.raises(FunctorError):
        make_functor(chain_category(3), (0, 3))


def test_rank_round_trip():
    cat = z4_category()
    for rank in range(4**3):
        assert functor_rank(functor_at_rank(cat, 3, rank)) == rank


def test_rank_out_of_range():
    with pytest.raises(FunctorError):
        functor_at_rank(chain_category(3), 2, 9)


def test_isomorphic_functors_z4():
    cat = z4_category()
    assert functors_isomorphic(make_functor(cat, (0, 1)), make_functor(cat, (2, 3)))
    assert not functors_isomorphic(make_functor(cat, (0, 1)), make_functor(cat, (1, 0)))
    assert iso_key(make_functor(cat, (3, 2))) == (1, 0)


def test_isomorphism_needs_equal_sizes():
    cat = z4_category()
    with pytest.raises(FunctorError):
        functors_isomorphic(make_functor(cat, (0,)), make_functor(cat, (0, 1)))


@given(values=st.lists(st.integers(0, 3), min_size=1, max_size=6), data=st.data())
def test_disjoint_unions_go_to_tensors(values, data):
    cat = z4_category()
    phi = make_functor(cat, values)
    indices = list(range(len(values)))
    left = set(data.draw(st.sets(st.sampled_from(indices))))
    right = set(indices) - left
    assert evaluate(phi, left | right) == cat.tensor[evaluate(phi, left)][evaluate(phi, right)]
    assert evaluate(phi, indices) == fold_tensor(cat, values)


@pytest.mark.parametrize("cat", [z4_category(), chain_category(4)], ids=["z4", "chain4"])
@given(data=st.data())
def test_fold_order_does_not_matter_up_to_iso(cat, data):
    ids = data.draw(st.lists(st.integers(0, cat.objects - 1), max_size=6))
    shuffled = data.draw(st.permutations(ids))
    assert cat.isomorphic(fold_tensor(cat, ids), fold_tensor(cat, shuffled))


@given(triple=st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=3, max_size=3))
def test_functor_isomorphism_is_an_equivalence(triple):
    cat = z4_category()
    phi, psi, chi = (make_functor(cat, values) for values in triple)
    assert functors_isomorphic(phi, phi)
    assert functors_isomorphic(phi, psi) == functors_isomorphic(psi, phi)
    if functors_isomorphic(phi, psi) and functors_isomorphic(psi, chi):
        assert functors_isomorphic(phi, chi)
