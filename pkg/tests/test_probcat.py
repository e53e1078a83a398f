from fractions import Fraction
import pytest
from hypothesis import given, strategies as st
from pareto_cat.category.probcat import (
    FamilyEntry, MorphismTag, ProbFunctor, ProbMorphism, ProbObject, apply_prob_functor, canonicalize,
    lift_functor, localized_isomorphic, permutation_isomorphic, point_mass, prob_isomorphic, validate_morphism,
)
from pareto_cat.category.rescat import make_target_category
from pareto_cat.core.exceptions import ProbabilisticError
from tests.builders import chain_target

# eight objects in four iso classes {0,1} {2,3} {4,5} {6,7}
PAIRS = make_target_category(8, [[a // 2 == b // 2 for b in range(8)] for a in range(8)],
                             iso_classes=[[0, 1], [2, 3], [4, 5], [6, 7]])


@pytest.mark.parametrize("components, code", [
    ((), "probcat.object.empty"),
    (((0.5, 0), (0.0, 1), (0.5, 2)), "probcat.object.weight"),
    (((0.5, 0), (0.4, 1)), "probcat.object.sum"),
])
def test_prob_object_invariants(components, code):
    with pytest.raises(ProbabilisticError) as exc:
        ProbObject(components)
    assert exc.value.code == code


def test_point_mass():
    assert point_mass(3).components == ((1, 3),)


def _merge_morphism():
    """(1/2) 2 + (1/2) 1 -> 1 in the chain target."""
    source = ProbObject(((Fraction(1, 2), 2), (Fraction(1, 2), 1)))
    target = point_mass(1)
    families = (FamilyEntry(0, 0, MorphismTag(2, 1), Fraction(1)), FamilyEntry(0, 1, MorphismTag(1, 1), Fraction(1)))
    return ProbMorphism(source, target, ((Fraction(1), Fraction(1)),), families)


def test_valid_morphism_passes():
    validate_morphism(_merge_morphism(), chain_target(3).convertible)


def test_morphism_with_empty_hom_fails():
    morphism = _merge_morphism()
    lifted = ProbMorphism(morphism.source, point_mass(2), morphism.matrix,
                          (FamilyEntry(0, 0, MorphismTag(2, 2), 1), FamilyEntry(0, 1, MorphismTag(1, 2), 1)))
    with pytest.raises(ProbabilisticError) as exc:
        validate_morphism(lifted, chain_target(3).convertible)
    assert exc.value.code == "probcat.tag.hom"


def test_morphism_column_sums():
    morphism = _merge_morphism()
    broken = ProbMorphism(morphism.source, morphism.target, ((Fraction(1), Fraction(1, 2)),), morphism.families)
    with pytest.raises(ProbabilisticError) as exc:
        validate_morphism(broken, chain_target(3).convertible)
    assert exc.value.code == "probcat.morphism.stochastic"


def test_morphism_missing_family():
    morphism = _merge_morphism()
    broken = ProbMorphism(morphism.source, morphism.target, morphism.matrix, morphism.families[:1])
    with pytest.raises(ProbabilisticError) as exc:
        validate_morphism(broken, chain_target(3).convertible)
    assert exc.value.code == "probcat.family.missing"


def test_canonicalize_merges_isomorphic_components():
    p = ProbObject(((0.25, 0), (0.5, 2), (0.25, 1)))
    assert canonicalize(p, PAIRS.iso_class).components == ((0.5, 0), (0.5, 2))


def test_literal_and_localized_isomorphism_differ_on_mergeable_components():
    p = ProbObject(((0.5, 0), (0.5, 1)))
    q = point_mass(1)
    assert not prob_isomorphic(p, q, PAIRS.iso_class)
    assert localized_isomorphic(p, q, PAIRS.iso_class)


@st.composite
def distinct_class_objects(draw):
    """Objects whose components sit in pairwise distinct iso classes, weights exact."""
    classes = draw(st.lists(st.integers(0, 3), min_size=1, max_size=4, unique=True))
    members = [2 * c + draw(st.integers(0, 1)) for c in classes]
    raw = draw(st.lists(st.integers(1, 4), min_size=len(members), max_size=len(members)))
    total = sum(raw)
    return ProbObject(tuple((Fraction(w, total), obj) for w, obj in zip(raw, members)))


@st.composite
def object_pairs(draw):
    p = draw(distinct_class_objects())
    if draw(st.booleans()):
        return p, draw(distinct_class_objects())
    # a relabelled copy: shuffled order, members swapped within their class
    order = draw(st.permutations(range(len(p.components))))
    flips = draw(st.lists(st.booleans(), min_size=len(order), max_size=len(order)))
    q = ProbObject(tuple((p.components[i][0], p.components[i][1] ^ int(f)) for i, f in zip(order, flips)))
    return p, q


@given(pair=object_pairs())
def test_isomorphism_three_way_agreement(pair):
    p, q = pair
    literal = prob_isomorphic(p, q, PAIRS.iso_class)
    assert literal == permutation_isomorphic(p, q, PAIRS.iso_class)
    assert literal == localized_isomorphic(p, q, PAIRS.iso_class)


def test_lift_functor_on_objects_and_morphisms():
    h = [0, 0, 1]
    morphism = _merge_morphism()
    lifted = lift_functor(h, morphism)
    assert lifted.source.objects == (1, 0)
    assert lifted.matrix == morphism.matrix
    assert lifted.families[0].tag == MorphismTag(1, 0)
    validate_morphism(lifted, chain_target(3).convertible)


def test_lift_functor_undefined():
    with pytest.raises(ProbabilisticError) as exc:
        lift_functor({0: 0}, point_mass(2))
    assert exc.value.code == "probcat.lift.undefined"


def test_apply_prob_functor_multiplies_weights():
    functor = ProbFunctor(((Fraction(1, 4), [0, 1, 2]), (Fraction(3, 4), [2, 2, 2])))
    p = ProbObject(((Fraction(1, 2), 0), (Fraction(1, 2), 1)))
    result = apply_prob_functor(functor, p)
    assert result.components == ((Fraction(1, 8), 0), (Fraction(1, 8), 1), (Fraction(3, 8), 2), (Fraction(3, 8), 2))


def test_prob_functor_weights_must_sum_to_one():
    with pytest.raises(ProbabilisticError):
        ProbFunctor(((0.5, [0]),))


@st.composite
def any_objects(draw):
    """Objects over PAIRS whose components may share an iso class or repeat."""
    members = draw(st.lists(st.integers(0, 7), min_size=1, max_size=6))
    raw = draw(st.lists(st.integers(1, 4), min_size=len(members), max_size=len(members)))
    total = sum(raw)
    return ProbObject(tuple((Fraction(w, total), obj) for w, obj in zip(raw, members)))


@given(p=any_objects())
def test_canonicalize_is_idempotent(p):
    once = canonicalize(p, PAIRS.iso_class)
    assert canonicalize(once, PAIRS.iso_class) == once


@given(p=any_objects(), classes=st.lists(st.integers(0, 3), min_size=4, max_size=4))
def test_lift_functor_commutes_with_canonicalize(p, classes):
    # h sends class c to class classes[c], so it respects isomorphism
    h = [2 * classes[obj // 2] for obj in range(8)]
    merged_first = canonicalize(lift_functor(h, canonicalize(p, PAIRS.iso_class)), PAIRS.iso_class)
    lifted_first = canonicalize(lift_functor(h, p), PAIRS.iso_class)
    assert prob_isomorphic(merged_first, lifted_first, PAIRS.iso_class)
