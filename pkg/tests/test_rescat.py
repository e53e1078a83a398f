from fractions import Fraction
from itertools import product
import pytest
from pareto_cat.category.rescat import (
    close_hom, conversion_rate, convertible, fold_tensor, make_resource_category, make_target_category,
    tensor_power, validate_category,
)
from pareto_cat.core.exceptions import CategoryStructureError, ObjectRangeError
from tests.builders import chain_category, chain_hom, max_tensor, z4_category


def test_terminal_category_passes():
    cat = make_resource_category(1, [[True]], [[0]])
    assert validate_category(cat).passed


def test_transitivity_gap_reports_witness():
    hom = [[True, True, False], [False, True, True], [False, False, True]]
    report = validate_category(make_target_category(3, hom))
    assert not report.passed
    gaps = [v for v in report.violations if v.code == "rescat.hom.transitivity"]
    assert [v.witness for v in gaps] == [(0, 1, 2)]


def test_chain_category_passes_and_matches_exhaustive_check():
    cat = chain_category(3)
    assert validate_category(cat).passed
    # independent triple scan
    for a, b, c in product(range(3), repeat=3):
        if cat.hom[a][b] and cat.hom[b][c]:
            assert cat.hom[a][c]


def test_convertible_follows_the_chain():
    cat = chain_category(3)
    assert convertible(cat, 2, 0)
    assert not convertible(cat, 0, 2)
    for a in range(3):
        assert convertible(cat, a, a)


def test_convertible_range_check():
    with pytest.raises(ObjectRangeError):
        convertible(chain_category(3), 3, 0)


def test_dimension_mismatch_is_structural():
    with pytest.raises(CategoryStructureError):
        validate_category(make_target_category(3, [[True, False], [False, True]]))


def test_iso_classes_must_partition():
    cat = make_target_category(2, [[True, True], [True, True]], iso_classes=[[0], [0, 1]])
    with pytest.raises(CategoryStructureError):
        validate_category(cat)


def test_iso_without_arrows_is_reported():
    cat = make_target_category(2, [[True, False], [False, True]], iso_classes=[[0, 1]])
    assert "rescat.iso.hom" in validate_category(cat).codes()


def test_wrong_unit_is_reported():
    cat = make_resource_category(3, chain_hom(3), max_tensor(3), unit=1)
    assert "rescat.tensor.unit" in validate_category(cat).codes()


def test_functoriality_violation():
    # addition mod 3 wraps around: hom(1, 2) tensored with itself would need hom(2, 1)
    hom = [[a <= b for b in range(3)] for a in range(3)]
    tensor = [[(a + b) % 3 for b in range(3)] for a in range(3)]
    report = validate_category(make_resource_category(3, hom, tensor))
    assert "rescat.tensor.functoriality" in report.codes()


def test_z4_passes_validation():
    assert validate_category(z4_category()).passed


def test_tensor_power_and_fold():
    cat = z4_category()
    assert tensor_power(cat, 1, 4) == 0
    assert tensor_power(cat, 3, 1) == 3
    assert fold_tensor(cat, []) == cat.unit
    assert fold_tensor(cat, [1, 2, 3]) == 2


def test_tensor_power_needs_positive_exponent():
    with pytest.raises(ValueError):
        tensor_power(z4_category(), 1, 0)


def test_conversion_rate_z4():
    assert conversion_rate(z4_category(), 1, 2, n_max=8) == Fraction(4)


def test_conversion_rate_idempotent_tensor():
    cat = chain_category(3)
    assert conversion_rate(cat, 2, 1, n_max=4) == 4
    assert conversion_rate(cat, 0, 2, n_max=4) is None


def test_close_hom_repairs_transitivity_gap(mocker):
    mocker.patch("pareto_cat.category.rescat.logger")
    hom = [[True, True, False], [False, True, True], [False, False, True]]
    closed = close_hom(make_target_category(3, hom))
    assert closed.hom[0][2]
    assert validate_category(closed).passed


def test_close_hom_adds_iso_arrows():
    cat = make_target_category(2, [[True, False], [False, True]], iso_classes=[[0, 1]])
    closed = close_hom(cat)
    assert closed.hom[0][1] and closed.hom[1][0]


def _rate_by_double_loop(cat, a, b, n_max):
    rates = [Fraction(m, n) for n, m in product(range(1, n_max + 1), repeat=2)
             if cat.convertible(tensor_power(cat, a, n), tensor_power(cat, b, m))]
    return max(rates, default=None)


@pytest.mark.parametrize("cat", [z4_category(), chain_category(3)], ids=["z4", "chain3"])
@pytest.mark.parametrize("n_max", [1, 3, 6])
def test_conversion_rate_matches_the_double_loop(cat, n_max):
    for a, b in product(range(cat.objects), repeat=2):
        assert conversion_rate(cat, a, b, n_max=n_max) == _rate_by_double_loop(cat, a, b, n_max)


@pytest.mark.parametrize("cat", [z4_category(), chain_category(3)], ids=["z4", "chain3"])
def test_conversion_rate_grows_with_n_max(cat):
    for a, b in product(range(cat.objects), repeat=2):
        rates = [conversion_rate(cat, a, b, n_max=n) for n in range(1, 9)]
        found = [r for r in rates if r is not None]
        assert rates[len(rates) - len(found):] == found
        assert found == sorted(found)
