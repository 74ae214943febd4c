import pytest

from eptl.values import ValueSet, format_value, value_eq, value_from_json, value_to_json


def test_sets_are_canonical():
    assert ValueSet.of([2, 1, 2]) == ValueSet.of({1, 2})
    assert ValueSet.of([2, 1]).items == (1, 2)
    assert hash(ValueSet.of([1, 2])) == hash(ValueSet.of([2, 1]))


def test_bool_and_int_are_distinct():
    assert not value_eq(True, 1)
    assert len(ValueSet.of([True, 1, 0, False])) == 4
    assert 1 in ValueSet.of([1])
    assert True not in ValueSet.of([1])


def test_nested_sets():
    inner = ValueSet.of([1])
    outer = ValueSet.of([inner, ValueSet.of([1]), "x"])
    assert len(outer) == 2
    assert format_value(outer) == '{"x", {1}}'


def test_json_round_trip():
    v = ValueSet.of([1, "a", True])
    assert value_from_json(value_to_json(v)) == v
    assert value_to_json(v) == {"set": [True, 1, "a"]}


def test_rejects_foreign_values():
    with pytest.raises(TypeError):
        ValueSet.of([1.5])
    with pytest.raises(ValueError):
        value_from_json({"list": []})
