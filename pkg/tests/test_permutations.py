import pytest
from hypothesis import given
from hypothesis import strategies as st

from commgraph.exceptions import CycleParseError, PermutationError
from commgraph.permutations import (
    Permutation,
    compose,
    element_order,
    from_cycles,
    identity,
    inverse,
    is_even,
    parse_cycles,
)

permutations = st.integers(min_value=1, max_value=8).flatmap(
    lambda n: st.permutations(list(range(1, n + 1)))
).map(Permutation.from_images)


def test_parse_cycles():
    perm = parse_cycles("(1 2 3)(4 5)", 6)
    assert perm.images == (2, 3, 1, 5, 4, 6)
    assert perm(6) == 6
    assert perm.cycle_string() == "(1 2 3)(4 5)"


def test_parse_commas_and_identity():
    assert parse_cycles("(1,3)", 3) == parse_cycles("(1 3)", 3)
    assert parse_cycles("()", 4) == identity(4)
    assert identity(4).cycle_string() == "()"


def test_cycles_are_canonical():
    assert parse_cycles("(3 1 2)", 3).cycle_string() == "(1 2 3)"
    assert parse_cycles("(4 5)(1 2)", 5).cycles() == [(1, 2), (4, 5)]


@pytest.mark.parametrize(
    "text", ["(1 2", "1 2)", "(1)", "(1 a)", "(1 2)(2 3)", "(1 9)", ""]
)
def test_parse_errors(text):
    with pytest.raises(CycleParseError):
        parse_cycles(text, 5)


def test_compose_applies_right_factor_first():
    a = parse_cycles("(1 2)", 3)
    b = parse_cycles("(2 3)", 3)
    assert compose(a, b) == parse_cycles("(1 2 3)", 3)
    assert a * b == compose(a, b)
    assert compose(b, a) == parse_cycles("(1 3 2)", 3)


def test_compose_degree_mismatch():
    with pytest.raises(PermutationError):
        compose(identity(3), identity(4))


def test_invalid_images():
    with pytest.raises(PermutationError):
        Permutation.from_images([1, 1, 2])


def test_parity_and_order():
    assert is_even(parse_cycles("(1 2 3)", 4))
    assert not is_even(parse_cycles("(1 2)", 4))
    assert is_even(parse_cycles("(1 2)(3 4)", 4))
    assert element_order(parse_cycles("(1 2 3)(4 5)", 5)) == 6
    assert element_order(identity(3)) == 1


def test_from_cycles_rejects_repeats():
    with pytest.raises(CycleParseError):
        from_cycles([[1, 2], [2, 3]], 3)


def test_power_and_conjugate():
    c = parse_cycles("(1 2 3 4)", 4)
    assert c.power(2) == parse_cycles("(1 3)(2 4)", 4)
    assert c.power(-1) == c.inverse()
    t = parse_cycles("(1 2)", 4)
    assert c.conjugate(t) == parse_cycles("(1 3 4 2)", 4)


@given(permutations)
def test_inverse_cancels(perm):
    assert compose(perm, inverse(perm)).is_identity()
    assert compose(inverse(perm), perm).is_identity()


@given(permutations)
def test_cycle_string_parses_back(perm):
    assert parse_cycles(perm.cycle_string(), perm.degree) == perm


@given(permutations)
def test_order_annihilates(perm):
    assert perm.power(element_order(perm)).is_identity()
    assert is_even(perm) == is_even(perm.inverse())


same_degree_pairs = st.integers(min_value=1, max_value=8).flatmap(
    lambda n: st.tuples(
        st.permutations(list(range(1, n + 1))), st.permutations(list(range(1, n + 1)))
    )
).map(lambda pair: (Permutation.from_images(pair[0]), Permutation.from_images(pair[1])))


@given(same_degree_pairs)
def test_parity_is_multiplicative(pair):
    a, b = pair
    assert is_even(compose(a, b)) == (is_even(a) == is_even(b))
    assert is_even(a * b) == is_even(b * a)
