import math

import numpy as np
import pytest
from pydantic import ValidationError

from commgraph.catalog import (
    alt_on_subset,
    alternating,
    cyclic,
    dihedral,
    direct_product,
    group,
    parse_descriptor,
    symmetric,
)
from commgraph.config import Settings
from commgraph.exceptions import CapExceededError, DescriptorParseError, NotASubgroupError
from commgraph.groups import FiniteGroup
from commgraph.permutations import identity, is_even, parse_cycles


@pytest.mark.parametrize(
    "descriptor,order,degree",
    [
        ("sym:3", 6, 3),
        ("sym:4", 24, 4),
        ("alt:4", 12, 4),
        ("alt:5", 60, 5),
        ("cyc:12", 12, 12),
        ("dih:4", 8, 4),
        ("dih:5", 10, 5),
        ("prod(sym:3,cyc:5)", 30, 8),
        ("prod(dih:4,cyc:9)", 72, 13),
        ("gens:4:(1 2 3 4)", 4, 4),
        ("gens:5:(1 2 3);(3 4 5)", 60, 5),
    ],
)
def test_orders(descriptor, order, degree):
    g = group(descriptor)
    assert g.order == order
    assert g.degree == degree
    assert g.descriptor == descriptor


@pytest.mark.parametrize(
    "text", ["sym:3", "prod(prod(cyc:2,cyc:3),alt:4)", "gens:3:(1 2);(1 2 3)"]
)
def test_descriptor_is_canonical(text):
    assert str(parse_descriptor(text)) == text
    assert parse_descriptor(str(parse_descriptor(text))) == parse_descriptor(text)


def test_gens_descriptor_normalizes_cycles():
    assert str(parse_descriptor("gens:3:(2 3 1)")) == "gens:3:(1 2 3)"


@pytest.mark.parametrize(
    "text",
    ["sym", "sym:", "foo:3", "prod(sym:3)", "prod(sym:3,cyc:2", "dih:2", "sym:3x", "gens:3:"],
)
def test_descriptor_errors(text):
    with pytest.raises(DescriptorParseError):
        parse_descriptor(text)


def test_caps():
    with pytest.raises(CapExceededError):
        group("sym:8")
    with pytest.raises(CapExceededError):
        group("cyc:17")
    small = Settings(order_cap=100)
    with pytest.raises(CapExceededError):
        symmetric(5, small)
    with pytest.raises(ValidationError):
        Settings(degree_cap=17)


def test_identity_is_first_and_table_is_consistent():
    g = group("sym:4")
    assert g.element(0).is_identity()
    assert np.all(g.table[np.arange(g.order), g.inverses] == 0)
    assert list(g.codes) == sorted(g.codes)
    a, b = 5, 17
    expected = g.element(a) * g.element(b)
    assert g.element(int(g.table[a, b])) == expected


def test_conjugation_table():
    g = group("sym:3")
    for x in range(g.order):
        for e in range(g.order):
            conjugated = g.element(e).conjugate(g.element(x))
            assert g.element(int(g.conjugation[x, e])) == conjugated


def test_element_orders():
    g = group("cyc:12")
    assert sorted(g.element_orders.tolist()) == [1, 2, 3, 3, 4, 4, 6, 6, 12, 12, 12, 12]


def test_cyclic_and_dihedral():
    assert cyclic(7).order == 7
    assert dihedral(6).order == 12
    assert group("dih:4").contains(parse_cycles("(1 3)", 4))
    assert not group("dih:4").contains(parse_cycles("(1 2)", 4))


def test_direct_product_blocks():
    product = direct_product(group("sym:3"), group("cyc:2"))
    assert product.order == 12
    assert product.contains(parse_cycles("(1 2)(4 5)", 5))
    assert not product.contains(parse_cycles("(3 4)", 5))
    assert product.contains(identity(5))


def test_alt_on_subset():
    alt = alt_on_subset(7, [1, 2, 3, 4, 5])
    assert alt.order == 60
    assert alt.degree == 7
    assert all(perm(6) == 6 and perm(7) == 7 for perm in alt.elements)
    with pytest.raises(NotASubgroupError):
        alt_on_subset(5, [1, 2, 3, 4, 8])


@pytest.mark.parametrize("n", range(1, 8))
def test_symmetric_and_alternating_orders(n):
    assert symmetric(n).order == math.factorial(n)
    assert alternating(n).order == max(1, math.factorial(n) // 2)


@pytest.mark.parametrize("n", range(1, 7))
def test_alternating_is_the_even_part(n):
    sym, alt = symmetric(n), alternating(n)
    even = sorted(int(c) for c, perm in zip(sym.codes, sym.elements) if is_even(perm))
    assert [int(c) for c in alt.codes] == even
    generated = FiniteGroup.from_generators(n, alt.generators)
    assert np.array_equal(generated.codes, alt.codes)


@pytest.mark.parametrize(
    "left,right", [("sym:3", "cyc:5"), ("dih:4", "cyc:9"), ("alt:4", "sym:3")]
)
def test_direct_product_factors_commute(left, right):
    a, b = group(left), group(right)
    product = direct_product(a, b)
    first, second = product.generators[: len(a.generators)], product.generators[len(a.generators) :]
    assert len(second) == len(b.generators)
    for g in first:
        for h in second:
            assert g * h == h * g
            assert not set(g.support()) & set(h.support())
    assert all(max(g.support()) <= a.degree for g in first)
    assert all(min(h.support()) > a.degree for h in second)
