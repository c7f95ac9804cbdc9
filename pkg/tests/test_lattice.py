import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from commgraph.catalog import group
from commgraph.config import Settings
from commgraph.exceptions import (
    AmbientMismatchError,
    NotASubgroupError,
    NotNilpotentError,
    SubgroupLimitError,
)
from commgraph.groups import FiniteGroup
from commgraph.lattice import (
    Index,
    SubgroupLattice,
    all_subgroups,
    as_subgroup,
    center,
    commutator_subgroup,
    conjugate_by,
    conjugates,
    derived_series,
    find_solvable_nonnilpotent,
    generated_subgroup,
    hall_complement,
    index,
    index_factorization_check,
    intersect,
    is_abelian,
    is_nilpotent,
    is_normal,
    is_power_of,
    is_solvable,
    join,
    lattice_of,
    lower_central_series,
    non_p_part,
    normal_core,
    normal_intersection_check,
    normalizer,
    p_part,
    p_subgroups,
    prime_power_index_subgroups,
    subgroup_decomposition_check,
    sylow_subgroup,
    trivial,
    whole,
)
from commgraph.permutations import parse_cycles
from commgraph.verify import CATALOG

SYM4 = group("sym:4")
SYM4_LATTICE = lattice_of(SYM4)


def test_integer_helpers():
    assert p_part(72, 2) == 8
    assert non_p_part(72, 2) == 9
    assert is_power_of(1, 5)
    assert is_power_of(125, 5)
    assert not is_power_of(10, 5)
    for bad in (0, 1, 4, 6):
        with pytest.raises(ValueError):
            p_part(12, bad)
        with pytest.raises(ValueError):
            is_power_of(8, bad)


def test_index_model():
    value = Index(value=12, prime=2)
    assert value.p_part == 4
    assert value.non_p_part == 3
    assert not value.is_power()
    with pytest.raises(ValueError):
        Index(value=12).is_power()


@pytest.mark.parametrize(
    "descriptor,count",
    [
        ("sym:3", 6),
        ("cyc:12", 6),
        ("cyc:8", 4),
        ("dih:4", 10),
        ("alt:4", 10),
        ("sym:4", 30),
        ("alt:5", 59),
    ],
)
def test_subgroup_counts(descriptor, count):
    subs = all_subgroups(group(descriptor))
    assert len(subs) == count
    assert len({s.id for s in subs}) == count
    assert [s.sort_key for s in subs] == sorted(s.sort_key for s in subs)
    assert subs[0].order == 1
    assert subs[-1].order == group(descriptor).order


def test_order_distribution_of_sym4():
    orders = [s.order for s in SYM4_LATTICE]
    assert {o: orders.count(o) for o in set(orders)} == {
        1: 1,
        2: 9,
        3: 4,
        4: 7,
        6: 4,
        8: 3,
        12: 1,
        24: 1,
    }


def test_ids_depend_on_elements_not_generators():
    g = group("sym:3")
    a = generated_subgroup(g, [parse_cycles("(1 2 3)", 3)])
    b = generated_subgroup(g, [parse_cycles("(1 3 2)", 3)])
    assert a == b
    assert a.id == b.id
    assert a.order == 3


def test_subgroup_cap():
    with pytest.raises(SubgroupLimitError):
        SubgroupLattice.enumerate(group("sym:4"), Settings(subgroup_cap=10))


def test_generators_generate():
    for sub in SYM4_LATTICE:
        again = generated_subgroup(SYM4, sub.generators)
        assert again == sub


def test_lattice_queries():
    v4 = as_subgroup(SYM4, group("gens:4:(1 2)(3 4);(1 3)(2 4)"))
    assert SYM4_LATTICE.find(v4) == v4
    assert len(SYM4_LATTICE.contained_in(v4)) == 5
    assert len(SYM4_LATTICE.containing(v4)) == 6
    assert len(SYM4_LATTICE.normal_subgroups()) == 4
    assert len(SYM4_LATTICE.of_order(8)) == 3


def test_lattice_store_is_consulted_once():
    calls = []

    class Recorder:
        def load(self, g):
            calls.append("load")
            return None

        def store(self, lattice):
            calls.append(("store", len(lattice)))

    fresh = FiniteGroup.from_generators(3, [parse_cycles("(1 2)", 3), parse_cycles("(1 2 3)", 3)])
    first = lattice_of(fresh, store=Recorder())
    second = lattice_of(fresh, store=Recorder())
    assert first is second
    assert calls == ["load", ("store", 6)]


def test_intersect_join_index():
    g = group("sym:3")
    t12 = generated_subgroup(g, [parse_cycles("(1 2)", 3)])
    t13 = generated_subgroup(g, [parse_cycles("(1 3)", 3)])
    assert intersect(t12, t13) == trivial(g)
    assert join(t12, t13) == whole(g)
    assert index(whole(g), t12, 3).value == 3
    assert index(whole(g), t12, 3).is_power()
    with pytest.raises(NotASubgroupError):
        index(t12, t13)


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatchError):
        intersect(whole(group("sym:3")), whole(group("cyc:3")))


def test_normality_and_conjugation():
    g = group("sym:3")
    a3 = generated_subgroup(g, [parse_cycles("(1 2 3)", 3)])
    t12 = generated_subgroup(g, [parse_cycles("(1 2)", 3)])
    assert is_normal(g, a3)
    assert not is_normal(g, t12)
    assert normalizer(g, a3) == whole(g)
    assert normalizer(g, t12) == t12
    assert normal_core(g, t12) == trivial(g)
    assert len(conjugates(g, t12)) == 3
    assert conjugates(g, a3) == [a3]
    image = conjugate_by(t12, g.index_of(parse_cycles("(1 3)", 3)))
    assert image == generated_subgroup(g, [parse_cycles("(2 3)", 3)])


def test_series():
    assert [s.order for s in derived_series(SYM4)] == [24, 12, 4, 1]
    assert lower_central_series(SYM4)[-1].order == 12
    assert commutator_subgroup(whole(SYM4), whole(SYM4)).order == 12
    assert center(group("dih:4")).order == 2
    assert center(group("sym:3")).order == 1
    assert is_abelian(group("cyc:12"))
    assert not is_abelian(group("sym:3"))


@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.descriptor)
def test_catalog_expectations(entry):
    g = group(entry.descriptor)
    assert is_nilpotent(g) == entry.expected_nilpotent
    assert is_solvable(g) == entry.expected_solvable


def test_sylow_and_hall():
    assert sylow_subgroup(SYM4, 2).order == 8
    assert sylow_subgroup(SYM4, 3).order == 3
    assert not is_normal(SYM4, sylow_subgroup(SYM4, 2))
    assert hall_complement(SYM4, 2).order == 3
    assert hall_complement(group("alt:5"), 2) is None
    assert hall_complement(group("alt:5"), 5).order == 12
    with pytest.raises(ValueError):
        sylow_subgroup(SYM4, 4)


def test_p_subgroups():
    assert [s.order for s in p_subgroups(group("sym:3"), 3)] == [1, 3]
    assert len(p_subgroups(SYM4, 2)) == 20
    assert len(p_subgroups(group("alt:5"), 5)) == 7
    found = {s.mask for s in p_subgroups(SYM4, 2)}
    assert found == {s.mask for s in SYM4_LATTICE if is_power_of(s.order, 2)}


def test_prime_power_index_subgroups():
    alt5 = group("alt:5")
    found = prime_power_index_subgroups(alt5, 5)
    assert len(found) == 6
    assert sorted({s.order for s in found}) == [12, 60]


def test_solvable_nonnilpotent_witness():
    witness = find_solvable_nonnilpotent(group("alt:5"))
    assert witness is not None
    assert witness.order == 6
    assert find_solvable_nonnilpotent(group("cyc:12")) is None


def test_subgroup_decomposition():
    assert subgroup_decomposition_check(group("cyc:12"))
    assert subgroup_decomposition_check(group("prod(dih:4,cyc:3)"))
    with pytest.raises(NotNilpotentError):
        subgroup_decomposition_check(group("sym:3"))


@pytest.mark.parametrize("descriptor", ["sym:4", "dih:5", "prod(sym:3,cyc:5)"])
def test_lattice_index_identities(descriptor):
    g = group(descriptor)
    assert index_factorization_check(g, samples=200) is None
    for p in (2, 3, 5):
        assert normal_intersection_check(g, p) is None


positions = st.integers(min_value=0, max_value=len(SYM4_LATTICE) - 1)


@given(positions, positions)
@hypothesis_settings(max_examples=60, deadline=None)
def test_join_and_intersection_bounds(i, j):
    a, b = SYM4_LATTICE[i], SYM4_LATTICE[j]
    meet = intersect(a, b)
    both = join(a, b)
    assert a.contains(meet) and b.contains(meet)
    assert both.contains(a) and both.contains(b)
    assert both.order * meet.order >= a.order * b.order
    assert SYM4_LATTICE.find(meet) == meet
    assert SYM4_LATTICE.find(both) == both


def _closure(g, generators):
    elements = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for s in generators:
            y = int(g.table[x, s])
            if y not in elements:
                elements.add(y)
                frontier.append(y)
    return frozenset(elements)


def _mask(elements):
    return sum(1 << e for e in elements)


def brute_force_masks(g):
    """Closures of all generator pairs, extended by single elements until stable"""
    found = {_closure(g, (a, b)) for a in range(g.order) for b in range(a, g.order)}
    fresh = set(found)
    while fresh:
        grown = {_closure(g, tuple(sub) + (e,)) for sub in fresh for e in range(g.order)}
        fresh = grown - found
        found |= fresh
    return {_mask(sub) for sub in found}


@pytest.mark.parametrize(
    "descriptor",
    [
        "sym:4",
        "alt:4",
        "dih:6",
        "prod(sym:3,cyc:2)",
        "prod(cyc:2,cyc:4)",
        "prod(dih:4,cyc:3)",
        pytest.param("alt:5", marks=pytest.mark.slow),
    ],
)
def test_enumeration_matches_brute_force(descriptor):
    g = group(descriptor)
    assert {s.mask for s in all_subgroups(g)} == brute_force_masks(g)
