import pytest
from scipy import sparse

from commgraph.catalog import group
from commgraph.exceptions import (
    AmbientMismatchError,
    ComponentInvariantError,
    GraphFormatError,
    NotNormalError,
    UnknownVertexError,
)
from commgraph.graphs import (
    CommGraph,
    adjacent,
    build_graph,
    components,
    conjugation_automorphism_check,
    diameter_bound_from_quotient,
    distance,
    edge_consistency_check,
    embedding_isometry_check,
    explore_component,
    export_dot,
    export_json,
    find_quotient_embedding_violation,
    geodesic,
    graph_on,
    groups_adjacent,
    import_json,
    index_product,
    infinite_components_witness,
    normal_component_diameter_check,
    p_power_mask,
    quotient_contraction_check,
    quotient_embedding_check,
)
from commgraph.lattice import as_subgroup, generated_subgroup, lattice_of, trivial, whole
from commgraph.models import VertexRecord
from commgraph.permutations import parse_cycles

from .conftest import EXAMPLES

SYM3 = group("sym:3")
# Sorted (size, diameter) of every component
SYM3_SHAPES = {
    2: [(2, 1), (4, 1)],
    3: [(2, 1), (4, 2)],
    5: [(1, 0)] * 6,
    7: [(1, 0)] * 6,
    11: [(1, 0)] * 6,
}


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_sym3_matches_golden(p):
    golden = EXAMPLES.joinpath(f"graphs/sym3_p{p}.json").read_text()
    graph = build_graph(SYM3, p)
    assert export_json(graph) == golden
    loaded = import_json(golden)
    assert loaded.edges() == graph.edges()
    found = sorted((len(r.vertices), r.diameter) for r in components(loaded))
    assert found == SYM3_SHAPES[p]


def test_adjacency():
    t12 = generated_subgroup(SYM3, [parse_cycles("(1 2)", 3)])
    t13 = generated_subgroup(SYM3, [parse_cycles("(1 3)", 3)])
    assert adjacent(t12, t13, 2)
    assert not adjacent(t12, t12, 2)
    assert not adjacent(t12, t13, 3)
    assert adjacent(t12, whole(SYM3), 3)
    for bad in (1, 4):
        with pytest.raises(ValueError):
            adjacent(t12, t13, bad)
    with pytest.raises(AmbientMismatchError):
        adjacent(t12, trivial(group("cyc:3")), 3)


def test_p_power_mask():
    assert p_power_mask([1, 2, 3, 4, 6, 8, 12], 2).tolist() == [
        True,
        True,
        False,
        True,
        False,
        True,
        False,
    ]


def test_realized_groups_adjacency():
    a = group("gens:5:(1 2 3);(1 2 4)")
    b = group("gens:5:(1 2 3);(1 2 5)")
    assert index_product(a, b) == 16
    assert groups_adjacent(a, b, 2)
    assert not groups_adjacent(a, a, 2)


def test_graph_is_symmetric_and_irreflexive():
    graph = build_graph(group("sym:4"), 2)
    assert (graph.adjacency != graph.adjacency.T).nnz == 0
    assert graph.adjacency.diagonal().sum() == 0
    assert edge_consistency_check(graph) is None


def test_edge_consistency_detects_flipped_edge():
    graph = build_graph(group("sym:4"), 3)
    flipped = graph.adjacency.tolil()
    flipped[0, 1] = not flipped[0, 1]
    flipped[1, 0] = not flipped[1, 0]
    broken = CommGraph(graph.group, 3, graph.vertices, flipped, graph.subgroups)
    assert edge_consistency_check(broken) == (graph.vertices[0].id, graph.vertices[1].id)


def test_distance_and_geodesic():
    graph = build_graph(SYM3, 3)
    ids = graph.ids
    assert distance(graph, ids[1], ids[2]) == 2
    assert distance(graph, ids[0], ids[1]) is None
    assert geodesic(graph, ids[1], ids[2]) == [ids[1], ids[5], ids[2]]
    assert geodesic(graph, ids[0], ids[0]) == [ids[0]]
    assert geodesic(graph, ids[0], ids[1]) is None
    with pytest.raises(UnknownVertexError):
        distance(graph, ids[0], "missing")


def test_geodesic_takes_least_id():
    graph = build_graph(group("sym:4"), 3)
    reports = components(graph)
    report = next(r for r in reports if r.diameter >= 2)
    u, v = report.witness_nonadjacent_pair
    path = geodesic(graph, u, v)
    assert len(path) - 1 == distance(graph, u, v)
    for position in range(1, len(path) - 1):
        here = graph.position(path[position - 1])
        remaining = distance(graph, path[position], v)
        rivals = [
            graph.ids[n]
            for n in graph.neighbours(here)
            if distance(graph, graph.ids[n], v) == remaining
        ]
        assert path[position] == min(rivals)


def test_component_reports():
    graph = build_graph(SYM3, 3)
    reports = components(graph)
    assert [r.non_p_part for r in reports] == [2, 1]
    assert reports[0].is_complete
    assert not reports[1].is_complete
    assert reports[1].contains_normal
    assert reports[1].witness_nonadjacent_pair is not None
    assert len(reports[1].witness_path) == 3


@pytest.mark.parametrize(
    "descriptor,nilpotent",
    [("cyc:12", True), ("dih:4", True), ("sym:3", False), ("alt:4", False), ("sym:4", False)],
)
def test_completeness_tracks_nilpotency(descriptor, nilpotent):
    g = group(descriptor)
    complete = all(
        r.is_complete for p in (2, 3) for r in components(build_graph(g, p))
    )
    assert complete == nilpotent


def test_mixed_component_is_rejected():
    vertices = [
        VertexRecord(id="a", order=1, index=2),
        VertexRecord(id="b", order=1, index=3),
    ]
    graph = CommGraph.from_edges("sym:3", 2, vertices, [(0, 1)])
    with pytest.raises(ComponentInvariantError):
        components(graph)


def test_infinitely_many_components_witness():
    graph = build_graph(group("alt:5"), 2)
    witness = infinite_components_witness(graph)
    assert set(witness) == {5}
    graph = build_graph(group("sym:3"), 5)
    assert set(infinite_components_witness(graph)) == {2, 3}


@pytest.mark.parametrize("descriptor", ["sym:4", "alt:4", "dih:5", "alt:5"])
def test_normal_component_diameter(descriptor):
    for p in (2, 3, 5):
        assert normal_component_diameter_check(group(descriptor), p)


def test_diameter_bound_from_quotient():
    graph = build_graph(group("sym:4"), 2)
    bounds = diameter_bound_from_quotient(graph)
    assert len(bounds) == len(components(graph))
    assert all(b.holds for b in bounds)


def test_quotient_contraction():
    sym4 = group("sym:4")
    v4 = as_subgroup(sym4, group("gens:4:(1 2)(3 4);(1 3)(2 4)"))
    assert quotient_contraction_check(sym4, v4, 2, samples=300)
    t12 = generated_subgroup(sym4, [parse_cycles("(1 2)", 4)])
    with pytest.raises(NotNormalError):
        quotient_contraction_check(sym4, t12, 2)


def test_quotient_embeds_isometrically():
    sym4 = group("sym:4")
    v4 = as_subgroup(sym4, group("gens:4:(1 2)(3 4);(1 3)(2 4)"))
    for p in (2, 3):
        assert quotient_embedding_check(sym4, v4, p)
    graph = build_graph(sym4, 3)
    assert find_quotient_embedding_violation(graph, v4) is None
    assert find_quotient_embedding_violation(graph, trivial(sym4)) is None
    t12 = generated_subgroup(sym4, [parse_cycles("(1 2)", 4)])
    with pytest.raises(NotNormalError):
        quotient_embedding_check(sym4, t12, 2)


def test_conjugation_is_an_automorphism():
    sym4 = group("sym:4")
    graph = build_graph(sym4, 2)
    for element in range(0, sym4.order, 5):
        assert conjugation_automorphism_check(graph, element)


def test_normal_subgroup_embeds_isometrically():
    sym4 = group("sym:4")
    alt4 = as_subgroup(sym4, group("alt:4"))
    assert embedding_isometry_check(sym4, alt4, 2)
    assert embedding_isometry_check(sym4, alt4, 3)


def test_explore_component_matches_full_graph():
    sym4 = group("sym:4")
    graph = build_graph(sym4, 2)
    seed = lattice_of(sym4)[3]
    local = explore_component(sym4, seed, 2)
    report = next(r for r in components(graph) if seed.id in r.vertices)
    assert sorted(local.ids) == sorted(report.vertices)
    assert local.edge_count == graph.adjacency[
        [graph.position(v) for v in report.vertices]
    ][:, [graph.position(v) for v in report.vertices]].nnz // 2


def test_graph_on_keeps_class_tags_with_their_subgroups():
    subs = list(lattice_of(SYM3))
    tags = [f"tag{s.order}" for s in subs]
    graph = graph_on(SYM3, list(reversed(subs)), 2, list(reversed(tags)))
    assert [v.class_tag for v in graph.vertices] == [f"tag{v.order}" for v in graph.vertices]


def test_json_export_and_import():
    graph = build_graph(SYM3, 2)
    text = export_json(graph)
    assert '"schema": 1' in text
    assert '"class": null' in text
    loaded = import_json(text)
    assert loaded.ids == graph.ids
    assert loaded.edges() == graph.edges()
    assert loaded.subgroups is None
    assert [r.contains_normal for r in components(loaded)] == [None, None]


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"schema": 2, "group": "sym:3", "prime": 2, "vertices": [], "edges": []}',
        '{"schema": 1, "group": "sym:3", "prime": 2, '
        '"vertices": [{"id": "a", "order": 1, "index": 6}], "edges": [[0, 0]]}',
        '{"schema": 1, "group": "sym:3", "prime": 6, '
        '"vertices": [{"id": "a", "order": 1, "index": 6}], "edges": []}',
    ],
)
def test_import_rejects_bad_documents(text):
    with pytest.raises(GraphFormatError):
        import_json(text)


def test_dot_export():
    graph = build_graph(SYM3, 3)
    dot = export_dot(graph)
    assert dot.startswith('graph "Gamma_3(sym:3)" {')
    assert dot.count(" -- ") == 4
    assert dot.rstrip().endswith("}")
    bare = export_dot(graph, coloring=False, valences=False)
    assert "\\n" not in bare


def test_subgroup_lookup_needs_subgroups():
    loaded = import_json(export_json(build_graph(SYM3, 2)))
    with pytest.raises(ValueError):
        loaded.subgroup(loaded.ids[0])
    assert isinstance(loaded.adjacency, sparse.csr_matrix)
