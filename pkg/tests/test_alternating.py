import pytest

from commgraph.alternating import (
    AltVertex,
    alt_label,
    b_distance,
    b_graph,
    bgraph_agreement_check,
    bound_sweep,
    classified_recovery_check,
    classified_vertices,
    component_normal_free,
    conncomp_closure,
    guralnick_check,
    longpaths_bound,
    longpaths_witness,
    nonnormal_embedding_witness,
    recover_points,
    step_kind,
    verify_altoverlap,
    verify_conncomp_closure,
    verify_decomp,
)
from commgraph.config import Settings
from commgraph.exceptions import AltParameterError, CapExceededError


def test_labels():
    assert alt_label([3, 1, 2]) == "Alt{1,2,3}"


def test_bgraph_of_alt7():
    bg = b_graph(7, 5, 1)
    assert len(bg) == 56
    assert bg.graph.edge_count == 210
    assert bg.type_counts() == {"type1": 21, "type2": 35}
    assert bg.valences_by_type() == {"type1": [15], "type2": [3]}
    assert bg.is_adjacent([1, 2, 3, 4, 5], [1, 2, 3, 4, 6])
    assert bg.is_adjacent([1, 2, 3, 4, 5], [1, 2, 3, 4])
    assert not bg.is_adjacent([1, 2, 3, 4], [1, 2, 3, 5])
    assert not bg.is_adjacent([1, 2, 3, 4, 5], [1, 2, 3, 6, 7])


@pytest.mark.parametrize("x,p,k", [(6, 2, 2), (6, 3, 1), (4, 5, 1), (10, 4, 1), (10, 5, 0)])
def test_bgraph_parameters(x, p, k):
    with pytest.raises((AltParameterError, ValueError)):
        b_graph(x, p, k)


def test_unknown_subset():
    bg = b_graph(7, 5, 1)
    with pytest.raises(AltParameterError):
        bg.position([1, 2, 3])
    with pytest.raises(AltParameterError):
        b_distance(bg, [1, 2, 3, 4], [1, 2, 3, 5])


def test_distance_between_disjoint_sets():
    bg = b_graph(12, 5, 1)
    assert b_distance(bg, range(1, 6), range(6, 11)) == 5
    assert b_distance(bg, range(1, 6), [1, 2, 3, 4, 6]) == 1
    assert longpaths_bound(5, 1, 12) == 5
    assert longpaths_bound(5, 1, 8) == 3


@pytest.mark.parametrize("p,k,x", [(5, 1, 10), (5, 1, 12), (7, 1, 14), (5, 1, 7)])
def test_bound_sweep(p, k, x):
    assert bound_sweep(p, k, x, samples=10) is None


def test_longpaths_witness():
    bg = b_graph(10, 5, 1)
    witness = longpaths_witness(bg, range(1, 6), range(6, 11))
    assert witness.length == 5
    assert witness.verified
    assert witness.labels[0] == "Alt{1,2,3,4,5}"
    assert witness.labels[-1] == "Alt{6,7,8,9,10}"
    assert all(step_kind(a, b) for a, b in zip(witness.subsets, witness.subsets[1:]))


def test_step_kind():
    assert step_kind((1, 2, 3, 4, 5), (1, 2, 3, 4, 6)) == "move"
    assert step_kind((1, 2, 3, 4), (1, 2, 3, 4, 5)) == "add"
    assert step_kind((1, 2, 3, 4, 5), (1, 2, 3, 4)) == "remove"
    assert step_kind((1, 2, 3, 4, 5), (1, 2, 3, 6, 7)) is None


@pytest.mark.parametrize("x", [7, 8])
def test_bgraph_agrees_with_groups(x):
    assert bgraph_agreement_check(b_graph(x, 5, 1)) is None


def test_bgraph_agreement_sampled():
    assert bgraph_agreement_check(b_graph(10, 5, 1), samples=100) is None


def test_classified_vertices_of_alt7():
    vertices = classified_vertices(7, 5, 1)
    assert len(vertices) == 56
    assert all(v.is_pure for v in vertices)
    assert [v.type_tag for v in vertices[:21]] == ["type1"] * 21
    assert vertices[0].label == "Alt{1,2,3,4,5}"
    assert vertices[0].order == 60
    assert classified_recovery_check(vertices, 5)
    with pytest.raises(CapExceededError):
        classified_recovery_check(vertices, 5, Settings(order_cap=30))


def test_classified_vertices_with_p_factors():
    vertices = classified_vertices(10, 5, 1)
    type1 = [v for v in vertices if v.type_tag == "type1"]
    assert len(type1) == 252 * 7
    mixed = next(v for v in type1 if not v.is_pure)
    assert mixed.p_order == 5
    assert mixed.order == 300
    assert "x<" in mixed.label
    group = mixed.realize()
    assert group.order == 300
    assert recover_points(group, 5) == mixed.points


def test_classification_parameters():
    with pytest.raises(AltParameterError):
        classified_vertices(9, 2, 3)
    with pytest.raises(CapExceededError):
        classified_vertices(14, 5, 1, Settings(complement_cap=7))


def test_alt_vertex_generators():
    vertex = AltVertex(
        x_degree=7, points=(1, 2, 3, 4), p_factor="gens:7:()", type_tag="type2"
    )
    assert vertex.order == 12
    assert len(vertex.generators()) == 2
    assert vertex.realize().order == 12


@pytest.mark.parametrize(
    "degree,t1,t2",
    [
        (5, [1, 2, 3, 4], [2, 3, 4, 5]),
        (6, [1, 2, 3, 4], [3, 4, 5, 6]),
        (7, [1, 2, 3, 4, 5], [4, 5, 6, 7]),
        (7, [1, 2, 3, 4], [1, 2, 3, 4, 5, 6, 7]),
    ],
)
def test_altoverlap(degree, t1, t2):
    assert verify_altoverlap(degree, t1, t2)


def test_altoverlap_parameters():
    with pytest.raises(AltParameterError):
        verify_altoverlap(7, [1, 2, 3, 4], [4, 5, 6, 7])
    with pytest.raises(AltParameterError):
        verify_altoverlap(7, [1, 2, 3], [1, 2, 3, 4])


@pytest.mark.parametrize("s_size,complement", [(5, "cyc:5"), (4, "cyc:5"), (5, "cyc:1")])
def test_decomposition(s_size, complement):
    assert verify_decomp(s_size, complement, 5)


def test_decomposition_parameters():
    with pytest.raises(AltParameterError):
        verify_decomp(6, "cyc:5", 5)
    with pytest.raises(AltParameterError):
        verify_decomp(5, "cyc:6", 5)
    with pytest.raises(AltParameterError):
        verify_decomp(5, "cyc:5", 5, ambient_degree=7)


@pytest.mark.parametrize("s_size", [4, 5])
def test_guralnick(s_size):
    assert guralnick_check(s_size, 5)


def test_component_normal_free():
    assert component_normal_free(12, 5, 1)
    assert component_normal_free(7, 5, 1)


def test_closure_on_alt6():
    result = conncomp_closure(6, 5, 1)
    assert result.matches
    assert result.component_size == 21
    assert result.type_counts == {"type1": 6, "type2": 15}
    assert result.geodesics_agree


@pytest.mark.slow
def test_closure_on_alt7(settings, cache):
    result = conncomp_closure(7, 5, 1, settings, cache)
    assert result.matches
    assert result.component_size == 56
    assert result.edge_count == 210
    assert result.valences == {"type1": [15], "type2": [3]}
    assert result.geodesics_agree
    assert verify_conncomp_closure(7, 5, 1, settings, cache)


@pytest.mark.slow
def test_nonnormal_embedding():
    witness = nonnormal_embedding_witness(5, 5)
    assert witness.separated
    assert witness.path.verified
    assert witness.path.length == 5
