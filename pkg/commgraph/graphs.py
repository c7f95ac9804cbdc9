"""
p-local commensurability graphs

Vertices are subgroups; A and B are adjacent when A != B and
[A : A∩B][B : A∩B] is a power of p. Adjacency is stored as a symmetric
boolean scipy CSR matrix over vertex positions, so every traversal visits
neighbours in position order.
"""

import logging
from collections import deque
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError
from scipy import sparse
from scipy.sparse import csgraph
from sympy import isprime

from .config import DEFAULT_SETTINGS, Settings
from .exceptions import (
    AmbientMismatchError,
    ComponentInvariantError,
    GraphFormatError,
    NotNormalError,
    UnknownVertexError,
)
from .groups import FiniteGroup, to_mask
from .lattice import (
    LatticeStore,
    Subgroup,
    conjugate_by,
    extension_candidates,
    intersect,
    is_normal,
    is_power_of,
    join,
    lattice_of,
    non_p_part,
    normal_core,
    p_part,
    require_prime,
)
from .models import ComponentReport, GraphDocument, VertexRecord

logger = logging.getLogger(__name__)

CLASS_COLOURS = {"type1": "lightblue", "type2": "salmon"}

# Rows of the intersection-size matrix computed per block
_BLOCK = 256


def p_power_mask(values: np.ndarray, p: int) -> np.ndarray:
    """Elementwise is_power_of over an array of positive integers"""
    rest = np.array(values, dtype=np.int64)
    while True:
        divisible = rest % p == 0
        if not divisible.any():
            return rest == 1
        rest[divisible] //= p


def adjacent(a: Subgroup, b: Subgroup, p: int) -> bool:
    """Adjacency in the p-local commensurability graph; a subgroup is never
    adjacent to itself

    Raises:
        AmbientMismatchError: A and B live in different groups
        ValueError: p is not a prime
    """
    require_prime(p)
    common = intersect(a, b).order
    if a == b:
        return False
    return is_power_of((a.order // common) * (b.order // common), p)


def index_product(a: FiniteGroup, b: FiniteGroup) -> int:
    """[A : A∩B][B : A∩B] for two permutation groups of the same degree"""
    if a.degree != b.degree:
        raise AmbientMismatchError(
            f"Cannot intersect groups of degree {a.degree} and {b.degree}"
        )
    common = len(np.intersect1d(a.codes, b.codes, assume_unique=True))
    return (a.order // common) * (b.order // common)


def groups_adjacent(a: FiniteGroup, b: FiniteGroup, p: int) -> bool:
    """`adjacent` for groups realized on their own, compared by element codes"""
    require_prime(p)
    if a.order == b.order and np.array_equal(a.codes, b.codes):
        return False
    return is_power_of(index_product(a, b), p)


class CommGraph:
    """A commensurability graph with its vertex metadata

    `subgroups` is present when the graph was built from a lattice and absent
    when it was imported from JSON or built combinatorially.
    """

    def __init__(
        self,
        group: str,
        prime: int,
        vertices: Sequence[VertexRecord],
        adjacency: sparse.spmatrix,
        subgroups: Optional[Sequence[Subgroup]] = None,
    ) -> None:
        self.group = group
        self.prime = prime
        self.vertices: List[VertexRecord] = list(vertices)
        self.adjacency = sparse.csr_matrix(adjacency, dtype=bool)
        self.adjacency.sort_indices()
        self.subgroups: Optional[List[Subgroup]] = (
            None if subgroups is None else list(subgroups)
        )
        self.positions: Dict[str, int] = {v.id: i for i, v in enumerate(self.vertices)}

    @classmethod
    def from_edges(
        cls,
        group: str,
        prime: int,
        vertices: Sequence[VertexRecord],
        edges: Sequence[Tuple[int, int]],
        subgroups: Optional[Sequence[Subgroup]] = None,
    ) -> "CommGraph":
        size = len(vertices)
        pairs = np.array(edges, dtype=np.intp).reshape(-1, 2)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        data = np.ones(len(rows), dtype=bool)
        adjacency = sparse.coo_matrix((data, (rows, cols)), shape=(size, size))
        return cls(group, prime, vertices, adjacency, subgroups)

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return (
            f"CommGraph(group={self.group!r}, prime={self.prime}, "
            f"vertices={len(self)}, edges={self.edge_count})"
        )

    @property
    def ids(self) -> List[str]:
        return [v.id for v in self.vertices]

    def position(self, vertex_id: str) -> int:
        try:
            return self.positions[vertex_id]
        except KeyError as e:
            raise UnknownVertexError(vertex_id) from e

    def neighbours(self, position: int) -> np.ndarray:
        indptr = self.adjacency.indptr
        return self.adjacency.indices[indptr[position] : indptr[position + 1]]

    @property
    def valences(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)

    def is_adjacent(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i, j])

    def edges(self) -> List[Tuple[int, int]]:
        """Edges as sorted i < j position pairs"""
        upper = sparse.triu(self.adjacency, k=1).tocoo()
        return sorted(zip(upper.row.tolist(), upper.col.tolist()))

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.nnz // 2)

    def subgroup(self, vertex_id: str) -> Subgroup:
        if self.subgroups is None:
            raise ValueError(f"Graph of {self.group} carries no subgroups")
        return self.subgroups[self.position(vertex_id)]

    def distances_from(self, position: int) -> np.ndarray:
        """BFS distances from one vertex, inf where unreachable"""
        return csgraph.shortest_path(
            self.adjacency, method="D", unweighted=True, directed=False, indices=position
        )

    def all_distances(self) -> np.ndarray:
        return csgraph.shortest_path(
            self.adjacency, method="D", unweighted=True, directed=False
        )

    def geodesic_positions(self, start: int, target: int) -> Optional[List[int]]:
        """Shortest path as positions, choosing the least id at every step"""
        to_target = self.distances_from(target)
        if np.isinf(to_target[start]):
            return None
        path = [start]
        while path[-1] != target:
            here = path[-1]
            closer = [
                int(n) for n in self.neighbours(here) if to_target[n] == to_target[here] - 1
            ]
            path.append(min(closer, key=lambda n: self.vertices[n].id))
        return path


def vertex_record(
    group_order: int, sub: Subgroup, class_tag: Optional[str] = None
) -> VertexRecord:
    return VertexRecord(
        id=sub.id,
        order=sub.order,
        index=group_order // sub.order,
        generators=sub.generator_strings(),
        class_tag=class_tag,
    )


def graph_on(
    group: FiniteGroup,
    subgroups: Sequence[Subgroup],
    p: int,
    class_tags: Optional[Sequence[Optional[str]]] = None,
) -> CommGraph:
    """The induced subgraph of the commensurability graph on given subgroups

    Intersection sizes come from a product of membership matrices, one block
    of rows at a time.
    """
    require_prime(p)
    ranked = sorted(range(len(subgroups)), key=lambda i: subgroups[i].sort_key)
    subs = [subgroups[i] for i in ranked]
    size = len(subs)
    orders = np.array([s.order for s in subs], dtype=np.int64)
    membership = np.zeros((size, group.order), dtype=np.float32)
    for row, sub in enumerate(subs):
        membership[row, sub.indices] = 1.0

    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    for start in range(0, size, _BLOCK):
        stop = min(start + _BLOCK, size)
        common = np.rint(membership[start:stop] @ membership.T).astype(np.int64)
        product = (orders[start:stop, None] // common) * (orders[None, :] // common)
        hit = p_power_mask(product, p)
        hit[np.arange(stop - start), np.arange(start, stop)] = False
        r, c = np.nonzero(hit)
        rows.append(r + start)
        cols.append(c)

    row_index = np.concatenate(rows) if rows else np.zeros(0, dtype=np.intp)
    col_index = np.concatenate(cols) if cols else np.zeros(0, dtype=np.intp)
    adjacency = sparse.coo_matrix(
        (np.ones(len(row_index), dtype=bool), (row_index, col_index)), shape=(size, size)
    )
    tags = [class_tags[i] for i in ranked] if class_tags is not None else [None] * size
    vertices = [vertex_record(group.order, s, tag) for s, tag in zip(subs, tags)]
    return CommGraph(group.descriptor, p, vertices, adjacency, subs)


def build_graph(
    group: FiniteGroup,
    p: int,
    settings: Settings = DEFAULT_SETTINGS,
    store: Optional[LatticeStore] = None,
) -> CommGraph:
    """The p-local commensurability graph over every subgroup of `group`

    Args:
        group (FiniteGroup): Ambient group
        p (int): Prime
        settings (Settings, optional): Caps. Defaults to DEFAULT_SETTINGS.
        store (Optional[LatticeStore], optional): Lattice cache. Defaults to None.

    Raises:
        SubgroupLimitError: The lattice is too large

    Returns:
        CommGraph: Vertices in (order, id) order
    """
    lattice = lattice_of(group, settings, store)
    graph = graph_on(group, lattice.subgroups, p)
    logger.info(
        "Built graph of %s at p=%d: %d vertices, %d edges",
        group.descriptor,
        p,
        len(graph),
        graph.edge_count,
    )
    return graph


def edge_consistency_check(graph: CommGraph) -> Optional[Tuple[str, str]]:
    """Recompute adjacency from the subgroups; return the first disagreeing pair"""
    if graph.subgroups is None:
        raise ValueError(f"Graph of {graph.group} carries no subgroups")
    if not graph.subgroups:
        return None
    fresh = graph_on(graph.subgroups[0].ambient, graph.subgroups, graph.prime)
    difference = sparse.triu(fresh.adjacency != graph.adjacency, k=1).tocoo()
    if difference.nnz == 0:
        return None
    i, j = sorted(zip(difference.row.tolist(), difference.col.tolist()))[0]
    return graph.vertices[i].id, graph.vertices[j].id


# Analytics


def component_positions(graph: CommGraph) -> List[np.ndarray]:
    """Vertex positions of each component, components ordered by first vertex"""
    _, labels = csgraph.connected_components(graph.adjacency, directed=False)
    groups: Dict[int, List[int]] = {}
    for position, label in enumerate(labels.tolist()):
        groups.setdefault(label, []).append(position)
    return [np.array(members, dtype=np.intp) for members in groups.values()]


def components(graph: CommGraph) -> List[ComponentReport]:
    """Analytics for every component

    Raises:
        ComponentInvariantError: The non-p part of [G:V] varies on a component
    """
    p = graph.prime
    reports = []
    for number, members in enumerate(component_positions(graph)):
        ids = [graph.vertices[m].id for m in members]
        parts = {non_p_part(graph.vertices[m].index, p) for m in members}
        if len(parts) != 1:
            raise ComponentInvariantError(
                f"Component {number} of {graph.group} at p={p} mixes non-{p} "
                f"index parts {sorted(parts)}"
            )
        inner = graph.adjacency[members][:, members]
        dist = csgraph.shortest_path(inner, method="D", unweighted=True, directed=False)
        diameter = int(dist.max())

        contains_normal = None
        if graph.subgroups is not None:
            ambient = graph.subgroups[0].ambient
            contains_normal = any(is_normal(ambient, graph.subgroups[m]) for m in members)

        pair = None
        path = None
        if diameter >= 2:
            i, j = np.argwhere(dist >= 2)[0]
            pair = (ids[i], ids[j])
            path = geodesic(graph, ids[i], ids[j])

        reports.append(
            ComponentReport(
                component=number,
                vertices=ids,
                diameter=diameter,
                is_complete=diameter <= 1,
                non_p_part=parts.pop(),
                contains_normal=contains_normal,
                witness_nonadjacent_pair=pair,
                witness_path=path,
            )
        )
    return reports


def distance(graph: CommGraph, u: str, v: str) -> Optional[int]:
    """Path distance between two vertex ids, None if disconnected

    Raises:
        UnknownVertexError: Either id is not a vertex
    """
    target = graph.position(v)
    value = graph.distances_from(graph.position(u))[target]
    return None if np.isinf(value) else int(value)


def geodesic(graph: CommGraph, u: str, v: str) -> Optional[List[str]]:
    """The shortest path from u to v whose id sequence is lexicographically least

    Raises:
        UnknownVertexError: Either id is not a vertex
    """
    path = graph.geodesic_positions(graph.position(u), graph.position(v))
    if path is None:
        return None
    return [graph.vertices[n].id for n in path]


def normal_component_violations(reports: Sequence[ComponentReport]) -> List[ComponentReport]:
    """Components that contain a normal subgroup yet have diameter above 3"""
    return [r for r in reports if r.contains_normal and r.diameter > 3]


def normal_component_diameter_check(
    group: FiniteGroup,
    p: int,
    settings: Settings = DEFAULT_SETTINGS,
    store: Optional[LatticeStore] = None,
) -> bool:
    """Every component containing a normal subgroup has diameter at most 3"""
    reports = components(build_graph(group, p, settings, store))
    return not normal_component_violations(reports)


def _image_positions(graph: CommGraph, n: Subgroup) -> Dict[int, int]:
    assert graph.subgroups is not None
    by_mask = {s.mask: i for i, s in enumerate(graph.subgroups)}
    return {i: by_mask[join(s, n).mask] for i, s in enumerate(graph.subgroups)}


def find_contraction_violation(
    graph: CommGraph,
    n: Subgroup,
    samples: int = 1000,
    seed: int = DEFAULT_SETTINGS.seed,
    max_length: int = 4,
) -> Optional[List[str]]:
    """Random walks V_0..V_m whose images V_iN fail to form a walk of length <= m

    Subgroups containing N stand for the subgroups of G/N, and [VN:WN]-type
    indices are read inside G. Returns the first failing walk as vertex ids.
    """
    image = _image_positions(graph, n)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        walk = [int(rng.integers(len(graph)))]
        for _ in range(int(rng.integers(1, max_length + 1))):
            choices = graph.neighbours(walk[-1])
            if not len(choices):
                break
            walk.append(int(rng.choice(choices)))
        images = [image[v] for v in walk]
        collapsed = images[:1] + [b for a, b in zip(images, images[1:]) if a != b]
        steps_ok = all(graph.is_adjacent(a, b) for a, b in zip(collapsed, collapsed[1:]))
        if not steps_ok or len(collapsed) > len(walk):
            return [graph.vertices[v].id for v in walk]
    return None


def quotient_contraction_check(
    group: FiniteGroup,
    n: Subgroup,
    p: int,
    samples: int = 1000,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
    store: Optional[LatticeStore] = None,
) -> bool:
    """Paths map to paths of no greater length under V -> VN

    Raises:
        NotNormalError: N is not normal in the group
    """
    if not is_normal(group, n):
        raise NotNormalError(f"{n!r} is not normal in {group.descriptor}")
    graph = build_graph(group, p, settings, store)
    return find_contraction_violation(graph, n, samples, seed) is None


def find_quotient_embedding_violation(graph: CommGraph, n: Subgroup) -> Optional[Tuple[str, str]]:
    """A pair of overgroups of N whose distance inside [N, G] differs from
    their distance in the whole graph

    The overgroups of N stand for the subgroups of G/N, with the same indices.
    """
    assert graph.subgroups is not None
    above = [i for i, s in enumerate(graph.subgroups) if s.contains(n)]
    inner = csgraph.shortest_path(
        graph.adjacency[above][:, above], method="D", unweighted=True, directed=False
    )
    outer = csgraph.shortest_path(
        graph.adjacency, method="D", unweighted=True, directed=False, indices=above
    )[:, above]
    differ = np.argwhere(inner != outer)
    if not len(differ):
        return None
    i, j = differ[0]
    return graph.vertices[above[i]].id, graph.vertices[above[j]].id


def quotient_embedding_check(
    group: FiniteGroup,
    n: Subgroup,
    p: int,
    settings: Settings = DEFAULT_SETTINGS,
    store: Optional[LatticeStore] = None,
) -> bool:
    """K -> preimage of K is an isometric embedding of the graph of G/N

    Raises:
        NotNormalError: N is not normal in the group
    """
    if not is_normal(group, n):
        raise NotNormalError(f"{n!r} is not normal in {group.descriptor}")
    graph = build_graph(group, p, settings, store)
    return find_quotient_embedding_violation(graph, n) is None


def embedding_isometry_check(
    group: FiniteGroup,
    n: Subgroup,
    p: int,
    settings: Settings = DEFAULT_SETTINGS,
    store: Optional[LatticeStore] = None,
) -> bool:
    """Distances in the graph of N agree with distances in the graph of G

    The graph of N is built from N's own lattice and matched to G's vertices
    by element codes.
    """
    outer = build_graph(group, p, settings, store)
    inner_group = n.as_group()
    inner = build_graph(inner_group, p, settings)
    assert inner.subgroups is not None and outer.subgroups is not None
    by_mask = {s.mask: i for i, s in enumerate(outer.subgroups)}
    mapping = [
        by_mask[to_mask(group.indices_of_codes(inner_group.codes[s.indices]), group.order)]
        for s in inner.subgroups
    ]
    inner_dist = inner.all_distances()
    outer_dist = csgraph.shortest_path(
        outer.adjacency, method="D", unweighted=True, directed=False, indices=mapping
    )[:, mapping]
    return bool(np.array_equal(inner_dist, outer_dist))


def explore_component(
    group: FiniteGroup,
    seed: Subgroup,
    p: int,
    settings: Settings = DEFAULT_SETTINGS,
) -> CommGraph:
    """The component of `seed` found by local search, without the full lattice

    A neighbour B of A meets A in a subgroup C of p-power index in A, and has
    p-power index over C. So the neighbours of A are the overgroups of p-power
    index of the subgroups of p-power index of A, other than A itself.
    """
    require_prime(p)
    candidates, _, _ = extension_candidates(group, np.arange(group.order), None)
    overgroups: Dict[int, List[Subgroup]] = {}

    def below(a: Subgroup) -> List[Subgroup]:
        inner = a.as_group()
        found = []
        for sub in lattice_of(inner, settings):
            if is_power_of(a.order // sub.order, p):
                indices = group.indices_of_codes(inner.codes[sub.indices])
                found.append(Subgroup.from_indices(group, indices))
        return found

    def above(c: Subgroup) -> List[Subgroup]:
        if c.mask in overgroups:
            return overgroups[c.mask]
        bound = c.order * p_part(group.order // c.order, p)
        found = {c.mask: c}
        frontier = [c]
        while frontier:
            x = frontier.pop()
            for z in candidates:
                if (x.mask >> z) & 1:
                    continue
                closed = group.generate(
                    [z], base=x.indices, base_gens=x.generator_indices, max_order=bound
                )
                if closed is None or not is_power_of(len(closed[0]) // c.order, p):
                    continue
                mask = to_mask(closed[0], group.order)
                if mask not in found:
                    found[mask] = Subgroup.from_indices(group, *closed)
                    frontier.append(found[mask])
        overgroups[c.mask] = list(found.values())
        return overgroups[c.mask]

    visited = {seed.mask: seed}
    queue = deque([seed])
    while queue:
        a = queue.popleft()
        for c in below(a):
            for b in above(c):
                if b.mask not in visited:
                    visited[b.mask] = b
                    queue.append(b)
    logger.info(
        "Component of %r in %s at p=%d has %d vertices",
        seed,
        group.descriptor,
        p,
        len(visited),
    )
    return graph_on(group, list(visited.values()), p)


def infinite_components_witness(graph: CommGraph) -> Dict[int, str]:
    """For each prime q != p that occurs as an index, one vertex of index q

    Vertices of distinct prime indices q lie in distinct components, since
    the non-p part of the index is constant on a component.

    Raises:
        ComponentInvariantError: Two of the chosen vertices share a component
    """
    _, labels = csgraph.connected_components(graph.adjacency, directed=False)
    chosen: Dict[int, str] = {}
    seen: Dict[int, int] = {}
    for position, vertex in enumerate(graph.vertices):
        q = vertex.index
        if q == graph.prime or q in chosen or not isprime(q):
            continue
        label = int(labels[position])
        if label in seen:
            raise ComponentInvariantError(
                f"Vertices of index {seen[label]} and {q} share a component"
            )
        seen[label] = q
        chosen[q] = vertex.id
    return dict(sorted(chosen.items()))


class DiameterBound(NamedTuple):
    component: int
    diameter: int
    images: int

    @property
    def bound(self) -> int:
        return self.images + 2

    @property
    def holds(self) -> bool:
        return self.diameter < self.bound


def diameter_bound_from_quotient(
    graph: CommGraph, reports: Optional[Sequence[ComponentReport]] = None
) -> List[DiameterBound]:
    """Per component, the diameter against |D| + 2

    D is the set of joins BN over the component's vertices B, with N the
    normal core of the component's first vertex.

    Raises:
        ComponentInvariantError: Some BN leaves the component, or B and BN are
            neither equal nor adjacent
    """
    if graph.subgroups is None:
        raise ValueError(f"Graph of {graph.group} carries no subgroups")
    reports = reports if reports is not None else components(graph)
    by_mask = {s.mask: i for i, s in enumerate(graph.subgroups)}
    bounds = []
    for report in reports:
        members = [graph.position(v) for v in report.vertices]
        first = graph.subgroups[members[0]]
        core = normal_core(first.ambient, first)
        images = set()
        for m in members:
            joined = by_mask[join(graph.subgroups[m], core).mask]
            if joined not in members:
                raise ComponentInvariantError(
                    f"Join with the core leaves component {report.component}"
                )
            if joined != m and not graph.is_adjacent(m, joined):
                raise ComponentInvariantError(
                    f"{graph.vertices[m].id} is not adjacent to its join with the core"
                )
            images.add(joined)
        bounds.append(DiameterBound(report.component, report.diameter, len(images)))
    return bounds


def conjugation_automorphism_check(graph: CommGraph, element: int) -> bool:
    """V -> gVg^-1 maps edges to edges and non-edges to non-edges"""
    if graph.subgroups is None:
        raise ValueError(f"Graph of {graph.group} carries no subgroups")
    by_mask = {s.mask: i for i, s in enumerate(graph.subgroups)}
    image = np.array(
        [by_mask[conjugate_by(s, element).mask] for s in graph.subgroups], dtype=np.intp
    )
    moved = graph.adjacency[image][:, image]
    return (moved != graph.adjacency).nnz == 0


# Import and export


def to_document(graph: CommGraph) -> GraphDocument:
    return GraphDocument(
        group=graph.group,
        prime=graph.prime,
        vertices=graph.vertices,
        edges=graph.edges(),
    )


def export_json(graph: CommGraph) -> str:
    return to_document(graph).model_dump_json(by_alias=True, indent=2)


def import_json(text: str) -> CommGraph:
    """Rebuild a graph from its JSON export (without subgroups)

    Raises:
        GraphFormatError: Malformed JSON or schema violation
    """
    try:
        document = GraphDocument.model_validate_json(text)
    except ValidationError as e:
        raise GraphFormatError(f"Invalid graph document: {e}") from e
    return CommGraph.from_edges(
        document.group, document.prime, document.vertices, document.edges
    )


def export_dot(graph: CommGraph, coloring: bool = True, valences: bool = True) -> str:
    """Graphviz DOT text; class tags pick fill colours, labels carry valences"""
    lines = [f'graph "Gamma_{graph.prime}({graph.group})" {{']
    degrees = graph.valences
    for position, vertex in enumerate(graph.vertices):
        label = vertex.id
        if valences:
            label = f"{label}\\n{degrees[position]}"
        attributes = [f'label="{label}"']
        colour = CLASS_COLOURS.get(vertex.class_tag or "")
        if coloring and colour:
            attributes += ["style=filled", f'fillcolor="{colour}"']
        lines.append(f'  "{vertex.id}" [{", ".join(attributes)}];')
    for i, j in graph.edges():
        lines.append(f'  "{graph.vertices[i].id}" -- "{graph.vertices[j].id}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
