"""
Components of the commensurability graph of an alternating group Alt_X

For an odd prime p and q = p^k > 4 the component of Alt_S, |S| = q, consists
of the subgroups Alt_T x P with P a p-subgroup of Alt on the complement of T
and |T| = q ("type1") or |T| = q - 1 ("type2"). The B-graph is the induced
subgraph on the pure vertices Alt_T. Its edges follow from subset sizes:

    type1 - type1   iff |T1 ∩ T2| = q - 1
    type1 - type2   iff T2 ⊂ T1
    type2 - type2   never

These rules are cross-checked against group-theoretic adjacency on
realized subgroups. The ambient Alt_X is never enumerated here except by
`conncomp_closure`, which needs its full lattice.
"""

import itertools
import logging
import math
from functools import lru_cache
from typing import Dict, Iterable, List, Literal, NamedTuple, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.sparse import csgraph

from .catalog import (
    alt_generators,
    alt_on_subset,
    alternating,
    direct_product,
    parse_descriptor,
    realize,
    relabel,
)
from .config import DEFAULT_SETTINGS, Settings
from .exceptions import AltParameterError, CapExceededError
from .graphs import (
    CommGraph,
    build_graph,
    component_positions,
    explore_component,
    groups_adjacent,
)
from .groups import FiniteGroup, generators_descriptor
from .lattice import (
    LatticeStore,
    as_subgroup,
    is_power_of,
    lattice_of,
    p_part,
    p_subgroups,
    prime_power_index_subgroups,
    require_prime,
)
from .models import VertexRecord
from .permutations import Permutation, parse_cycles

logger = logging.getLogger(__name__)

TypeTag = Literal["type1", "type2"]
Subset = Tuple[int, ...]


def _kinds(q: int) -> Tuple[Tuple[int, TypeTag], ...]:
    return ((q, "type1"), (q - 1, "type2"))


def _alt_order(size: int) -> int:
    return max(1, math.factorial(size) // 2)


def alt_label(points: Iterable[int]) -> str:
    return "Alt{" + ",".join(str(t) for t in sorted(points)) + "}"


def _power(p: int, k: int) -> int:
    require_prime(p)
    if k < 1:
        raise AltParameterError(f"Exponent k must be positive, got {k}")
    q = p**k
    if q <= 4:
        raise AltParameterError(f"Need p^k > 4, got {p}^{k} = {q}")
    return q


def _check_x(x_degree: int, q: int) -> None:
    if x_degree < q:
        raise AltParameterError(f"Need p^k = {q} <= |X| = {x_degree}")


class AltVertex(BaseModel):
    """A classified vertex Alt_T x P of a component of Γ_p(Alt_X)"""

    model_config = ConfigDict(frozen=True)

    x_degree: int
    points: Subset
    # "gens:" descriptor of P on X, "gens:X:()" when P is trivial
    p_factor: str
    p_order: int = 1
    type_tag: TypeTag

    @property
    def label(self) -> str:
        if self.p_order == 1:
            return alt_label(self.points)
        return alt_label(self.points) + "x<" + self.p_factor.split(":", 2)[2] + ">"

    @property
    def order(self) -> int:
        return _alt_order(len(self.points)) * self.p_order

    @property
    def is_pure(self) -> bool:
        return self.p_order == 1

    def generators(self) -> List[Permutation]:
        gens = alt_generators(self.points, self.x_degree)
        if not self.is_pure:
            cycles = parse_descriptor(self.p_factor).cycles
            gens += [parse_cycles(c, self.x_degree) for c in cycles]
        return gens

    def realize(self, settings: Settings = DEFAULT_SETTINGS) -> FiniteGroup:
        """Alt_T x P as a permutation group of degree |X|"""
        return FiniteGroup.from_generators(self.x_degree, self.generators(), settings=settings)


def _complement_p_groups(
    x_degree: int, points: Subset, p: int, settings: Settings
) -> List[Tuple[str, int]]:
    """(descriptor, order) of every p-subgroup of Alt on X minus `points`"""
    rest = [t for t in range(1, x_degree + 1) if t not in points]
    trivial = generators_descriptor(x_degree, [])
    if len(rest) < 3:
        return [(trivial, 1)]
    found = []
    for sub in _canonical_p_subgroups(len(rest), p, settings):
        gens = [relabel(g, rest, x_degree) for g in sub[0]]
        found.append((generators_descriptor(x_degree, gens) if gens else trivial, sub[1]))
    return found


@lru_cache(maxsize=32)
def _canonical_p_subgroups(size: int, p: int, settings: Settings) -> List[Tuple[List, int]]:
    group = alternating(size, settings)
    return [(s.generators, s.order) for s in p_subgroups(group, p, settings)]


def classified_vertices(
    x_degree: int, p: int, k: int, settings: Settings = DEFAULT_SETTINGS
) -> List[AltVertex]:
    """Every type1 and type2 vertex of the component of Alt_{1..p^k}

    type1 vertices come first, then type2; within a type T runs through
    combinations in lexicographic order and P through the p-subgroups of the
    complement in (order, id) order.

    Raises:
        AltParameterError: p = 2, p^k <= 4 or p^k > |X|
        CapExceededError: A complement is larger than the complement cap
    """
    q = _power(p, k)
    if p == 2:
        raise AltParameterError("The classification is only exact for odd primes")
    _check_x(x_degree, q)
    if x_degree - q + 1 > settings.complement_cap:
        raise CapExceededError(
            f"Complement of {x_degree - q + 1} points exceeds the cap {settings.complement_cap}"
        )
    vertices = []
    for size, tag in _kinds(q):
        for points in itertools.combinations(range(1, x_degree + 1), size):
            for descriptor, order in _complement_p_groups(x_degree, points, p, settings):
                vertices.append(
                    AltVertex(
                        x_degree=x_degree,
                        points=points,
                        p_factor=descriptor,
                        p_order=order,
                        type_tag=tag,
                    )
                )
    logger.debug("Classified %d vertices for X=%d, p=%d, k=%d", len(vertices), x_degree, p, k)
    return vertices


def recover_points(group: FiniteGroup, p: int) -> Subset:
    """The set T of a realized Alt_T x P: the orbits on which the group does not act as a p-group"""
    seen = set()
    points: List[int] = []
    for start in range(group.degree):
        if start in seen:
            continue
        orbit = sorted(set(int(x) for x in group.images[:, start]))
        seen.update(orbit)
        action = np.unique(group.images[:, orbit], axis=0)
        if not is_power_of(len(action), p):
            points.extend(t + 1 for t in orbit)
    return tuple(sorted(points))


# B-graph


class BGraph:
    """Pure alternating vertices Alt_T with |T| in {q, q-1} and their edges"""

    def __init__(self, x_degree: int, p: int, k: int) -> None:
        self.x_degree = x_degree
        self.p = p
        self.k = k
        self.q = p**k
        self.subsets: List[Subset] = []
        self.types: List[TypeTag] = []
        for size, tag in _kinds(self.q):
            for points in itertools.combinations(range(1, x_degree + 1), size):
                self.subsets.append(points)
                self.types.append(tag)
        self.positions: Dict[Subset, int] = {s: i for i, s in enumerate(self.subsets)}
        self.graph = CommGraph.from_edges(
            f"alt:{x_degree}", p, self._vertex_records(), self._edges()
        )

    def _vertex_records(self) -> List[VertexRecord]:
        ambient = _alt_order(self.x_degree)
        return [
            VertexRecord(
                id=alt_label(points),
                order=_alt_order(len(points)),
                index=ambient // _alt_order(len(points)),
                generators=[g.cycle_string() for g in alt_generators(points, self.x_degree)],
                class_tag=tag,
            )
            for points, tag in zip(self.subsets, self.types)
        ]

    def _edges(self) -> List[Tuple[int, int]]:
        edges: Set[Tuple[int, int]] = set()
        everything = range(1, self.x_degree + 1)
        for i, points in enumerate(self.subsets):
            if len(points) != self.q:
                continue
            for removed in points:
                smaller = tuple(t for t in points if t != removed)
                edges.add((min(i, self.positions[smaller]), max(i, self.positions[smaller])))
                for added in everything:
                    if added in points:
                        continue
                    swapped = tuple(sorted(smaller + (added,)))
                    j = self.positions[swapped]
                    edges.add((min(i, j), max(i, j)))
        return sorted(edges)

    def __len__(self) -> int:
        return len(self.subsets)

    def position(self, points: Iterable[int]) -> int:
        key = tuple(sorted(points))
        if key not in self.positions:
            raise AltParameterError(f"{alt_label(key)} is not a vertex of the B-graph")
        return self.positions[key]

    def is_adjacent(self, a: Iterable[int], b: Iterable[int]) -> bool:
        return self.graph.is_adjacent(self.position(a), self.position(b))

    def type_counts(self) -> Dict[str, int]:
        return {tag: self.types.count(tag) for _, tag in _kinds(self.q)}

    def valences_by_type(self) -> Dict[str, List[int]]:
        degrees = self.graph.valences
        found: Dict[str, set] = {"type1": set(), "type2": set()}
        for position, tag in enumerate(self.types):
            found[tag].add(int(degrees[position]))
        return {tag: sorted(values) for tag, values in found.items()}


def b_graph(x_degree: int, p: int, k: int) -> BGraph:
    """The B-graph of Alt_X for q = p^k

    Raises:
        AltParameterError: p^k <= 4 or p^k > |X|
    """
    q = _power(p, k)
    _check_x(x_degree, q)
    graph = BGraph(x_degree, p, k)
    logger.info(
        "B-graph X=%d p=%d k=%d: %d vertices, %d edges",
        x_degree,
        p,
        k,
        len(graph),
        graph.graph.edge_count,
    )
    return graph


def _full_subset(bg: BGraph, points: Iterable[int]) -> Subset:
    key = tuple(sorted(points))
    if len(key) != bg.q or len(set(key)) != bg.q:
        raise AltParameterError(f"{alt_label(key)} does not have {bg.q} points")
    return key


def b_distance(bg: BGraph, o1: Iterable[int], o2: Iterable[int]) -> int:
    """Path distance between Alt_{O1} and Alt_{O2}, |O1| = |O2| = p^k

    Raises:
        AltParameterError: A subset has the wrong size, or the two vertices
            lie in different components
    """
    first, second = _full_subset(bg, o1), _full_subset(bg, o2)
    value = bg.graph.distances_from(bg.position(first))[bg.position(second)]
    if np.isinf(value):
        raise AltParameterError(
            f"{alt_label(first)} and {alt_label(second)} are not connected"
        )
    return int(value)


def longpaths_bound(p: int, k: int, x_size: int) -> int:
    """p^k - max(0, 2p^k - |X|), a lower bound on the distance between disjoint
    (or minimally overlapping) Alt_{O1} and Alt_{O2}"""
    q = _power(p, k)
    return q - max(0, 2 * q - x_size)


def step_kind(a: Subset, b: Subset) -> Optional[str]:
    """How T changes along an edge: "move", "add" or "remove", None otherwise"""
    left, right = set(a), set(b)
    if len(left) == len(right) and len(left - right) == 1:
        return "move"
    if right > left and len(right - left) == 1:
        return "add"
    if left > right and len(left - right) == 1:
        return "remove"
    return None


class PathWitness(NamedTuple):
    subsets: List[Subset]
    verified: bool

    @property
    def length(self) -> int:
        return len(self.subsets) - 1

    @property
    def labels(self) -> List[str]:
        return [alt_label(s) for s in self.subsets]


@lru_cache(maxsize=4096)
def _realized_alt(x_degree: int, points: Subset, settings: Settings) -> FiniteGroup:
    return alt_on_subset(x_degree, points, settings)


def longpaths_witness(
    bg: BGraph, o1: Iterable[int], o2: Iterable[int], settings: Settings = DEFAULT_SETTINGS
) -> PathWitness:
    """A geodesic from Alt_{O1} to Alt_{O2} with every edge re-verified on
    realized subgroups and every step a move, add or remove"""
    first, second = _full_subset(bg, o1), _full_subset(bg, o2)
    path = bg.graph.geodesic_positions(bg.position(first), bg.position(second))
    assert path is not None
    subsets = [bg.subsets[i] for i in path]
    verified = True
    for a, b in zip(subsets, subsets[1:]):
        left = _realized_alt(bg.x_degree, a, settings)
        right = _realized_alt(bg.x_degree, b, settings)
        if not groups_adjacent(left, right, bg.p) or step_kind(a, b) is None:
            verified = False
    return PathWitness(subsets, verified)


def bgraph_agreement_check(
    bg: BGraph,
    samples: Optional[int] = None,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> Optional[Tuple[str, str]]:
    """Compare the subset rules with adjacency of realized Alt_T's

    Every pair when `samples` is None, otherwise that many random pairs.
    Returns the first disagreeing pair of labels, or None.
    """
    size = len(bg)
    if samples is None:
        pairs: Iterable[Tuple[int, int]] = itertools.combinations(range(size), 2)
    else:
        rng = np.random.default_rng(seed)
        pairs = [tuple(int(v) for v in rng.choice(size, 2, replace=False)) for _ in range(samples)]
    for i, j in pairs:
        left = _realized_alt(bg.x_degree, bg.subsets[i], settings)
        right = _realized_alt(bg.x_degree, bg.subsets[j], settings)
        if groups_adjacent(left, right, bg.p) != bg.graph.is_adjacent(i, j):
            return alt_label(bg.subsets[i]), alt_label(bg.subsets[j])
    return None


def bound_sweep(
    p: int,
    k: int,
    x_size: int,
    samples: int = 20,
    seed: int = DEFAULT_SETTINGS.seed,
) -> Optional[Tuple[Subset, Subset, int]]:
    """Sample O1, O2 with |O1 ∩ O2| <= max(0, 2p^k - |X|) and compare the
    B-graph distance with the bound; returns the first violation"""
    bg = b_graph(x_size, p, k)
    q = bg.q
    bound = longpaths_bound(p, k, x_size)
    overlap = max(0, 2 * q - x_size)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        o1 = tuple(sorted(int(v) for v in rng.choice(np.arange(1, x_size + 1), q, replace=False)))
        shared = [int(v) for v in rng.choice(o1, overlap, replace=False)] if overlap else []
        rest = [t for t in range(1, x_size + 1) if t not in o1]
        fresh = [int(v) for v in rng.choice(rest, q - len(shared), replace=False)]
        o2 = tuple(sorted(shared + fresh))
        found = b_distance(bg, o1, o2)
        if found < bound:
            return o1, o2, found
    return None


# Brute-force checks on realized subgroups


def verify_altoverlap(
    ambient_degree: int,
    t1: Iterable[int],
    t2: Iterable[int],
    settings: Settings = DEFAULT_SETTINGS,
) -> bool:
    """⟨Alt_{T1}, Alt_{T2}⟩ = Alt_{T1 ∪ T2}, by element-set equality

    Raises:
        AltParameterError: |T1| or |T2| below 4, or |T1 ∩ T2| below 2
    """
    first, second = sorted(set(t1)), sorted(set(t2))
    if len(first) < 4 or len(second) < 4:
        raise AltParameterError("Both sets need at least 4 points")
    if len(set(first) & set(second)) < 2:
        raise AltParameterError("The sets must share at least 2 points")
    generated = FiniteGroup.from_generators(
        ambient_degree,
        alt_generators(first, ambient_degree) + alt_generators(second, ambient_degree),
        settings=settings,
    )
    union = alt_on_subset(ambient_degree, set(first) | set(second), settings)
    return bool(np.array_equal(generated.codes, union.codes))


def _shape(s_size: int, p: int) -> Tuple[int, int]:
    """(k, q) with q = p^k > 4 and s_size in {q, q - 1}"""
    require_prime(p)
    for k in range(1, 64):
        q = p**k
        if q > s_size + 1:
            break
        if q > 4 and s_size in (q, q - 1):
            return k, q
    raise AltParameterError(f"|S| = {s_size} is neither p^k nor p^k - 1 for p = {p}")


def verify_decomp(
    s_size: int,
    complement: str,
    p: int,
    ambient_degree: Optional[int] = None,
    settings: Settings = DEFAULT_SETTINGS,
    store: Optional[LatticeStore] = None,
) -> bool:
    """Every p-power-index subgroup E of Alt_S x P splits as Alt_T x P'

    S is {1..s_size}, P is the p-group named by `complement` moved onto the
    following points, T ⊆ S and |T| in {p^k, p^k - 1}.

    Raises:
        AltParameterError: Bad |S|, or the product does not fit in the ambient degree
    """
    _, q = _shape(s_size, p)
    factor = realize(parse_descriptor(complement), settings)
    if not is_power_of(factor.order, p):
        raise AltParameterError(f"{complement} is not a {p}-group")
    group = direct_product(alternating(s_size, settings), factor, settings=settings)
    if ambient_degree is not None and group.degree > ambient_degree:
        raise AltParameterError(
            f"Alt_S x P needs {group.degree} points, ambient has {ambient_degree}"
        )
    lattice_of(group, settings, store)
    identity = np.arange(group.degree, dtype=np.uint8)
    on_s = (group.images[:, s_size:] == identity[s_size:]).all(axis=1)
    on_complement = (group.images[:, :s_size] == identity[:s_size]).all(axis=1)

    for sub in prime_power_index_subgroups(group, p, settings):
        alt_part = sub.indices[on_s[sub.indices]]
        complement_size = int(on_complement[sub.indices].sum())
        if len(alt_part) * complement_size != sub.order:
            logger.debug("%r does not split", sub)
            return False
        moved = np.flatnonzero((group.images[alt_part] != identity).any(axis=0))
        if len(moved) not in (q, q - 1) or len(alt_part) != _alt_order(len(moved)):
            logger.debug("%r has alternating part on %d points", sub, len(moved))
            return False
    return True


def guralnick_check(
    s_size: int,
    p: int,
    settings: Settings = DEFAULT_SETTINGS,
    store: Optional[LatticeStore] = None,
) -> bool:
    """The p-power-index subgroups of Alt_S are Alt_S and, when |S| = p^k, the
    point stabilizers Alt_{S - v}

    Raises:
        AltParameterError: |S| is neither p^k nor p^k - 1
    """
    _, q = _shape(s_size, p)
    group = alternating(s_size, settings)
    lattice_of(group, settings, store)
    allowed = {as_subgroup(group, group).mask}
    if s_size == q:
        for v in range(1, s_size + 1):
            rest = [t for t in range(1, s_size + 1) if t != v]
            stabilizer = alt_on_subset(s_size, rest, settings)
            allowed.add(as_subgroup(group, stabilizer).mask)
    found = {s.mask for s in prime_power_index_subgroups(group, p, settings)}
    return found == allowed


class ClosureResult(NamedTuple):
    matches: bool
    component_size: int
    classified_size: int
    type_counts: Dict[str, int]
    edge_count: int
    valences: Dict[str, List[int]]
    geodesics_agree: bool


def conncomp_closure(
    x_degree: int,
    p: int,
    k: int,
    settings: Settings = DEFAULT_SETTINGS,
    store: Optional[LatticeStore] = None,
    samples: int = 50,
) -> ClosureResult:
    """Compare the component of Alt_{1..p^k} in the full graph of Alt_X with
    the classified vertex set, and B-graph distances with full-graph distances"""
    q = _power(p, k)
    vertices = classified_vertices(x_degree, p, k, settings)
    group = alternating(x_degree, settings)
    graph = build_graph(group, p, settings, store)
    assert graph.subgroups is not None
    seed = as_subgroup(group, alt_on_subset(x_degree, range(1, q + 1), settings))
    seed_position = graph.positions[seed.id]
    members = next(m for m in component_positions(graph) if seed_position in m)
    component = {graph.subgroups[m].mask for m in members}

    classified: Dict[int, AltVertex] = {}
    for vertex in vertices:
        classified[as_subgroup(group, vertex.realize(settings)).mask] = vertex

    inner = graph.adjacency[members][:, members]
    by_mask = {graph.subgroups[m].mask: i for i, m in enumerate(members)}
    valences: Dict[str, set] = {"type1": set(), "type2": set()}
    degrees = np.diff(inner.indptr)
    for mask, vertex in classified.items():
        if mask in by_mask:
            valences[vertex.type_tag].add(int(degrees[by_mask[mask]]))

    bg = b_graph(x_degree, p, k)
    full = csgraph.shortest_path(inner, method="D", unweighted=True, directed=False)
    pure = [
        by_mask.get(as_subgroup(group, _realized_alt(x_degree, s, settings)).mask)
        for s in bg.subsets
    ]
    rng = np.random.default_rng(settings.seed)
    type1 = [i for i, tag in enumerate(bg.types) if tag == "type1"]
    agree = True
    for _ in range(samples):
        i, j = (int(v) for v in rng.choice(type1, 2))
        if pure[i] is None or pure[j] is None:
            agree = False
            break
        if b_distance(bg, bg.subsets[i], bg.subsets[j]) != int(full[pure[i], pure[j]]):
            agree = False
            break

    counts = {"type1": 0, "type2": 0}
    for vertex in vertices:
        counts[vertex.type_tag] += 1
    return ClosureResult(
        matches=component == set(classified),
        component_size=len(component),
        classified_size=len(classified),
        type_counts=counts,
        edge_count=int(inner.nnz // 2),
        valences={tag: sorted(v) for tag, v in valences.items()},
        geodesics_agree=agree,
    )


def verify_conncomp_closure(
    x_degree: int,
    p: int,
    k: int,
    settings: Settings = DEFAULT_SETTINGS,
    store: Optional[LatticeStore] = None,
) -> bool:
    """The brute-forced component of Alt_{1..p^k} is exactly the classified set"""
    return conncomp_closure(x_degree, p, k, settings, store).matches


def classified_recovery_check(
    vertices: Sequence[AltVertex], p: int, settings: Settings = DEFAULT_SETTINGS
) -> bool:
    """Distinct classified vertices realize distinct subgroups, each giving back its T"""
    seen = set()
    for vertex in vertices:
        group = vertex.realize(settings)
        if recover_points(group, p) != vertex.points:
            return False
        key = group.codes.tobytes()
        if key in seen:
            return False
        seen.add(key)
    return True


def component_normal_free(x_degree: int, p: int, k: int) -> bool:
    """The classified component holds neither the trivial group nor Alt_X

    Every vertex Alt_T x P has order between (q-1)!/2 and
    (q!/2) * (p-part of |Alt_{X-T}|), which for X >= 5 are strictly between
    1 and |Alt_X|.
    """
    q = _power(p, k)
    _check_x(x_degree, q)
    smallest = _alt_order(q - 1)
    largest = max(
        _alt_order(size) * p_part(_alt_order(x_degree - size), p) for size in (q, q - 1)
    )
    return smallest > 1 and largest < _alt_order(x_degree)


class NonNormalWitness(NamedTuple):
    separated: bool
    component_size: int
    path: PathWitness


def nonnormal_embedding_witness(
    s_size: int = 5, p: int = 5, settings: Settings = DEFAULT_SETTINGS
) -> NonNormalWitness:
    """Alt_S and Alt_T sit in different components of Γ_p(Alt_S x Alt_T) but
    are joined by a path of pure alternating subgroups in Γ_p(Alt_{S ∪ T})"""
    x_degree = 2 * s_size
    k, _ = _shape(s_size, p)
    left = range(1, s_size + 1)
    right = range(s_size + 1, x_degree + 1)
    product = direct_product(
        alternating(s_size, settings), alternating(s_size, settings), settings=settings
    )
    alt_s = as_subgroup(product, alt_on_subset(x_degree, left, settings))
    alt_t = as_subgroup(product, alt_on_subset(x_degree, right, settings))
    component = explore_component(product, alt_s, p, settings)
    separated = alt_t.id not in component.positions
    bg = b_graph(x_degree, p, k)
    path = longpaths_witness(bg, left, right, settings)
    return NonNormalWitness(separated, len(component), path)
