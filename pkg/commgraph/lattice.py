"""
Subgroup lattices of finite permutation groups

A subgroup is a bitset over the element indices of its ambient group, so
intersection is `&`, containment is a mask test and deduplication is exact.

Enumeration grows subgroups one cyclic subgroup of prime-power order at a
time: every subgroup is generated by its elements of prime-power order, so
every subgroup is reached along a chain of such one-step extensions. Each
newly found subgroup is added together with its whole conjugacy class, and
only one member of each class is extended, by one representative of each
orbit of its normalizer on the cyclic extension candidates. The output is
the full list of subgroups sorted by (order, id).
"""

import hashlib
import heapq
import logging
import math
import weakref
from typing import Dict, Iterator, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from sympy import isprime, primefactors

from .config import DEFAULT_SETTINGS, Settings
from .exceptions import (
    AmbientMismatchError,
    NotASubgroupError,
    NotNilpotentError,
    SubgroupLimitError,
)
from .groups import FiniteGroup, from_mask, to_mask
from .permutations import Permutation

logger = logging.getLogger(__name__)


# Integer helpers


def require_prime(p: int) -> int:
    if not isprime(p):
        raise ValueError(f"{p} is not a prime")
    return p


def p_part(n: int, p: int) -> int:
    """Largest power of p dividing n

    Raises:
        ValueError: p is not a prime
    """
    require_prime(p)
    part = 1
    while n % p == 0:
        n //= p
        part *= p
    return part


def non_p_part(n: int, p: int) -> int:
    """Largest divisor of n coprime to p"""
    return n // p_part(n, p)


def is_power_of(n: int, p: int) -> bool:
    """True iff n = p^a for some a >= 0, so is_power_of(1, p) holds"""
    require_prime(p)
    return n >= 1 and non_p_part(n, p) == 1


def is_prime_power(n: int) -> bool:
    return n > 1 and len(primefactors(n)) == 1


class Index(BaseModel):
    """An index [H:K], optionally split at a prime"""

    model_config = ConfigDict(frozen=True)

    value: int = Field(ge=1)
    prime: Optional[int] = None

    def _require_prime(self) -> int:
        if self.prime is None:
            raise ValueError("Index has no contextual prime")
        return self.prime

    @property
    def p_part(self) -> int:
        return p_part(self.value, self._require_prime())

    @property
    def non_p_part(self) -> int:
        return non_p_part(self.value, self._require_prime())

    def is_power(self) -> bool:
        return is_power_of(self.value, self._require_prime())


# Subgroups


def subgroup_id(group: FiniteGroup, indices: np.ndarray) -> str:
    """Digest of the ambient descriptor and the sorted element list"""
    digest = hashlib.blake2b(digest_size=8)
    digest.update(group.descriptor.encode())
    digest.update(b"\0")
    digest.update(group.images[np.sort(indices)].tobytes())
    return digest.hexdigest()


class Subgroup:
    """A subgroup of a fully enumerated ambient group"""

    def __init__(
        self,
        ambient: FiniteGroup,
        mask: int,
        generator_indices: Optional[Sequence[int]] = None,
    ) -> None:
        self.ambient = ambient
        self.mask = mask
        self.order = mask.bit_count()
        self._generator_indices = (
            None if generator_indices is None else [int(g) for g in generator_indices]
        )
        self._indices: Optional[np.ndarray] = None
        self._id: Optional[str] = None

    @classmethod
    def from_indices(
        cls,
        ambient: FiniteGroup,
        indices: np.ndarray,
        generator_indices: Optional[Sequence[int]] = None,
    ) -> "Subgroup":
        sub = cls(ambient, to_mask(indices, ambient.order), generator_indices)
        sub._indices = np.sort(np.asarray(indices, dtype=np.intp))
        return sub

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.ambient is other.ambient and self.mask == other.mask

    def __hash__(self) -> int:
        return hash((id(self.ambient), self.mask))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, id={self.id!r}, ambient={self.ambient.descriptor!r})"

    @property
    def indices(self) -> np.ndarray:
        if self._indices is None:
            self._indices = from_mask(self.mask, self.ambient.order)
        return self._indices

    @property
    def id(self) -> str:
        if self._id is None:
            self._id = subgroup_id(self.ambient, self.indices)
        return self._id

    @property
    def sort_key(self) -> Tuple[int, str]:
        return (self.order, self.id)

    @property
    def elements(self) -> List[Permutation]:
        return [self.ambient.element(int(i)) for i in self.indices]

    @property
    def generator_indices(self) -> List[int]:
        """A small generating set, as element indices of the ambient group"""
        if self._generator_indices is None:
            orders = self.ambient.element_orders
            by_order = sorted(self.indices, key=lambda e: (-int(orders[e]), int(e)))
            current = np.array([0], dtype=np.intp)
            member = np.zeros(self.ambient.order, dtype=bool)
            member[0] = True
            gens: List[int] = []
            for element in by_order:
                if len(current) == self.order:
                    break
                if member[element]:
                    continue
                closed = self.ambient.generate([element], base=current, base_gens=gens)
                assert closed is not None
                current, gens = closed
                member[current] = True
            self._generator_indices = gens
        return self._generator_indices

    @property
    def generators(self) -> List[Permutation]:
        return [self.ambient.element(g) for g in self.generator_indices]

    def generator_strings(self) -> List[str]:
        return [g.cycle_string() for g in self.generators]

    def contains(self, other: Union["Subgroup", Permutation]) -> bool:
        if isinstance(other, Permutation):
            if not self.ambient.contains(other):
                return False
            return bool((self.mask >> self.ambient.index_of(other)) & 1)
        _check_ambient(self, other)
        return other.mask & ~self.mask == 0

    def as_group(self, descriptor: Optional[str] = None) -> FiniteGroup:
        """The subgroup as a stand-alone permutation group"""
        return FiniteGroup(
            self.ambient.degree,
            self.ambient.images[self.indices],
            self.generators,
            descriptor,
        )


GroupLike = Union[FiniteGroup, Subgroup]


def _check_ambient(a: Subgroup, b: Subgroup) -> None:
    if a.ambient is not b.ambient:
        raise AmbientMismatchError(
            f"Subgroups of {a.ambient.descriptor} and {b.ambient.descriptor} cannot be combined"
        )


def whole(group: GroupLike) -> Subgroup:
    """The group itself as a subgroup (identity on subgroups)"""
    if isinstance(group, Subgroup):
        return group
    everything = np.arange(group.order)
    return Subgroup.from_indices(
        group, everything, [group.index_of(g) for g in group.generators]
    )


def trivial(group: FiniteGroup) -> Subgroup:
    return Subgroup.from_indices(group, np.array([0]), [])


def as_subgroup(ambient: FiniteGroup, group: FiniteGroup) -> Subgroup:
    """Embed a group of the same degree as a subgroup of `ambient`

    Raises:
        NotASubgroupError: Some element of `group` is outside `ambient`
    """
    if group.degree != ambient.degree:
        raise NotASubgroupError(
            f"Degree {group.degree} group is not inside degree {ambient.degree} group"
        )
    indices = ambient.indices_of_codes(group.codes)
    gens = [ambient.index_of(g) for g in group.generators]
    return Subgroup.from_indices(ambient, indices, gens)


def generated_subgroup(ambient: FiniteGroup, seed: Sequence[Permutation]) -> Subgroup:
    """Smallest subgroup containing `seed`

    Raises:
        NotASubgroupError: A seed element is outside `ambient`
    """
    seed_indices = [ambient.index_of(perm) for perm in seed]
    closed = ambient.generate(seed_indices)
    assert closed is not None
    indices, gens = closed
    return Subgroup.from_indices(ambient, indices, gens)


def intersect(a: Subgroup, b: Subgroup) -> Subgroup:
    _check_ambient(a, b)
    return Subgroup(a.ambient, a.mask & b.mask)


def join(a: Subgroup, b: Subgroup) -> Subgroup:
    """Subgroup generated by a and b"""
    _check_ambient(a, b)
    if a.contains(b):
        return a
    if b.contains(a):
        return b
    closed = a.ambient.generate(
        b.generator_indices, base=a.indices, base_gens=a.generator_indices
    )
    assert closed is not None
    return Subgroup.from_indices(a.ambient, *closed)


def index(h: Subgroup, k: Subgroup, p: Optional[int] = None) -> Index:
    """The index [H:K]

    Raises:
        NotASubgroupError: K is not contained in H
    """
    _check_ambient(h, k)
    if not h.contains(k):
        raise NotASubgroupError("Index requires K to be a subgroup of H")
    return Index(value=h.order // k.order, prime=p)


# Conjugation


def _membership(sub: Subgroup) -> np.ndarray:
    flags = np.zeros(sub.ambient.order, dtype=bool)
    flags[sub.indices] = True
    return flags


def normalizer(group: GroupLike, h: Subgroup) -> Subgroup:
    """Elements of `group` that conjugate H onto itself"""
    g = whole(group)
    _check_ambient(g, h)
    conj = g.ambient.conjugation
    stable = _membership(h)[conj[np.ix_(g.indices, h.indices)]].all(axis=1)
    return Subgroup.from_indices(g.ambient, g.indices[stable])


def is_normal(group: GroupLike, h: Subgroup) -> bool:
    g = whole(group)
    _check_ambient(g, h)
    if not g.contains(h):
        return False
    conj = g.ambient.conjugation
    return bool(_membership(h)[conj[np.ix_(g.indices, h.indices)]].all())


def normal_core(group: GroupLike, a: Subgroup) -> Subgroup:
    """Largest normal subgroup of `group` inside A: the intersection of all conjugates"""
    g = whole(group)
    _check_ambient(g, a)
    conj = g.ambient.conjugation
    kept = _membership(a)[conj[np.ix_(g.indices, a.indices)]].all(axis=0)
    return Subgroup.from_indices(g.ambient, a.indices[kept])


def _conjugate_masks(
    g: Subgroup, h_indices: np.ndarray, h_gens: Sequence[int], norm: np.ndarray
) -> Iterator[Tuple[int, List[int]]]:
    ambient = g.ambient
    table, conj = ambient.table, ambient.conjugation
    covered = np.zeros(ambient.order, dtype=bool)
    for element in g.indices:
        if covered[element]:
            continue
        covered[table[element, norm]] = True
        image = conj[element, h_indices]
        yield to_mask(image, ambient.order), [int(x) for x in conj[element, list(h_gens)]]


def conjugates(group: GroupLike, h: Subgroup) -> List[Subgroup]:
    """Distinct conjugates gHg^-1, g in `group`, sorted by (order, id)"""
    g = whole(group)
    _check_ambient(g, h)
    norm = normalizer(g, h).indices
    subs = [
        Subgroup(g.ambient, mask, gens)
        for mask, gens in _conjugate_masks(g, h.indices, h.generator_indices, norm)
    ]
    return sorted(subs, key=lambda s: s.sort_key)


def conjugate_by(h: Subgroup, element: int) -> Subgroup:
    """gHg^-1 for the element with index `element`"""
    conj = h.ambient.conjugation
    return Subgroup.from_indices(
        h.ambient, conj[element, h.indices], [int(conj[element, x]) for x in h.generator_indices]
    )


# Enumeration


def extension_candidates(
    group: FiniteGroup, within: np.ndarray, prime: Optional[int]
) -> Tuple[List[int], List[int], np.ndarray]:
    """One generator per cyclic subgroup of prime-power order, their masks,
    and a map from each generating element to its candidate number"""
    table = group.table
    orders = group.element_orders
    candidate_of = np.full(group.order, -1, dtype=np.intp)
    elements: List[int] = []
    masks: List[int] = []
    for e in within:
        e = int(e)
        order = int(orders[e])
        if candidate_of[e] >= 0 or not is_prime_power(order):
            continue
        if prime is not None and not is_power_of(order, prime):
            continue
        powers = [0]
        x = e
        while x != 0:
            powers.append(x)
            x = int(table[x, e])
        number = len(elements)
        prime_of_order = primefactors(order)[0]
        for k in range(1, order):
            if k % prime_of_order:
                candidate_of[powers[k]] = number
        elements.append(e)
        masks.append(to_mask(np.array(powers), group.order))
    return elements, masks, candidate_of


def _enumerate(
    group: FiniteGroup,
    within: Subgroup,
    prime: Optional[int],
    settings: Settings,
) -> List[Subgroup]:
    ambient_order = group.order
    conj = group.conjugation
    max_order = p_part(within.order, prime) if prime is not None else None
    elements, masks, candidate_of = extension_candidates(group, within.indices, prime)
    logger.debug(
        "Enumerating subgroups of %s inside %s (%d extension candidates)",
        within.order,
        group.descriptor,
        len(elements),
    )

    known: Dict[int, List[int]] = {}
    normalizers: Dict[int, np.ndarray] = {}
    queue: List[Tuple[int, str, int]] = []

    def add_class(indices: np.ndarray, gens: List[int]) -> None:
        sub = Subgroup.from_indices(group, indices, gens)
        norm = normalizer(within, sub).indices
        for mask, conj_gens in _conjugate_masks(within, indices, gens, norm):
            known.setdefault(mask, conj_gens)
        if len(known) > settings.subgroup_cap:
            raise SubgroupLimitError(
                f"{group.descriptor} has more than {settings.subgroup_cap} subgroups"
            )
        normalizers[sub.mask] = norm
        heapq.heappush(queue, (sub.order, sub.id, sub.mask))

    add_class(np.array([0]), [])
    while queue:
        _, _, rep_mask = heapq.heappop(queue)
        rep_indices = from_mask(rep_mask, ambient_order)
        rep_gens = known[rep_mask]
        norm = normalizers.pop(rep_mask)
        seen = np.zeros(len(elements), dtype=bool)
        for number, z in enumerate(elements):
            if seen[number]:
                continue
            seen[candidate_of[conj[norm, z]]] = True
            if masks[number] & ~rep_mask == 0:
                continue
            closed = group.generate(
                [z], base=rep_indices, base_gens=rep_gens, max_order=max_order
            )
            if closed is None:
                continue
            indices, gens = closed
            if prime is not None and not is_power_of(len(indices), prime):
                continue
            if to_mask(indices, ambient_order) in known:
                continue
            add_class(indices, gens)

    subs = [Subgroup(group, mask, gens) for mask, gens in known.items()]
    subs.sort(key=lambda s: s.sort_key)
    logger.info("%s: %d subgroups found", group.descriptor, len(subs))
    return subs


class SubgroupLattice:
    """All subgroups of a group, sorted by (order, id)"""

    def __init__(self, group: FiniteGroup, subgroups: Sequence[Subgroup]) -> None:
        self.group = group
        self.subgroups: List[Subgroup] = sorted(subgroups, key=lambda s: s.sort_key)
        self.positions: Dict[int, int] = {s.mask: i for i, s in enumerate(self.subgroups)}

    @classmethod
    def enumerate(
        cls, group: FiniteGroup, settings: Settings = DEFAULT_SETTINGS
    ) -> "SubgroupLattice":
        if group.order > settings.order_cap:
            raise SubgroupLimitError(
                f"{group.descriptor} of order {group.order} exceeds the order cap"
            )
        return cls(group, _enumerate(group, whole(group), None, settings))

    def __len__(self) -> int:
        return len(self.subgroups)

    def __iter__(self) -> Iterator[Subgroup]:
        return iter(self.subgroups)

    def __getitem__(self, position: int) -> Subgroup:
        return self.subgroups[position]

    def find(self, sub: Subgroup) -> Subgroup:
        """The lattice's own copy of a subgroup (same element set)"""
        return self.subgroups[self.position(sub)]

    def position(self, sub: Subgroup) -> int:
        try:
            return self.positions[sub.mask]
        except KeyError as e:
            raise NotASubgroupError(f"{sub!r} is not in the lattice") from e

    def of_order(self, order: int) -> List[Subgroup]:
        return [s for s in self.subgroups if s.order == order]

    def contained_in(self, h: Subgroup) -> List[Subgroup]:
        return [s for s in self.subgroups if h.contains(s)]

    def containing(self, n: Subgroup) -> List[Subgroup]:
        return [s for s in self.subgroups if s.contains(n)]

    def normal_subgroups(self) -> List[Subgroup]:
        return [s for s in self.subgroups if is_normal(self.group, s)]


class LatticeStore(Protocol):
    """Persistent storage for lattices, keyed by group descriptor"""

    def load(self, group: FiniteGroup) -> Optional[SubgroupLattice]:
        ...

    def store(self, lattice: SubgroupLattice) -> None:
        ...


_LATTICES: "weakref.WeakKeyDictionary[FiniteGroup, SubgroupLattice]" = (
    weakref.WeakKeyDictionary()
)


def lattice_of(
    group: FiniteGroup,
    settings: Settings = DEFAULT_SETTINGS,
    store: Optional[LatticeStore] = None,
) -> SubgroupLattice:
    """The subgroup lattice of a group, memoized per group object

    Args:
        group (FiniteGroup): Group to enumerate
        settings (Settings, optional): Caps. Defaults to DEFAULT_SETTINGS.
        store (Optional[LatticeStore], optional): Disk cache consulted before
            enumerating and updated afterwards. Defaults to None.

    Raises:
        SubgroupLimitError: Order or subgroup-count cap exceeded

    Returns:
        SubgroupLattice: The lattice
    """
    lattice = _LATTICES.get(group)
    if lattice is None and store is not None:
        lattice = store.load(group)
    if lattice is None:
        lattice = SubgroupLattice.enumerate(group, settings)
        if store is not None:
            store.store(lattice)
    _LATTICES[group] = lattice
    return lattice


def all_subgroups(group: FiniteGroup, settings: Settings = DEFAULT_SETTINGS) -> List[Subgroup]:
    """Every subgroup exactly once, sorted by (order, id)"""
    return list(lattice_of(group, settings).subgroups)


def p_subgroups(
    group: GroupLike, p: int, settings: Settings = DEFAULT_SETTINGS
) -> List[Subgroup]:
    """Every p-subgroup (trivial included), sorted by (order, id)"""
    require_prime(p)
    g = whole(group)
    return _enumerate(g.ambient, g, p, settings)


def prime_power_index_subgroups(
    group: FiniteGroup, p: int, settings: Settings = DEFAULT_SETTINGS
) -> List[Subgroup]:
    """Subgroups whose index in `group` is a power of p (the group included)"""
    return [
        s for s in lattice_of(group, settings) if is_power_of(group.order // s.order, p)
    ]


# Series


def commutator_subgroup(a: Subgroup, b: Subgroup) -> Subgroup:
    """[A, B], generated by all a^-1 b^-1 a b"""
    _check_ambient(a, b)
    group = a.ambient
    table, inverses = group.table, group.inverses
    hit = np.zeros(group.order, dtype=bool)
    b_idx = b.indices
    for start in range(0, len(a.indices), 256):
        block = a.indices[start : start + 256]
        ab = table[np.ix_(block, b_idx)]
        ba = table[np.ix_(b_idx, block)].T
        hit[table[inverses[ba], ab]] = True
    closed = group.generate(np.flatnonzero(hit))
    assert closed is not None
    return Subgroup.from_indices(group, *closed)


def derived_series(group: GroupLike) -> List[Subgroup]:
    """G, [G,G], [G',G'], ... until it stabilizes"""
    series = [whole(group)]
    while True:
        nxt = commutator_subgroup(series[-1], series[-1])
        if nxt == series[-1]:
            return series
        series.append(nxt)


def lower_central_series(group: GroupLike) -> List[Subgroup]:
    """G, [G,G], [G,[G,G]], ... until it stabilizes"""
    g = whole(group)
    series = [g]
    while True:
        nxt = commutator_subgroup(g, series[-1])
        if nxt == series[-1]:
            return series
        series.append(nxt)


def is_solvable(group: GroupLike) -> bool:
    return derived_series(group)[-1].order == 1


def is_nilpotent(group: GroupLike) -> bool:
    return lower_central_series(group)[-1].order == 1


def is_abelian(group: GroupLike) -> bool:
    g = whole(group)
    return commutator_subgroup(g, g).order == 1


def center(group: GroupLike) -> Subgroup:
    """Elements commuting with every element of the group"""
    g = whole(group)
    table = g.ambient.table
    idx = g.indices
    central = (table[np.ix_(idx, idx)] == table[np.ix_(idx, idx)].T).all(axis=1)
    return Subgroup.from_indices(g.ambient, idx[central])


def sylow_subgroup(
    group: FiniteGroup, p: int, settings: Settings = DEFAULT_SETTINGS
) -> Subgroup:
    """First subgroup, in (order, id) order, whose order is the p-part of |G|"""
    require_prime(p)
    target = p_part(group.order, p)
    return lattice_of(group, settings).of_order(target)[0]


def hall_complement(
    group: FiniteGroup, p: int, settings: Settings = DEFAULT_SETTINGS
) -> Optional[Subgroup]:
    """A subgroup of order equal to the non-p part of |G|, if there is one"""
    require_prime(p)
    found = lattice_of(group, settings).of_order(non_p_part(group.order, p))
    return found[0] if found else None


def find_solvable_nonnilpotent(
    group: FiniteGroup, settings: Settings = DEFAULT_SETTINGS
) -> Optional[Subgroup]:
    """Smallest (by order, then id) solvable subgroup that is not nilpotent"""
    for sub in lattice_of(group, settings):
        # p-groups are nilpotent
        if sub.order == 1 or is_prime_power(sub.order):
            continue
        if is_solvable(sub) and not is_nilpotent(sub):
            return sub
    return None


def _powers(group: FiniteGroup, indices: np.ndarray, exponent: int) -> np.ndarray:
    table = group.table
    result = np.zeros(len(indices), dtype=np.intp)
    base = np.asarray(indices, dtype=np.intp)
    while exponent:
        if exponent & 1:
            result = table[result, base].astype(np.intp)
        base = table[base, base].astype(np.intp)
        exponent >>= 1
    return result


def subgroup_decomposition_check(
    group: FiniteGroup, settings: Settings = DEFAULT_SETTINGS
) -> bool:
    """Every subgroup is the product of its projections to the Sylow factors

    For each prime q the projection of h is its q-part h^e, with e = 1 mod the
    q-part of the group exponent and e = 0 mod the rest.

    Raises:
        NotNilpotentError: The group is not nilpotent
    """
    if not is_nilpotent(group):
        raise NotNilpotentError(f"{group.descriptor} is not nilpotent")
    exponent = math.lcm(*{int(o) for o in group.element_orders})
    exponents = {}
    for q in primefactors(group.order):
        q_part = p_part(exponent, q)
        rest = exponent // q_part
        exponents[q] = rest * pow(rest, -1, q_part) if q_part > 1 else 0

    for sub in lattice_of(group, settings):
        product = 1
        for q, e in exponents.items():
            projection = np.unique(_powers(group, sub.indices, e))
            if to_mask(projection, group.order) & ~sub.mask:
                return False
            product *= len(projection)
        if product != sub.order:
            return False
    return True


# Lattice-wide index identities


def index_factorization_check(
    group: FiniteGroup,
    samples: int = 1000,
    seed: int = DEFAULT_SETTINGS.seed,
    settings: Settings = DEFAULT_SETTINGS,
) -> Optional[Tuple[Subgroup, Subgroup, Subgroup]]:
    """Sample chains K <= H with N normal and test [H:K] = [HN:KN] [H∩N:K∩N]

    The quotient index [pi(H):pi(K)] is read as [HN:KN] inside G.

    Returns:
        Optional[Tuple[Subgroup, Subgroup, Subgroup]]: A violating (H, K, N),
            or None if every sample satisfies the identity
    """
    lattice = lattice_of(group, settings)
    normals = lattice.normal_subgroups()
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        n = normals[rng.integers(len(normals))]
        h = lattice[int(rng.integers(len(lattice)))]
        below = lattice.contained_in(h)
        k = below[int(rng.integers(len(below)))]
        quotient = join(h, n).order // join(k, n).order
        inside = intersect(h, n).order // intersect(k, n).order
        if h.order // k.order != quotient * inside:
            return h, k, n
    return None


def normal_intersection_check(
    group: FiniteGroup, p: int, settings: Settings = DEFAULT_SETTINGS
) -> Optional[Tuple[Subgroup, Subgroup]]:
    """If [G:A] and [G:N] are powers of p and N is normal, so is [G:A∩N]

    Checked over every qualifying pair. Returns a violating (A, N) or None.
    """
    require_prime(p)
    candidates = prime_power_index_subgroups(group, p, settings)
    normals = [n for n in candidates if is_normal(group, n)]
    for a in candidates:
        for n in normals:
            if not is_power_of(group.order // intersect(a, n).order, p):
                return a, n
    return None
