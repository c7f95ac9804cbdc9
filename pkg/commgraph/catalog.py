"""
Named groups and the textual group descriptor grammar

    d := "sym:"N | "alt:"N | "cyc:"N | "dih:"N | "prod(" d "," d ")"
       | "gens:"N":" perm (";" perm)*

Descriptor strings are also used as cache keys, so `str(descriptor)` is
canonical: parsing it again gives an equal descriptor.
"""

import itertools
import math
import re
from functools import lru_cache
from typing import Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .config import DEFAULT_SETTINGS, Settings
from .exceptions import (
    CapExceededError,
    CycleParseError,
    DescriptorParseError,
    NotASubgroupError,
)
from .groups import FiniteGroup
from .permutations import Permutation, from_cycles, is_even, parse_cycles

DescriptorKind = Literal["sym", "alt", "cyc", "dih", "prod", "gens"]

_NAMED = re.compile(r"(sym|alt|cyc|dih):(\d+)")
_GENS = re.compile(r"gens:(\d+):")
_CYCLE_GROUP = re.compile(r"\s*\([^()]*\)")


class GroupDescriptor(BaseModel):
    """Parsed group descriptor"""

    model_config = ConfigDict(frozen=True)

    kind: DescriptorKind
    n: int
    factors: Tuple["GroupDescriptor", ...] = ()
    cycles: Tuple[str, ...] = ()

    def __str__(self) -> str:
        if self.kind == "prod":
            return f"prod({self.factors[0]},{self.factors[1]})"
        if self.kind == "gens":
            return f"gens:{self.n}:" + ";".join(self.cycles)
        return f"{self.kind}:{self.n}"

    @property
    def degree(self) -> int:
        if self.kind == "prod":
            return sum(f.degree for f in self.factors)
        return self.n


GroupDescriptor.model_rebuild()


def _parse_at(text: str, pos: int) -> Tuple[GroupDescriptor, int]:
    if text.startswith("prod(", pos):
        left, pos = _parse_at(text, pos + 5)
        if not text.startswith(",", pos):
            raise DescriptorParseError(f"Expected ',' at offset {pos} in {text!r}")
        right, pos = _parse_at(text, pos + 1)
        if not text.startswith(")", pos):
            raise DescriptorParseError(f"Expected ')' at offset {pos} in {text!r}")
        product = GroupDescriptor(
            kind="prod", n=left.degree + right.degree, factors=(left, right)
        )
        return product, pos + 1

    named = _NAMED.match(text, pos)
    if named:
        kind, n = named.group(1), int(named.group(2))
        if n < 1 or (kind == "dih" and n < 3):
            raise DescriptorParseError(f"Invalid parameter in {named.group(0)!r}")
        return GroupDescriptor(kind=kind, n=n), named.end()

    gens = _GENS.match(text, pos)
    if gens:
        degree = int(gens.group(1))
        if degree < 1:
            raise DescriptorParseError(f"Invalid degree in {text!r}")
        pos = gens.end()
        cycles = []
        while True:
            start = pos
            while True:
                group = _CYCLE_GROUP.match(text, pos)
                if not group:
                    break
                pos = group.end()
            if pos == start:
                raise DescriptorParseError(
                    f"Expected a permutation at offset {pos} in {text!r}"
                )
            try:
                perm = parse_cycles(text[start:pos], degree)
            except CycleParseError as e:
                raise DescriptorParseError(str(e)) from e
            cycles.append(perm.cycle_string())
            if not text.startswith(";", pos):
                break
            pos += 1
        return GroupDescriptor(kind="gens", n=degree, cycles=tuple(cycles)), pos

    raise DescriptorParseError(f"Unrecognised descriptor at offset {pos} in {text!r}")


def parse_descriptor(text: str) -> GroupDescriptor:
    """Parse a descriptor string

    Raises:
        DescriptorParseError: Text does not follow the grammar
    """
    stripped = text.strip()
    descriptor, pos = _parse_at(stripped, 0)
    if pos != len(stripped):
        raise DescriptorParseError(f"Trailing text at offset {pos} in {text!r}")
    return descriptor


def _check_caps(degree: int, order: int, name: str, settings: Settings) -> None:
    if degree > settings.degree_cap:
        raise CapExceededError(f"{name}: degree {degree} exceeds cap {settings.degree_cap}")
    if order > settings.order_cap:
        raise CapExceededError(f"{name}: order {order} exceeds cap {settings.order_cap}")


def _permutation_rows(n: int, even_only: bool) -> np.ndarray:
    rows = [
        p
        for p in itertools.permutations(range(n))
        if not even_only or is_even(Permutation(mapping=p))
    ]
    return np.array(rows, dtype=np.uint8).reshape(len(rows), n)


def symmetric(n: int, settings: Settings = DEFAULT_SETTINGS) -> FiniteGroup:
    """Symmetric group on {1..n}, order n!"""
    _check_caps(n, math.factorial(n), f"sym:{n}", settings)
    gens = []
    if n >= 2:
        gens.append(from_cycles([[1, 2]], n))
    if n >= 3:
        gens.append(from_cycles([list(range(1, n + 1))], n))
    return FiniteGroup(n, _permutation_rows(n, False), gens, f"sym:{n}")


def alternating(n: int, settings: Settings = DEFAULT_SETTINGS) -> FiniteGroup:
    """Alternating group on {1..n}, order n!/2 (trivial for n <= 2)"""
    _check_caps(n, max(1, math.factorial(n) // 2), f"alt:{n}", settings)
    gens = [from_cycles([[1, 2, k]], n) for k in range(3, n + 1)]
    return FiniteGroup(n, _permutation_rows(n, True), gens, f"alt:{n}")


def cyclic(n: int, settings: Settings = DEFAULT_SETTINGS) -> FiniteGroup:
    """Cyclic group of order n generated by an n-cycle on {1..n}"""
    _check_caps(n, n, f"cyc:{n}", settings)
    gens = [from_cycles([list(range(1, n + 1))], n)] if n >= 2 else []
    return FiniteGroup.from_generators(n, gens, f"cyc:{n}", settings)


def dihedral(n: int, settings: Settings = DEFAULT_SETTINGS) -> FiniteGroup:
    """Symmetries of an n-gon acting on its n vertices, order 2n"""
    if n < 3:
        raise DescriptorParseError(f"Dihedral groups need n >= 3, got {n}")
    _check_caps(n, 2 * n, f"dih:{n}", settings)
    rotation = from_cycles([list(range(1, n + 1))], n)
    reflection = Permutation.from_images([n + 1 - i for i in range(1, n + 1)])
    return FiniteGroup.from_generators(n, [rotation, reflection], f"dih:{n}", settings)


def shift(perm: Permutation, offset: int, degree: int) -> Permutation:
    """Move a permutation onto the points offset+1 .. offset+perm.degree"""
    mapping = list(range(degree))
    for i, image in enumerate(perm.mapping):
        mapping[offset + i] = offset + image
    return Permutation(mapping=tuple(mapping))


def relabel(perm: Permutation, points: Sequence[int], degree: int) -> Permutation:
    """Move a permutation of {1..m} onto the sorted 1-based `points` of {1..degree}"""
    mapping = list(range(degree))
    for i, image in enumerate(perm.mapping):
        mapping[points[i] - 1] = points[image] - 1
    return Permutation(mapping=tuple(mapping))


def direct_product(
    a: FiniteGroup,
    b: FiniteGroup,
    descriptor: Optional[str] = None,
    settings: Settings = DEFAULT_SETTINGS,
) -> FiniteGroup:
    """A x B acting on disjoint blocks {1..deg A} and the next deg B points"""
    name = descriptor or f"prod({a.descriptor},{b.descriptor})"
    degree = a.degree + b.degree
    _check_caps(degree, a.order * b.order, name, settings)
    images = np.hstack(
        [
            np.repeat(a.images, b.order, axis=0),
            np.tile(b.images + np.uint8(a.degree), (a.order, 1)),
        ]
    )
    gens = [shift(g, 0, degree) for g in a.generators]
    gens += [shift(g, a.degree, degree) for g in b.generators]
    return FiniteGroup(degree, images, gens, name)


def alt_generators(points: Iterable[int], degree: int) -> List[Permutation]:
    """3-cycles (t1 t2 ti) generating the alternating group on `points`"""
    pts = sorted(points)
    return [from_cycles([[pts[0], pts[1], t]], degree) for t in pts[2:]]


def alt_on_subset(
    x_degree: int, points: Iterable[int], settings: Settings = DEFAULT_SETTINGS
) -> FiniteGroup:
    """Alternating group on `points`, fixing the rest of {1..x_degree}

    Raises:
        NotASubgroupError: A point lies outside {1..x_degree}
        CapExceededError: |points|!/2 exceeds the order cap
    """
    pts = sorted(set(points))
    if any(not 1 <= t <= x_degree for t in pts):
        raise NotASubgroupError(f"Points {pts} not inside 1..{x_degree}")
    return FiniteGroup.from_generators(
        x_degree, alt_generators(pts, x_degree), settings=settings
    )


def realize(descriptor: GroupDescriptor, settings: Settings = DEFAULT_SETTINGS) -> FiniteGroup:
    """Build the permutation group a descriptor names

    Raises:
        CapExceededError: Degree or order cap exceeded
    """
    return _realize(str(descriptor), settings)


@lru_cache(maxsize=64)
def _realize(text: str, settings: Settings) -> FiniteGroup:
    descriptor = parse_descriptor(text)
    if descriptor.degree > settings.degree_cap:
        raise CapExceededError(
            f"{text}: degree {descriptor.degree} exceeds cap {settings.degree_cap}"
        )
    if descriptor.kind == "sym":
        return symmetric(descriptor.n, settings)
    if descriptor.kind == "alt":
        return alternating(descriptor.n, settings)
    if descriptor.kind == "cyc":
        return cyclic(descriptor.n, settings)
    if descriptor.kind == "dih":
        return dihedral(descriptor.n, settings)
    if descriptor.kind == "prod":
        left, right = (realize(f, settings) for f in descriptor.factors)
        return direct_product(left, right, text, settings)
    gens = [parse_cycles(c, descriptor.n) for c in descriptor.cycles]
    return FiniteGroup.from_generators(descriptor.n, gens, text, settings)


def group(text: str, settings: Settings = DEFAULT_SETTINGS) -> FiniteGroup:
    """Parse and realize a descriptor string in one step"""
    return realize(parse_descriptor(text), settings)
