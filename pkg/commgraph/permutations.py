"""
Permutations of {1..n}

Points are 1-based in all text and in `Permutation.images`; the stored
`mapping` is 0-based. Composition is right-acts-first everywhere:
`compose(a, b)` maps i to a(b(i)), and so does `a * b`.
"""

import math
import re
from typing import Iterable, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from .exceptions import CycleParseError, PermutationError

_CYCLE = re.compile(r"\s*\(([^()]*)\)\s*")
_SEPARATOR = re.compile(r"[\s,]+")


class Permutation(BaseModel):
    """Immutable bijection of {1..n}, stored as a 0-based image tuple"""

    model_config = ConfigDict(frozen=True)

    mapping: Tuple[int, ...]

    @field_validator("mapping")
    def check_bijection(cls, value):
        """Reject empty maps and anything that is not a bijection of {0..n-1}"""
        if not value:
            raise ValueError("Permutation degree must be positive")
        if sorted(value) != list(range(len(value))):
            raise ValueError(f"{value} is not a permutation")
        return value

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "Permutation":
        """Build a permutation from its 1-based image list

        Args:
            images (Sequence[int]): images[i - 1] is the image of point i

        Returns:
            Permutation: The permutation
        """
        try:
            return cls(mapping=tuple(i - 1 for i in images))
        except ValueError as e:
            raise PermutationError(str(e)) from e

    @property
    def degree(self) -> int:
        return len(self.mapping)

    @property
    def images(self) -> Tuple[int, ...]:
        """1-based image of each point"""
        return tuple(i + 1 for i in self.mapping)

    def __call__(self, point: int) -> int:
        """Image of a 1-based point"""
        return self.mapping[point - 1] + 1

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __lt__(self, other: "Permutation") -> bool:
        return (self.degree, self.mapping) < (other.degree, other.mapping)

    def __str__(self) -> str:
        return self.cycle_string()

    def __repr__(self) -> str:
        return f"Permutation({self.cycle_string()!r}, degree={self.degree})"

    def is_identity(self) -> bool:
        return all(i == image for i, image in enumerate(self.mapping))

    def inverse(self) -> "Permutation":
        inverse_map = [0] * self.degree
        for i, image in enumerate(self.mapping):
            inverse_map[image] = i
        return Permutation(mapping=tuple(inverse_map))

    def power(self, exponent: int) -> "Permutation":
        """Raise to an integer power, negative exponents included"""
        result = list(range(self.degree))
        for cycle in self.cycles(include_fixed=True):
            length = len(cycle)
            for pos, point in enumerate(cycle):
                result[point - 1] = cycle[(pos + exponent) % length] - 1
        return Permutation(mapping=tuple(result))

    def conjugate(self, by: "Permutation") -> "Permutation":
        """by * self * by^-1"""
        return compose(compose(by, self), by.inverse())

    def support(self) -> Tuple[int, ...]:
        """Sorted 1-based points moved by the permutation"""
        return tuple(i + 1 for i, image in enumerate(self.mapping) if i != image)

    def cycles(self, include_fixed: bool = False) -> List[Tuple[int, ...]]:
        """Disjoint cycles in canonical form

        Each cycle starts at its smallest point and cycles are ordered by that
        point.

        Args:
            include_fixed (bool, optional): Also return 1-cycles. Defaults to False.

        Returns:
            List[Tuple[int, ...]]: 1-based cycles
        """
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cycle = []
            point = start
            while not seen[point]:
                seen[point] = True
                cycle.append(point + 1)
                point = self.mapping[point]
            if len(cycle) > 1 or include_fixed:
                out.append(tuple(cycle))
        return out

    def cycle_string(self) -> str:
        """Canonical cycle notation, "()" for the identity"""
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(p) for p in cycle) + ")" for cycle in cycles)


def identity(n: int) -> Permutation:
    """Identity permutation of degree n"""
    if n < 1:
        raise PermutationError("Permutation degree must be positive")
    return Permutation(mapping=tuple(range(n)))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Compose two permutations, right factor first

    Args:
        a (Permutation): Applied second
        b (Permutation): Applied first

    Raises:
        PermutationError: Degrees differ

    Returns:
        Permutation: The map i -> a(b(i))
    """
    if a.degree != b.degree:
        raise PermutationError(
            f"Cannot compose permutations of degree {a.degree} and {b.degree}"
        )
    return Permutation(mapping=tuple(a.mapping[i] for i in b.mapping))


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


def is_even(p: Permutation) -> bool:
    """True iff p is a product of an even number of transpositions"""
    return (p.degree - len(p.cycles(include_fixed=True))) % 2 == 0


def element_order(p: Permutation) -> int:
    """Least m >= 1 with p^m the identity"""
    return math.lcm(*(len(c) for c in p.cycles(include_fixed=True)))


def from_cycles(cycles: Iterable[Sequence[int]], degree: int) -> Permutation:
    """Build a permutation from disjoint 1-based cycles

    Raises:
        CycleParseError: Out-of-range or repeated point
    """
    if degree < 1:
        raise PermutationError("Permutation degree must be positive")
    mapping = list(range(degree))
    used = set()
    for cycle in cycles:
        for point in cycle:
            if not 1 <= point <= degree:
                raise CycleParseError(f"Point {point} outside 1..{degree}")
            if point in used:
                raise CycleParseError(f"Point {point} repeated")
            used.add(point)
        for pos, point in enumerate(cycle):
            mapping[point - 1] = cycle[(pos + 1) % len(cycle)] - 1
    return Permutation(mapping=tuple(mapping))


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse a product of disjoint cycles such as "(1 2 3)(4 5)"

    Points inside a cycle are separated by whitespace or commas. "()" is the
    identity.

    Args:
        text (str): Cycle notation
        degree (int): Degree of the resulting permutation

    Raises:
        CycleParseError: Malformed parentheses, out-of-range or repeated point

    Returns:
        Permutation: The described permutation
    """
    bodies = []
    pos = 0
    while pos < len(text):
        match = _CYCLE.match(text, pos)
        if not match:
            raise CycleParseError(f"Malformed cycle notation: {text!r}")
        bodies.append(match.group(1).strip())
        pos = match.end()

    if not bodies:
        raise CycleParseError(f"Malformed cycle notation: {text!r}")
    if bodies == [""]:
        return identity(degree)

    cycles = []
    for body in bodies:
        tokens = [t for t in _SEPARATOR.split(body) if t]
        if len(tokens) < 2 or not all(t.isdigit() for t in tokens):
            raise CycleParseError(f"Malformed cycle ({body}) in {text!r}")
        cycles.append([int(t) for t in tokens])
    return from_cycles(cycles, degree)
