"""
Finite permutation groups with fully enumerated, canonically sorted elements

Elements are kept as rows of a uint8 image array sorted by their integer
code (the image tuple read as a base-n number), so element index order is
the lexicographic order of image tuples and the identity is always index 0.
Group operations run on integer element indices through a Cayley table.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_SETTINGS, Settings
from .exceptions import CapExceededError, NotASubgroupError, PermutationError
from .permutations import Permutation

logger = logging.getLogger(__name__)


def _weights(degree: int) -> np.ndarray:
    return np.array(
        [degree ** (degree - 1 - j) for j in range(degree)], dtype=np.uint64
    )


def encode(images: np.ndarray, degree: int) -> np.ndarray:
    """Integer code of each image row; code order is lexicographic order"""
    rows = np.atleast_2d(images).astype(np.uint64)
    return (rows * _weights(degree)).sum(axis=1, dtype=np.uint64)


def to_mask(indices: np.ndarray, size: int) -> int:
    """Bitset (Python int) with bit i set for every element index i"""
    flags = np.zeros(size, dtype=bool)
    flags[np.asarray(indices, dtype=np.intp)] = True
    return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")


def from_mask(mask: int, size: int) -> np.ndarray:
    """Sorted element indices of a bitset"""
    raw = np.frombuffer(mask.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")[:size])


class FiniteGroup:
    """A permutation group with every element enumerated"""

    def __init__(
        self,
        degree: int,
        images: np.ndarray,
        generators: Sequence[Permutation],
        descriptor: Optional[str] = None,
    ) -> None:
        codes = encode(images, degree)
        order = np.argsort(codes, kind="stable")
        self.degree = degree
        self.images: np.ndarray = np.ascontiguousarray(images[order], dtype=np.uint8)
        self.codes: np.ndarray = codes[order]
        self.generators: List[Permutation] = list(generators)
        self.descriptor = descriptor or generators_descriptor(degree, generators)

        self._table: Optional[np.ndarray] = None
        self._inverses: Optional[np.ndarray] = None
        self._conjugation: Optional[np.ndarray] = None
        self._element_orders: Optional[np.ndarray] = None
        self._elements: Optional[List[Permutation]] = None

    def __repr__(self) -> str:
        return f"FiniteGroup({self.descriptor!r}, order={self.order})"

    @property
    def order(self) -> int:
        return len(self.codes)

    @classmethod
    def from_generators(
        cls,
        degree: int,
        generators: Sequence[Permutation],
        descriptor: Optional[str] = None,
        settings: Settings = DEFAULT_SETTINGS,
    ) -> "FiniteGroup":
        """Enumerate the group generated by permutations of a common degree

        Args:
            degree (int): Degree of every generator
            generators (Sequence[Permutation]): Generators, possibly empty
            descriptor (Optional[str], optional): Canonical descriptor string.
                Defaults to a "gens:" descriptor built from the generators.
            settings (Settings, optional): Caps. Defaults to DEFAULT_SETTINGS.

        Raises:
            CapExceededError: Degree or order cap exceeded
            PermutationError: Generator of the wrong degree

        Returns:
            FiniteGroup: The generated group
        """
        if degree > settings.degree_cap:
            raise CapExceededError(
                f"Degree {degree} exceeds the degree cap {settings.degree_cap}"
            )
        for gen in generators:
            if gen.degree != degree:
                raise PermutationError(
                    f"Generator {gen} has degree {gen.degree}, expected {degree}"
                )

        gens = np.array([g.mapping for g in generators], dtype=np.uint8).reshape(
            len(generators), degree
        )
        frontier = np.arange(degree, dtype=np.uint8)[None, :]
        known = encode(frontier, degree)
        found = [frontier]
        while len(gens) and len(frontier):
            products = np.concatenate([g[frontier] for g in gens])
            codes, first = np.unique(encode(products, degree), return_index=True)
            fresh = ~np.isin(codes, known, assume_unique=True)
            frontier = products[first[fresh]]
            known = np.union1d(known, codes[fresh])
            if len(known) > settings.order_cap:
                raise CapExceededError(
                    f"Group generated by {len(generators)} generators of degree "
                    f"{degree} exceeds the order cap {settings.order_cap}"
                )
            found.append(frontier)

        return cls(degree, np.concatenate(found), generators, descriptor)

    @property
    def elements(self) -> List[Permutation]:
        """All elements in canonical order"""
        if self._elements is None:
            self._elements = [self.element(i) for i in range(self.order)]
        return self._elements

    def element(self, index: int) -> Permutation:
        return Permutation(mapping=tuple(int(x) for x in self.images[index]))

    def indices_of_codes(self, codes: np.ndarray) -> np.ndarray:
        """Element indices for codes that are known to belong to the group"""
        positions = np.searchsorted(self.codes, codes)
        positions = np.minimum(positions, self.order - 1)
        if not np.array_equal(self.codes[positions], codes):
            raise NotASubgroupError(f"Element outside {self.descriptor}")
        return positions

    def index_of(self, perm: Permutation) -> int:
        """Index of an element

        Raises:
            NotASubgroupError: The permutation is not in the group
        """
        if perm.degree != self.degree:
            raise NotASubgroupError(
                f"{perm} has degree {perm.degree}, group has degree {self.degree}"
            )
        code = encode(np.array(perm.mapping, dtype=np.uint8), self.degree)
        return int(self.indices_of_codes(code)[0])

    def contains(self, perm: Permutation) -> bool:
        try:
            self.index_of(perm)
        except NotASubgroupError:
            return False
        return True

    @property
    def index_dtype(self):
        return np.int16 if self.order < 2**15 else np.int32

    @property
    def table(self) -> np.ndarray:
        """table[i, j] is the index of element i composed with element j"""
        if self._table is None:
            logger.debug("Building Cayley table for %s", self.descriptor)
            table = np.empty((self.order, self.order), dtype=self.index_dtype)
            for i in range(self.order):
                products = self.images[i][self.images]
                table[i] = np.searchsorted(self.codes, encode(products, self.degree))
            self._table = table
        return self._table

    @property
    def inverses(self) -> np.ndarray:
        if self._inverses is None:
            inverse_images = np.argsort(self.images, axis=1).astype(np.uint8)
            self._inverses = np.searchsorted(
                self.codes, encode(inverse_images, self.degree)
            )
        return self._inverses

    @property
    def conjugation(self) -> np.ndarray:
        """conjugation[g, e] is the index of g e g^-1"""
        if self._conjugation is None:
            table = self.table
            inverses = self.inverses
            conj = np.empty_like(table)
            for g in range(self.order):
                conj[g] = table[table[g], inverses[g]]
            self._conjugation = conj
        return self._conjugation

    @property
    def element_orders(self) -> np.ndarray:
        if self._element_orders is None:
            table = self.table
            everything = np.arange(self.order)
            power = everything.copy()
            orders = np.ones(self.order, dtype=np.int64)
            done = power == 0
            exponent = 1
            while not done.all():
                power = table[power, everything]
                exponent += 1
                reached = (power == 0) & ~done
                orders[reached] = exponent
                done |= reached
            self._element_orders = orders
        return self._element_orders

    def generate(
        self,
        seed: Sequence[int],
        base: Optional[np.ndarray] = None,
        base_gens: Sequence[int] = (),
        max_order: Optional[int] = None,
    ) -> Optional[Tuple[np.ndarray, List[int]]]:
        """Close a set of element indices into a subgroup

        Cosets of the current subgroup are added one at a time until the union
        is closed under right multiplication by every generator.

        Args:
            seed (Sequence[int]): Element indices to adjoin
            base (Optional[np.ndarray], optional): Indices of a subgroup already
                closed. Defaults to the trivial subgroup.
            base_gens (Sequence[int], optional): Generators of `base`
            max_order (Optional[int], optional): Give up once the subgroup
                grows beyond this order. Defaults to None.

        Returns:
            Optional[Tuple[np.ndarray, List[int]]]: Sorted element indices and
                generator indices, or None if `max_order` was exceeded
        """
        table = self.table
        member = np.zeros(self.order, dtype=bool)
        current = np.array([0], dtype=np.intp) if base is None else np.asarray(base)
        member[current] = True
        size = len(current)
        gens = [int(g) for g in base_gens]
        pending = np.unique(np.asarray(seed, dtype=np.intp))

        while True:
            missing = pending[~member[pending]]
            if not len(missing):
                break
            new = int(missing[0])
            gens.append(new)
            parts = [current]
            reps: List[int] = []

            def add_coset(rep: int) -> None:
                coset = table[current, rep]
                member[coset] = True
                parts.append(coset)
                reps.append(rep)

            add_coset(new)
            size += len(current)
            pos = 0
            while pos < len(reps):
                if max_order is not None and size > max_order:
                    return None
                rep = reps[pos]
                pos += 1
                for gen in gens:
                    product = int(table[rep, gen])
                    if not member[product]:
                        add_coset(product)
                        size += len(current)
            if max_order is not None and size > max_order:
                return None
            current = np.concatenate(parts).astype(np.intp)

        return np.sort(current), gens


def generators_descriptor(degree: int, generators: Sequence[Permutation]) -> str:
    """Canonical "gens:" descriptor string for a generating list"""
    cycles = ";".join(g.cycle_string() for g in generators) or "()"
    return f"gens:{degree}:{cycles}"
