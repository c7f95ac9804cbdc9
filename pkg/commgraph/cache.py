"""
Versioned on-disk cache of subgroup lattices

One JSON file per group, `<cache>/<sanitized-descriptor>.lattice.json`,
holding each subgroup as order, id and cycle-notation generators. Elements
are rebuilt by closure on load and checked against the stored order and id.
"""

import hashlib
import json
import logging
import os
import re
import tempfile
from pathlib import Path
from typing import Optional

from pydantic import ValidationError
from semver import VersionInfo

from .config import DEFAULT_SETTINGS, Settings
from .exceptions import CacheError, CommGraphError
from .groups import FiniteGroup
from .lattice import Subgroup, SubgroupLattice
from .models import LATTICE_FORMAT_VERSION, LatticeDocument, SubgroupRecord
from .permutations import parse_cycles

logger = logging.getLogger(__name__)

_UNSAFE = re.compile(r"[^A-Za-z0-9._-]+")


def sanitize(descriptor: str) -> str:
    """File-name-safe form of a descriptor, with a short digest against collisions"""
    digest = hashlib.blake2b(descriptor.encode(), digest_size=4).hexdigest()
    return f"{_UNSAFE.sub('_', descriptor).strip('_')}-{digest}"


def cache_path(directory: Path, descriptor: str) -> Path:
    return Path(directory) / f"{sanitize(descriptor)}.lattice.json"


def checksum(document: LatticeDocument) -> str:
    body = {
        "descriptor": document.descriptor,
        "order": document.order,
        "subgroups": [s.model_dump() for s in document.subgroups],
    }
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def cache_store(directory: Path, document: LatticeDocument) -> Path:
    """Write a lattice document atomically; the last writer wins

    Returns:
        Path: The cache file
    """
    path = cache_path(directory, document.descriptor)
    path.parent.mkdir(parents=True, exist_ok=True)
    sealed = document.model_copy(update={"checksum": checksum(document)})
    handle = tempfile.NamedTemporaryFile(  # pylint: disable=consider-using-with
        "w", dir=path.parent, prefix=path.name, suffix=".tmp", delete=False
    )
    temporary = Path(handle.name)
    try:
        with handle:
            handle.write(sealed.model_dump_json(indent=1))
        os.replace(temporary, path)
    except BaseException:
        temporary.unlink(missing_ok=True)
        raise
    logger.debug(
        "Stored %d subgroups of %s in %s", len(document.subgroups), document.descriptor, path
    )
    return path


def cache_load(directory: Path, descriptor: str) -> Optional[LatticeDocument]:
    """Read a lattice document

    Returns None (recompute) when the file is missing, written by an
    incompatible major format version, for another descriptor, or fails its
    checksum.

    Raises:
        CacheError: The file is not valid JSON or not a lattice document
    """
    path = cache_path(directory, descriptor)
    if not path.exists():
        logger.debug("Cache miss for %s", descriptor)
        return None
    try:
        raw = json.loads(path.read_text())
    except (OSError, ValueError) as e:
        raise CacheError(path, f"unreadable cache file ({e})") from e
    if not isinstance(raw, dict):
        raise CacheError(path, "cache file does not hold a JSON object")

    try:
        version = VersionInfo.parse(str(raw.get("format_version", "")))
    except ValueError as e:
        raise CacheError(path, "missing or invalid format_version") from e
    if version.major != VersionInfo.parse(LATTICE_FORMAT_VERSION).major:
        logger.info("Cache %s has format %s, recomputing", path, version)
        return None

    try:
        document = LatticeDocument.model_validate(raw)
    except ValidationError as e:
        raise CacheError(path, f"invalid lattice document ({e})") from e
    if document.descriptor != descriptor:
        logger.warning(
            "Cache %s holds %s, not %s; recomputing", path, document.descriptor, descriptor
        )
        return None
    if document.checksum != checksum(document):
        logger.warning("Checksum mismatch in %s, recomputing", path)
        return None
    logger.debug("Cache hit for %s", descriptor)
    return document


def to_document(lattice: SubgroupLattice) -> LatticeDocument:
    return LatticeDocument(
        descriptor=lattice.group.descriptor,
        order=lattice.group.order,
        subgroups=[
            SubgroupRecord(id=s.id, order=s.order, generators=s.generator_strings())
            for s in lattice
        ],
    )


def from_document(group: FiniteGroup, document: LatticeDocument) -> Optional[SubgroupLattice]:
    """Rebuild a lattice by closing each stored generating set

    Returns None if the group order, a subgroup order or a subgroup id
    disagrees with the document.
    """
    if document.order != group.order:
        logger.warning(
            "Cached %s has order %d, group has %d", document.descriptor, document.order, group.order
        )
        return None
    subgroups = []
    for record in document.subgroups:
        try:
            seed = [group.index_of(parse_cycles(g, group.degree)) for g in record.generators]
        except CommGraphError:
            logger.warning("Cached generators of %s are not in %s", record.id, group.descriptor)
            return None
        closed = group.generate(seed)
        assert closed is not None
        sub = Subgroup.from_indices(group, *closed)
        if sub.order != record.order or sub.id != record.id:
            logger.warning("Cached subgroup %s does not match its generators", record.id)
            return None
        subgroups.append(sub)
    return SubgroupLattice(group, subgroups)


class LatticeCache:
    """Lattice store backed by a cache directory"""

    def __init__(self, directory: Optional[Path] = None, settings: Settings = DEFAULT_SETTINGS):
        self.directory = Path(directory) if directory is not None else settings.cache_dir

    def path(self, group: FiniteGroup) -> Path:
        return cache_path(self.directory, group.descriptor)

    def load(self, group: FiniteGroup) -> Optional[SubgroupLattice]:
        document = cache_load(self.directory, group.descriptor)
        if document is None:
            return None
        return from_document(group, document)

    def store(self, lattice: SubgroupLattice) -> None:
        try:
            cache_store(self.directory, to_document(lattice))
        except OSError as e:
            logger.warning("Could not write lattice cache in %s: %s", self.directory, e)
