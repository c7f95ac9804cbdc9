"""
The verification suite: every group-theoretic and graph-theoretic check run
over a fixed catalog and collected into one report
"""

import itertools
import logging
import time
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from sympy import primefactors

from .alternating import (
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
    nonnormal_embedding_witness,
    verify_altoverlap,
    verify_decomp,
)
from .catalog import group
from .config import DEFAULT_SETTINGS, Settings
from .exceptions import CapExceededError, ComponentInvariantError
from .graphs import (
    CommGraph,
    build_graph,
    components,
    conjugation_automorphism_check,
    diameter_bound_from_quotient,
    edge_consistency_check,
    embedding_isometry_check,
    find_contraction_violation,
    find_quotient_embedding_violation,
    infinite_components_witness,
    normal_component_violations,
)
from .lattice import (
    LatticeStore,
    as_subgroup,
    find_solvable_nonnilpotent,
    index_factorization_check,
    is_nilpotent,
    is_normal,
    is_solvable,
    lattice_of,
    normal_intersection_check,
    prime_power_index_subgroups,
    subgroup_decomposition_check,
    sylow_subgroup,
)
from .models import (
    CatalogEntry,
    CheckRecord,
    CheckStatus,
    ComponentReport,
    VerificationReport,
)

logger = logging.getLogger(__name__)

CATALOG: List[CatalogEntry] = [
    CatalogEntry(descriptor=descriptor, expected_nilpotent=nilpotent, expected_solvable=solvable)
    for descriptor, nilpotent, solvable in [
        ("cyc:12", True, True),
        ("dih:4", True, True),
        ("prod(dih:4,cyc:9)", True, True),
        ("cyc:8", True, True),
        ("prod(cyc:3,cyc:9)", True, True),
        ("sym:3", False, True),
        ("dih:5", False, True),
        ("alt:4", False, True),
        ("sym:4", False, True),
        ("alt:5", False, False),
        ("prod(sym:3,cyc:5)", False, True),
    ]
]

# Sym_3 component sizes and diameters per prime
SYM3_COMPONENTS = {
    2: [(2, 1), (4, 1)],
    3: [(2, 1), (4, 2)],
    5: [(1, 0)] * 6,
    7: [(1, 0)] * 6,
    11: [(1, 0)] * 6,
}

# Run in the full tier, or when named explicitly
OPTIONAL_CHECKS = {"nonnormal-embedding"}

Outcome = Tuple[bool, Optional[Dict[str, Any]]]


class SuiteConfig(BaseModel):
    """What the suite runs; the fast tier leaves out Alt_7 and Alt_5 x Alt_5"""

    model_config = ConfigDict(frozen=True)

    tier: Literal["fast", "full"] = "full"
    seed: int = DEFAULT_SETTINGS.seed
    samples: int = 1000
    settings: Settings = DEFAULT_SETTINGS
    # Names of the checks to run; every check of the tier when None
    checks: Optional[Tuple[str, ...]] = None

    @property
    def full(self) -> bool:
        return self.tier == "full"


def _command(descriptor: str, p: int) -> str:
    return f"commgraph graph build --group '{descriptor}' --prime {p}"


class _Suite:
    def __init__(self, config: SuiteConfig, store: Optional[LatticeStore]) -> None:
        self.config = config
        self.settings = config.settings
        self.store = store
        self.records: List[CheckRecord] = []
        self.graphs: Dict[Tuple[str, int], CommGraph] = {}

    def run(
        self,
        name: str,
        anchor: str,
        parameters: Dict[str, Any],
        check: Callable[[], Outcome],
        optional: bool = False,
    ) -> None:
        started = time.perf_counter()
        detail = None
        status: CheckStatus
        try:
            passed, witness = check()
            status = "passed" if passed else "failed"
        except CapExceededError as e:
            if not optional:
                raise
            status, witness, detail = "skipped", None, str(e)
        except ComponentInvariantError as e:
            status, witness, detail = "failed", None, str(e)
        if status == "failed" and not witness:
            witness = {"parameters": parameters}
        record = CheckRecord(
            name=name,
            anchor=anchor,
            parameters=parameters,
            status=status,
            witness=witness if status == "failed" else None,
            detail=detail,
            duration=round(time.perf_counter() - started, 3),
        )
        logger.info("%-28s %s (%.2fs)", name, record.status, record.duration)
        self.records.append(record)

    def graph(self, descriptor: str, p: int) -> CommGraph:
        key = (descriptor, p)
        if key not in self.graphs:
            g = group(descriptor, self.settings)
            self.graphs[key] = build_graph(g, p, self.settings, self.store)
        return self.graphs[key]

    def primes(self, descriptor: str) -> List[int]:
        return list(primefactors(group(descriptor, self.settings).order))


def _sym3_components(suite: _Suite) -> Outcome:
    for p, expected in SYM3_COMPONENTS.items():
        reports = components(suite.graph("sym:3", p))
        found = sorted((len(r.vertices), r.diameter) for r in reports)
        if found != sorted(expected):
            return False, {
                "group": "sym:3",
                "prime": p,
                "found": found,
                "command": _command("sym:3", p),
            }
    return True, None


def _index_factorization(suite: _Suite) -> Outcome:
    per_group = max(1, suite.config.samples // len(CATALOG) + 1)
    for entry in CATALOG:
        g = group(entry.descriptor, suite.settings)
        lattice_of(g, suite.settings, suite.store)
        violation = index_factorization_check(g, per_group, suite.config.seed, suite.settings)
        if violation:
            return False, {"group": entry.descriptor, "subgroups": [s.id for s in violation]}
    return True, None


def _normal_intersection(suite: _Suite) -> Outcome:
    for entry in CATALOG:
        g = group(entry.descriptor, suite.settings)
        lattice_of(g, suite.settings, suite.store)
        for p in suite.primes(entry.descriptor):
            violation = normal_intersection_check(g, p, suite.settings)
            if violation:
                return False, {
                    "group": entry.descriptor,
                    "prime": p,
                    "subgroups": [s.id for s in violation],
                }
    return True, None


def _contraction(suite: _Suite) -> Outcome:
    for entry in CATALOG:
        g = group(entry.descriptor, suite.settings)
        for p in suite.primes(entry.descriptor):
            graph = suite.graph(entry.descriptor, p)
            assert graph.subgroups is not None
            normals = [s for s in graph.subgroups if is_normal(g, s)]
            walks = max(1, suite.config.samples // len(normals))
            for n in normals:
                walk = find_contraction_violation(graph, n, walks, suite.config.seed)
                if walk:
                    return False, {
                        "group": entry.descriptor,
                        "prime": p,
                        "normal": n.id,
                        "walk": walk,
                        "command": _command(entry.descriptor, p),
                    }
    return True, None


def _quotient_embedding(suite: _Suite) -> Outcome:
    for entry in CATALOG:
        g = group(entry.descriptor, suite.settings)
        for p in suite.primes(entry.descriptor):
            graph = suite.graph(entry.descriptor, p)
            assert graph.subgroups is not None
            for n in (s for s in graph.subgroups if is_normal(g, s)):
                pair = find_quotient_embedding_violation(graph, n)
                if pair:
                    return False, {
                        "group": entry.descriptor,
                        "prime": p,
                        "normal": n.id,
                        "pair": list(pair),
                        "command": _command(entry.descriptor, p),
                    }
    return True, None


def _same_component(suite: _Suite) -> Outcome:
    for entry in CATALOG:
        for p in [2, 3, 5, 7]:
            graph = suite.graph(entry.descriptor, p)
            try:
                components(graph)
                infinite_components_witness(graph)
            except ComponentInvariantError as e:
                return False, {
                    "group": entry.descriptor,
                    "prime": p,
                    "error": str(e),
                    "command": _command(entry.descriptor, p),
                }
            mismatch = edge_consistency_check(graph)
            if mismatch:
                return False, {"group": entry.descriptor, "prime": p, "pair": list(mismatch)}
    return True, None


def _noncomplete_witness(reports: List[ComponentReport]) -> Optional[Dict[str, Any]]:
    for report in reports:
        if not report.is_complete:
            return {
                "pair": list(report.witness_nonadjacent_pair or ()),
                "path": report.witness_path,
            }
    return None


def _nilpotency(suite: _Suite) -> Outcome:
    for entry in CATALOG:
        g = group(entry.descriptor, suite.settings)
        nilpotent = is_nilpotent(g)
        solvable = is_solvable(g)
        if nilpotent != entry.expected_nilpotent or solvable != entry.expected_solvable:
            return False, {
                "group": entry.descriptor,
                "nilpotent": nilpotent,
                "solvable": solvable,
            }
        noncomplete = None
        for p in suite.primes(entry.descriptor):
            found = _noncomplete_witness(components(suite.graph(entry.descriptor, p)))
            if found:
                noncomplete = {"prime": p, "command": _command(entry.descriptor, p), **found}
                break
        if nilpotent == (noncomplete is not None):
            return False, {
                "group": entry.descriptor,
                "nilpotent": nilpotent,
                "noncomplete": noncomplete,
            }
    return True, None


def _sylow_normality(suite: _Suite) -> Outcome:
    for entry in CATALOG:
        g = group(entry.descriptor, suite.settings)
        lattice_of(g, suite.settings, suite.store)
        all_normal = all(
            is_normal(g, sylow_subgroup(g, p, suite.settings))
            for p in suite.primes(entry.descriptor)
        )
        if all_normal != is_nilpotent(g):
            return False, {"group": entry.descriptor, "sylows_normal": all_normal}
        if entry.expected_nilpotent and not subgroup_decomposition_check(g, suite.settings):
            return False, {"group": entry.descriptor, "decomposition": False}
    return True, None


def _solvable_witnesses(suite: _Suite) -> Outcome:
    targets = [("alt:5", 6), ("cyc:12", None)]
    if suite.config.full:
        targets.append(("alt:7", 12))
    for descriptor, bound in targets:
        g = group(descriptor, suite.settings)
        lattice_of(g, suite.settings, suite.store)
        witness = find_solvable_nonnilpotent(g, suite.settings)
        if (witness is None) != (bound is None) or (witness and bound and witness.order > bound):
            return False, {"group": descriptor, "witness": witness.id if witness else None}
    return True, None


def _diameters(suite: _Suite) -> Outcome:
    for entry in CATALOG:
        for p in suite.primes(entry.descriptor):
            graph = suite.graph(entry.descriptor, p)
            reports = components(graph)
            bad = normal_component_violations(reports)
            if bad:
                return False, {
                    "group": entry.descriptor,
                    "prime": p,
                    "component": bad[0].vertices,
                    "diameter": bad[0].diameter,
                }
            for bound in diameter_bound_from_quotient(graph, reports):
                if not bound.holds:
                    return False, {
                        "group": entry.descriptor,
                        "prime": p,
                        "component": bound.component,
                        "diameter": bound.diameter,
                        "bound": bound.bound,
                    }
    return True, None


def _conjugation(suite: _Suite) -> Outcome:
    rng = np.random.default_rng(suite.config.seed)
    for entry in CATALOG:
        g = group(entry.descriptor, suite.settings)
        for p in suite.primes(entry.descriptor):
            graph = suite.graph(entry.descriptor, p)
            for element in rng.choice(g.order, min(3, g.order), replace=False):
                if not conjugation_automorphism_check(graph, int(element)):
                    return False, {
                        "group": entry.descriptor,
                        "prime": p,
                        "element": g.element(int(element)).cycle_string(),
                    }
    return True, None


def _embedding(suite: _Suite) -> Outcome:
    sym4 = group("sym:4", suite.settings)
    alt4 = as_subgroup(sym4, group("alt:4", suite.settings))
    if not embedding_isometry_check(sym4, alt4, 2, suite.settings, suite.store):
        return False, {"group": "sym:4", "normal": alt4.id, "prime": 2}
    return True, None


def _nonnormal_embedding(suite: _Suite) -> Outcome:
    witness = nonnormal_embedding_witness(5, 5, suite.settings)
    passed = witness.separated and witness.path.verified and witness.path.length == 5
    return passed, {
        "separated": witness.separated,
        "component_size": witness.component_size,
        "path": witness.path.labels,
    }


def _altoverlap(suite: _Suite) -> Outcome:
    for degree in (5, 6):
        quads = list(itertools.combinations(range(1, degree + 1), 4))
        for t1, t2 in itertools.combinations(quads, 2):
            if len(set(t1) & set(t2)) in (2, 3):
                if not verify_altoverlap(degree, t1, t2, suite.settings):
                    return False, {"degree": degree, "t1": list(t1), "t2": list(t2)}
    # (shared, only in T1, only in T2) with both sets of size >= 4 inside 7 points
    shapes = [
        (shared, left, union - shared - left)
        for union in (5, 6, 7)
        for shared in range(2, union + 1)
        for left in range(union - shared + 1)
        if shared + left >= 4 and union - left >= 4
    ]
    rng = np.random.default_rng(suite.config.seed)
    for _ in range(50):
        shared, left, right = shapes[int(rng.integers(len(shapes)))]
        points = rng.permutation(np.arange(1, 8)).tolist()
        t1 = points[: shared + left]
        t2 = points[:shared] + points[shared + left : shared + left + right]
        if not verify_altoverlap(7, t1, t2, suite.settings):
            return False, {"degree": 7, "t1": sorted(t1), "t2": sorted(t2)}
    return True, None


def _decomp(suite: _Suite) -> Outcome:
    for s_size, complement in ((5, "cyc:5"), (4, "cyc:5"), (5, "cyc:1")):
        if not verify_decomp(s_size, complement, 5, settings=suite.settings, store=suite.store):
            return False, {"s_size": s_size, "complement": complement, "prime": 5}
    return True, None


def _guralnick(suite: _Suite) -> Outcome:
    for s_size in (5, 4):
        if not guralnick_check(s_size, 5, suite.settings, suite.store):
            return False, {"s_size": s_size, "prime": 5}
    count = len(prime_power_index_subgroups(group("alt:5", suite.settings), 5, suite.settings))
    return count == 6, {"group": "alt:5", "prime": 5, "count": count}


def _closure(suite: _Suite, x_degree: int) -> Outcome:
    result = conncomp_closure(x_degree, 5, 1, suite.settings, suite.store)
    vertices = classified_vertices(x_degree, 5, 1, suite.settings)
    expected = {7: (56, 210, [15], [3]), 6: (21, None, None, None)}[x_degree]
    passed = (
        result.matches
        and result.geodesics_agree
        and result.component_size == expected[0]
        and (expected[1] is None or result.edge_count == expected[1])
        and (expected[2] is None or result.valences["type1"] == expected[2])
        and (expected[3] is None or result.valences["type2"] == expected[3])
        and classified_recovery_check(vertices, 5, suite.settings)
    )
    return passed, {"x": x_degree, "prime": 5, "k": 1, **result._asdict()}


def _agreement(suite: _Suite) -> Outcome:
    for x_degree in (7, 8):
        mismatch = bgraph_agreement_check(b_graph(x_degree, 5, 1), settings=suite.settings)
        if mismatch:
            return False, {"x": x_degree, "pair": list(mismatch)}
    sampled = [(10, 5, 1), (14, 7, 1)] if suite.config.full else [(10, 5, 1)]
    for x_degree, p, k in sampled:
        samples = 500 if suite.config.full else 100
        mismatch = bgraph_agreement_check(
            b_graph(x_degree, p, k), samples, suite.config.seed, suite.settings
        )
        if mismatch:
            return False, {"x": x_degree, "prime": p, "k": k, "pair": list(mismatch)}
    return True, None


def _bound_sweep(suite: _Suite) -> Outcome:
    top = 16 if suite.config.full else 12
    for p, k in ((5, 1), (7, 1), (3, 2)):
        q = p**k
        for x_size in range(q + 2, top + 1):
            violation = bound_sweep(p, k, x_size, 20, suite.config.seed)
            if violation:
                o1, o2, found = violation
                return False, {
                    "prime": p,
                    "k": k,
                    "x": x_size,
                    "o1": list(o1),
                    "o2": list(o2),
                    "distance": found,
                }
    bg = b_graph(12, 5, 1)
    exact = b_distance(bg, range(1, 6), range(6, 11))
    return exact == longpaths_bound(5, 1, 12), {"x": 12, "distance": exact}


def _normal_free(suite: _Suite) -> Outcome:
    bg = b_graph(12, 5, 1)
    diameter = max(r.diameter for r in components(bg.graph))
    passed = component_normal_free(12, 5, 1) and diameter >= 5
    return passed, {"x": 12, "prime": 5, "k": 1, "diameter": diameter}


def run_suite(
    config: SuiteConfig = SuiteConfig(), store: Optional[LatticeStore] = None
) -> VerificationReport:
    """Run every check in dependency order and collect the report

    Raises:
        CapExceededError: A non-optional target exceeded a cap
        ValueError: `config.checks` names an unknown check
    """
    suite = _Suite(config, store)
    closure_x = 7 if config.full else 6
    checks: List[Tuple[str, str, Dict[str, Any], Callable[[_Suite], Outcome]]] = [
        (
            "sym3-components",
            "components of Γ_p(Sym_3)",
            {"primes": list(SYM3_COMPONENTS)},
            _sym3_components,
        ),
        (
            "index-factorization",
            "index through a normal subgroup",
            {"samples": config.samples},
            _index_factorization,
        ),
        (
            "normal-intersection",
            "p-power index meets normal subgroup",
            {},
            _normal_intersection,
        ),
        (
            "quotient-contraction",
            "paths contract in quotients",
            {"samples": config.samples},
            _contraction,
        ),
        (
            "quotient-embedding",
            "quotient graphs embed isometrically over N",
            {},
            _quotient_embedding,
        ),
        (
            "same-component",
            "non-p index part constant on components",
            {"primes": [2, 3, 5, 7]},
            _same_component,
        ),
        (
            "nilpotent-iff-complete",
            "nilpotent iff all components complete",
            {"catalog": [e.descriptor for e in CATALOG]},
            _nilpotency,
        ),
        (
            "sylow-normality",
            "nilpotent iff Sylow subgroups normal",
            {},
            _sylow_normality,
        ),
        (
            "solvable-nonnilpotent",
            "simple groups hold solvable non-nilpotent subgroups",
            {},
            _solvable_witnesses,
        ),
        (
            "normal-component-diameter",
            "diameter at most 3 around normal vertices",
            {},
            _diameters,
        ),
        (
            "conjugation-automorphism",
            "conjugation preserves adjacency",
            {},
            _conjugation,
        ),
        (
            "embedding-isometry",
            "normal subgroups embed isometrically",
            {"group": "sym:4", "normal": "alt:4", "prime": 2},
            _embedding,
        ),
        (
            "nonnormal-embedding",
            "non-normal product separates components",
            {"s": 5, "prime": 5},
            _nonnormal_embedding,
        ),
        (
            "altoverlap",
            "overlapping alternating groups generate the union",
            {"degrees": [5, 6, 7]},
            _altoverlap,
        ),
        (
            "decomposition",
            "p-power index subgroups split",
            {"prime": 5},
            _decomp,
        ),
        (
            "guralnick",
            "p-power index subgroups of Alt_S",
            {"prime": 5},
            _guralnick,
        ),
        (
            "component-closure",
            "classified component is closed",
            {"x": closure_x, "prime": 5, "k": 1},
            lambda s: _closure(s, closure_x),
        ),
        (
            "bgraph-agreement",
            "subset rules match group adjacency",
            {},
            _agreement,
        ),
        (
            "longpaths-bound",
            "B-graph distance lower bound",
            {},
            _bound_sweep,
        ),
        (
            "normal-free-component",
            "classified component avoids normal subgroups",
            {"x": 12, "prime": 5, "k": 1},
            _normal_free,
        ),
    ]
    selected = set(config.checks or [c[0] for c in checks])
    unknown = selected - {c[0] for c in checks}
    if unknown:
        raise ValueError(f"Unknown checks: {', '.join(sorted(unknown))}")
    if not config.full and not config.checks:
        selected -= OPTIONAL_CHECKS

    for name, anchor, parameters, check in checks:
        if name not in selected:
            continue
        suite.run(
            name,
            anchor,
            parameters,
            lambda check=check: check(suite),
            optional=name in OPTIONAL_CHECKS,
        )

    report = VerificationReport(tier=config.tier, seed=config.seed, checks=suite.records)
    logger.info(
        "Suite %s: %d checks, %d failed",
        report.status,
        len(report.checks),
        len(report.failures()),
    )
    return report
