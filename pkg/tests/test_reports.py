import pytest
from pydantic import ValidationError

from commgraph.models import (
    CheckRecord,
    ComponentReport,
    GraphDocument,
    LatticeDocument,
    VerificationReport,
    VertexRecord,
)


def test_failed_check_needs_witness():
    with pytest.raises(ValidationError):
        CheckRecord(name="x", anchor="y", status="failed")
    record = CheckRecord(name="x", anchor="y", status="failed", witness={"group": "sym:3"})
    assert not record.passed


def test_report_status_and_durations():
    report = VerificationReport(
        tier="fast",
        seed=1,
        checks=[
            CheckRecord(name="a", anchor="", status="passed", duration=1.5),
            CheckRecord(name="b", anchor="", status="skipped", detail="cap", duration=0.2),
        ],
    )
    assert report.status == "passed"
    assert report.failures() == []
    assert [c.duration for c in report.without_durations().checks] == [0.0, 0.0]
    assert VerificationReport.model_validate_json(report.model_dump_json()) == report


def test_component_report_completeness():
    with pytest.raises(ValidationError):
        ComponentReport(component=0, vertices=["a"], diameter=2, is_complete=True, non_p_part=1)


def test_graph_document_aliases():
    document = GraphDocument.model_validate(
        {
            "schema": 1,
            "group": "sym:3",
            "prime": 2,
            "vertices": [
                {"id": "a", "order": 1, "index": 6, "class": "type1"},
                {"id": "b", "order": 2, "index": 3},
            ],
            "edges": [[0, 1]],
        }
    )
    assert document.vertices[0].class_tag == "type1"
    assert document.model_dump(by_alias=True)["schema"] == 1


@pytest.mark.parametrize("edges", [[[1, 0]], [[0, 1], [0, 1]], [[0, 2]]])
def test_graph_document_edges(edges):
    vertices = [VertexRecord(id="a", order=1, index=2), VertexRecord(id="b", order=2, index=1)]
    with pytest.raises(ValidationError):
        GraphDocument(group="cyc:2", prime=2, vertices=vertices, edges=edges)


def test_lattice_document_version():
    assert LatticeDocument(descriptor="cyc:2", order=2, subgroups=[]).version.major == 1
    with pytest.raises(ValidationError):
        LatticeDocument(format_version="one", descriptor="cyc:2", order=2, subgroups=[])
