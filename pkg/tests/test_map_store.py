from fractions import Fraction

import pytest

from dynsigma.algebra.exactpoly import ExactPolynomial
from dynsigma.core.errors import DocumentError, InvalidMapError
from dynsigma.dynamics.families import powering_map
from dynsigma.dynamics.projdyn import (
    CharPoly,
    DynamicalSystem,
    ProjectivePoint,
    SpectrumEntry,
    SpectrumList,
    rational_periodic_spectrum,
)
from dynsigma.dynamics.recovery import EigenPairMultiset
from dynsigma.services.map_store import (
    charpolys_to_document,
    eigen_pairs_to_document,
    map_from_document,
    map_with_points_from_document,
    read_document,
    read_map,
    read_map_with_points,
    read_spectrum,
    resolve_output_path,
    spectrum_from_document,
    spectrum_to_document,
    write_document,
    write_map,
)


def test_map_file(tmp_path):
    f = DynamicalSystem.from_strings(["x0^2 - 2*x1^2", "x1^2"])
    target = write_map(tmp_path / "maps" / "quad.json", f)
    assert target.exists()
    assert read_document(target) == {"coords": f.to_strings(), "degree": 2, "dim": 1}
    assert read_map(target) == f


def test_map_file_with_points(tmp_path):
    f = DynamicalSystem.from_strings(["x0^2 - 2*x1^2", "x1^2"])
    points = (ProjectivePoint.of(4, 2), ProjectivePoint.of("-1", "1"))
    target = write_map(tmp_path / "quad.json", f, points)
    assert read_document(target)["points"] == [["2", "1"], ["-1", "1"]]
    assert read_map_with_points(target) == (f, points)
    assert read_map(target) == f
    assert read_map_with_points(write_map(tmp_path / "bare.json", f)) == (f, ())


@pytest.mark.parametrize(
    "points",
    [
        "2,1",
        [["2"]],
        [["2", "1", "0"]],
        [["0", "0"]],
        [["1/0", "1"]],
        [["two", "1"]],
        [[0.5, "1"]],
        [None],
    ],
)
def test_malformed_map_points(points):
    with pytest.raises(DocumentError):
        map_with_points_from_document({"coords": ["x0^2", "x1^2"], "points": points})


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"coords": "x0^2"},
        {"coords": ["x0^2", 3]},
        {"coords": ["x0^2", "x1^2"], "dim": 2},
        {"coords": ["x0^2", "x1^2"], "degree": 3},
    ],
)
def test_malformed_map_documents(doc):
    with pytest.raises(DocumentError):
        map_from_document(doc)


def test_map_document_is_validated():
    with pytest.raises(InvalidMapError):
        map_from_document({"coords": ["x0^2", "x0*x1"]})
    f = map_from_document({"coords": ["x0^2", "x0*x1"]}, check_morphism=False)
    assert f.d == 2


def test_missing_and_broken_files(tmp_path):
    with pytest.raises(DocumentError):
        read_document(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(DocumentError):
        read_document(broken)


def test_resolve_output_path(tmp_path):
    assert resolve_output_path("a.json") == resolve_output_path("a.json", None)
    assert resolve_output_path("a.json", "results").as_posix() == "results/a.json"
    absolute = tmp_path / "a.json"
    assert resolve_output_path(absolute, "results") == absolute


def test_spectrum_documents(tmp_path):
    pairs = EigenPairMultiset.of([(0, 0), (0, 2), (Fraction(1, 2), -3)])
    doc = eigen_pairs_to_document(pairs)
    assert {"eigenvalues": ["-3", "1/2"], "multiplicity": 1} in doc
    path = write_document(tmp_path / "spectrum.json", doc)
    assert read_spectrum(path) == pairs


def test_spectrum_multiplicity_defaults_to_one():
    doc = [{"eigenvalues": ["0", "2"]}, {"eigenvalues": ["0", "0"], "multiplicity": 2}]
    assert spectrum_from_document(doc) == EigenPairMultiset.of([(0, 2), (0, 0), (0, 0)])


@pytest.mark.parametrize(
    "doc",
    [
        {"eigenvalues": ["0"]},
        [{"multiplicity": 1}],
        [{"eigenvalues": ["zero"]}],
        [{"eigenvalues": ["1/0"]}],
        [{"eigenvalues": ["0"]}, {"eigenvalues": ["0", "1"]}],
        [{"eigenvalues": ["0"], "multiplicity": 0}],
    ],
)
def test_malformed_spectrum_documents(doc):
    with pytest.raises(DocumentError):
        spectrum_from_document(doc)


def test_spectrum_to_document_falls_back_to_charpolys():
    rational = spectrum_to_document(rational_periodic_spectrum(powering_map(2, 2)))
    assert sum(r["multiplicity"] for r in rational) == 7
    assert all("eigenvalues" in r for r in rational)
    t = ExactPolynomial.variable("t", ("t",))
    entry = SpectrumEntry(charpoly=CharPoly(poly=t * t - 2, dim=2), multiplicity=7)
    records = spectrum_to_document(SpectrumList(entries=(entry,), N=2, d=2))
    assert records == [{"charpoly": "t^2 - 2", "multiplicity": 7}]


def test_charpolys_to_document():
    t = ExactPolynomial.variable("t", ("t",))
    P = ProjectivePoint.of(2, 1)
    records = charpolys_to_document(
        [CharPoly(poly=t - 4, dim=1, point=P), CharPoly(poly=t * t - 2, dim=2), CharPoly(poly=t * t, dim=2)]
    )
    assert records == [
        {"charpoly": "t - 4", "multiplicity": 1, "point": ["2", "1"], "eigenvalues": ["4"]},
        {"charpoly": "t^2 - 2", "multiplicity": 1},
        {"charpoly": "t^2", "multiplicity": 1, "eigenvalues": ["0", "0"]},
    ]


def test_failed_write_leaves_no_temp_file(tmp_path):
    target = tmp_path / "out.json"
    with pytest.raises(TypeError):
        write_document(target, {"x": object()})
    assert not target.exists()
    assert [p.name for p in tmp_path.iterdir() if p.suffix != ".lock"] == []
