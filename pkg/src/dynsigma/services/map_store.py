import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from filelock import FileLock
from loguru import logger

from dynsigma.algebra.exactpoly import format_rational, parse_rational, rational_roots
from dynsigma.core.errors import DocumentError, DynSigmaError, IrrationalSpectrumError
from dynsigma.dynamics.projdyn import CharPoly, DynamicalSystem, ProjectivePoint, SpectrumList
from dynsigma.dynamics.recovery import EigenPairMultiset, eigen_pairs_from_spectrum

PathLike = Union[str, Path]


def _lock_path(path: Path) -> str:
    return str(path.with_name(path.name + ".lock"))


def resolve_output_path(path: PathLike, results_dir: Optional[str] = None) -> Path:
    """Relative output paths land under PATH_RESULTS when it is set."""
    target = Path(path)
    if results_dir and not target.is_absolute():
        target = Path(results_dir) / target
    return target


def write_document(path: PathLike, payload: Any) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with FileLock(_lock_path(target)):
        with tempfile.NamedTemporaryFile(
            "w",
            delete=False,
            dir=target.parent,
            encoding="utf-8",
        ) as tmp_file:
            try:
                json.dump(payload, tmp_file, indent=2, sort_keys=True)
                tmp_file.write("\n")
            except BaseException:
                tmp_file.close()
                os.unlink(tmp_file.name)
                raise
        os.replace(tmp_file.name, target)
    logger.debug("Wrote document {}", target)
    return target


def read_document(path: PathLike) -> Any:
    source = Path(path)
    if not source.exists():
        raise DocumentError(f"No such document: {source}")
    with FileLock(_lock_path(source)):
        try:
            with source.open("r", encoding="utf-8") as handle:
                return json.load(handle)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"{source} is not valid JSON: {exc}") from exc


# -- maps --------------------------------------------------------------


def map_to_document(f: DynamicalSystem, points: Sequence[ProjectivePoint] = ()) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"dim": f.N, "degree": f.d, "coords": f.to_strings()}
    if points:
        doc["points"] = [p.as_strings() for p in points]
    return doc


def points_from_document(doc: Any, N: int) -> Tuple[ProjectivePoint, ...]:
    if not isinstance(doc, list):
        raise DocumentError("Map 'points' must be a list of coordinate lists")
    points = []
    for k, coords in enumerate(doc):
        if not isinstance(coords, list) or len(coords) != N + 1:
            raise DocumentError(f"Point {k} needs {N + 1} coordinates")
        try:
            points.append(ProjectivePoint.of(*coords))
        except (TypeError, DynSigmaError) as exc:
            raise DocumentError(f"Point {k} is malformed: {exc}") from exc
    return tuple(points)


def map_with_points_from_document(
    doc: Any, check_morphism: bool = True
) -> Tuple[DynamicalSystem, Tuple[ProjectivePoint, ...]]:
    if not isinstance(doc, dict) or not isinstance(doc.get("coords"), list):
        raise DocumentError("Map document needs a 'coords' list")
    coords = doc["coords"]
    if not all(isinstance(c, str) for c in coords):
        raise DocumentError("Map coordinates must be polynomial strings")
    if "dim" in doc and doc["dim"] != len(coords) - 1:
        raise DocumentError(f"Map document says dim {doc['dim']} but has {len(coords)} coordinates")
    f = DynamicalSystem.from_strings(coords, check_morphism=check_morphism)
    if "degree" in doc and doc["degree"] != f.d:
        raise DocumentError(f"Map document says degree {doc['degree']} but coordinates have degree {f.d}")
    points = points_from_document(doc["points"], f.N) if "points" in doc else ()
    return f, points


def map_from_document(doc: Any, check_morphism: bool = True) -> DynamicalSystem:
    return map_with_points_from_document(doc, check_morphism)[0]


def read_map(path: PathLike, check_morphism: bool = True) -> DynamicalSystem:
    return map_from_document(read_document(path), check_morphism)


def read_map_with_points(
    path: PathLike, check_morphism: bool = True
) -> Tuple[DynamicalSystem, Tuple[ProjectivePoint, ...]]:
    return map_with_points_from_document(read_document(path), check_morphism)


def write_map(path: PathLike, f: DynamicalSystem, points: Sequence[ProjectivePoint] = ()) -> Path:
    return write_document(path, map_to_document(f, points))


# -- spectra -----------------------------------------------------------


def spectrum_from_document(doc: Any) -> EigenPairMultiset:
    if not isinstance(doc, list):
        raise DocumentError("Spectrum document must be a list of records")
    records = []
    for k, record in enumerate(doc):
        try:
            eigenvalues = tuple(parse_rational(v) for v in record["eigenvalues"])
            multiplicity = int(record.get("multiplicity", 1))
        except (KeyError, TypeError, ValueError, AttributeError, DynSigmaError) as exc:
            raise DocumentError(f"Spectrum record {k} is malformed: {exc}") from exc
        records.append((eigenvalues, multiplicity))
    try:
        return EigenPairMultiset(tuple(records))
    except DynSigmaError as exc:
        raise DocumentError(f"Spectrum document is inconsistent: {exc}") from exc


def eigen_pairs_to_document(pairs: EigenPairMultiset) -> List[Dict[str, Any]]:
    return [
        {"eigenvalues": [format_rational(v) for v in eigenvalues], "multiplicity": multiplicity}
        for eigenvalues, multiplicity in pairs.pairs
    ]


def spectrum_to_document(spectrum: SpectrumList) -> List[Dict[str, Any]]:
    """Eigenvalue records when every multiplier is rational, characteristic polynomials otherwise."""
    try:
        return eigen_pairs_to_document(eigen_pairs_from_spectrum(spectrum))
    except IrrationalSpectrumError:
        pass
    records = []
    for entry in spectrum.entries:
        record: Dict[str, Any] = {"charpoly": str(entry.charpoly.poly), "multiplicity": entry.multiplicity}
        if entry.point is not None:
            record["point"] = entry.point.as_strings()
        records.append(record)
    return records


def read_spectrum(path: PathLike) -> EigenPairMultiset:
    return spectrum_from_document(read_document(path))


def charpolys_to_document(charpolys: Sequence[CharPoly]) -> List[Dict[str, Any]]:
    """One record per multiplier polynomial; eigenvalues only when they are all rational."""
    records = []
    for cp in charpolys:
        record: Dict[str, Any] = {"charpoly": str(cp.poly), "multiplicity": 1}
        if cp.point is not None:
            record["point"] = cp.point.as_strings()
        roots = rational_roots(cp.poly)
        if sum(m for _, m in roots) == cp.dim:
            record["eigenvalues"] = [format_rational(r) for r, m in roots for _ in range(m)]
        records.append(record)
    return records
