import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv
from loguru import logger

from dynsigma import __version__
from dynsigma.algebra.exactpoly import ExactPolynomial, format_rational, parse_rational
from dynsigma.core.config import JobConfig, build_job_config, load_config
from dynsigma.core.errors import EXIT_DOMAIN, EXIT_OK, DynSigmaError, UsageError
from dynsigma.core.logging import configure_logging
from dynsigma.dynamics.families import (
    COLUMN_MAJOR,
    FAMILIES,
    ROW_MAJOR,
    SplitSpec,
    TriangularSpec,
    cartesian_product,
    family_builder,
    powering_map,
    segre_power_product,
    split_endomorphism,
    triangular_endomorphism,
)
from dynsigma.dynamics.monic import (
    MonicParams,
    hypersurface_eval,
    monic_fiber_report,
    monic_map,
    monic_sigma_generators,
)
from dynsigma.dynamics.projdyn import DynamicalSystem, multiplier_charpoly, period_count, rational_periodic_spectrum
from dynsigma.dynamics.recovery import recover_triangular_2_2
from dynsigma.dynamics.relations import check_dependence, check_ueda, corollary_residual
from dynsigma.dynamics.sigma import CHOW, MODES, extract_sigmas, isospectral_scan, sigma_dim1_resultant, sigma_poly
from dynsigma.services.map_store import (
    charpolys_to_document,
    map_to_document,
    read_map,
    read_map_with_points,
    read_spectrum,
    resolve_output_path,
    spectrum_to_document,
    write_document,
)

RELATIONS = ("ueda", "corollary", "dependence")
STRUCTURAL_KINDS = ("powering", "product", "segre", "split", "triangular", "monic")

# Maps with more periodic points than this need --tier slow.
FAST_TIER_MAX_POINTS = 64

Outcome = Tuple[Any, List[str], int]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


def _rational_list(text: str) -> List[Fraction]:
    return [parse_rational(part) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--max-pairs", type=int, default=None)
    common.add_argument("--max-coeff-bits", type=int, default=None)
    common.add_argument("--time-limit", type=float, default=None)
    common.add_argument("--format", choices=("text", "structured"), default=None)
    common.add_argument("--tier", choices=("fast", "slow"), default=None)
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--output", default=None, help="Also write the structured document to this file")
    common.add_argument("--log-level", default=None)

    parser = _Parser(prog="dynsigma", description="Multiplier spectra invariants of endomorphisms of P^N")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sigma", parents=[common], help="Sigma_n polynomial and sigma table of a map")
    p.add_argument("--map", required=True)
    p.add_argument("--period", type=int, default=1)
    p.add_argument("--mode", choices=MODES, default=CHOW)
    p.add_argument("--jacobian", choices=("full", "stratum"), default="full")
    p.add_argument("--resultant", action="store_true", help="Use the resultant path (maps of P^1)")

    p = sub.add_parser("verify", parents=[common], help="Check a multiplier relation")
    p.add_argument("--map", required=True)
    p.add_argument("--relation", choices=RELATIONS, required=True)
    p.add_argument("--period", type=int, default=1)

    p = sub.add_parser("construct", parents=[common], help="Build a map from a family")
    p.add_argument("--kind", choices=STRUCTURAL_KINDS + tuple(FAMILIES), required=True)
    p.add_argument("--param", default=None)
    p.add_argument("--map", default=None)
    p.add_argument("--factor", default=None)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--flattening", choices=(ROW_MAJOR, COLUMN_MAJOR), default=ROW_MAJOR)
    p.add_argument("--components", default=None, help="Semicolon-separated affine components")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--params", default=None)

    p = sub.add_parser("scan", parents=[common], help="Sigma_n across parameter samples of a family")
    p.add_argument("--family", choices=tuple(FAMILIES), required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--period", type=int, default=1)
    p.add_argument("--mode", choices=MODES, default=CHOW)
    p.add_argument("--jacobian", choices=("full", "stratum"), default="full")

    p = sub.add_parser("recover", parents=[common], help="Triangular quadratic maps of P^2 with a given spectrum")
    p.add_argument("--spectrum", required=True)

    p = sub.add_parser("monic", parents=[common], help="Monic family: map, sigma generators, quintic")
    p.add_argument("--params", required=True)
    p.add_argument("--check-hypersurface", action="store_true")
    p.add_argument("--fiber", action="store_true")

    p = sub.add_parser("spectrum", parents=[common], help="Rational periodic spectrum of a map")
    p.add_argument("--map", required=True)
    p.add_argument("--period", type=int, default=1)
    return parser


def _require_tier(job: JobConfig, f: DynamicalSystem, n: int) -> None:
    count = period_count(f.N, f.d, n)
    if job.tier == "fast" and count > FAST_TIER_MAX_POINTS:
        raise UsageError(f"{count} periodic points exceed the fast tier ({FAST_TIER_MAX_POINTS}); use --tier slow")


def _table_lines(table_doc: Dict[str, Any]) -> List[str]:
    return [f"sigma[{key}] = {value}" for key, value in table_doc["entries"].items() if value != "0"]


def _cmd_sigma(args: argparse.Namespace, job: JobConfig) -> Outcome:
    f = read_map(args.map)
    _require_tier(job, f, args.period)
    if args.resultant:
        S = sigma_dim1_resultant(f, args.period)
    else:
        S = sigma_poly(f, args.period, args.mode, job.limits(), args.jacobian == "stratum")
    table = extract_sigmas(S).to_document()
    payload = {"map": map_to_document(f), "sigma": str(S), "Dn": S.Dn, "period": S.n, "mode": S.mode, "table": table}
    lines = [f"Sigma_{S.n} = {S}"] + _table_lines(table)
    return payload, lines, EXIT_OK


def _cmd_verify(args: argparse.Namespace, job: JobConfig) -> Outcome:
    f = read_map(args.map)
    _require_tier(job, f, args.period)
    payload: Dict[str, Any] = {"relation": args.relation, "map": map_to_document(f)}
    if args.relation == "ueda":
        report = check_ueda(rational_periodic_spectrum(f, args.period, job.limits()))
        holds = report.holds
        payload.update(lhs=str(report.lhs), rhs=str(report.rhs))
        detail = [f"lhs = {report.lhs}", f"rhs = {report.rhs}"]
    else:
        table = extract_sigmas(sigma_poly(f, args.period, CHOW, job.limits()))
        if args.relation == "corollary":
            residual = corollary_residual(table)
            holds = residual == 0
            payload["residual"] = format_rational(residual)
            detail = [] if holds else [f"residual = {residual}"]
        else:
            mismatches = check_dependence(table)
            holds = not mismatches
            payload["mismatches"] = [
                {"i": m.i, "j": m.j, "predicted": format_rational(m.predicted), "actual": format_rational(m.actual)}
                for m in mismatches
            ]
            detail = [f"sigma[{m.i},{m.j}]: predicted {m.predicted}, got {m.actual}" for m in mismatches]
    payload["holds"] = holds
    return payload, ["HOLDS" if holds else "FAILS"] + detail, EXIT_OK if holds else EXIT_DOMAIN


def _require(value: Optional[str], flag: str, kind: str) -> str:
    if value is None:
        raise UsageError(f"construct --kind {kind} needs {flag}")
    return value


def _construct(args: argparse.Namespace) -> DynamicalSystem:
    kind = args.kind
    if kind in FAMILIES:
        return family_builder(kind)(parse_rational(_require(args.param, "--param", kind)))
    if kind == "powering":
        if args.dim is None or args.degree is None:
            raise UsageError("construct --kind powering needs --dim and --degree")
        return powering_map(args.dim, args.degree)
    if kind == "product":
        return cartesian_product(
            read_map(_require(args.map, "--map", kind)), read_map(_require(args.factor, "--factor", kind))
        )
    if kind == "segre":
        return segre_power_product(read_map(_require(args.map, "--map", kind)), args.copies, args.flattening)
    if kind == "monic":
        return monic_map(MonicParams.parse(_require(args.params, "--params", kind)))
    texts = [t.strip() for t in _require(args.components, "--components", kind).split(";") if t.strip()]
    if kind == "split":
        return split_endomorphism(SplitSpec(tuple(ExactPolynomial.parse(t, ("x",)) for t in texts)))
    return triangular_endomorphism(TriangularSpec.from_strings(texts))


def _cmd_construct(args: argparse.Namespace, job: JobConfig) -> Outcome:
    f = _construct(args)
    doc = map_to_document(f)
    return doc, [f"[{' : '.join(doc['coords'])}]"], EXIT_OK


def _cmd_scan(args: argparse.Namespace, job: JobConfig) -> Outcome:
    samples = _rational_list(args.samples)
    if not samples:
        raise UsageError("scan needs at least one sample")
    builder = family_builder(args.family)
    for sample in samples:
        try:
            sample_map = builder(sample)
        except DynSigmaError:
            continue
        _require_tier(job, sample_map, args.period)
        break
    report = isospectral_scan(
        builder,
        samples,
        n=args.period,
        mode=args.mode,
        limits=job.limits(),
        stratum_jacobian=args.jacobian == "stratum",
        workers=job.workers,
        worker_name=job.name_app,
    )
    results = []
    lines = []
    for r in report.results:
        value = str(r.sigma) if r.sigma is not None else None
        results.append({"sample": format_rational(r.sample), "sigma": value, "error": r.error})
        lines.append(f"a = {r.sample}: {value if value is not None else r.error}")
    lines.append("AGREE" if report.agree else "DIFFER")
    payload = {"family": args.family, "agree": report.agree, "results": results}
    return payload, lines, EXIT_OK


def _cmd_recover(args: argparse.Namespace, job: JobConfig) -> Outcome:
    spectrum = read_spectrum(args.spectrum)
    limits = job.limits()
    recovered = recover_triangular_2_2(spectrum, limits)
    maps = []
    lines = []
    for g in recovered:
        S = sigma_poly(g, 1, CHOW, limits)
        doc = map_to_document(g)
        maps.append({"map": doc, "sigma": str(S)})
        lines.append(f"[{' : '.join(doc['coords'])}]")
        lines.append(f"  Sigma_1 = {S}")
    if not recovered:
        lines.append("no triangular map reproduces this spectrum")
    return {"recovered": maps}, lines, EXIT_OK


def _cmd_monic(args: argparse.Namespace, job: JobConfig) -> Outcome:
    params = MonicParams.parse(args.params)
    f = monic_map(params)
    generators = monic_sigma_generators(params)
    values = [format_rational(v) for v in generators.values]
    payload: Dict[str, Any] = {"map": map_to_document(f), "generators": values}
    lines = [f"[{' : '.join(f.to_strings())}]", f"(s12, s22, s23, s24, s33) = ({', '.join(values)})"]
    if args.check_hypersurface:
        residual = hypersurface_eval(generators)
        payload["hypersurface_residual"] = format_rational(residual)
        lines.append(f"quintic residual = {residual}")
    if args.fiber:
        report = monic_fiber_report(generators, job.limits())
        payload["fiber"] = {
            "dimension": report.dimension,
            "solutions": [[format_rational(v) for v in s.as_tuple()] for s in report.solutions],
            "nonrational": report.nonrational,
        }
        lines.append(f"fiber dimension = {report.dimension}")
        lines.extend(f"  ({', '.join(str(v) for v in s.as_tuple())})" for s in report.solutions)
        if report.nonrational:
            lines.append("  non-rational fiber points present")
    return payload, lines, EXIT_OK


def _cmd_spectrum(args: argparse.Namespace, job: JobConfig) -> Outcome:
    f, points = read_map_with_points(args.map)
    _require_tier(job, f, args.period)
    if points:
        # listed points only, no Groebner work
        records = charpolys_to_document([multiplier_charpoly(f, P, args.period) for P in points])
    else:
        records = spectrum_to_document(rational_periodic_spectrum(f, args.period, job.limits()))
    lines = []
    for record in records:
        shown = record.get("eigenvalues") or record["charpoly"]
        where = f"({' : '.join(record['point'])}) " if "point" in record else ""
        lines.append(f"{where}{shown} x{record['multiplicity']}")
    return records, lines, EXIT_OK


_HANDLERS = {
    "sigma": _cmd_sigma,
    "verify": _cmd_verify,
    "construct": _cmd_construct,
    "scan": _cmd_scan,
    "recover": _cmd_recover,
    "monic": _cmd_monic,
    "spectrum": _cmd_spectrum,
}


def _emit(payload: Any, lines: List[str], job: JobConfig) -> None:
    if job.output_format == "structured":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def run(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"dynsigma: error: {exc}", file=sys.stderr)
        return exc.exit_code

    configure_logging(args.log_level)
    try:
        config = load_config()
        job = build_job_config(
            config,
            command=args.command,
            max_pairs=args.max_pairs,
            max_coeff_bits=args.max_coeff_bits,
            time_limit=args.time_limit,
            output_format=args.format,
            tier=args.tier,
            workers=args.workers,
            output_path=args.output,
        )
        logger.debug("Running {} with {}", args.command, job)
        payload, lines, code = _HANDLERS[args.command](args, job)
        if job.output_path:
            target = write_document(resolve_output_path(job.output_path, config.path_results), payload)
            logger.info("Wrote {} result to {}", args.command, target)
    except DynSigmaError as exc:
        logger.error("{} failed: {}", args.command, exc)
        print(f"dynsigma: error: {exc}", file=sys.stderr)
        return exc.exit_code
    _emit(payload, lines, job)
    return code


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
