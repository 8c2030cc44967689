"""Línea de comandos de repzeta.

Cada subcomando arma un `Outcome` con el resultado en forma canónica y lo
imprime en texto, LaTeX o como documento estructurado, siempre precedido por
un bloque de procedencia (versión, hash de la entrada, parámetros, semilla).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import logging
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import simplejson

from config import Settings, settings as default_settings

from . import __version__
from .enums import IdentityId, LocalForm, OutputFormat, ProbeStatus
from .exceptions import InvalidArgs, ParseError, ValidationError, ZetaException
from .exactalg import series_of_ratfn
from .gzeta import (
    SplittingData,
    abscissa_from_factorization,
    central_product,
    global_abscissa_from_factorization,
    global_dirichlet_coeffs,
    global_euler,
    local_additive,
    local_multiplicative,
    local_product_form,
    topo_of_factorization,
    topological,
)
from .lattice import LieLattice, make_G_mn, validate
from .poincare import alpha, brute_poincare, smoothness_probe, thm_tech_eval
from .qcomb import (
    OrderedSubset,
    brute_rank_count,
    ordered_subsets,
    rank_count,
    sv_random_trials,
    verify_sv_identity,
    verify_translation_lemma,
)

logger = logging.getLogger(__name__)

_FAMILY_NAME = re.compile(r"^G_?(\d+)x(\d+)$", re.IGNORECASE)
_BRACKET_OBJECT = re.compile(r"\{[^{}]*\}")


# ----------------------------------------------------------------------
# Archivos de entrada
# ----------------------------------------------------------------------
def _read_text(path: str, config: Settings) -> tuple[Path, str]:
    for candidate in config.lattice_candidates(path):
        if candidate.is_file():
            return candidate, candidate.read_text(encoding="utf-8")
    raise ParseError(f"No encontré el archivo {path!r}")


def _bracket_lines(text: str) -> List[int]:
    """Line of every `{...}` object inside the "brackets" array, in order."""
    start = text.find('"brackets"')
    if start < 0:
        return []
    return [text.count("\n", 0, match.start()) + 1 for match in _BRACKET_OBJECT.finditer(text, start)]


def _require_int(doc: dict, key: str, where: str) -> int:
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: el campo {key!r} tiene que ser un entero")
    return value


def parse_lattice_document(doc: Any, text: str = "", source: str = "<documento>") -> LieLattice:
    """Validated `LieLattice` from a decoded lattice document."""
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: se esperaba un objeto con name, d, d_prime y brackets")
    d = _require_int(doc, "d", source)
    d_prime = _require_int(doc, "d_prime", source)
    if d < 0 or d_prime < 0 or d_prime > d:
        raise ParseError(f"{source}: rangos inválidos d={d}, d_prime={d_prime}")
    name = doc.get("name") or Path(source).stem
    brackets = doc.get("brackets", [])
    if not isinstance(brackets, list):
        raise ParseError(f"{source}: 'brackets' tiene que ser una lista")
    lines = _bracket_lines(text)
    m = d - d_prime
    violations: List[str] = []
    table: Dict[tuple, List[int]] = {}
    for position, entry in enumerate(brackets):
        where = f"línea {lines[position]}" if position < len(lines) else f"corchete #{position + 1}"
        if not isinstance(entry, dict):
            raise ParseError(f"{source}, {where}: cada corchete es un objeto con i, j y coeffs")
        i = _require_int(entry, "i", f"{source}, {where}")
        j = _require_int(entry, "j", f"{source}, {where}")
        coeffs = entry.get("coeffs")
        if not isinstance(coeffs, list) or any(isinstance(c, bool) or not isinstance(c, int) for c in coeffs):
            raise ParseError(f"{source}, {where}: 'coeffs' tiene que ser una lista de enteros")
        if not 1 <= i < j <= d:
            violations.append(f"{where}: índices ({i}, {j}) fuera de 1 <= i < j <= {d}")
            continue
        if len(coeffs) != d_prime:
            violations.append(f"{where}: ({i}, {j}) tiene {len(coeffs)} coeficientes y d_prime = {d_prime}")
            continue
        if (i, j) in table:
            violations.append(f"{where}: el par ({i}, {j}) aparece dos veces")
            continue
        if (i > m or j > m) and any(coeffs):
            violations.append(
                f"{where}: 2-nilpotencia: [e{i}, e{j}] != 0 con un índice en el subretículo derivado (> {m})"
            )
        table[(i, j)] = coeffs
    labels = doc.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != d):
        violations.append(f"{source}: 'labels' tiene que tener {d} entradas")
        labels = None
    if violations:
        raise ValidationError(f"{source}: el retículo no es válido", violations)
    lattice = LieLattice.from_brackets(d, d_prime, table, name=str(name), labels=labels)
    report = validate(lattice)
    if not report.ok:
        line = text.count("\n", 0, max(text.find('"brackets"'), 0)) + 1 if text else None
        prefix = f"línea {line}: " if line else ""
        raise ValidationError(f"{source}: el retículo no es válido", [prefix + v for v in report.violations])
    return lattice


def parse_lattice_file(path: str, config: Optional[Settings] = None) -> LieLattice:
    """Read, decode and validate a lattice file."""
    cfg = config or default_settings
    resolved, text = _read_text(path, cfg)
    try:
        doc = simplejson.loads(text)
    except simplejson.JSONDecodeError as exc:
        raise ParseError(f"{resolved.name}, línea {exc.lineno}, columna {exc.colno}: {exc.msg}") from exc
    lattice = parse_lattice_document(doc, text, resolved.name)
    logger.debug(f"Retículo {lattice.name} leído de {resolved}")
    return lattice


def resolve_lattice(ref: str, config: Optional[Settings] = None) -> LieLattice:
    """A family name `G_mxn`, a registered lattice, or a lattice file."""
    from .lattice_registry import lattice_registry

    match = _FAMILY_NAME.match(ref.strip())
    if match:
        return make_G_mn(int(match.group(1)), int(match.group(2)))
    registered = lattice_registry.get_lattice(ref)
    if registered is not None:
        return registered
    return parse_lattice_file(ref, config)


def parse_splitting_file(path: str) -> SplittingData:
    """One residue cardinality per line; blank lines and `#` comments are ignored."""
    file = Path(path)
    if not file.is_file():
        raise ParseError(f"No encontré el archivo {path!r}")
    values = []
    for number, raw in enumerate(file.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(int(line))
        except ValueError as exc:
            raise ParseError(f"{file.name}, línea {number}: {line!r} no es un entero") from exc
    try:
        return SplittingData(tuple(values))
    except InvalidArgs as exc:
        raise ParseError(f"{file.name}: {exc}") from exc


# ----------------------------------------------------------------------
# Resultado y formato
# ----------------------------------------------------------------------
@dataclass
class Outcome:
    command: str
    params: Dict[str, Any]
    result: str
    latex: Optional[str] = None
    lines: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)
    probe: Optional[str] = None
    seed: Optional[int] = None
    lattice: Optional[LieLattice] = None
    exit_code: int = 0

    def input_hash(self) -> str:
        payload = {"command": self.command, "params": self.params}
        if self.lattice is not None:
            payload["lattice"] = self.lattice.digest
        if self.seed is not None:
            payload["seed"] = self.seed
        encoded = simplejson.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(encoded.encode("utf-8")).hexdigest()

    def provenance(self) -> Dict[str, Any]:
        out = {"tool": "repzeta", "version": __version__, "input_sha256": self.input_hash()}
        if self.lattice is not None:
            out["lattice"] = {"name": self.lattice.name, "digest": self.lattice.digest}
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _header(outcome: Outcome, marker: str) -> List[str]:
    params = " ".join(f"{k}={v}" for k, v in sorted(outcome.params.items()))
    rows = [
        f"{marker} repzeta {__version__} {outcome.command}",
        f"{marker} input-sha256: {outcome.input_hash()}",
        f"{marker} params: {params}",
    ]
    if outcome.lattice is not None:
        rows.append(f"{marker} lattice: {outcome.lattice.name} ({outcome.lattice.digest[:16]})")
    if outcome.seed is not None:
        rows.append(f"{marker} seed: {outcome.seed}")
    if outcome.probe is not None:
        rows.append(f"{marker} smoothness-probe: {outcome.probe}")
    return rows


def render(outcome: Outcome, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.STRUCTURED:
        document = {
            "inputs": {"command": outcome.command, **outcome.params},
            "result": outcome.result,
            "details": outcome.details,
            "provenance": outcome.provenance(),
        }
        if outcome.probe is not None:
            document["smoothness_probe"] = outcome.probe
        return simplejson.dumps(document, sort_keys=True, indent=2)
    if fmt is OutputFormat.LATEX:
        body = [outcome.latex or outcome.result]
        return "\n".join(_header(outcome, "%") + body)
    return "\n".join(_header(outcome, "#") + [outcome.result] + outcome.lines)


# ----------------------------------------------------------------------
# Subcomandos
# ----------------------------------------------------------------------
def _parse_subset(text: Optional[str], j: int) -> Optional[OrderedSubset]:
    if text is None:
        return None
    items = [piece for piece in re.split(r"[,\s]+", text.strip()) if piece]
    try:
        return OrderedSubset(tuple(int(x) for x in items), j)
    except ValueError as exc:
        raise InvalidArgs(f"--I {text!r} no es una lista de enteros") from exc


def _cmd_verify_identity(args, config: Settings) -> Outcome:
    identity = IdentityId(args.id)
    params: Dict[str, Any] = {"id": identity.value}
    if identity is IdentityId.SV:
        if args.j is None:
            raise InvalidArgs("sv-1.5 necesita --j")
        params.update(j=args.j, mode=args.mode)
        if args.mode == "symbolic":
            ok = verify_sv_identity(args.j, "symbolic", config=config)
            return Outcome("verify-identity", params, "verified" if ok else "falsified", exit_code=0 if ok else 1)
        seed = args.seed if args.seed is not None else config.seed
        params["trials"] = args.trials
        ok, triples = sv_random_trials(args.j, args.trials, seed)
        used = [[str(v) for v in triple] for triple in triples]
        return Outcome(
            "verify-identity",
            params,
            "verified" if ok else "falsified",
            lines=[f"points = {len(used)}"],
            details={"points": used},
            seed=seed,
            exit_code=0 if ok else 1,
        )
    if identity is IdentityId.TRANSLATION:
        if args.j is None or args.a is None:
            raise InvalidArgs("translation necesita --j y --a")
        params.update(j=args.j, a=args.a)
        subset = _parse_subset(args.I, args.j)
        subsets = [subset] if subset is not None else list(ordered_subsets(args.j))
        if subset is not None:
            params["I"] = list(subset)
        failures = [list(s) for s in subsets if not verify_translation_lemma(args.a, args.j, s)]
        ok = not failures
        return Outcome(
            "verify-identity",
            params,
            "verified" if ok else "falsified",
            lines=[f"subsets = {len(subsets)}"] + [f"fails at I = {f}" for f in failures],
            details={"subsets": len(subsets), "failures": failures},
            exit_code=0 if ok else 1,
        )
    if args.i is None or args.j is None:
        raise InvalidArgs("rank-count necesita --i y --j")
    params.update(i=args.i, j=args.j, p=args.p)
    ranks = [args.r] if args.r is not None else list(range(args.i + 1))
    table = []
    ok = True
    for r in ranks:
        formula = rank_count(args.i, args.j, r, args.p)
        brute = brute_rank_count(args.i, args.j, r, args.p, config)
        ok = ok and formula == brute
        table.append({"r": r, "formula": formula, "brute": brute})
    if args.r is None:
        total = sum(row["formula"] for row in table)
        ok = ok and total == args.p ** (args.i * args.j)
    else:
        params["r"] = args.r
    return Outcome(
        "verify-identity",
        params,
        "verified" if ok else "falsified",
        lines=[f"r={row['r']}: formula={row['formula']} brute={row['brute']}" for row in table],
        details={"ranks": table},
        exit_code=0 if ok else 1,
    )


def _cmd_poincare_brute(args, config: Settings) -> Outcome:
    L = resolve_lattice(args.lattice, config)
    series = brute_poincare(L, args.p, args.max_weight, config)
    return Outcome(
        "poincare-brute",
        {"p": args.p, "max_weight": args.max_weight},
        str(series),
        latex=series.to_latex(),
        details={"coefficients": [str(c) for c in series.coeffs]},
        lattice=L,
    )


def _cmd_thm_tech(args, config: Settings) -> Outcome:
    L = resolve_lattice(args.lattice, config)
    tech = thm_tech_eval(L, args.p, probe=not args.no_probe, config=config)
    return Outcome(
        "thm-tech",
        {"p": args.p, "probe": not args.no_probe},
        str(tech.value),
        latex=tech.value.to_latex(),
        lines=[f"sequences = {len(tech.sequences)}"],
        details={"sequences": tech.sequences},
        probe=tech.probe.value,
        lattice=L,
    )


def _cmd_alpha(args, config: Settings) -> Outcome:
    L = resolve_lattice(args.lattice, config)
    report = alpha(L, args.p, config)
    return Outcome(
        "alpha",
        {"p": args.p},
        f"alpha = {report.alpha}",
        latex=f"\\alpha = {report.alpha}",
        lines=[f"witness = {list(report.witness)}"],
        details=report.as_dict(),
        lattice=L,
    )


def _cmd_smoothness(args, config: Settings) -> Outcome:
    L = resolve_lattice(args.lattice, config)
    report = smoothness_probe(L, args.p, config)
    lines = [f"points = {report.points}"]
    if report.inconclusive:
        lines.append(f"inconclusive = {[list(x) for x in report.inconclusive]}")
    if report.witness:
        lines.append(f"witness = {report.witness}")
    return Outcome(
        "smoothness",
        {"p": args.p},
        f"status = {report.status.value}",
        lines=lines,
        details=report.as_dict(),
        probe=report.status.value,
        lattice=L,
        exit_code=1 if report.status is ProbeStatus.FAIL else 0,
    )


def _cmd_local_zeta(args, config: Settings) -> Outcome:
    form = LocalForm(args.form)
    q = None if args.symbolic else args.q
    params: Dict[str, Any] = {"m": args.m, "n": args.n, "form": form.value, "q": q if q is not None else "symbolic"}
    if form is LocalForm.PRODUCT:
        if q is not None:
            raise InvalidArgs("La forma product es simbólica; usá --symbolic")
        F = local_product_form(args.m, args.n)
        value = F.to_ratfn()
        return Outcome(
            "local-zeta",
            params,
            str(F),
            latex=value.to_latex(),
            lines=[f"expanded = {value}"],
            details=F.as_dict(),
        )
    if form is LocalForm.SERIES:
        params["order"] = args.order
        series = series_of_ratfn(local_multiplicative(args.m, args.n), args.order, q)
        return Outcome("local-zeta", params, str(series), latex=series.to_latex())
    builder = local_additive if form is LocalForm.ADDITIVE else local_multiplicative
    value = builder(args.m, args.n, q)
    return Outcome("local-zeta", params, str(value), latex=value.to_latex())


def _cmd_global_zeta(args, config: Settings) -> Outcome:
    params: Dict[str, Any] = {"m": args.m, "n": args.n}
    places = None
    if args.splitting:
        places = parse_splitting_file(args.splitting)
        params["splitting"] = list(places.cardinalities)
    else:
        params["field"] = args.field
    if args.coeffs is not None:
        params["coeffs"] = args.coeffs
        coeffs = global_dirichlet_coeffs(args.m, args.n, args.coeffs, places)
        return Outcome(
            "global-zeta",
            params,
            ", ".join(str(c) for c in coeffs),
            details={"coefficients": coeffs},
        )
    try:
        s = Fraction(args.eval)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidArgs(f"--eval {args.eval!r} no es un racional") from exc
    params.update(s=str(s), places=args.places)
    result = global_euler(args.m, args.n, s, places, limit=args.places, config=config)
    data = result.as_dict()
    lines = [f"places = {result.places}", f"error_bound = {data['error_bound']}"]
    if data["exact"] is not None:
        lines.append(f"exact = {data['exact']}")
    return Outcome("global-zeta", params, data["value"], lines=lines, details=data)


def _cmd_topological(args, config: Settings) -> Outcome:
    value = topological(args.m, args.n)
    from_product = topo_of_factorization(local_product_form(args.m, args.n))
    return Outcome(
        "topological",
        {"m": args.m, "n": args.n},
        str(value),
        latex=value.to_latex(),
        details={"matches_product_form": from_product == value},
    )


def _cmd_central_product(args, config: Settings) -> Outcome:
    F = central_product(local_product_form(args.m, args.n), args.k)
    local = abscissa_from_factorization(F)
    global_ = global_abscissa_from_factorization(F)
    return Outcome(
        "central-product",
        {"m": args.m, "n": args.n, "k": args.k},
        str(F),
        latex=F.to_ratfn().to_latex(),
        lines=[f"local_abscissa = {local}", f"global_abscissa = {global_}"],
        details={**F.as_dict(), "local_abscissa": str(local), "global_abscissa": str(global_)},
    )


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------
def _add_lattice_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lattice", required=True, help="archivo de retículo, nombre registrado o G_mxn")
    parser.add_argument("--p", type=int, required=True, help="primo")


def _add_family_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=int, required=True)
    parser.add_argument("--n", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repzeta",
        description="Funciones zeta de representaciones de retículos de Lie 2-nilpotentes.",
    )
    parser.add_argument("--version", action="version", version=f"repzeta {__version__}")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)
    parser.add_argument("--unsafe-limits", action="store_true", help="desactiva los guardas de enumeración")
    parser.add_argument("--threads", type=int, default=None, help="procesos para las enumeraciones")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=argparse.SUPPRESS)
    common.add_argument("--unsafe-limits", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify-identity", parents=[common], help="verifica identidades q-combinatorias")
    verify.add_argument("--id", required=True, choices=[i.value for i in IdentityId])
    verify.add_argument("--j", type=int)
    verify.add_argument("--a", type=int)
    verify.add_argument("--i", type=int)
    verify.add_argument("--r", type=int)
    verify.add_argument("--I", help="subconjunto ordenado, p. ej. 0,2")
    verify.add_argument("--p", type=int, default=2)
    verify.add_argument("--mode", choices=["symbolic", "random"], default="symbolic")
    verify.add_argument("--trials", type=int, default=20)
    verify.add_argument("--seed", type=int, default=None)
    verify.set_defaults(handler=_cmd_verify_identity)

    brute = sub.add_parser("poincare-brute", parents=[common], help="serie de Poincaré por enumeración directa")
    _add_lattice_args(brute)
    brute.add_argument("--max-weight", type=int, required=True)
    brute.set_defaults(handler=_cmd_poincare_brute)

    tech = sub.add_parser("thm-tech", parents=[common], help="serie de Poincaré por clases de núcleo")
    _add_lattice_args(tech)
    tech.add_argument("--no-probe", action="store_true")
    tech.set_defaults(handler=_cmd_thm_tech)

    alpha_cmd = sub.add_parser("alpha", parents=[common], help="invariante α")
    _add_lattice_args(alpha_cmd)
    alpha_cmd.set_defaults(handler=_cmd_alpha)

    smooth = sub.add_parser("smoothness", parents=[common], help="sondeo de suavidad geométrica")
    _add_lattice_args(smooth)
    smooth.set_defaults(handler=_cmd_smoothness)

    local = sub.add_parser("local-zeta", parents=[common], help="factor local de G_{m×n}")
    _add_family_args(local)
    which_q = local.add_mutually_exclusive_group()
    which_q.add_argument("--q", type=int)
    which_q.add_argument("--symbolic", action="store_true")
    local.add_argument("--form", choices=[f.value for f in LocalForm], default=LocalForm.MULTIPLICATIVE.value)
    local.add_argument("--order", type=int, default=6)
    local.set_defaults(handler=_cmd_local_zeta)

    global_cmd = sub.add_parser("global-zeta", parents=[common], help="producto de Euler y coeficientes de Dirichlet")
    _add_family_args(global_cmd)
    field_group = global_cmd.add_mutually_exclusive_group()
    field_group.add_argument("--field", choices=["Q"], default="Q")
    field_group.add_argument("--splitting", help="archivo con un cardinal residual por línea")
    what = global_cmd.add_mutually_exclusive_group(required=True)
    what.add_argument("--eval", help="s racional a la derecha de la abscisa")
    what.add_argument("--coeffs", type=int, help="cantidad de coeficientes ã_i")
    global_cmd.add_argument("--places", type=int, default=1000, help="cota para los primos de Q")
    global_cmd.set_defaults(handler=_cmd_global_zeta)

    topo = sub.add_parser("topological", parents=[common], help="zeta topológica")
    _add_family_args(topo)
    topo.set_defaults(handler=_cmd_topological)

    central = sub.add_parser("central-product", parents=[common], help="producto central k veces")
    _add_family_args(central)
    central.add_argument("--k", type=int, required=True)
    central.set_defaults(handler=_cmd_central_product)
    return parser


def _config_for(args, base: Settings) -> Settings:
    changes: Dict[str, Any] = {}
    threads = getattr(args, "threads", None)
    if getattr(args, "unsafe_limits", False):
        changes["unsafe_limits"] = True
        logger.warning("Guardas de enumeración desactivados (--unsafe-limits)")
    if threads is not None:
        if threads < 1:
            raise InvalidArgs("--threads tiene que ser positivo")
        changes["workers"] = threads
    return dataclasses.replace(base, **changes) if changes else base


def run(args: argparse.Namespace, config: Optional[Settings] = None) -> tuple[int, str]:
    """Dispatch a parsed command; returns (exit code, formatted output)."""
    cfg = _config_for(args, config or default_settings)
    fmt = OutputFormat(getattr(args, "format", None) or cfg.output_format)
    handler: Callable[[argparse.Namespace, Settings], Outcome] = args.handler
    outcome = handler(args, cfg)
    return outcome.exit_code, render(outcome, fmt)


def main(argv: Optional[Sequence[str]] = None, config: Optional[Settings] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, output = run(args, config)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        for violation in e.violations:
            print(f"  - {violation}", file=sys.stderr)
        return e.exit_code
    except ZetaException as e:
        logger.debug(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    print(output)
    return code
