"""Command-line interface.

Commands::

    chdef figure8 verify [--json PATH]
    chdef figure8 sweep --start A --end B --steps N --out CSV [--audit] [--level S]
    chdef bend --datum FILE [--rep FILE] --out FILE
    chdef audit --rep figure8|FILE --alpha A --cusp "m,l" --ball-length L
                (--level S | --calibrate) --out FILE
    chdef classify --rep figure8|FILE --word W --alpha A [--json PATH]

Exit codes: 0 success, 1 a verification or audit failed, 2 malformed input,
3 centralizer precondition failed, 4 a relation check failed.

Every JSON output records the RNG seed; CSV output starts with a '# seed=N'
comment followed by a mandatory header row.  Identical invocations produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bending, chgeom, figure8
from .ring import RingError, RingMatrix
from .words import Representation, Word, WordError, parse_word, reduced_words

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_MALFORMED = 2
EXIT_CENTRALIZER = 3
EXIT_RELATION = 4

FIGURE8_VERIFY_SCHEMA = {
    "type": "object",
    "required": [
        "passed",
        "relation_exact",
        "form_invariant_exact",
        "det_formula_exact",
        "trace_formula_exact",
        "unipotent_exact",
        "form_invariance_by_generator",
        "longitude_char_poly",
        "null_lift",
        "seed",
    ],
    "properties": {
        "passed": {"type": "boolean"},
        "relation_exact": {"type": "boolean"},
        "form_invariant_exact": {"type": "boolean"},
        "det_formula_exact": {"type": "boolean"},
        "trace_formula_exact": {"type": "boolean"},
        "unipotent_exact": {"type": "boolean"},
        "form_invariance_by_generator": {
            "type": "object",
            "additionalProperties": {"type": "boolean"},
        },
        "longitude_char_poly": {"type": "boolean"},
        "null_lift": {
            "type": "object",
            "additionalProperties": {"type": "boolean"},
        },
        "seed": {"type": "integer"},
    },
    "additionalProperties": False,
}

AUDIT_REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "condition1",
        "condition2",
        "parabolic_audit",
        "words_tested",
        "level",
        "passed",
        "disclaimer",
        "seed",
        "finite_statement",
    ],
    "properties": {
        "condition1": {"type": "object"},
        "condition2": {
            "type": "object",
            "required": ["min_margin", "spectrum", "violations"],
        },
        "parabolic_audit": {"type": "array"},
        "words_tested": {"type": "integer"},
        "level": {"type": "number"},
        "passed": {"type": "boolean"},
        "disclaimer": {"type": "string"},
        "seed": {"type": "integer"},
        "excluded_peripheral": {"type": "array"},
        "finite_statement": {"type": "string"},
    },
}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_MALFORMED):
        super().__init__(message)
        self.code = code


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        out = Path(path)
        if out.parent != Path(""):
            out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _load_rep(source: str) -> tuple[Representation, RingMatrix, dict[str, Word]]:
    """Builtin name or rep-file path -> (exact rep, exact form, word macros)."""
    if source == "figure8":
        fam = figure8.build_family()
        macros = {
            "w": fam.presentation.word("n m^-1 n^-1 m"),
            "l": fam.longitude,
        }
        return fam.rep, fam.form, macros
    try:
        data = json.loads(Path(source).read_text())
        rep = Representation.from_json(data)
        form = RingMatrix.from_json(data["form"])
    except (OSError, json.JSONDecodeError, KeyError, WordError, RingError, ValueError) as exc:
        raise CliError(f"cannot load representation {source!r}: {exc}") from exc
    return rep, form, {}


def _rep_to_file_json(rep: Representation, form: RingMatrix) -> dict:
    payload = rep.to_json()
    payload["form"] = form.to_json()
    return payload


# ---------------------------------------------------------------------------
# figure8 verify
# ---------------------------------------------------------------------------


def _cmd_figure8_verify(args) -> int:
    fam = figure8.build_family(check=False)
    invariance = figure8.verify_form_invariance(fam)
    report = {
        "relation_exact": bool(all(fam.rep.check_relations())),
        "form_invariant_exact": all(invariance.values()),
        "form_invariance_by_generator": invariance,
        "det_formula_exact": figure8.verify_det_closed_form(fam),
        "trace_formula_exact": figure8.symbolic_peripheral_trace(fam)
        == figure8.Laurent({0: 6, 1: 1}),
        "unipotent_exact": figure8.meridian_unipotent_exact(fam),
        "longitude_char_poly": figure8.verify_longitude_char_poly(fam),
        "null_lift": figure8.exact_null_lift_checks(fam),
        "seed": args.seed,
    }
    flat = []
    for value in report.values():
        if isinstance(value, bool):
            flat.append(value)
        elif isinstance(value, dict):
            flat.extend(v for v in value.values() if isinstance(v, bool))
    report["passed"] = all(flat)
    for key in (
        "relation_exact",
        "form_invariant_exact",
        "det_formula_exact",
        "trace_formula_exact",
        "unipotent_exact",
        "longitude_char_poly",
    ):
        print(f"{key}: {'ok' if report[key] else 'FAIL'}")
    for name, ok in report["null_lift"].items():
        print(f"null_lift[{name}]: {'ok' if ok else 'FAIL'}")
    _write_json(args.json, report)
    return EXIT_OK if report["passed"] else EXIT_FAILED


# ---------------------------------------------------------------------------
# figure8 sweep
# ---------------------------------------------------------------------------


def _sweep_margin(fam, alpha: float, level: float, ball_length: int, seed: int) -> float | None:
    rep_num = fam.rep.at_angle(alpha)
    form = chgeom.HermitianForm(fam.form.evaluate(alpha))
    form.require_hyperbolic()
    cusp = (fam.meridian, fam.longitude)
    base = chgeom.cusp_fixed_point(form, rep_num, cusp)
    ball = chgeom.Horoball(base, level)
    words = list(reduced_words(fam.presentation.rank, ball_length))
    mats = chgeom.word_matrices(rep_num, words)
    margins, _ = chgeom._condition2_margins(
        form, ball, mats, fam.presentation.names, form.tol.null * 10
    )
    return min((m for _, m in margins), default=None)


def _cmd_figure8_sweep(args) -> int:
    if args.steps < 1:
        raise CliError("--steps must be >= 1")
    fam = figure8.build_family()
    det = figure8.det_series(fam)
    alphas = np.linspace(args.start, args.end, args.steps)
    header = [
        "alpha",
        "re_trace",
        "im_trace",
        "sig_p",
        "sig_q",
        "sig_z",
        "det_J",
    ]
    header += [f"eig_l_{k}_{part}" for k in range(1, 5) for part in ("re", "im")]
    header.append("geo_mult_u")
    if args.audit:
        header.append("consistency_margin")
    lines = [f"# seed={args.seed}", ",".join(header)]
    trace = figure8.symbolic_peripheral_trace(fam)
    for alpha in alphas:
        alpha = float(alpha)
        t = trace.evaluate(alpha)
        p, q, z = figure8.signature_at(fam, alpha)
        peri = figure8.peripheral_analysis(fam, alpha)
        row = [alpha, t.real, t.imag, p, q, z, det.evaluate(alpha).real]
        for eig in peri["eigenvalues"]:
            row += [eig.real, eig.imag]
        row.append(peri["geometric_multiplicity_u"])
        if args.audit:
            if z > 0 or q != 1:
                row.append("")
            else:
                margin = _sweep_margin(fam, alpha, args.level, args.ball_length, args.seed)
                row.append("" if margin is None else repr(margin))
        lines.append(",".join(_csv_cell(v) for v in row))
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {args.steps} rows to {args.out}")
    return EXIT_OK


def _csv_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


# ---------------------------------------------------------------------------
# bend
# ---------------------------------------------------------------------------


def _cmd_bend(args) -> int:
    try:
        datum, rep = bending.load_datum(args.datum)
    except bending.DatumError as exc:
        raise CliError(str(exc)) from exc
    if args.rep:
        rep, _, _ = _load_rep(args.rep)
    if rep is None:
        raise CliError("datum carries no images; pass --rep")
    try:
        bent = bending.bend(datum, rep)
    except bending.CentralizerError as exc:
        raise CliError(str(exc), EXIT_CENTRALIZER) from exc
    except bending.RelationError as exc:
        raise CliError(str(exc), EXIT_RELATION) from exc
    except bending.BendingError as exc:
        raise CliError(str(exc)) from exc
    payload = _rep_to_file_json(bent, bending.standard_form(rep.dim - 1))
    payload["seed"] = args.seed
    payload["relations_exact"] = bent.check_relations()
    payload["peripheral_rotation"] = {}
    for text, signs in datum.crossings.items():
        word = parse_word(text, datum.presentation.names)
        pred = bending.peripheral_rotation(word, signs)
        payload["peripheral_rotation"][text] = {
            "epsilon": pred["epsilon"],
            "predicted_class": pred["predicted_class"],
        }
    _write_json(args.out, payload)
    print(f"bent representation written to {args.out}")
    for text, entry in payload["peripheral_rotation"].items():
        print(f"peripheral {text!r}: epsilon={entry['epsilon']} -> {entry['predicted_class']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------


def _parse_cusp(arg: str, rep: Representation, macros) -> tuple[Word, ...]:
    words = []
    for chunk in arg.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        words.append(parse_word(chunk, rep.presentation.names, macros))
    if not words:
        raise CliError("--cusp lists no words")
    return tuple(words)


def _cmd_audit(args) -> int:
    rep, form_exact, macros = _load_rep(args.rep)
    try:
        cusp = _parse_cusp(args.cusp, rep, macros)
    except WordError as exc:
        raise CliError(str(exc)) from exc
    rep_num = rep.at_angle(args.alpha)
    form = chgeom.HermitianForm(form_exact.evaluate(args.alpha))
    try:
        form.require_hyperbolic()
    except chgeom.FormError as exc:
        raise CliError(f"form at alpha={args.alpha}: {exc}") from exc

    words = list(reduced_words(rep.presentation.rank, args.ball_length))
    try:
        if args.calibrate:
            level, _ = chgeom.calibrate_level(form, rep_num, cusp, words)
        else:
            level = args.level
        base = chgeom.cusp_fixed_point(form, rep_num, cusp)
        ball = chgeom.Horoball(base, level)

        pairs = []
        rep_base = rep.at_angle(0.0)
        form_base = chgeom.HermitianForm(form_exact.evaluate(0.0))
        form_base.require_hyperbolic()
        for word in cusp:
            label = word.to_text(rep.presentation.names)
            pairs.append((label, rep_base.evaluate(word), rep_num.evaluate(word)))
        parabolic = chgeom.parabolic_preserving_audit(pairs, form_base, form)

        report = chgeom.consistency_audit(
            form,
            rep_num,
            cusp,
            words,
            ball,
            seed=args.seed,
            parabolic_audit=parabolic["pairs"],
        )
    except chgeom.GeometryError as exc:
        raise CliError(str(exc)) from exc

    payload = report.to_json()
    payload["parabolic_passed"] = parabolic["passed"]
    payload["alpha"] = args.alpha
    payload["ball_length"] = args.ball_length
    _write_json(args.out, payload)
    passed = report.passed and parabolic["passed"]
    min_margin = report.condition2["min_margin"]
    print(f"condition1: {'ok' if all(v['pass'] for v in report.condition1.values()) else 'FAIL'}")
    print(f"condition2: min margin {min_margin} over {report.words_tested} words")
    print(f"parabolic_audit: {'ok' if parabolic['passed'] else 'FAIL'}")
    print(report.disclaimer)
    print(f"report written to {args.out}")
    return EXIT_OK if passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------


def _cmd_classify(args) -> int:
    rep, form_exact, macros = _load_rep(args.rep)
    try:
        word = parse_word(args.word, rep.presentation.names, macros)
    except WordError as exc:
        raise CliError(str(exc)) from exc
    rep_num = rep.at_angle(args.alpha)
    form = chgeom.HermitianForm(form_exact.evaluate(args.alpha))
    try:
        form.require_hyperbolic()
        cls = chgeom.classify_isometry(form, rep_num.evaluate(word))
    except chgeom.GeometryError as exc:
        print(f"classification failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    payload = {
        "word": args.word,
        "alpha": args.alpha,
        "tag": cls.tag,
        "eigenvalues": [[z.real, z.imag] for z in cls.eigenvalues],
        "rotation_angles": cls.rotation_angles,
        "fixed_lift": None
        if cls.fixed_lift is None
        else [[z.real, z.imag] for z in cls.fixed_lift],
        "detail": cls.detail,
        "seed": args.seed,
    }
    print(f"{args.word!r} at alpha={args.alpha}: {cls.tag}")
    for z in cls.eigenvalues:
        print(f"  eigenvalue {z.real:+.12f}{z.imag:+.12f}i")
    if cls.rotation_angles:
        print(f"  rotation angles: {cls.rotation_angles}")
    _write_json(args.json, payload)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chdef", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="RNG seed recorded in outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    f8 = sub.add_parser("figure8", help="the boundary-unipotent circle of representations")
    f8sub = f8.add_subparsers(dest="subcommand", required=True)

    verify = f8sub.add_parser("verify", help="run all exact certification checks")
    verify.add_argument("--json", help="write the report to this path")
    verify.set_defaults(func=_cmd_figure8_verify)

    sweep = f8sub.add_parser("sweep", help="tabulate the family over an angle range")
    sweep.add_argument("--start", type=float, required=True)
    sweep.add_argument("--end", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True, help="number of sample points")
    sweep.add_argument("--out", required=True, help="CSV output path")
    sweep.add_argument("--audit", action="store_true", help="record consistency margins")
    sweep.add_argument("--level", type=float, default=0.0, help="horoball level for --audit")
    sweep.add_argument("--ball-length", type=int, default=6)
    sweep.set_defaults(func=_cmd_figure8_sweep)

    bend_cmd = sub.add_parser("bend", help="bend a representation along a stabilizer")
    bend_cmd.add_argument("--datum", required=True, help="bending datum JSON")
    bend_cmd.add_argument("--rep", help="base representation file (else datum images)")
    bend_cmd.add_argument("--out", required=True, help="output representation JSON")
    bend_cmd.set_defaults(func=_cmd_bend)

    audit = sub.add_parser("audit", help="horoball consistency audit at a parameter")
    audit.add_argument("--rep", required=True, help="'figure8' or a representation file")
    audit.add_argument("--alpha", type=float, required=True, help="angle for the ring variable")
    audit.add_argument("--cusp", default="m,l", help="comma-separated cusp generator words")
    audit.add_argument("--ball-length", type=int, default=6)
    level = audit.add_mutually_exclusive_group(required=True)
    level.add_argument("--level", type=float, help="horoball Busemann level")
    level.add_argument("--calibrate", action="store_true", help="calibrate the level by bisection")
    audit.add_argument("--out", required=True, help="report JSON path")
    audit.set_defaults(func=_cmd_audit)

    classify = sub.add_parser("classify", help="classify the image of a word")
    classify.add_argument("--rep", required=True, help="'figure8' or a representation file")
    classify.add_argument("--word", required=True)
    classify.add_argument("--alpha", type=float, required=True)
    classify.add_argument("--json", help="write the result to this path")
    classify.set_defaults(func=_cmd_classify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (WordError, RingError, bending.DatumError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    raise SystemExit(main())
