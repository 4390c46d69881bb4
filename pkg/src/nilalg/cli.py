"""Command-line surface. Every subcommand loads an algebra table, runs one
library operation, and emits a deterministic report: JSON for summaries,
CSV for tables. Identical configuration and seed reproduce identical bytes.
"""

import argparse
import json
import os
import sys

from gmpy2 import mpq

from .acceptance import run_all
from .algebra import f_basis, load_algebra, lower_central_series, validate
from .enveloping import (
    WeightSequence,
    PrenormParams,
    decay_profile,
    entire_check,
    growth_function,
    mul_continuity_probe,
    pbw_mul,
    prenorm,
    uelement_from_json,
    weight_axiom_check,
)
from .errors import (
    NilalgError,
    PrecisionExhaustedError,
    SearchExhaustedError,
    StructuralError,
)
from .geometry import (
    adapted_norm,
    ball_bound_check,
    build_commutator_scheme,
    corcbh_c_target,
    exp_type_norm,
    poly_from_json,
    scheme_base_length,
    sigma,
    sigma_bar,
    subpoly_estimate,
    word_factorize,
)
from .group import bch, first_to_second, second_to_first, word_to_json
from .intervals import Iv, decimal_str
from .scalars import Scalar, parse_scalar, rat, rat_str, scalar_str


def _load_fb(source: str):
    return f_basis(load_algebra(source))


def _load_doc(text: str):
    """Inline JSON, or a path to a JSON file."""
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            try:
                return json.load(fh)
            except json.JSONDecodeError as exc:
                raise StructuralError(f"invalid JSON in {text}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(
            f"argument is neither a file nor valid JSON: {exc}"
        ) from exc


def _parse_coords(fb, text: str):
    doc = _load_doc(text)
    if not isinstance(doc, list) or len(doc) != fb.dim:
        raise StructuralError(f"coordinates must be a JSON list of length {fb.dim}")
    return tuple(parse_scalar(v) for v in doc)


def _coord_json(v):
    if isinstance(v, Iv):
        return {"mid": decimal_str(v), "radius": decimal_str(v.rad)}
    if isinstance(v, Scalar):
        return scalar_str(v)
    return rat_str(rat(v))


def _iv_json(v: Iv) -> dict:
    return {"mid": decimal_str(v), "radius": decimal_str(v.rad)}


def _weight_sequence(spec: str) -> WeightSequence:
    if spec == "standard":
        return WeightSequence.standard()
    doc = _load_doc(spec)
    if not isinstance(doc, dict) or "table" not in doc:
        raise StructuralError(
            'weight sequence must be "standard" or JSON with a "table" object'
        )
    return WeightSequence.from_table(doc["table"], doc.get("fill", 1))


def _rat_list(text: str):
    return [rat(part) for part in text.split(",") if part.strip()]


def _config(args) -> dict:
    return {"seed": args.seed, "precision": args.precision}


# -- subcommand handlers ---------------------------------------------------
# each returns (doc, rows-or-None, check_failed)


def _cmd_validate(args):
    L = load_algebra(args.algebra)
    rep = validate(L)
    doc = {"algebra": L.name, "config": _config(args), **rep.to_json()}
    return doc, None, not rep.ok


def _cmd_lcs(args):
    L = load_algebra(args.algebra)
    series = lower_central_series(L)
    doc = {"algebra": L.name, "config": _config(args), **series.to_json()}
    return doc, None, False


def _cmd_fbasis(args):
    fb = _load_fb(args.algebra)
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "dim": fb.dim,
        "class": fb.depth,
        **fb.to_json(),
    }
    return doc, None, False


def _cmd_bch(args):
    fb = _load_fb(args.algebra)
    x = _parse_coords(fb, args.x)
    y = _parse_coords(fb, args.y)
    z = bch(fb, x, y)
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "z": [_coord_json(v) for v in z],
    }
    return doc, None, False


def _cmd_coords(args):
    fb = _load_fb(args.algebra)
    t = _parse_coords(fb, args.t)
    if args.direction == "first-to-second":
        out = first_to_second(fb, t)
    else:
        out = second_to_first(fb, t)
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "direction": args.direction,
        "result": [_coord_json(v) for v in out],
    }
    return doc, None, False


def _cmd_pbw_mul(args):
    fb = _load_fb(args.algebra)
    x = uelement_from_json(fb, _load_doc(args.x))
    y = uelement_from_json(fb, _load_doc(args.y))
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "product": pbw_mul(x, y).to_json(),
    }
    return doc, None, False


def _cmd_norm(args):
    fb = _load_fb(args.algebra)
    x = uelement_from_json(fb, _load_doc(args.x))
    M = _weight_sequence(args.M)
    params = PrenormParams(rat(args.r), M, args.precision)
    value = prenorm(x, params)
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "r": rat_str(params.r),
        "M": M.to_json(),
        "prenorm": _iv_json(value),
    }
    if args.mul_probe:
        doc["mul_probe"] = mul_continuity_probe(
            fb, M, params.r, args.mul_probe, args.seed, args.precision
        )
    return doc, None, False


def _cmd_decay(args):
    fb = _load_fb(args.algebra)
    prof = decay_profile(fb, args.i - 1, rat(args.r), args.nmax, args.precision)
    if args.format == "json":
        doc = {
            "algebra": fb.algebra.name,
            "config": _config(args),
            **prof.to_json(),
        }
        return doc, None, False
    rows = ["n,r,norm,radius,normalized_decay"]
    r_txt = rat_str(prof.r)
    for n, norm, scaled in prof.rows:
        rows.append(
            f"{n},{r_txt},{rat_str(norm)},{decimal_str(scaled.rad)},"
            f"{decimal_str(scaled)}"
        )
    return None, rows, False


def _cmd_weights_check(args):
    fb = _load_fb(args.algebra)
    M = _weight_sequence(args.M)
    rep = weight_axiom_check(M, fb, args.w_bound)
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "M": M.to_json(),
        "w_bound": args.w_bound,
        **rep.to_json(),
    }
    return doc, None, not rep.ok


def _cmd_entire(args):
    fb = _load_fb(args.algebra)
    M = _weight_sequence(args.M)
    rep = entire_check(
        M,
        fb,
        _rat_list(args.r_list),
        _rat_list(args.A_list),
        args.w_bound,
        args.precision,
    )
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "M": M.to_json(),
        **rep.to_json(),
    }
    return doc, None, False


def _cmd_phi(args):
    fb = _load_fb(args.algebra)
    t = _parse_coords(fb, args.t)
    s = sigma(fb, t, args.precision)
    value = growth_function(fb, t, rat(args.tol), args.precision)
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "tol": args.tol,
        "sigma": _iv_json(s),
        "phi": _iv_json(value),
    }
    return doc, None, False


def _cmd_sigma(args):
    fb = _load_fb(args.algebra)
    t = _parse_coords(fb, args.t)
    fn = sigma_bar if args.bar else sigma
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "second_kind": bool(args.bar),
        "sigma": _iv_json(fn(fb, t, args.precision)),
    }
    return doc, None, False


def _cmd_subpoly(args):
    fb = _load_fb(args.algebra)
    rep = subpoly_estimate(
        fb, args.train, args.test, rat(args.sigma_max), args.seed, args.precision
    )
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        **rep.to_json(),
    }
    return doc, None, not rep.ok


def _cmd_factorize(args):
    fb = _load_fb(args.algebra)
    t = _parse_coords(fb, args.t)
    if args.bar:
        g = second_to_first(fb, t)
        sbar = sigma(fb, t, args.precision)
    else:
        g = t
        sbar = sigma_bar(fb, t, args.precision)
    scheme = build_commutator_scheme(fb)
    word, cert = word_factorize(g, scheme, args.precision, args.tol)
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "sigma_bar": _iv_json(sbar),
        "base_length": scheme_base_length(scheme),
        "word": word_to_json(word),
        "certificate": cert,
    }
    return doc, None, False


def _cmd_normtrick(args):
    fb = _load_fb(args.algebra)
    target = rat(args.c_target) if args.c_target else None
    spec = adapted_norm(fb, target, args.q_max)
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "bracket_budget": rat_str(corcbh_c_target(fb)),
        **spec.to_json(),
    }
    return doc, None, False


def _cmd_ballbound(args):
    fb = _load_fb(args.algebra)
    spec = adapted_norm(fb)
    rep = ball_bound_check(spec, args.words, args.max_len, args.seed)
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "words": args.words,
        "max_len": args.max_len,
        "norm": spec.to_json(),
        **rep.to_json(),
    }
    return doc, None, not rep.ok


def _cmd_exptype(args):
    fb = _load_fb(args.algebra)
    terms = poly_from_json(_load_doc(args.poly), fb.dim)
    lower, upper = exp_type_norm(
        fb, terms, rat(args.r), args.precision, args.budget, args.seed
    )
    doc = {
        "algebra": fb.algebra.name,
        "config": _config(args),
        "r": args.r,
        "lower": _iv_json(lower),
        "upper": _iv_json(upper),
    }
    return doc, None, False


def _cmd_report(args):
    numbers = None
    if args.criteria:
        numbers = [int(p) for p in args.criteria.split(",") if p.strip()]
    out = run_all(args.seed, args.precision, numbers)
    for rec in out["criteria"]:
        del rec["elapsed_s"]
    return out, None, not out["passed"]


# -- wiring ----------------------------------------------------------------


_COMMANDS = {
    "validate": (_cmd_validate, "check a bracket table"),
    "lcs": (_cmd_lcs, "lower central series dimensions"),
    "fbasis": (_cmd_fbasis, "adapted basis and weights"),
    "bch": (_cmd_bch, "group product in exponential coordinates"),
    "coords": (_cmd_coords, "convert between coordinate systems"),
    "pbw-mul": (_cmd_pbw_mul, "multiply enveloping-algebra elements"),
    "norm": (_cmd_norm, "weighted prenorm of an element"),
    "decay": (_cmd_decay, "normalized power-norm table"),
    "weights-check": (_cmd_weights_check, "weight sequence axiom check"),
    "entire": (_cmd_entire, "entireness probes for a weight sequence"),
    "phi": (_cmd_phi, "certified growth-series value"),
    "sigma": (_cmd_sigma, "homogeneous gauge of a point"),
    "subpoly": (_cmd_subpoly, "fit the product-gauge envelope"),
    "factorize": (_cmd_factorize, "write a point as a word of generators"),
    "normtrick": (_cmd_normtrick, "layer scalings with a certified bracket bound"),
    "ballbound": (_cmd_ballbound, "layer growth of random words"),
    "exptype": (_cmd_exptype, "exponential-type function norm bracket"),
    "report": (_cmd_report, "run the verification suite"),
}


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--precision", type=int, default=128,
                        help="working precision in bits (default 128)")
    shared.add_argument("--seed", type=int, default=0,
                        help="64-bit sampling seed (default 0)")
    shared.add_argument("--out", default=None,
                        help="directory to also write the report into")
    shared.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default json; decay defaults csv)")

    top = argparse.ArgumentParser(
        prog="nilalg",
        description="exact computations on nilpotent Lie algebras and their groups",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, needs_algebra=True):
        handler, help_txt = _COMMANDS[name]
        p = sub.add_parser(name, parents=[shared], help=help_txt)
        if needs_algebra:
            p.add_argument("algebra", help="bundled table name or JSON file path")
        p.set_defaults(handler=handler)
        return p

    add("validate")
    add("lcs")
    add("fbasis")

    p = add("bch")
    p.add_argument("--x", required=True, help="coordinates, JSON list")
    p.add_argument("--y", required=True, help="coordinates, JSON list")

    p = add("coords")
    p.add_argument("--t", required=True, help="coordinates, JSON list")
    p.add_argument("--direction", default="first-to-second",
                   choices=("first-to-second", "second-to-first"))

    p = add("pbw-mul")
    p.add_argument("--x", required=True, help="element JSON or file")
    p.add_argument("--y", required=True, help="element JSON or file")

    p = add("norm")
    p.add_argument("--x", required=True, help="element JSON or file")
    p.add_argument("--r", default="1", help="norm radius (rational)")
    p.add_argument("--M", default="standard",
                   help='"standard" or a weight-table JSON/file')
    p.add_argument("--mul-probe", type=int, default=0, metavar="N",
                   help="also probe product continuity on N random pairs")

    p = add("decay")
    p.add_argument("--i", type=int, required=True, help="generator index, 1-based")
    p.add_argument("--r", default="1", help="norm radius (rational)")
    p.add_argument("--nmax", type=int, default=300)

    p = add("weights-check")
    p.add_argument("--M", default="standard")
    p.add_argument("--w-bound", type=int, default=30)

    p = add("entire")
    p.add_argument("--M", default="standard")
    p.add_argument("--r-list", default="1,10,100", help="comma-separated radii")
    p.add_argument("--A-list", default="", help="comma-separated sup-condition scales")
    p.add_argument("--w-bound", type=int, default=40)

    p = add("phi")
    p.add_argument("--t", required=True, help="coordinates, JSON list")
    p.add_argument("--tol", default="1e-20", help="certified tail tolerance")

    p = add("sigma")
    p.add_argument("--t", required=True, help="coordinates, JSON list")
    p.add_argument("--bar", action="store_true",
                   help="gauge of the split-coordinate representation")

    p = add("subpoly")
    p.add_argument("--train", type=int, default=10_000)
    p.add_argument("--test", type=int, default=10_000)
    p.add_argument("--sigma-max", default="100")

    p = add("factorize")
    p.add_argument("--t", required=True, help="target coordinates, JSON list")
    p.add_argument("--bar", action="store_true",
                   help="treat --t as split coordinates")
    p.add_argument("--tol", default=None,
                   help="fail unless the residual radius is under this")

    p = add("normtrick")
    p.add_argument("--c-target", default=None, help="bracket budget override")
    p.add_argument("--q-max", type=int, default=64)

    p = add("ballbound")
    p.add_argument("--words", type=int, default=500)
    p.add_argument("--max-len", type=int, default=40)

    p = add("exptype")
    p.add_argument("--poly", required=True, help="polynomial JSON or file")
    p.add_argument("--r", default="1", help="exponential rate (rational)")
    p.add_argument("--budget", type=int, default=200,
                   help="evaluation budget for the lower-bound search")

    p = add("report", needs_algebra=False)
    p.add_argument("--criteria", default=None,
                   help="comma-separated criterion numbers (default: all)")

    return top


def _emit(doc, rows, args) -> None:
    if rows is not None:
        text = "\n".join(rows) + "\n"
        ext = "csv"
    else:
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
        ext = "json"
    sys.stdout.write(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"{args.command.replace('-', '_')}.{ext}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _error_json(kind: str, exc: Exception) -> str:
    body = {"kind": kind, "message": str(exc)}
    bits = getattr(exc, "suggested_bits", None)
    if bits is not None:
        body["suggested_bits"] = bits
    best = getattr(exc, "best", None)
    if best is not None:
        body["best"] = rat_str(best) if isinstance(best, mpq) else str(best)
    return json.dumps({"error": body}, sort_keys=True)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "decay" else "json"
    elif args.format == "csv" and args.command != "decay":
        sys.stderr.write(_error_json(
            "structural",
            StructuralError("csv output is only available for the decay table"),
        ) + "\n")
        return 2
    try:
        doc, rows, failed = args.handler(args)
    except (PrecisionExhaustedError, SearchExhaustedError) as exc:
        sys.stderr.write(_error_json("check", exc) + "\n")
        return 1
    except NilalgError as exc:
        sys.stderr.write(_error_json("structural", exc) + "\n")
        return 2
    _emit(doc, rows, args)
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())
