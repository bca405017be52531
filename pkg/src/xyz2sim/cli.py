"""Command-line entry point: ``xyz2sim <subcommand> ...``.

Exit statuses: 0 success, 1 runtime failure (e.g. no threshold crossing),
2 usage error, 3 validation failure, 4 capability error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

from . import __version__
from .analytic import analytic_pf_pure
from .codes import ParameterError, code_from_text, code_to_text
from .decoding import (
    PreconditionError,
    Syndrome,
    ewd_decode,
    exact_mld_decode,
    make_decoder_config,
    syndrome,
)
from .experiment import (
    BUILDERS,
    CSV_HEADER,
    DECODERS,
    ExperimentResult,
    ExperimentSpec,
    NotBracketedError,
    PointResult,
    build_code,
    default_workers,
    estimate_threshold,
    sweep,
)
from .noise import parse_noise
from .pauli import DimensionError, PauliOperator
from .validation import CapabilityError, validate_code

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_INVALID, EXIT_CAPABILITY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _float_list(text: str) -> list[float]:
    """``0.1,0.2`` or an inclusive range ``start:stop:step``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be start:stop:step, got {text!r}")
        a, b, s = (float(x) for x in parts)
        if s <= 0:
            raise ValueError("range step must be positive")
        k = int(math.floor((b - a) / s + 1e-9))
        return [round(a + i * s, 12) for i in range(k + 1)]
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _eta(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _write_sidecar(out: str | None, payload: dict) -> None:
    if out is None or out == "-":
        return
    Path(out + ".json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _run_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    for k, v in cfg.items():
        if isinstance(v, float) and math.isinf(v):
            cfg[k] = "inf"
    return {"subcommand": args.command, "args": cfg, "version": __version__}


def _load_code(args: argparse.Namespace):
    if getattr(args, "code", None):
        try:
            return code_from_text(Path(args.code).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read code file: {exc}") from None
    if args.family is None or args.d is None:
        raise UsageError("give FAMILY D or --code FILE")
    return build_code(args.family, args.d)


# ---------------------------------------------------------------- build / validate

def cmd_build(args: argparse.Namespace) -> int:
    code = build_code(args.family, args.d)
    report = validate_code(code)
    _write(code_to_text(code), args.out)
    _write_sidecar(args.out, {"run": _run_config(args), "validation_ok": report.ok})
    print(report.summary(), file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_validate(args: argparse.Namespace) -> int:
    code = _load_code(args)
    report = validate_code(code, compute_distances=args.distances)
    if args.format == "json":
        payload = {
            "family": code.family, "d": code.d, "n": code.n, "ok": report.ok,
            "commutation_ok": report.commutation_ok, "rank": report.rank,
            "single_error_detection_ok": report.single_error_detection_ok,
            "logical_ok": report.logical_ok, "directionality_ok": report.directionality_ok,
            "syndrome_directions": report.syndrome_directions,
            "distance_unrestricted": report.distance_unrestricted,
            "distance_pure": report.distance_pure,
        }
        _write(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _write(f"{code.family} d={code.d} n={code.n}\n{report.summary()}\n", args.out)
    return EXIT_OK if report.ok else EXIT_INVALID


# ---------------------------------------------------------------- analytic

def cmd_analytic(args: argparse.Namespace) -> int:
    ps = _float_list(args.p)
    bad = [p for p in ps if not 0.0 <= p <= 0.5]
    if bad:
        raise UsageError(f"p grid must lie in [0, 0.5], got {bad}")
    rows = []
    for d in _int_list(args.d):
        for p in ps:
            pf = analytic_pf_pure(args.family, d, p, args.axis)
            rows.append({"family": args.family, "d": d, "axis": args.axis, "p": p, "pf": pf})
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family", "d", "axis", "p", "pf"])
        for r in rows:
            w.writerow([r["family"], r["d"], r["axis"], repr(r["p"]), repr(r["pf"])])
        text = buf.getvalue()
    _write(text, args.out)
    _write_sidecar(args.out, {"run": _run_config(args)})
    return EXIT_OK


# ---------------------------------------------------------------- decode

def cmd_decode(args: argparse.Namespace) -> int:
    try:
        code = code_from_text(Path(args.code).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read code file: {exc}") from None
    physical = parse_noise(args.noise)
    if args.from_error:
        err = PauliOperator.from_string(args.syndrome)
        if err.n != code.n:
            raise UsageError(f"error string has {err.n} letters, code has {code.n} qubits")
        s = syndrome(code, err)
    else:
        s = Syndrome.from_string(args.syndrome)
        if s.length != code.num_generators:
            raise UsageError(f"syndrome has {s.length} bits, code has {code.num_generators} generators")
    if args.decoder == "exact":
        res = exact_mld_decode(code, s, physical)
    else:
        cfg = make_decoder_config(code.n, physical, args.p_sample, args.steps, args.burn_in)
        res = ewd_decode(code, s, physical, cfg, args.seed)
    _write(res.to_json() + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------- experiment

_SPEC_KEYS = {
    "family", "distances", "p_values", "eta", "axis", "decoder", "trials", "seed",
    "p_sample", "steps_per_class", "burn_in", "unique_chain_cap",
}


def _key_line(text: str, section: str, key: str) -> int | None:
    current = None
    for no, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
        elif current == section and re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
            return no
    return None


def parse_experiment_config(text: str, source: str = "<config>") -> list[tuple[str, ExperimentSpec]]:
    """Parse an INI-style config; one ExperimentSpec per section."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise UsageError(f"malformed config: {exc}") from None
    if not parser.sections():
        raise UsageError(f"{source}: no [sweep] sections")
    specs = []
    for name in parser.sections():
        sec = parser[name]

        def where(key: str) -> str:
            line = _key_line(text, name, key)
            return f"{source}:{line}" if line else source

        unknown = set(sec) - _SPEC_KEYS
        if unknown:
            k = sorted(unknown)[0]
            raise UsageError(f"{where(k)}: [{name}] unknown field {k!r}")
        for key in ("family", "distances", "p_values"):
            if key not in sec:
                raise UsageError(f"{source}: [{name}] missing required field {key!r}")
        conv = {
            "family": str, "distances": _int_list, "p_values": _float_list, "eta": _eta,
            "axis": lambda s: s.strip().upper(), "decoder": str, "trials": int, "seed": int,
            "p_sample": float, "steps_per_class": int, "burn_in": int, "unique_chain_cap": int,
        }
        kw = {}
        for key, raw in sec.items():
            try:
                kw[key] = conv[key](raw)
            except ValueError as exc:
                raise UsageError(f"{where(key)}: [{name}] bad value for {key!r}: {exc}") from None
        if kw["family"] not in BUILDERS:
            raise UsageError(f"{where('family')}: [{name}] unknown family {kw['family']!r}")
        if "axis" in kw and kw["axis"] not in ("X", "Y", "Z"):
            raise UsageError(f"{where('axis')}: [{name}] axis must be X, Y or Z")
        if kw.get("decoder", "ewd") not in DECODERS:
            raise UsageError(f"{where('decoder')}: [{name}] decoder must be one of {DECODERS}")
        kw["master_seed"] = kw.pop("seed", 0)
        try:
            specs.append((name, ExperimentSpec(**kw)))
        except (ValueError, ParameterError) as exc:
            raise UsageError(f"{source}: [{name}] {exc}") from None
    return specs


def cmd_experiment(args: argparse.Namespace) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    specs = parse_experiment_config(text, args.config)
    workers = args.workers if args.workers is not None else default_workers()
    points: list[PointResult] = []
    sections = {}
    for name, spec in specs:
        if args.seed is not None:
            spec.master_seed = args.seed
        if args.trials is not None:
            spec.trials = args.trials
        if args.p_sample is not None:
            spec.p_sample = args.p_sample
        res = sweep(spec, workers=workers)
        points.extend(res.points)
        sections[name] = res.provenance
        if args.verbose:
            for pt in res.points:
                print(f"[{name}] d={pt.d} p={pt.p} pf={pt.pf:.5f} +- {pt.stderr:.5f}", file=sys.stderr)
    result = ExperimentResult(points, {"sections": sections})
    if args.format == "json":
        rows = [dict(zip(CSV_HEADER, pt.csv_row())) for pt in points]
        _write(json.dumps(rows, indent=2) + "\n", args.out)
    else:
        _write(result.to_csv(), args.out)
    _write_sidecar(args.out, {
        "run": _run_config(args),
        "config_text": text,
        "sections": sections,
        "diagnostics": json.loads(result.sidecar())["diagnostics"],
    })
    return EXIT_OK


# ---------------------------------------------------------------- threshold

def _read_results(path: str) -> ExperimentResult:
    try:
        rows = list(csv.DictReader(Path(path).read_text().splitlines()))
    except OSError as exc:
        raise UsageError(f"cannot read results: {exc}") from None
    if not rows or set(CSV_HEADER) - set(rows[0]):
        raise UsageError(f"{path}: expected CSV header {','.join(CSV_HEADER)}")
    pts = []
    for r in rows:
        pts.append(PointResult(
            r["family"], int(r["d"]), int(r["n"]), float(r["p"]), _eta(r["eta"]), r["axis"],
            r["decoder"], float(r["p_sample"]) if r["p_sample"] else None,
            int(r["trials"]), int(r["failures"]), float(r["pf"]), float(r["stderr"]), int(r["seed"]),
        ))
    return ExperimentResult(pts, {})


def cmd_threshold(args: argparse.Namespace) -> int:
    res = _read_results(args.results)
    pair = _int_list(args.d_pair)
    if len(pair) != 2:
        raise UsageError("--d-pair takes two distances, e.g. 3,5")
    p_th, (lo, hi) = estimate_threshold(res, (pair[0], pair[1]))
    if args.format == "json":
        _write(json.dumps({"d_pair": sorted(pair), "p_th": p_th, "interval": [lo, hi]}) + "\n", args.out)
    else:
        _write(f"d_pair,p_th,lo,hi\n{min(pair)}:{max(pair)},{p_th!r},{lo!r},{hi!r}\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # route argparse errors through our exit code
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="xyz2sim", description="XYZ^2 / XZZX stabilizer-code simulator")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt=("csv", "json")):
        sp.add_argument("--out", help="output file (default stdout); a .json sidecar is written next to it")
        sp.add_argument("--format", choices=fmt, default=fmt[0])

    families = sorted(BUILDERS)

    b = sub.add_parser("build", help="build a code and write it in text form")
    b.add_argument("family", choices=families)
    b.add_argument("d", type=int)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("validate", help="check commutation, rank, detection, logicals")
    v.add_argument("family", nargs="?", choices=families)
    v.add_argument("d", nargs="?", type=int)
    v.add_argument("--code", help="code text file instead of FAMILY D")
    v.add_argument("--distances", action="store_true", help="also run exhaustive distance searches")
    common(v, ("text", "json"))
    v.set_defaults(func=cmd_validate)

    a = sub.add_parser("analytic", help="closed-form pure-noise failure curves")
    a.add_argument("--family", choices=["xyz2", "xzzx"], default="xyz2")
    a.add_argument("--d", default="3", help="comma-separated distances")
    a.add_argument("--axis", choices=["X", "Y", "Z"], default="Z")
    a.add_argument("--p", default="0.05:0.5:0.05", help="list a,b,c or range start:stop:step")
    common(a)
    a.set_defaults(func=cmd_analytic)

    d = sub.add_parser("decode", help="decode one syndrome and print the result as JSON")
    d.add_argument("code", help="code text file")
    d.add_argument("syndrome", help="bit string, one bit per generator")
    d.add_argument("--from-error", action="store_true", help="treat SYNDROME as a Pauli error string")
    d.add_argument("--noise", required=True, help="p=<float>,eta=<float|inf>,axis=<X|Y|Z>")
    d.add_argument("--decoder", choices=["ewd", "exact"], default="ewd")
    d.add_argument("--p-sample", type=float)
    d.add_argument("--steps", type=int, help="EWD proposals per class")
    d.add_argument("--burn-in", type=int)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out")
    d.set_defaults(func=cmd_decode)

    e = sub.add_parser("experiment", help="run the sweeps described in an INI config")
    e.add_argument("config")
    e.add_argument("--seed", type=int, help="override every section's seed")
    e.add_argument("--trials", type=int, help="override trials per point")
    e.add_argument("--p-sample", type=float, help="override EWD sampling rate")
    e.add_argument("--workers", type=int, help="worker processes (default $XYZ2SIM_WORKERS or 1)")
    e.add_argument("-v", "--verbose", action="store_true")
    common(e)
    e.set_defaults(func=cmd_experiment)

    t = sub.add_parser("threshold", help="crossing point of two failure curves in a results CSV")
    t.add_argument("results")
    t.add_argument("--d-pair", default="3,5")
    common(t)
    t.set_defaults(func=cmd_threshold)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except NotBracketedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ParameterError, PreconditionError, DimensionError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
