"""Command line front end.

Exit codes: 0 conclusive, 2 inconclusive (or a catalog mismatch), 1 invalid
input or refused request.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import EvaluationError, ExprError, MonopError, OracleCapError, SpecError
from .measure import LineMeasure, window_profile
from .pipeline import RunConfig, dumps, emit_windows, exit_code, run_analyze, run_catalog, run_oracle
from .symbols import affine_symbols
from . import catalog as cat

EXIT_OK, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 1, 2


def _csv_list(text: str) -> list:
    return [t.strip() for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monop", description="Decide boundedness and compactness of monomial operators.")
    p.add_argument("--version", action="version", version=f"monop {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration document")
    common.add_argument("--json", type=Path, dest="json_path", help="write the report here instead of stdout")
    common.add_argument("--workers", type=int, help="thread count for catalog runs")
    common.add_argument("--N", type=_int_list, dest="N", help="truncation sizes, e.g. 8,16,32")
    common.add_argument("--mode", choices=("exact", "float"), help="oracle arithmetic")

    a = sub.add_parser("analyze", parents=[common], help="analyze one operator")
    a.add_argument("target", nargs="?", help="catalog entry name or path to a JSON spec")
    a.add_argument("--spec", dest="spec_json", help="inline JSON spec")
    a.add_argument("--no-oracle", action="store_true", help="skip the Galerkin oracle")
    a.add_argument("--emit-windows", type=Path, metavar="DIR")

    c = sub.add_parser("catalog", parents=[common], help="run the built-in catalog")
    c.add_argument("--only", type=_csv_list, help="comma-separated entry names")
    c.add_argument("--emit-windows", type=Path, metavar="DIR")
    c.add_argument("--no-oracle", action="store_true")

    o = sub.add_parser("oracle", parents=[common], help="Galerkin singular values")
    o.add_argument("target", nargs="?", help="catalog entry name or path to a JSON spec")
    o.add_argument("--spec", dest="spec_json")

    w = sub.add_parser("windows", parents=[common], help="CSV window profile (t, L, mass, ratio)")
    w.add_argument("target", nargs="?", help="catalog entry name or path to a JSON spec")
    w.add_argument("--spec", dest="spec_json")
    w.add_argument("--emit-windows", type=Path, metavar="DIR")
    return p


def _load_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise SpecError(f"cannot read {path}: {err}") from None


def _target_spec(args) -> dict | None:
    if getattr(args, "spec_json", None):
        try:
            return json.loads(args.spec_json)
        except json.JSONDecodeError as err:
            raise SpecError(f"--spec is not valid JSON: {err}") from None
    target = getattr(args, "target", None)
    if target is None:
        return None
    if target in cat.BY_NAME:
        return cat.get(target).spec().to_dict()
    path = Path(target)
    if path.suffix == ".json" or path.exists():
        return _load_json(path)
    raise SpecError(f"{target!r} is neither a catalog entry nor a spec file")


def config_from_args(args) -> RunConfig:
    doc = _load_json(args.config) if args.config else {}
    spec = _target_spec(args)
    if spec is not None:
        doc["spec"] = spec
    if getattr(args, "only", None):
        doc["only"] = args.only
    oracle = dict(doc.get("oracle") or {})
    if args.N:
        oracle["N"] = args.N
    if args.mode:
        oracle["mode"] = args.mode
    if getattr(args, "no_oracle", False):
        oracle["enabled"] = False
    if oracle:
        doc["oracle"] = oracle
    if args.workers is not None:
        doc["workers"] = args.workers
    return RunConfig.from_dict(doc)


def _write(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _print_table(report: dict) -> None:
    for row in report["table"]:
        mark = "ok" if row["match"] else "MISMATCH"
        print(f"{row['name']:<12} expected={row['expected']:<18} computed={row['computed']:<18} {mark}", file=sys.stderr)
    print(f"{report['matches']}/{report['total']} match", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if args.command == "analyze":
            if config.spec is None:
                raise SpecError("analyze needs a catalog name, a spec file, --spec or a config with 'spec'")
            report = run_analyze(config)
            if args.emit_windows:
                emit_windows(config, args.emit_windows)
            _write(dumps(report), args.json_path)
            return exit_code(report)
        if args.command == "catalog":
            report = run_catalog(config)
            if args.emit_windows:
                emit_windows(config, args.emit_windows)
            _print_table(report)
            _write(dumps(report), args.json_path)
            return EXIT_OK if report["matches"] == report["total"] else EXIT_INCONCLUSIVE
        if args.command == "oracle":
            if config.spec is None:
                raise SpecError("oracle needs a catalog name, a spec file or --spec")
            report = run_oracle(config)
            _write(dumps(report), args.json_path)
            return EXIT_OK
        if args.command == "windows":
            if config.spec is None:
                raise SpecError("windows needs a catalog name, a spec file or --spec")
            if args.emit_windows:
                for path in emit_windows(config, args.emit_windows):
                    print(path)
                return EXIT_OK
            from .symbols import MonomialSpec

            sym = affine_symbols(MonomialSpec.from_dict(config.spec))
            if sym.weight is None or sym.slope == 0:
                raise SpecError("window profiles need a closed-form weight and a > 0")
            window_profile(LineMeasure.from_symbols(sym), config.decide.search).to_csv(sys.stdout)
            return EXIT_OK
    except BrokenPipeError:
        return EXIT_OK
    except OracleCapError as err:
        print(f"error: refused: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (ExprError, SpecError, EvaluationError, MonopError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INVALID
    parser.error(f"unknown command {args.command}")
    return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
