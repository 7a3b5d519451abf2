"""Run the symbol, measure and oracle stages and assemble JSON reports.

A run is fully described by one JSON configuration document::

    {
      "spec":    {...} | null,          # a single operator, or
      "only":    ["volterra", ...],     # catalog entries (all when absent)
      "decide":  {...},                 # DecideConfig fields
      "oracle":  {"N": [8, 16, 32, 64], "mode": "exact", "enabled": true},
      "workers": 1
    }

``workers`` is excluded from the hash because it cannot change the result.
Reports contain no timestamps and are serialized with sorted keys, so equal
configurations give byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import __version__
from . import catalog as cat
from .measure import DecideConfig, analyze, window_profile, LineMeasure
from .oracle import necessary_condition_scan, sv_scan
from .symbols import (
    MonomialSpec,
    affine_symbols,
    angular_derivative,
    intercept_note,
    interpolation_consistency,
    self_map_check,
)
from .errors import SpecError
from .verdict import VerdictClass

SCHEMA_VERSION = "1"
TOOL = "monop"
DEFAULT_ORACLE = {"N": [8, 16, 32, 64], "mode": "exact", "enabled": True}


@dataclass(frozen=True)
class RunConfig:
    spec: Optional[dict]
    only: Optional[tuple]
    decide: DecideConfig
    oracle: dict
    workers: int = 1

    @classmethod
    def from_dict(cls, doc: Optional[dict]) -> "RunConfig":
        doc = dict(doc or {})
        unknown = set(doc) - {"spec", "only", "decide", "oracle", "workers"}
        if unknown:
            raise SpecError(f"unknown config keys: {', '.join(sorted(unknown))}")
        oracle = dict(DEFAULT_ORACLE, **(doc.get("oracle") or {}))
        oracle["N"] = sorted({int(n) for n in oracle["N"]})
        if oracle["mode"] not in ("exact", "float"):
            raise SpecError(f"oracle mode must be exact or float, got {oracle['mode']!r}")
        only = doc.get("only")
        if only is not None:
            only = tuple(sorted(set(only)))
            missing = [n for n in only if n not in cat.BY_NAME]
            if missing:
                raise SpecError(f"unknown catalog entries: {', '.join(missing)}")
        try:
            decide = DecideConfig.from_dict(doc.get("decide"))
        except TypeError as err:
            raise SpecError(f"decide config: {err}") from None
        workers = int(doc.get("workers", 1))
        if workers < 1:
            raise SpecError("workers must be >= 1")
        return cls(doc.get("spec"), only, decide, oracle, workers)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "only": list(self.only) if self.only is not None else None,
            "decide": self.decide.to_dict(),
            "oracle": dict(self.oracle),
        }

    @property
    def hash(self) -> str:
        return config_hash(self.to_dict())


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(doc: dict) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def _clean(v):
    """Replace non-finite floats so that the report is strict JSON."""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "item") and not isinstance(v, (str, bytes)):
        return _clean(v.item())
    return v


# --------------------------------------------------------------- one spec


def _symbol_summary(spec: MonomialSpec, sym) -> dict:
    return {
        "phi": {"slope": str(sym.slope), "intercept": str(sym.intercept)},
        "intercept_note": intercept_note(spec),
        "h": sym.weight.source if sym.weight is not None else None,
        "h_rational": None if sym.rational is None else {
            "numerator": [str(c) for c in sym.rational.numerator],
            "denominator": [str(c) for c in sym.rational.denominator],
        },
        "self_map": self_map_check(sym),
        "angular_derivative": angular_derivative(sym),
        "interpolation_residual": interpolation_consistency(sym, spec, 16),
    }


def _oracle_agreement(verdict: VerdictClass, summary: dict) -> Optional[bool]:
    decay = summary.get("decay") or {}
    if verdict is VerdictClass.COMPACT:
        return bool(decay.get("decays"))
    if verdict is VerdictClass.UNBOUNDED:
        return summary["trend"] == "growing"
    if verdict is VerdictClass.BOUNDED_NOT_COMPACT:
        return summary["trend"] == "bounded" and bool(decay.get("persists"))
    return None


def analyze_spec(spec: MonomialSpec, config: RunConfig) -> dict:
    sym = affine_symbols(spec)
    a = analyze(spec, sym, config.decide)
    out = {
        "name": spec.name,
        "spec": spec.to_dict(),
        "symbols": _symbol_summary(spec, sym),
        "fast_path": None if a.fast_path is None else a.fast_path.tag,
        "verdict": a.verdict.to_dict(),
        "necessary_conditions": necessary_condition_scan(spec).to_dict(),
    }
    if config.oracle.get("enabled", True) and config.oracle["N"]:
        scan = sv_scan(spec, config.oracle["N"], config.oracle["mode"])
        summary = scan.to_dict()
        summary["modes"] = sorted({r.mode for r in scan.results})
        summary["agrees_with_verdict"] = _oracle_agreement(a.verdict.cls, summary)
        if summary.get("decay"):
            summary["decay"] = {k: v for k, v in summary["decay"].items() if k != "relative"}
        out["oracle"] = summary
    return _clean(out)


# -------------------------------------------------------------- reports


def _envelope(config: RunConfig, kind: str, body: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": TOOL,
        "version": __version__,
        "kind": kind,
        "config": config.to_dict(),
        "config_hash": config.hash,
        **body,
    }


def _specs(config: RunConfig) -> list:
    if config.spec is not None:
        return [MonomialSpec.from_dict(config.spec)]
    names = config.only if config.only is not None else tuple(e.name for e in cat.ENTRIES)
    return [cat.get(n).spec() for n in names]


def _map(fn, items, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_analyze(config: RunConfig) -> dict:
    specs = _specs(config)
    results = _map(lambda s: analyze_spec(s, config), specs, config.workers)
    results.sort(key=lambda r: r["name"] or "")
    return _envelope(config, "analyze", {"results": results})


def run_catalog(config: RunConfig) -> dict:
    names = config.only if config.only is not None else tuple(sorted(cat.BY_NAME))
    sub = RunConfig(None, tuple(names), config.decide, config.oracle, config.workers)
    results = run_analyze(sub)["results"]
    rows = []
    for r in results:
        expected = cat.get(r["name"]).expected.value
        computed = r["verdict"]["class"]
        rows.append({"name": r["name"], "expected": expected, "computed": computed, "match": expected == computed})
    return _envelope(
        config,
        "catalog",
        {"table": rows, "matches": sum(r["match"] for r in rows), "total": len(rows), "results": results},
    )


def run_oracle(config: RunConfig) -> dict:
    out = []
    for spec in _specs(config):
        scan = sv_scan(spec, config.oracle["N"], config.oracle["mode"])
        d = scan.to_dict()
        d["name"] = spec.name
        d["truncations"] = [r.to_dict() for r in scan.results]
        out.append(_clean(d))
    out.sort(key=lambda r: r["name"] or "")
    return _envelope(config, "oracle", {"results": out})


def emit_windows(config: RunConfig, directory) -> list:
    """Write ``<name>.csv`` window profiles; returns the paths written."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for spec in _specs(config):
        sym = affine_symbols(spec)
        if sym.weight is None or sym.slope == 0 or not self_map_check(sym):
            continue
        prof = window_profile(LineMeasure.from_symbols(sym), config.decide.search)
        path = d / f"{spec.name or 'spec'}.csv"
        with open(path, "w", newline="") as fh:
            prof.to_csv(fh)
        paths.append(path)
    return sorted(paths)


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def exit_code(report: dict) -> int:
    """0 when every verdict is conclusive, 2 when any is Inconclusive."""
    results = report.get("results", [])
    if any(r.get("verdict", {}).get("class") == VerdictClass.INCONCLUSIVE.value for r in results):
        return 2
    return 0
