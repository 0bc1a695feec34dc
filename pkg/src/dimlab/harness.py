"""Scenario engine: config loading, experiment dispatch, report emission."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, is_dataclass, asdict
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import criteria as crit
from . import dimension as dim
from . import measure
from . import qtilde
from .errors import ParseError, SchemaError
from .qtilde import PMatrix, QMatrix, to_fraction

KINDS = ("expand", "transform", "dimension", "criteria",
         "preservation", "counterexample")

DEFAULT_TOLERANCES = {
    "dimension": 0.03,
    "verdict_band": 0.05,
    "counterexample_slack": 0.08,
}


@dataclass
class Scenario:
    kind: str
    q: QMatrix
    p: Optional[PMatrix] = None
    moran: Optional[dim.MoranSpec] = None
    points: tuple = ()
    words: tuple = ()
    rank: int = 8
    ranks: tuple = ()
    k_max: int = 400
    tol: Fraction = Fraction(1, 1024)
    scales: tuple = ()
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    name: str = "scenario"
    raw: dict = field(default_factory=dict)


_REQUIRED = {
    "expand": ("Q", "points"),
    "transform": ("Q", "P"),
    "dimension": ("Q", "moran", "ranks"),
    "criteria": ("Q", "P"),
    "preservation": ("Q", "P", "moran", "ranks"),
    "counterexample": ("Q", "P"),
}


def parse_scenario(doc: dict) -> Scenario:
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SchemaError(f"unknown or missing scenario kind: {kind!r}")
    for key in _REQUIRED[kind]:
        if key not in doc:
            raise SchemaError(f"{kind} scenario requires field {key!r}")
    q = qtilde.validate_matrix(doc["Q"].get("prefix", []),
                               doc["Q"].get("period", []))
    p = None
    if "P" in doc:
        p = qtilde.validate_pmatrix(doc["P"].get("prefix", []),
                                    doc["P"].get("period", []), paired=q)
    moran = dim.MoranSpec.from_dict(doc["moran"]) if "moran" in doc else None
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(doc.get("tolerances", {}))
    return Scenario(
        kind=kind,
        q=q,
        p=p,
        moran=moran,
        points=tuple(to_fraction(x) for x in doc.get("points", [])),
        words=tuple(tuple(w) for w in doc.get("words", [])),
        rank=int(doc.get("rank", 8)),
        ranks=tuple(int(r) for r in doc.get("ranks", [])),
        k_max=int(doc.get("k_max", 400)),
        tol=to_fraction(doc.get("tol", "1/1024")),
        scales=tuple(to_fraction(s) for s in doc.get("scales", [])),
        tolerances=tolerances,
        name=str(doc.get("name", "scenario")),
        raw=doc,
    )


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("scenario document must be a JSON object")
    return parse_scenario(doc)


@dataclass
class Report:
    scenario: dict          # config echo
    kind: str
    results: dict
    verdicts: dict
    run_meta: dict          # timestamp + timings, isolated for determinism
    failed: bool = False


def _matched_scales(q: QMatrix, ranks) -> list:
    """Grid scales aligned to the matrix: the common rank-k length when the
    matrix is digit-uniform, else plain dyadic 2^-k."""
    if q.is_digit_uniform():
        scales = []
        length = Fraction(1)
        j = 1
        for k in sorted(ranks):
            while j <= k:
                length *= q.column(j).entries[0]
                j += 1
            scales.append(length)
        return scales
    return [Fraction(1, 2 ** k) for k in sorted(ranks)]


def _run_expand(s: Scenario, budget: int) -> dict:
    rows = []
    for x in s.points:
        word = qtilde.expand(s.q, x, s.rank)
        cyl = qtilde.cylinder(s.q, word)
        rows.append({"point": x, "digits": list(word),
                     "left": cyl.left, "right": cyl.right})
    return {"digit_table": rows}


def _run_transform(s: Scenario, budget: int) -> dict:
    word_rows = []
    for w in s.words:
        src = qtilde.cylinder(s.q, w)
        img = measure.f_xi_cylinder(s.q, s.p, w)
        word_rows.append({
            "word": list(w),
            "source": [src.left, src.right],
            "image": [img.left, img.right],
            "measure": measure.mu_cylinder(s.p, w),
        })
    point_rows = []
    for x in s.points:
        lo, hi = measure.f_xi_point(s.q, s.p, x, s.tol)
        point_rows.append({"point": x, "lo": lo, "hi": hi})
    return {"word_images": word_rows, "point_images": point_rows}


def _run_dimension(s: Scenario, budget: int) -> dict:
    ranks = sorted(s.ranks)
    cylinders = dim.enumerate_cylinders(s.moran, s.q, ranks[-1], budget)
    scales = list(s.scales) or _matched_scales(s.q, ranks)
    box = dim.dim_estimate(dim.box_counts(cylinders, scales))
    family = dim.family_dim(s.moran, s.q, ranks)
    out = {"box": box, "family": family}
    if s.q.is_digit_uniform():
        oracle = dim.moran_dim_oracle(s.moran, s.q, ranks[-1])
        out["oracle"] = oracle
        out["oracle_agreement"] = abs(family.estimate - oracle.estimate) <= 0.01
    return out


def _run_criteria(s: Scenario, budget: int) -> dict:
    report = crit.pdp_verdict(s.q, s.p, s.k_max,
                              measure_dim_tol=s.tolerances["verdict_band"])
    return {"criteria": report}


def _run_preservation(s: Scenario, budget: int) -> dict:
    ranks = sorted(s.ranks)
    report = crit.pdp_verdict(s.q, s.p, s.k_max,
                              measure_dim_tol=s.tolerances["verdict_band"])
    source_dim = dim.family_dim(s.moran, s.q, ranks)
    # Lemma-2 identity: the image of a digit spec is the same spec re-measured
    image_dim = dim.family_dim(s.moran, s.p, ranks)
    out = {
        "criteria": report,
        "source_dim": source_dim,
        "image_dim": image_dim,
    }
    if report.verdict == crit.PDP:
        band = 2 * s.tolerances["dimension"]
        out["dims_agree"] = abs(source_dim.estimate - image_dim.estimate) <= band
    return out


def _run_counterexample(s: Scenario, budget: int) -> dict:
    k_max = s.k_max
    members, partials, b_estimate = crit.sparse_column_stats(s.q, s.p, k_max)
    spec = crit.counterexample_spec(s.q, s.p, k_max)
    ranks = sorted(s.ranks) or [m * m for m in range(2, int(k_max ** 0.5) + 1)]
    if s.q.is_digit_uniform():
        source = dim.moran_dim_oracle(spec, s.q, ranks[-1])
    else:
        source = dim.family_dim(spec, s.q, ranks)
    image = dim.family_dim(spec, s.p, ranks)
    bound = 1.0 / (1.0 + b_estimate) if b_estimate > 0 else 1.0
    slack = s.tolerances["counterexample_slack"]
    return {
        "sparse_members": members,
        "b_estimate": b_estimate,
        "witness_spec": spec,
        "source_dim": source,
        "image_dim": image,
        "bound": bound,
        "bound_holds": image.estimate <= bound + slack,
    }


_RUNNERS = {
    "expand": _run_expand,
    "transform": _run_transform,
    "dimension": _run_dimension,
    "criteria": _run_criteria,
    "preservation": _run_preservation,
    "counterexample": _run_counterexample,
}


def run_scenario(s: Scenario, budget: int = dim.DEFAULT_ENUM_BUDGET,
                 seed: Optional[int] = None) -> Report:
    start = time.perf_counter()
    failed = False
    verdicts = {}
    try:
        results = _RUNNERS[s.kind](s, budget)
    except Exception as exc:  # partial report with failure annotation
        results = {"error": f"{type(exc).__name__}: {exc}"}
        failed = True
    elapsed = time.perf_counter() - start
    report_obj = results.get("criteria")
    if report_obj is not None:
        verdicts["pdp"] = report_obj.verdict
    if "bound_holds" in results:
        verdicts["counterexample_bound"] = bool(results["bound_holds"])
    if "oracle_agreement" in results:
        verdicts["oracle_agreement"] = bool(results["oracle_agreement"])
    if "dims_agree" in results:
        verdicts["dims_agree"] = bool(results["dims_agree"])
    run_meta = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "timings": {"run_seconds": elapsed},
        "seed": seed,
    }
    return Report(scenario=s.raw, kind=s.kind, results=results,
                  verdicts=verdicts, run_meta=run_meta, failed=failed)


def jsonify(obj):
    """Deterministic JSON-friendly form: Fractions as strings, dataclasses
    as dicts, method tags kept alongside numeric results."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dim.ScaleSample):
        return {"scale": str(obj.scale), "count": obj.count,
                "log_ratio": obj.log_ratio}
    if isinstance(obj, dim.DimensionEstimate):
        return {"method": obj.method, "estimate": obj.estimate,
                "samples": [jsonify(x) for x in obj.samples]}
    if isinstance(obj, crit.CriterionReport):
        return obj.to_dict()
    if isinstance(obj, dim.MoranSpec):
        return obj.to_dict()
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: jsonify(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, float):
        return "inf" if obj == float("inf") else obj
    return obj


def emit_report(report: Report, out_dir, fmt: str = "json") -> list:
    """Write the master JSON document, plus per-table CSVs when fmt=csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    doc = {
        "kind": report.kind,
        "scenario": jsonify(report.scenario),
        "results": jsonify(report.results),
        "verdicts": jsonify(report.verdicts),
        "failed": report.failed,
        "run_meta": report.run_meta,
    }
    master = out_dir / "report.json"
    master.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    written.append(master)
    if fmt == "csv":
        written.extend(_emit_csv_tables(report, out_dir))
    return written


def _emit_csv_tables(report: Report, out_dir: Path) -> list:
    written = []
    crit_report = report.results.get("criteria")
    if isinstance(crit_report, crit.CriterionReport):
        path = out_dir / "criteria.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "h_partial", "b_partial", "li_ratio",
                        "B_partial", "in_T"])
            for row in crit_report.csv_rows():
                w.writerow(row)
        written.append(path)
    for key, value in report.results.items():
        if isinstance(value, dim.DimensionEstimate):
            path = out_dir / f"{key}_scales.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["scale_num", "scale_den", "count", "log_ratio"])
                for smp in value.samples:
                    w.writerow([smp.scale.numerator, smp.scale.denominator,
                                smp.count, smp.log_ratio])
            written.append(path)
    return written


def emit_plot_data(report: Report, out_dir) -> list:
    """Two-column whitespace series: log_ratio vs ln(1/scale), and the
    sparse log-mass density vs k when a criteria report is present."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for key, value in report.results.items():
        if isinstance(value, dim.DimensionEstimate):
            path = out_dir / f"{key}_logratio.dat"
            with open(path, "w") as fh:
                for smp in value.samples:
                    fh.write(f"{-qtilde.ln(smp.scale)} {smp.log_ratio}\n")
            written.append(path)
    crit_report = report.results.get("criteria")
    if isinstance(crit_report, crit.CriterionReport):
        path = out_dir / "sparse_density.dat"
        with open(path, "w") as fh:
            for k, value in enumerate(crit_report.sparse_partials, start=1):
                fh.write(f"{k} {value}\n")
        written.append(path)
    return written
