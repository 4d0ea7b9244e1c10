"""Comparison harness and agreement statistics.

Runs every registered predictor over every matched library pair between
two roots, capturing wall time, sizes and verdicts into one JSON record
per pair, then computes agreement tables, breakage-type frequencies,
distribution summaries and throughput from record sets.
"""

from __future__ import annotations

import datetime
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import __version__
from .corpus import build_corpus
from .diff import DiffReport, diff_corpora, symbols_prediction
from .elf import open_elf, read_symbols
from .errors import AbiriftError, EmptyStratum, MissingSymbolTables
from .matcher import MatchedPair, MatchResult, match_pairs
from .symbols import exported

RECORD_VERSION = 1
MANIFEST_VERSION = 1

VALID_VERDICTS = ("compatible", "incompatible")

PredictorFn = Callable[[str, str, Sequence[str]], DiffReport]


def _exports_of(path: str):
    elf = open_elf(path)
    try:
        syms = read_symbols(elf)
    except MissingSymbolTables:
        return {}
    return exported(syms)


def run_symbols(old_path: str, new_path: str, debug_dirs: Sequence[str]) -> DiffReport:
    return symbols_prediction(_exports_of(old_path), _exports_of(new_path))


def run_deepdiff(old_path: str, new_path: str, debug_dirs: Sequence[str]) -> DiffReport:
    from .elf import locate_debug_info

    old_elf = open_elf(old_path)
    new_elf = open_elf(new_path)
    old_dbg = locate_debug_info(old_elf, list(debug_dirs))
    new_dbg = locate_debug_info(new_elf, list(debug_dirs))
    old_corpus = build_corpus(old_elf, str(old_dbg) if old_dbg and str(old_dbg) != old_path else None)
    new_corpus = build_corpus(new_elf, str(new_dbg) if new_dbg and str(new_dbg) != new_path else None)
    return diff_corpora(old_corpus, new_corpus)


PREDICTORS: dict[str, PredictorFn] = {
    "symbols": run_symbols,
    "deepdiff": run_deepdiff,
}


@dataclass
class SpliceRecord:
    key: tuple[str, str]
    old_path: str
    new_path: str
    old_size_bytes: int
    new_size_bytes: int
    filename_changed: bool
    soname_changed: bool
    predictions: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "record_version": RECORD_VERSION,
            "key": list(self.key),
            "old_path": self.old_path,
            "new_path": self.new_path,
            "old_size_bytes": self.old_size_bytes,
            "new_size_bytes": self.new_size_bytes,
            "filename_changed": self.filename_changed,
            "soname_changed": self.soname_changed,
            "predictions": self.predictions,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpliceRecord":
        return cls(
            key=tuple(d["key"]),
            old_path=d["old_path"],
            new_path=d["new_path"],
            old_size_bytes=d["old_size_bytes"],
            new_size_bytes=d["new_size_bytes"],
            filename_changed=d["filename_changed"],
            soname_changed=d["soname_changed"],
            predictions=d["predictions"],
        )


def _soname_changed(old_path: str, new_path: str) -> bool:
    from .elf import FileType, read_soname

    def soname(path: str) -> str | None:
        elf = open_elf(path)
        if elf.file_type is not FileType.SHARED_OBJECT:
            return None
        return read_soname(elf).soname

    try:
        return soname(old_path) != soname(new_path)
    except AbiriftError:
        return False


def _run_pair(
    pair: MatchedPair, predictors: Sequence[str], debug_dirs: Sequence[str]
) -> SpliceRecord:
    record = SpliceRecord(
        key=pair.key,
        old_path=pair.old_path,
        new_path=pair.new_path,
        old_size_bytes=pair.old_size_bytes,
        new_size_bytes=pair.new_size_bytes,
        filename_changed=pair.filename_changed,
        soname_changed=_soname_changed(pair.old_path, pair.new_path),
    )
    for name in predictors:
        fn = PREDICTORS[name]
        start = time.perf_counter_ns()
        try:
            report = fn(pair.old_path, pair.new_path, debug_dirs)
        except Exception as exc:  # predictor isolation: a crash taints one entry only
            record.predictions[name] = {
                "verdict": "error",
                "message": f"{type(exc).__name__}: {exc}",
                "elapsed_ns": max(1, time.perf_counter_ns() - start),
            }
            continue
        elapsed = max(1, time.perf_counter_ns() - start)
        summary: dict[str, int] = {}
        for b in report.breakages:
            summary[b.category.value] = summary.get(b.category.value, 0) + 1
        record.predictions[name] = {
            "verdict": report.verdict,
            "elapsed_ns": elapsed,
            "breakage_summary": summary,
            "report": report.to_dict(deterministic=True),
        }
    return record


def splice(
    old_root: str | os.PathLike,
    new_root: str | os.PathLike,
    predictors: Sequence[str] = ("symbols", "deepdiff"),
    debug_dirs: Sequence[str] = (),
    jobs: int = 1,
) -> tuple[list[SpliceRecord], dict]:
    """Run predictors over every matched pair between two roots.

    Returns the records plus a run manifest carrying the matcher's report
    (unmatched keys, ambiguities, excluded linker scripts, IO errors) and
    run metadata. Predictor failures become per-record error entries; only
    an unreadable root is fatal.
    """
    for name in predictors:
        if name not in PREDICTORS:
            raise ValueError(f"unknown predictor {name!r} (have: {sorted(PREDICTORS)})")
    for root in (old_root, new_root):
        if not os.path.isdir(root):
            raise OSError(f"root {root} is not a readable directory")

    result: MatchResult = match_pairs(old_root, new_root)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(
                pool.map(lambda p: _run_pair(p, predictors, debug_dirs), result.pairs)
            )
    else:
        records = [_run_pair(p, predictors, debug_dirs) for p in result.pairs]

    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "tool": "abirift",
        "tool_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "old_root": str(old_root),
        "new_root": str(new_root),
        "predictors": list(predictors),
        "pair_count": len(records),
        "unmatched_old": [list(k) for k in result.unmatched_old],
        "unmatched_new": [list(k) for k in result.unmatched_new],
        "ambiguities": {f"{k[0]}:{k[1]}": v for k, v in result.ambiguous.items()},
        "linker_scripts_excluded": sorted(
            result.old_enumeration.linker_scripts + result.new_enumeration.linker_scripts
        ),
        "enumeration_errors": result.old_enumeration.errors + result.new_enumeration.errors,
    }
    return records, manifest


def write_records(records: Iterable[SpliceRecord], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


def read_records(path: str | os.PathLike) -> list[SpliceRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(SpliceRecord.from_dict(json.loads(line)))
    return records


# -- statistics --------------------------------------------------------------


@dataclass
class AgreementTable:
    predictors: tuple[str, ...]
    stratum: str  # "all" | "filename_changed" | "filename_unchanged"
    counts: dict[tuple[str, ...], int]
    excluded: int

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def agreement_fraction(self) -> float:
        agree = sum(n for verdicts, n in self.counts.items() if len(set(verdicts)) == 1)
        return agree / self.total


def _in_stratum(record: SpliceRecord, stratum: str) -> bool:
    if stratum == "all":
        return True
    if stratum == "filename_changed":
        return record.filename_changed
    if stratum == "filename_unchanged":
        return not record.filename_changed
    raise ValueError(f"unknown stratum {stratum!r}")


def agreement(
    records: Iterable[SpliceRecord], predictors: Sequence[str], stratum: str = "all"
) -> AgreementTable:
    """Verdict confusion counts for >=2 predictors over one stratum.

    Records where any named predictor returned error/unknown are excluded
    from the denominator and counted separately.
    """
    if len(predictors) < 2:
        raise ValueError("agreement needs at least two predictors")
    counts: dict[tuple[str, ...], int] = {}
    excluded = 0
    for record in records:
        if not _in_stratum(record, stratum):
            continue
        verdicts = []
        usable = True
        for name in predictors:
            verdict = record.predictions.get(name, {}).get("verdict")
            if verdict not in VALID_VERDICTS:
                usable = False
                break
            verdicts.append(verdict)
        if not usable:
            excluded += 1
            continue
        key = tuple(verdicts)
        counts[key] = counts.get(key, 0) + 1
    if not counts:
        raise EmptyStratum(f"no usable records in stratum {stratum!r}")
    return AgreementTable(
        predictors=tuple(predictors), stratum=stratum, counts=counts, excluded=excluded
    )


FREQUENCY_STRATA = (
    ("filename_changed", "soname_changed"),
    ("filename_changed", "soname_unchanged"),
    ("filename_unchanged", "soname_changed"),
    ("filename_unchanged", "soname_unchanged"),
    ("total",),
)


@dataclass
class FrequencyTable:
    # stratum name -> category -> fraction of broken libraries exhibiting it,
    # or None when the stratum has no broken libraries at all (0/0).
    fractions: dict[str, dict[str, float] | None]
    denominators: dict[str, int]


def _stratum_name(parts: tuple[str, ...]) -> str:
    return "/".join(parts)


def breakage_frequency(
    records: Iterable[SpliceRecord], predictor: str = "deepdiff"
) -> FrequencyTable:
    """Per-category breakage frequency, stratified filename x SONAME.

    Fractions are |libraries with >=1 breakage of the category| over
    |libraries with >=1 breaking report| in the stratum; they overlap, so
    they do not sum to 1.
    """
    records = list(records)
    if not records:
        raise EmptyStratum("no records")
    fractions: dict[str, dict[str, float] | None] = {}
    denominators: dict[str, int] = {}
    for parts in FREQUENCY_STRATA:
        name = _stratum_name(parts)
        selected = []
        for record in records:
            if parts != ("total",):
                want_fname = parts[0] == "filename_changed"
                want_soname = parts[1] == "soname_changed"
                if record.filename_changed != want_fname or record.soname_changed != want_soname:
                    continue
            prediction = record.predictions.get(predictor, {})
            if prediction.get("verdict") == "incompatible":
                selected.append(prediction)
        denominators[name] = len(selected)
        if not selected:
            fractions[name] = None
            continue
        by_category: dict[str, int] = {}
        for prediction in selected:
            for category in prediction.get("breakage_summary", {}):
                by_category[category] = by_category.get(category, 0) + 1
        fractions[name] = {
            category: count / len(selected) for category, count in sorted(by_category.items())
        }
    return FrequencyTable(fractions=fractions, denominators=denominators)


@dataclass
class DistributionSummary:
    mean: float
    max: float
    min: float

    def render(self, fmt: str = ".1f") -> str:
        return f"{self.mean:{fmt}}^{{{self.max:{fmt}}}}_{{{self.min:{fmt}}}}"


def summarize_groups(values: Sequence[float]) -> DistributionSummary:
    if not values:
        raise EmptyStratum("no groups to summarize")
    return DistributionSummary(
        mean=sum(values) / len(values), max=max(values), min=min(values)
    )


@dataclass
class ThroughputReport:
    # predictor -> aggregate stats over records carrying a non-error timing
    per_predictor: dict[str, dict]
    # "a/b" -> bytes-per-second ratio between predictors a and b
    ratios: dict[str, float]


def throughput(records: Iterable[SpliceRecord]) -> ThroughputReport:
    """Bytes/second per predictor plus pairwise speed ratios.

    A recorded elapsed of zero is substituted with one clock tick (1 ns)
    and flagged, so degenerate timings cannot divide by zero.
    """
    totals: dict[str, dict] = {}
    for record in records:
        pair_bytes = record.old_size_bytes + record.new_size_bytes
        for name, prediction in record.predictions.items():
            if prediction.get("verdict") == "error":
                continue
            stats = totals.setdefault(
                name, {"total_bytes": 0, "total_ns": 0, "records": 0, "zero_elapsed_flagged": 0}
            )
            elapsed = prediction.get("elapsed_ns", 0)
            if elapsed <= 0:
                elapsed = 1
                stats["zero_elapsed_flagged"] += 1
            stats["total_bytes"] += pair_bytes
            stats["total_ns"] += elapsed
            stats["records"] += 1
    per_predictor = {}
    for name, stats in sorted(totals.items()):
        seconds = stats["total_ns"] / 1e9
        per_predictor[name] = {
            **stats,
            "bytes_per_second": stats["total_bytes"] / seconds if seconds else 0.0,
        }
    ratios = {}
    for a in per_predictor:
        for b in per_predictor:
            if a != b and per_predictor[b]["bytes_per_second"]:
                ratios[f"{a}/{b}"] = (
                    per_predictor[a]["bytes_per_second"] / per_predictor[b]["bytes_per_second"]
                )
    return ThroughputReport(per_predictor=per_predictor, ratios=ratios)
