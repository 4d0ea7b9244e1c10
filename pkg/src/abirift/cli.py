"""Command-line interface.

Exit codes are the scripting contract: 0 compatible, 3 unknown (not enough
debug info to decide), 4 incompatible, 1 usage error, 2 input error. All
diagnostics go to stderr so --json output stays machine-readable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__, corpus as corpus_mod, mangle, splice as splice_mod
from .diff import diff_corpora
from .elf import locate_debug_info, open_elf, read_symbols
from .errors import AbiriftError, EmptyStratum, MissingSymbolTables, NotElf
from .symbols import exported

log = logging.getLogger("abirift")

EXIT_COMPATIBLE = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_UNKNOWN = 3
EXIT_INCOMPATIBLE = 4

_VERDICT_EXITS = {
    "compatible": EXIT_COMPATIBLE,
    "unknown": EXIT_UNKNOWN,
    "incompatible": EXIT_INCOMPATIBLE,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _debug_dirs(args) -> list[str]:
    if args.debug_dir:
        return list(args.debug_dir)
    env = os.environ.get("ABIRIFT_DEBUG_DIRS", "")
    return [d for d in env.split(":") if d]


def _open_input(path: str):
    try:
        return open_elf(path)
    except NotElf:
        log.error("%s: not an ELF object", path)
        raise SystemExit(EXIT_INPUT)
    except (AbiriftError, OSError) as exc:
        log.error("%s", exc)
        raise SystemExit(EXIT_INPUT)


def _build_corpus_for(path: str, debug_dirs: list[str]) -> corpus_mod.AbiCorpus:
    elf = _open_input(path)
    debug = locate_debug_info(elf, debug_dirs)
    debug_path = str(debug) if debug is not None and str(debug) != elf.path else None
    return corpus_mod.build_corpus(elf, debug_path)


def cmd_exports(args) -> int:
    elf = _open_input(args.path)
    try:
        syms = read_symbols(elf)
    except MissingSymbolTables:
        syms = []
    exports = exported(syms)
    # audit trail for the filter: how much the four rules discarded
    log.info("%d symbol table entries, %d exported", len(syms), len(exports))
    rows = sorted(exports.values(), key=lambda s: (s.name, s.version or ""))
    if args.json:
        doc = {
            "exports_version": 1,
            "raw_symbol_count": len(syms),
            "exports": [
                {
                    "name": s.name,
                    "version": s.version,
                    "size": s.size,
                    "type": s.sym_type.value,
                    "demangled": mangle.display(s.name),
                }
                for s in rows
            ],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for s in rows:
            rendered = mangle.display(s.name)
            suffix = f"  [{rendered}]" if rendered != s.name else ""
            print(f"{s.display()}  {s.sym_type.value}  {s.size}{suffix}")
    return EXIT_COMPATIBLE


def cmd_diff(args) -> int:
    debug_dirs = _debug_dirs(args)
    old_corpus = _build_corpus_for(args.old, debug_dirs)
    new_corpus = _build_corpus_for(args.new, debug_dirs)
    report = diff_corpora(old_corpus, new_corpus, symbols_only=args.symbols_only)
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        print(report.render_text())
    return _VERDICT_EXITS[report.verdict]


def cmd_dump(args) -> int:
    c = _build_corpus_for(args.path, _debug_dirs(args))
    sys.stdout.write(corpus_mod.dump_json(c))
    return EXIT_COMPATIBLE


def cmd_splice(args) -> int:
    predictors = [p.strip() for p in args.predictors.split(",") if p.strip()]
    try:
        records, manifest = splice_mod.splice(
            args.old_root,
            args.new_root,
            predictors=predictors,
            debug_dirs=_debug_dirs(args),
            jobs=args.jobs,
        )
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    splice_mod.write_records(records, out / "records.jsonl")
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %d records to %s", len(records), out / "records.jsonl")
    return EXIT_COMPATIBLE


def _strata_for(args) -> list[str]:
    wants = [s.strip() for s in args.stratify.split(",") if s.strip()]
    if "filename" in wants:
        return ["filename_changed", "filename_unchanged"]
    return ["all"]


def _emit_table(rows: list[list[str]], fmt: str) -> None:
    if fmt == "tsv":
        for row in rows:
            print("\t".join(row))
        return
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    for row in rows:
        print("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())


def _report_agreement(groups: dict[str, list], args) -> None:
    fractions_by_stratum: dict[str, list[float]] = {}
    for name, records in groups.items():
        present = sorted({p for r in records for p in r.predictions})
        if len(present) < 2:
            raise EmptyStratum(f"{name}: need at least two predictors, found {present}")
        for stratum in _strata_for(args):
            try:
                table = splice_mod.agreement(records, present, stratum)
            except EmptyStratum:
                print(f"# group={name} stratum={stratum}: no usable records")
                continue
            print(f"# group={name} stratum={stratum} predictors={','.join(present)}")
            rows = [list(table.predictors) + ["count"]]
            for verdicts, count in sorted(table.counts.items()):
                rows.append(list(verdicts) + [str(count)])
            _emit_table(rows, args.format)
            print(f"records={table.total} excluded={table.excluded}")
            print(f"agreement_fraction={table.agreement_fraction:.4f}")
            fractions_by_stratum.setdefault(stratum, []).append(table.agreement_fraction)
    if len(groups) > 1:
        for stratum, values in fractions_by_stratum.items():
            summary = splice_mod.summarize_groups([100 * v for v in values])
            print(f"# across groups stratum={stratum}: agreement% {summary.render()}")


def _report_frequency(groups: dict[str, list], args) -> None:
    records = [r for recs in groups.values() for r in recs]
    predictor = "deepdiff" if any("deepdiff" in r.predictions for r in records) else None
    if predictor is None:
        raise EmptyStratum("no deep-diff predictions in records")
    table = splice_mod.breakage_frequency(records, predictor)
    categories = sorted({c for f in table.fractions.values() if f for c in f})
    rows = [["category"] + list(table.fractions.keys())]
    for category in categories:
        row = [category]
        for stratum, fractions in table.fractions.items():
            if fractions is None:
                row.append("n/a")
            else:
                row.append(f"{100 * fractions.get(category, 0.0):.1f}%")
        rows.append(row)
    rows.append(["(broken libs)"] + [str(table.denominators[s]) for s in table.fractions])
    _emit_table(rows, args.format)


def _report_throughput(groups: dict[str, list], args) -> None:
    records = [r for recs in groups.values() for r in recs]
    report = splice_mod.throughput(records)
    rows = [["predictor", "records", "bytes", "seconds", "bytes_per_second"]]
    for name, stats in report.per_predictor.items():
        rows.append(
            [
                name,
                str(stats["records"]),
                str(stats["total_bytes"]),
                f"{stats['total_ns'] / 1e9:.6f}",
                f"{stats['bytes_per_second']:.0f}",
            ]
        )
    _emit_table(rows, args.format)
    for pair, ratio in sorted(report.ratios.items()):
        print(f"speed_ratio {pair} = {ratio:.2f}")


def cmd_report(args) -> int:
    groups: dict[str, list] = {}
    for path in args.records:
        try:
            groups[path] = splice_mod.read_records(path)
        except (OSError, json.JSONDecodeError) as exc:
            log.error("%s: %s", path, exc)
            return EXIT_INPUT
    try:
        if args.table == "agreement":
            _report_agreement(groups, args)
        elif args.table == "frequency":
            _report_frequency(groups, args)
        else:
            _report_throughput(groups, args)
    except EmptyStratum as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    return EXIT_COMPATIBLE


def build_parser() -> _Parser:
    parser = _Parser(prog="abirift", description="ABI compatibility toolkit for ELF shared libraries")
    parser.add_argument("--version", action="version", version=f"abirift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exports", help="list the exported symbols of a binary")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_exports)

    p = sub.add_parser("diff", help="compare two versions of a library (old first)")
    p.add_argument("old")
    p.add_argument("new")
    p.add_argument("--symbols-only", action="store_true", help="skip the DWARF comparison")
    p.add_argument("--debug-dir", action="append", default=[], help="debug info root (repeatable)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_diff)

    p = sub.add_parser("dump", help="emit a binary's ABI corpus as canonical JSON")
    p.add_argument("path")
    p.add_argument("--debug-dir", action="append", default=[])
    p.set_defaults(fn=cmd_dump)

    p = sub.add_parser("splice", help="run all predictors over matched pairs of two trees")
    p.add_argument("old_root")
    p.add_argument("new_root")
    p.add_argument("--predictors", default="symbols,deepdiff")
    p.add_argument("--out", default=".")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--debug-dir", action="append", default=[])
    p.set_defaults(fn=cmd_splice)

    p = sub.add_parser("report", help="render statistics tables from record files")
    p.add_argument("records", nargs="+")
    p.add_argument("--table", choices=["agreement", "frequency", "throughput"], default="agreement")
    p.add_argument("--stratify", default="", help="comma list: filename,soname")
    p.add_argument("--format", choices=["text", "tsv"], default="text")
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except BrokenPipeError:
        return EXIT_COMPATIBLE


if __name__ == "__main__":
    sys.exit(main())
