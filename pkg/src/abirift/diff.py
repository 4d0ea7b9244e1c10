"""Corpus comparison and breakage classification.

Compares two corpora (old first, new second, mirroring an upgrade) and
classifies every detected incompatibility into a closed category taxonomy:
function removals/changes, parameter subtype and return-type changes,
vtable entry changes, enumerator changes, global-variable changes, SONAME
changes, and plain symbol removals when only symbols are available.
"""

from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass

from . import mangle
from .corpus import AbiCorpus, FunctionDecl, type_fingerprint, type_spelling
from .symbols import missing_previously_found_exports

REPORT_VERSION = 1


class BreakageCategory(enum.Enum):
    FUNCTION_REMOVED = "FunctionRemoved"
    FUNCTION_ADDED = "FunctionAdded"
    FUNCTION_PARAM_CHANGED = "FunctionParamChanged"
    FUNCTION_SUBTYPE_CHANGED = "FunctionSubtypeChanged"
    FUNCTION_RETURN_TYPE_CHANGED = "FunctionReturnTypeChanged"
    VTABLE_ENTRY_ADDED = "VtableEntryAdded"
    VTABLE_ENTRY_REMOVED = "VtableEntryRemoved"
    ENUMERATOR_ADDED = "EnumeratorAdded"
    ENUMERATOR_REMOVED = "EnumeratorRemoved"
    ENUMERATOR_VALUE_CHANGED = "EnumeratorValueChanged"
    GLOBAL_VARIABLE_REMOVED = "GlobalVariableRemoved"
    GLOBAL_VARIABLE_TYPE_CHANGED = "GlobalVariableTypeChanged"
    GLOBAL_LINKAGE_CHANGED = "GlobalLinkageChanged"
    SONAME_CHANGED = "SonameChanged"
    SYMBOL_REMOVED = "SymbolRemoved"


BREAKING = "breaking"
INFORMATIONAL = "informational"


@dataclass(frozen=True)
class Breakage:
    category: BreakageCategory
    subject: str
    before: str = ""
    after: str = ""
    severity: str = BREAKING


@dataclass
class DiffReport:
    verdict: str  # "compatible" | "incompatible" | "unknown"
    breakages: tuple[Breakage, ...]
    predictor: str
    elapsed_ns: int
    mode: str  # "full_dwarf" | "symbols_only"

    def to_dict(self, deterministic: bool = True) -> dict:
        """JSON-ready form. With deterministic=True the timing field is
        zeroed so identical inputs serialize byte-identically; measured
        timings are carried separately by the splice records."""
        return {
            "report_version": REPORT_VERSION,
            "verdict": self.verdict,
            "predictor": self.predictor,
            "mode": self.mode,
            "elapsed_ns": 0 if deterministic else self.elapsed_ns,
            "breakages": [
                {
                    "category": b.category.value,
                    "subject": b.subject,
                    "before": b.before,
                    "after": b.after,
                    "severity": b.severity,
                }
                for b in self.breakages
            ],
        }

    def to_json(self, deterministic: bool = True) -> str:
        return json.dumps(self.to_dict(deterministic), sort_keys=True, indent=2) + "\n"

    def render_text(self) -> str:
        lines = [f"verdict: {self.verdict} (predictor={self.predictor}, mode={self.mode})"]
        for b in self.breakages:
            detail = ""
            if b.before or b.after:
                detail = f": {b.before or '<none>'} -> {b.after or '<none>'}"
            lines.append(f"  [{b.severity}] {b.category.value} {b.subject}{detail}")
        if not self.breakages:
            lines.append("  no differences detected")
        return "\n".join(lines)


def _base_name(fn: FunctionDecl) -> str:
    d = mangle.demangle(fn.linkage_name)
    return d.base() if isinstance(d, mangle.DemangledName) else fn.linkage_name


def _signature(corpus: AbiCorpus, fn: FunctionDecl) -> str:
    params = ", ".join(type_spelling(corpus, p) for p in fn.parameters)
    ret = type_spelling(corpus, fn.return_type)
    return f"{ret} {_base_name(fn)}({params})"


def diff_functions(old: AbiCorpus, new: AbiCorpus, depth: int = 8) -> list[Breakage]:
    out: list[Breakage] = []
    old_fns = old.exported_functions()
    new_fns = new.exported_functions()

    for key in sorted(old_fns.keys() & new_fns.keys()):
        fo, fn = old_fns[key], new_fns[key]
        spell_old = [type_spelling(old, p) for p in fo.parameters]
        spell_new = [type_spelling(new, p) for p in fn.parameters]
        subject = _base_name(fo)
        if spell_old != spell_new:
            # Only reachable for unmangled (C) symbols: the parameter list
            # moved under an unchanged symbol name.
            out.append(
                Breakage(
                    BreakageCategory.FUNCTION_PARAM_CHANGED,
                    subject=subject,
                    before=_signature(old, fo),
                    after=_signature(new, fn),
                )
            )
        else:
            for i, (po, pn) in enumerate(zip(fo.parameters, fn.parameters)):
                if type_fingerprint(old, po, depth) != type_fingerprint(new, pn, depth):
                    out.append(
                        Breakage(
                            BreakageCategory.FUNCTION_SUBTYPE_CHANGED,
                            subject=subject,
                            before=f"parameter {i + 1} ({spell_old[i]}) layout",
                            after=f"parameter {i + 1} ({spell_new[i]}) layout changed",
                        )
                    )
                    break
        ret_old = type_spelling(old, fo.return_type)
        ret_new = type_spelling(new, fn.return_type)
        if ret_old != ret_new or type_fingerprint(old, fo.return_type, depth) != type_fingerprint(
            new, fn.return_type, depth
        ):
            out.append(
                Breakage(
                    BreakageCategory.FUNCTION_RETURN_TYPE_CHANGED,
                    subject=subject,
                    before=ret_old,
                    after=ret_new,
                )
            )

    removed = sorted(old_fns.keys() - new_fns.keys())
    added = sorted(new_fns.keys() - old_fns.keys())

    # Correlate removed and added overloads sharing a demangled base name:
    # those pairs are parameter changes, not removal+addition. Unparseable
    # mangled names only ever correlate by exact equality, handled above.
    def by_base(keys: list[str]) -> dict[str, list[str]]:
        groups: dict[str, list[str]] = {}
        for key in keys:
            d = mangle.demangle(key)
            if isinstance(d, mangle.DemangledName):
                groups.setdefault(d.base(), []).append(key)
        return groups

    removed_by_base = by_base(removed)
    added_by_base = by_base(added)
    paired_removed: set[str] = set()
    paired_added: set[str] = set()
    for base in sorted(removed_by_base.keys() & added_by_base.keys()):
        for old_key, new_key in zip(removed_by_base[base], added_by_base[base]):
            out.append(
                Breakage(
                    BreakageCategory.FUNCTION_PARAM_CHANGED,
                    subject=base,
                    before=_signature(old, old_fns[old_key]),
                    after=_signature(new, new_fns[new_key]),
                )
            )
            paired_removed.add(old_key)
            paired_added.add(new_key)

    for key in removed:
        if key not in paired_removed:
            out.append(
                Breakage(
                    BreakageCategory.FUNCTION_REMOVED,
                    subject=_base_name(old_fns[key]),
                    before=_signature(old, old_fns[key]),
                )
            )
    for key in added:
        if key not in paired_added:
            out.append(
                Breakage(
                    BreakageCategory.FUNCTION_ADDED,
                    subject=_base_name(new_fns[key]),
                    after=_signature(new, new_fns[key]),
                    severity=INFORMATIONAL,
                )
            )
    return out


def diff_vtables(old: AbiCorpus, new: AbiCorpus) -> list[Breakage]:
    out: list[Breakage] = []
    for name in sorted(old.vtables.keys() & new.vtables.keys()):
        old_entries = set(old.vtables[name].entries)
        new_entries = set(new.vtables[name].entries)
        for slot, fn in sorted(new_entries - old_entries):
            out.append(
                Breakage(
                    BreakageCategory.VTABLE_ENTRY_ADDED,
                    subject=f"{name}::{fn}",
                    after=f"slot {slot}",
                )
            )
        for slot, fn in sorted(old_entries - new_entries):
            out.append(
                Breakage(
                    BreakageCategory.VTABLE_ENTRY_REMOVED,
                    subject=f"{name}::{fn}",
                    before=f"slot {slot}",
                )
            )
    return out


def diff_enums(
    old: AbiCorpus, new: AbiCorpus, added_breaking: bool = True
) -> list[Breakage]:
    out: list[Breakage] = []
    old_enums = old.enumerations()
    new_enums = new.enumerations()
    for name in sorted(old_enums.keys() & new_enums.keys()):
        old_vals = dict(old_enums[name].enumerators)
        new_vals = dict(new_enums[name].enumerators)
        for label in sorted(new_vals.keys() - old_vals.keys()):
            out.append(
                Breakage(
                    BreakageCategory.ENUMERATOR_ADDED,
                    subject=f"{name}::{label}",
                    after=str(new_vals[label]),
                    severity=BREAKING if added_breaking else INFORMATIONAL,
                )
            )
        for label in sorted(old_vals.keys() - new_vals.keys()):
            out.append(
                Breakage(
                    BreakageCategory.ENUMERATOR_REMOVED,
                    subject=f"{name}::{label}",
                    before=str(old_vals[label]),
                )
            )
        for label in sorted(old_vals.keys() & new_vals.keys()):
            if old_vals[label] != new_vals[label]:
                out.append(
                    Breakage(
                        BreakageCategory.ENUMERATOR_VALUE_CHANGED,
                        subject=f"{name}::{label}",
                        before=str(old_vals[label]),
                        after=str(new_vals[label]),
                    )
                )
    return out


def diff_globals(old: AbiCorpus, new: AbiCorpus, depth: int = 8) -> list[Breakage]:
    out: list[Breakage] = []
    for name in sorted(old.globals):
        go = old.globals[name]
        if go.linkage != "external":
            continue  # internal variables are not ABI surface
        gn = new.globals.get(name)
        if gn is None:
            out.append(
                Breakage(
                    BreakageCategory.GLOBAL_VARIABLE_REMOVED,
                    subject=name,
                    before=type_spelling(old, go.type),
                )
            )
        elif gn.linkage != "external":
            out.append(
                Breakage(
                    BreakageCategory.GLOBAL_LINKAGE_CHANGED,
                    subject=name,
                    before="external",
                    after="internal",
                )
            )
        elif type_fingerprint(old, go.type, depth) != type_fingerprint(new, gn.type, depth):
            out.append(
                Breakage(
                    BreakageCategory.GLOBAL_VARIABLE_TYPE_CHANGED,
                    subject=name,
                    before=type_spelling(old, go.type),
                    after=type_spelling(new, gn.type),
                )
            )
    return out


def diff_soname(old: AbiCorpus, new: AbiCorpus) -> list[Breakage]:
    # Fires on value changes and on one-sided presence; absent-on-both is fine.
    a, b = old.soname.soname, new.soname.soname
    if a == b:
        return []
    return [
        Breakage(
            BreakageCategory.SONAME_CHANGED,
            subject="SONAME",
            before=a or "<absent>",
            after=b or "<absent>",
        )
    ]


def symbol_breakages(old_exports, new_exports) -> list[Breakage]:
    """SymbolRemoved breakages, one per missing export identity.

    Shared by the symbols predictor and the symbols-only diff mode so the
    two can never disagree.
    """
    verdict = missing_previously_found_exports(old_exports, new_exports)
    return [
        Breakage(
            BreakageCategory.SYMBOL_REMOVED,
            subject=sym.display(),
            before=mangle.display(sym.name),
        )
        for sym in verdict.missing
    ]


def diff_corpora(
    old: AbiCorpus,
    new: AbiCorpus,
    symbols_only: bool = False,
    enum_added_breaking: bool = True,
    fingerprint_depth: int = 8,
    predictor: str = "deepdiff",
) -> DiffReport:
    """Full comparison of two corpora, old version first.

    Falls back to symbols-only mode when either side lacks debug info; in
    that forced case a clean result is reported as "unknown" rather than
    claiming compatibility the deep checks never verified.
    """
    start = time.perf_counter_ns()
    forced = not (old.has_debug_info and new.has_debug_info)
    mode = "symbols_only" if (symbols_only or forced) else "full_dwarf"

    breakages: list[Breakage] = []
    breakages.extend(diff_soname(old, new))
    if mode == "full_dwarf":
        breakages.extend(diff_functions(old, new, fingerprint_depth))
        breakages.extend(diff_vtables(old, new))
        breakages.extend(diff_enums(old, new, enum_added_breaking))
        breakages.extend(diff_globals(old, new, fingerprint_depth))
    else:
        breakages.extend(symbol_breakages(old.exports, new.exports))

    unique: dict[tuple[str, str], Breakage] = {}
    for b in breakages:
        unique.setdefault((b.category.value, b.subject), b)
    ordered = tuple(sorted(unique.values(), key=lambda b: (b.category.value, b.subject)))

    if any(b.severity == BREAKING for b in ordered):
        verdict = "incompatible"
    elif mode == "symbols_only" and forced:
        verdict = "unknown"
    else:
        verdict = "compatible"

    elapsed = max(1, time.perf_counter_ns() - start)
    return DiffReport(
        verdict=verdict,
        breakages=ordered,
        predictor=predictor,
        elapsed_ns=elapsed,
        mode=mode,
    )


def symbols_prediction(old_exports, new_exports) -> DiffReport:
    """The symbols predictor expressed as a DiffReport.

    Never "unknown": its model is fully checkable from the symbol tables,
    so an empty missing set is a definitive compatible for this predictor.
    """
    start = time.perf_counter_ns()
    breakages = tuple(
        sorted(
            symbol_breakages(old_exports, new_exports),
            key=lambda b: (b.category.value, b.subject),
        )
    )
    verdict = "incompatible" if breakages else "compatible"
    elapsed = max(1, time.perf_counter_ns() - start)
    return DiffReport(
        verdict=verdict,
        breakages=breakages,
        predictor="symbols",
        elapsed_ns=elapsed,
        mode="symbols_only",
    )
