"""Exported-symbol predictor.

The fast compatibility check: filter each binary's symbol tables down to the
exported interface and compute the set difference old-minus-new. Anything
the old library exported that the new one no longer does is a break;
additions never are.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .elf import Binding, RawSymbol, SymType

SymbolIdentity = tuple[str, str | None]


@dataclass(frozen=True)
class ExportedSymbol:
    """A filtered symbol table entry that other binaries can link against.

    Identity for comparisons is (name, version); size and type ride along
    for reporting only.
    """

    name: str
    version: str | None
    size: int
    sym_type: SymType

    @property
    def identity(self) -> SymbolIdentity:
        return (self.name, self.version)

    def display(self) -> str:
        return f"{self.name}@{self.version}" if self.version else self.name


@dataclass(frozen=True)
class SymbolsVerdict:
    missing: tuple[ExportedSymbol, ...]  # sorted by identity

    @property
    def compatible(self) -> bool:
        return not self.missing


def exported(symbols: Iterable[RawSymbol]) -> dict[SymbolIdentity, ExportedSymbol]:
    """Filter raw symbols down to the exported set, keyed by identity.

    A symbol is exported iff its size is greater than zero, it is not in an
    undefined section, it has a type, and it is not local.
    """
    out: dict[SymbolIdentity, ExportedSymbol] = {}
    for sym in symbols:
        if sym.size <= 0:
            continue
        if sym.section_index == "undefined":
            continue
        if sym.sym_type is SymType.NOTYPE:
            continue
        if sym.binding is Binding.LOCAL:
            continue
        out.setdefault((sym.name, sym.version), ExportedSymbol(sym.name, sym.version, sym.size, sym.sym_type))
    return out


def missing_previously_found_exports(
    a: Iterable[ExportedSymbol] | dict[SymbolIdentity, ExportedSymbol],
    b: Iterable[ExportedSymbol] | dict[SymbolIdentity, ExportedSymbol],
) -> SymbolsVerdict:
    """Exports of the older library a that the newer library b lacks.

    An empty result means no change on the symbol level and therefore no
    break as far as this predictor can see; symbols only present in b are
    additions and never affect the verdict.
    """
    a_map = _as_map(a)
    b_keys = set(_as_map(b))
    missing = sorted(
        (sym for ident, sym in a_map.items() if ident not in b_keys),
        key=lambda s: (s.name, s.version or ""),
    )
    return SymbolsVerdict(missing=tuple(missing))


def _as_map(
    syms: Iterable[ExportedSymbol] | dict[SymbolIdentity, ExportedSymbol]
) -> dict[SymbolIdentity, ExportedSymbol]:
    if isinstance(syms, dict):
        return syms
    return {s.identity: s for s in syms}
