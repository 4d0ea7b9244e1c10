"""ABI corpus extraction.

Reduces one binary to the artifacts its ABI exposes: exported functions
with parameter/return types, record layouts, vtable slot assignments,
enumerations, and globals, plus the exported-symbol set and SONAME. When
no DWARF is available the corpus degrades to the symbol/SONAME subset with
has_debug_info=False so callers can still run the shallow comparison.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from . import dwarf, mangle
from .dwarf import (
    AT_ARTIFICIAL,
    AT_BIT_OFFSET,
    AT_BIT_SIZE,
    AT_BYTE_SIZE,
    AT_CONST_VALUE,
    AT_COUNT,
    AT_DATA_BIT_OFFSET,
    AT_DATA_MEMBER_LOCATION,
    AT_DECL_FILE,
    AT_DECL_LINE,
    AT_DECLARATION,
    AT_EXTERNAL,
    AT_LINKAGE_NAME,
    AT_MIPS_LINKAGE_NAME,
    AT_NAME,
    AT_SPECIFICATION,
    AT_TYPE,
    AT_UPPER_BOUND,
    AT_VIRTUALITY,
    AT_VTABLE_ELEM_LOCATION,
    Die,
)
from .elf import ElfFile, FileType, SonameInfo, open_elf, read_soname, read_symbols
from .errors import (
    DanglingTypeRef,
    DebugInfoMismatch,
    MalformedDwarf,
    MissingSymbolTables,
)
from .symbols import ExportedSymbol, SymbolIdentity, exported

DEFAULT_FINGERPRINT_DEPTH = 8

TypeRef = str

_TYPE_TAGS = {
    dwarf.TAG_BASE_TYPE: "base",
    dwarf.TAG_POINTER_TYPE: "pointer",
    dwarf.TAG_REFERENCE_TYPE: "reference",
    dwarf.TAG_RVALUE_REFERENCE_TYPE: "reference",
    dwarf.TAG_CONST_TYPE: "qualified",
    dwarf.TAG_VOLATILE_TYPE: "qualified",
    dwarf.TAG_RESTRICT_TYPE: "qualified",
    dwarf.TAG_TYPEDEF: "typedef",
    dwarf.TAG_STRUCTURE_TYPE: "struct_or_class",
    dwarf.TAG_CLASS_TYPE: "struct_or_class",
    dwarf.TAG_UNION_TYPE: "union",
    dwarf.TAG_ENUMERATION_TYPE: "enumeration",
    dwarf.TAG_ARRAY_TYPE: "array",
    dwarf.TAG_SUBROUTINE_TYPE: "function_type",
    dwarf.TAG_UNSPECIFIED_TYPE: "unknown",
}


@dataclass(frozen=True)
class MemberField:
    name: str
    type: TypeRef | None
    byte_offset: int
    bit_size: int | None = None
    bit_offset: int | None = None


@dataclass(frozen=True)
class TypeDescriptor:
    kind: str
    name: str | None = None
    byte_size: int | None = None
    members: tuple[MemberField, ...] = ()
    base_classes: tuple[TypeRef, ...] = ()
    enumerators: tuple[tuple[str, int], ...] = ()
    element: TypeRef | None = None


@dataclass(frozen=True)
class FunctionDecl:
    linkage_name: str
    display_name: str
    parameters: tuple[TypeRef, ...]
    return_type: TypeRef | None
    is_exported: bool
    vtable_slot: int | None = None
    is_virtual: bool = False


@dataclass(frozen=True)
class GlobalVar:
    name: str
    type: TypeRef | None
    linkage: str  # "external" | "internal"


@dataclass(frozen=True)
class VTable:
    class_name: str
    entries: tuple[tuple[int, str], ...]  # (slot, member function name)


@dataclass
class AbiCorpus:
    path: str
    functions: dict[str, FunctionDecl] = field(default_factory=dict)
    types: dict[TypeRef, TypeDescriptor] = field(default_factory=dict)
    vtables: dict[str, VTable] = field(default_factory=dict)
    globals: dict[str, GlobalVar] = field(default_factory=dict)
    exports: dict[SymbolIdentity, ExportedSymbol] = field(default_factory=dict)
    soname: SonameInfo = SonameInfo(None)
    has_debug_info: bool = False
    warnings: tuple[str, ...] = ()
    _definitions: dict[tuple[str, str], TypeDescriptor] | None = field(
        default=None, repr=False, compare=False
    )

    def enumerations(self) -> dict[str, TypeDescriptor]:
        """Named enumeration definitions, keyed by scoped name."""
        out: dict[str, TypeDescriptor] = {}
        for desc in self.types.values():
            if desc.kind == "enumeration" and desc.name and desc.enumerators:
                out.setdefault(desc.name, desc)
        return out

    def complete(self, desc: TypeDescriptor) -> TypeDescriptor:
        """Swap a forward declaration for the same-named definition if one exists.

        DWARF frequently records pointer targets as declaration stubs while
        the full definition sits elsewhere in the corpus.
        """
        if desc.byte_size is not None or not desc.name:
            return desc
        if desc.kind not in ("struct_or_class", "union", "enumeration"):
            return desc
        if desc.members or desc.enumerators:
            return desc
        if self._definitions is None:
            defs: dict[tuple[str, str], TypeDescriptor] = {}
            for candidate in self.types.values():
                if candidate.name and candidate.byte_size is not None:
                    defs.setdefault((candidate.kind, candidate.name), candidate)
            self._definitions = defs
        return self._definitions.get((desc.kind, desc.name), desc)

    def exported_functions(self) -> dict[str, FunctionDecl]:
        return {k: f for k, f in self.functions.items() if f.is_exported}


def resolve_type(corpus: AbiCorpus, ref: TypeRef | None) -> TypeDescriptor:
    """Peel typedefs and cv-qualifiers down to the underlying descriptor.

    Pointer/reference edges are never followed, so self-referential records
    terminate. Raises DanglingTypeRef for refs outside the corpus.
    """
    if ref is None:
        return TypeDescriptor(kind="base", name="void")
    seen = set()
    while True:
        if ref in seen:
            return TypeDescriptor(kind="unknown", name="<cyclic>")
        seen.add(ref)
        desc = corpus.types.get(ref)
        if desc is None:
            raise DanglingTypeRef(f"type ref {ref} not in corpus for {corpus.path}")
        if desc.kind in ("typedef", "qualified") and desc.element is not None:
            ref = desc.element
            continue
        return corpus.complete(desc)


def type_spelling(corpus: AbiCorpus, ref: TypeRef | None, canonical: bool = True) -> str:
    """Readable spelling of a type, e.g. "Derived*" or "char const*".

    With canonical=True typedefs are replaced by their targets so spellings
    compare the way mangled names do.
    """
    if ref is None:
        return "void"
    seen: set[str] = set()
    suffix = ""
    while ref is not None and ref not in seen:
        seen.add(ref)
        desc = corpus.types.get(ref)
        if desc is None:
            return "<dangling>" + suffix
        if desc.kind == "typedef":
            if not canonical:
                return (desc.name or "?") + suffix
            ref = desc.element
            continue
        if desc.kind == "qualified":
            suffix = " const" + suffix if desc.name == "const" else f" {desc.name}" + suffix
            ref = desc.element
            continue
        if desc.kind == "pointer":
            inner = type_spelling(corpus, desc.element, canonical)
            return inner + "*" + suffix
        if desc.kind == "reference":
            inner = type_spelling(corpus, desc.element, canonical)
            return inner + "&" + suffix
        if desc.kind == "array":
            inner = type_spelling(corpus, desc.element, canonical)
            return inner + "[]" + suffix
        if desc.kind == "function_type":
            ret = type_spelling(corpus, desc.element, canonical)
            params = ", ".join(type_spelling(corpus, m.type, canonical) for m in desc.members)
            return f"{ret} ({params})" + suffix
        return (desc.name or desc.kind) + suffix
    return "<cyclic>" + suffix


def type_fingerprint(
    corpus: AbiCorpus, ref: TypeRef | None, depth_limit: int = DEFAULT_FINGERPRINT_DEPTH
) -> str:
    """Deterministic structural hash of a type.

    Covers kind, byte size, member names/offsets/types, base classes and
    enumerators. Each record/union expansion consumes one level of depth;
    past the limit only the type name is included. Typedefs and qualifiers
    are peeled, so renaming a typedef does not change the fingerprint.
    """
    text = _fingerprint_text(corpus, ref, depth_limit, on_path=set())
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _fingerprint_text(
    corpus: AbiCorpus, ref: TypeRef | None, depth: int, on_path: set[str]
) -> str:
    if ref is None:
        return "void"
    desc = corpus.types.get(ref)
    if desc is None:
        return "dangling"
    if desc.kind in ("typedef", "qualified"):
        return _fingerprint_text(corpus, desc.element, depth, on_path)
    desc = corpus.complete(desc)
    if ref in on_path:
        return f"cycle({desc.name or desc.kind})"
    if desc.kind == "base":
        return f"base({desc.name},{desc.byte_size})"
    if desc.kind in ("pointer", "reference"):
        on_path = on_path | {ref}
        return f"{desc.kind}({_fingerprint_text(corpus, desc.element, depth, on_path)})"
    if desc.kind == "enumeration":
        pairs = ",".join(f"{label}={value}" for label, value in desc.enumerators)
        return f"enum({desc.name},{desc.byte_size},[{pairs}])"
    if desc.kind == "array":
        on_path = on_path | {ref}
        return f"array({desc.byte_size},{_fingerprint_text(corpus, desc.element, depth, on_path)})"
    if desc.kind == "function_type":
        on_path = on_path | {ref}
        ret = _fingerprint_text(corpus, desc.element, depth, on_path)
        params = ",".join(_fingerprint_text(corpus, m.type, depth, on_path) for m in desc.members)
        return f"fn({ret},[{params}])"
    if desc.kind in ("struct_or_class", "union"):
        if depth < 0:
            return f"decl({desc.name})"
        on_path = on_path | {ref}
        members = ",".join(
            f"({m.name},{m.byte_offset},{m.bit_offset},{m.bit_size},"
            f"{_fingerprint_text(corpus, m.type, depth - 1, on_path)})"
            for m in desc.members
        )
        bases = ",".join(_fingerprint_text(corpus, b, depth - 1, on_path) for b in desc.base_classes)
        return f"{desc.kind}({desc.name},{desc.byte_size},[{members}],[{bases}])"
    return f"unknown({desc.name})"


class _CorpusBuilder:
    def __init__(self, info: dwarf.DwarfInfo, exports: dict[SymbolIdentity, ExportedSymbol]):
        self.info = info
        self.export_names = {name for name, _ in exports}
        self.types: dict[TypeRef, TypeDescriptor] = {}
        self.functions: dict[str, FunctionDecl] = {}
        self._fn_is_definition: dict[str, bool] = {}
        self.vtables: dict[str, VTable] = {}
        self.globals: dict[str, GlobalVar] = {}

    # -- attribute plumbing ------------------------------------------------

    def merged_attr(self, die: Die, at: int) -> Any:
        """Attribute value, following specification/abstract_origin chains."""
        seen = set()
        current: Die | None = die
        while current is not None and current.offset not in seen:
            seen.add(current.offset)
            if at in current.attrs:
                return current.attrs[at]
            nxt = current.attr(AT_SPECIFICATION)
            if nxt is None:
                nxt = current.attr(dwarf.AT_ABSTRACT_ORIGIN)
            current = self.info.resolve_ref(nxt) if isinstance(nxt, int) else None
        return None

    def decl_die(self, die: Die) -> Die:
        """The declaration end of a specification chain (scope lives there)."""
        seen = set()
        current = die
        while current.offset not in seen:
            seen.add(current.offset)
            nxt = current.attr(AT_SPECIFICATION)
            target = self.info.resolve_ref(nxt) if isinstance(nxt, int) else None
            if target is None:
                return current
            current = target
        return current

    def scoped_name(self, die: Die) -> str:
        parts: list[str] = []
        current: Die | None = die
        while current is not None and current.tag != dwarf.TAG_COMPILE_UNIT:
            name = current.attr(AT_NAME)
            if name is None and current.tag in (
                dwarf.TAG_STRUCTURE_TYPE,
                dwarf.TAG_CLASS_TYPE,
                dwarf.TAG_UNION_TYPE,
                dwarf.TAG_ENUMERATION_TYPE,
            ):
                name = self._anon_name(current)
            if name is not None:
                parts.append(name)
            current = current.parent
        return "::".join(reversed(parts))

    @staticmethod
    def _anon_name(die: Die) -> str:
        # Synthetic name so anonymous records/enums keep stable diff keys.
        return f"(anonymous@{die.attr(AT_DECL_FILE, '?')}:{die.attr(AT_DECL_LINE, '?')})"

    @staticmethod
    def type_ref(die_offset: int | None) -> TypeRef | None:
        if not isinstance(die_offset, int):
            return None
        return f"0x{die_offset:x}"

    # -- walking -----------------------------------------------------------

    def build(self) -> None:
        for cu in self.info.cus:
            self._walk(cu.root, in_function=False)

    def _walk(self, die: Die, in_function: bool) -> None:
        tag = die.tag
        if tag in _TYPE_TAGS:
            self._add_type(die)
        if tag == dwarf.TAG_SUBPROGRAM:
            self._add_function(die)
            for child in die.children:
                self._walk(child, in_function=True)
            return
        if tag == dwarf.TAG_VARIABLE and not in_function:
            self._add_global(die)
        for child in die.children:
            self._walk(child, in_function)

    def _add_type(self, die: Die) -> None:
        ref = self.type_ref(die.offset)
        if ref in self.types:
            return
        kind = _TYPE_TAGS[die.tag]
        name = die.attr(AT_NAME)
        byte_size = die.attr(AT_BYTE_SIZE)
        element = self.type_ref(die.attr(AT_TYPE)) if isinstance(die.attr(AT_TYPE), int) else None
        members: list[MemberField] = []
        bases: list[TypeRef] = []
        enumerators: list[tuple[str, int]] = []

        if kind in ("struct_or_class", "union"):
            name = self.scoped_name(die) or self._anon_name(die)
            for child in die.children:
                if child.tag == dwarf.TAG_MEMBER:
                    if child.attr(AT_DECLARATION):
                        continue  # static data member
                    bit_size = child.attr(AT_BIT_SIZE)
                    bit_offset = child.attr(AT_DATA_BIT_OFFSET, child.attr(AT_BIT_OFFSET))
                    offset = dwarf.const_from_location(child.attr(AT_DATA_MEMBER_LOCATION))
                    if offset is None:
                        offset = (bit_offset // 8) if isinstance(bit_offset, int) else 0
                    members.append(
                        MemberField(
                            name=child.attr(AT_NAME, ""),
                            type=self.type_ref(child.attr(AT_TYPE)),
                            byte_offset=offset,
                            bit_size=bit_size,
                            bit_offset=bit_offset,
                        )
                    )
                elif child.tag == dwarf.TAG_INHERITANCE:
                    base_ref = self.type_ref(child.attr(AT_TYPE))
                    if base_ref is not None:
                        bases.append(base_ref)
            members.sort(key=lambda m: (m.byte_offset, m.bit_offset or 0, m.name))
            self._record_vtable(die, name)
        elif kind == "enumeration":
            name = self.scoped_name(die) or self._anon_name(die)
            for child in die.children:
                if child.tag == dwarf.TAG_ENUMERATOR:
                    label = child.attr(AT_NAME)
                    value = child.attr(AT_CONST_VALUE)
                    if label is not None and isinstance(value, int):
                        enumerators.append((label, value))
        elif kind == "array":
            byte_size = byte_size if byte_size is not None else self._array_size(die, element)

        self.types[ref] = TypeDescriptor(
            kind=kind,
            name=name,
            byte_size=byte_size,
            members=tuple(members),
            base_classes=tuple(bases),
            enumerators=tuple(enumerators),
            element=element,
        )
        if kind == "function_type":
            params = [
                MemberField(name="", type=self.type_ref(c.attr(AT_TYPE)), byte_offset=i)
                for i, c in enumerate(die.children)
                if c.tag == dwarf.TAG_FORMAL_PARAMETER
            ]
            self.types[ref] = TypeDescriptor(
                kind=kind, name=name, byte_size=byte_size, members=tuple(params), element=element
            )

    def _array_size(self, die: Die, element: TypeRef | None) -> int | None:
        count = None
        for child in die.children:
            if child.tag == dwarf.TAG_SUBRANGE_TYPE:
                if isinstance(child.attr(AT_COUNT), int):
                    count = child.attr(AT_COUNT)
                elif isinstance(child.attr(AT_UPPER_BOUND), int):
                    count = child.attr(AT_UPPER_BOUND) + 1
        if count is None or element is None:
            return None
        elem_die = self.info.resolve_ref(int(element, 16))
        elem_size = elem_die.attr(AT_BYTE_SIZE) if elem_die is not None else None
        return count * elem_size if isinstance(elem_size, int) else None

    def _record_vtable(self, die: Die, class_name: str) -> None:
        entries: list[tuple[int, str]] = []
        next_slot = 0
        for child in die.children:
            if child.tag != dwarf.TAG_SUBPROGRAM:
                continue
            virtuality = child.attr(AT_VIRTUALITY, 0)
            if not virtuality:
                continue
            slot = dwarf.const_from_location(child.attr(AT_VTABLE_ELEM_LOCATION))
            if slot is None:
                slot = next_slot
            next_slot = max(next_slot, slot + 1)
            entries.append((slot, child.attr(AT_NAME, "?")))
        if entries:
            self.vtables.setdefault(class_name, VTable(class_name=class_name, entries=tuple(entries)))

    def _function_params(self, die: Die) -> tuple[list[TypeRef | None], bool]:
        params: list[TypeRef | None] = []
        found = False
        for child in die.children:
            if child.tag != dwarf.TAG_FORMAL_PARAMETER:
                continue
            found = True
            if self.merged_attr(child, AT_ARTIFICIAL):
                continue  # implicit this
            params.append(self.type_ref(self.merged_attr(child, AT_TYPE)))
        return params, found

    def _add_function(self, die: Die) -> None:
        linkage = self.merged_attr(die, AT_LINKAGE_NAME) or self.merged_attr(die, AT_MIPS_LINKAGE_NAME)
        name = self.merged_attr(die, AT_NAME)
        if linkage is None:
            linkage = name
        if linkage is None:
            return
        is_definition = not die.attr(AT_DECLARATION, False)
        if linkage in self.functions and not (
            is_definition and not self._fn_is_definition[linkage]
        ):
            return

        params, found = self._function_params(die)
        if not found:
            spec = self.decl_die(die)
            if spec is not die:
                params, _ = self._function_params(spec)

        decl = self.decl_die(die)
        scoped = self.scoped_name(decl) or name or linkage
        demangled = mangle.demangle(linkage)
        if isinstance(demangled, mangle.DemangledName):
            display = demangled.render()
        else:
            display = scoped

        virtuality = self.merged_attr(die, AT_VIRTUALITY) or 0
        slot = dwarf.const_from_location(self.merged_attr(die, AT_VTABLE_ELEM_LOCATION))
        return_ref = self.type_ref(self.merged_attr(die, AT_TYPE))

        self.functions[linkage] = FunctionDecl(
            linkage_name=linkage,
            display_name=display,
            parameters=tuple(params),
            return_type=return_ref,
            is_exported=linkage in self.export_names,
            vtable_slot=slot,
            is_virtual=bool(virtuality),
        )
        self._fn_is_definition[linkage] = is_definition

    def _add_global(self, die: Die) -> None:
        if die.attr(AT_DECLARATION):
            return
        name = self.merged_attr(die, AT_NAME)
        if name is None:
            return
        linkage_name = self.merged_attr(die, AT_LINKAGE_NAME) or self.merged_attr(
            die, AT_MIPS_LINKAGE_NAME
        )
        decl = self.decl_die(die)
        scoped = self.scoped_name(decl) or name
        key = linkage_name or scoped
        external = bool(self.merged_attr(die, AT_EXTERNAL))
        self.globals.setdefault(
            key,
            GlobalVar(
                name=key,
                type=self.type_ref(self.merged_attr(die, AT_TYPE)),
                linkage="external" if external else "internal",
            ),
        )


def build_corpus(elf: ElfFile, debug_path: str | None = None) -> AbiCorpus:
    """Extract the ABI corpus of one binary.

    debug_path may name a separate debug-info file; its build-ID must match
    the binary's when both carry one (DebugInfoMismatch otherwise). A parse
    failure in the DWARF degrades the corpus to symbols-only and records a
    warning instead of raising.
    """
    warnings: list[str] = []
    try:
        raw_symbols = read_symbols(elf)
    except MissingSymbolTables:
        raw_symbols = []
        warnings.append("no symbol tables; export set is empty")
    exports = exported(raw_symbols)

    soname = read_soname(elf) if elf.file_type is FileType.SHARED_OBJECT else SonameInfo(None)

    debug_elf = None
    if debug_path is not None:
        debug_elf = open_elf(debug_path)
        if elf.build_id and debug_elf.build_id and elf.build_id != debug_elf.build_id:
            raise DebugInfoMismatch(
                f"build-ID of {debug_path} does not match {elf.path}"
            )
    elif elf.has_dwarf():
        debug_elf = elf

    corpus = AbiCorpus(path=elf.path, exports=exports, soname=soname)
    if debug_elf is None or not debug_elf.has_dwarf():
        corpus.warnings = tuple(warnings)
        return corpus

    sections = {
        s.name: debug_elf.section_bytes(s)
        for s in debug_elf.sections
        if s.name.startswith(".debug_")
    }
    try:
        info = dwarf.parse_dwarf(sections)
    except MalformedDwarf as exc:
        warnings.append(f"DWARF unusable, symbols-only corpus: {exc}")
        corpus.warnings = tuple(warnings)
        return corpus

    builder = _CorpusBuilder(info, exports)
    builder.build()
    corpus.functions = builder.functions
    corpus.types = builder.types
    corpus.vtables = builder.vtables
    corpus.globals = builder.globals
    corpus.has_debug_info = True
    _register_function_aliases(corpus, raw_symbols)
    corpus.warnings = tuple(warnings)
    return corpus


def _register_function_aliases(corpus: AbiCorpus, raw_symbols) -> None:
    """Map exported symbols that alias a described function onto its decl.

    The Itanium ABI emits several symbols for one constructor/destructor
    (complete vs base object variants) while the debug info names only one
    of them; an exported function symbol at the same address as a described
    one is the same function.
    """
    from .elf import SymType as _SymType

    principal_by_addr: dict[int, str] = {}
    for sym in raw_symbols:
        if sym.sym_type is _SymType.FUNC and sym.name in corpus.functions:
            principal_by_addr.setdefault(sym.value, sym.name)
    for sym in raw_symbols:
        if sym.sym_type is not _SymType.FUNC or sym.name in corpus.functions:
            continue
        if (sym.name, sym.version) not in corpus.exports:
            continue
        principal = principal_by_addr.get(sym.value)
        if principal is None:
            continue
        base = corpus.functions[principal]
        corpus.functions[sym.name] = FunctionDecl(
            linkage_name=sym.name,
            display_name=base.display_name,
            parameters=base.parameters,
            return_type=base.return_type,
            is_exported=True,
            vtable_slot=base.vtable_slot,
            is_virtual=base.is_virtual,
        )


# -- serialization ---------------------------------------------------------


def dump(corpus: AbiCorpus) -> dict:
    """Canonical JSON-ready form of a corpus (schema corpus_version 1).

    Only the base name of the binary is recorded so that the same library
    built or inspected from different directories dumps identically.
    """
    import os

    return {
        "corpus_version": 1,
        "path": os.path.basename(corpus.path),
        "has_debug_info": corpus.has_debug_info,
        "soname": corpus.soname.soname,
        "warnings": list(corpus.warnings),
        "exports": [
            {
                "name": s.name,
                "version": s.version,
                "size": s.size,
                "type": s.sym_type.value,
            }
            for _, s in sorted(corpus.exports.items())
        ],
        "functions": {
            k: {
                "display_name": f.display_name,
                "parameters": list(f.parameters),
                "return_type": f.return_type,
                "is_exported": f.is_exported,
                "vtable_slot": f.vtable_slot,
                "is_virtual": f.is_virtual,
            }
            for k, f in sorted(corpus.functions.items())
        },
        "types": {
            ref: {
                "kind": t.kind,
                "name": t.name,
                "byte_size": t.byte_size,
                "members": [
                    {
                        "name": m.name,
                        "type": m.type,
                        "byte_offset": m.byte_offset,
                        "bit_size": m.bit_size,
                        "bit_offset": m.bit_offset,
                    }
                    for m in t.members
                ],
                "base_classes": list(t.base_classes),
                "enumerators": [[label, value] for label, value in t.enumerators],
                "element": t.element,
            }
            for ref, t in sorted(corpus.types.items())
        },
        "vtables": {
            name: [[slot, fn] for slot, fn in vt.entries]
            for name, vt in sorted(corpus.vtables.items())
        },
        "globals": {
            name: {"type": g.type, "linkage": g.linkage}
            for name, g in sorted(corpus.globals.items())
        },
    }


def dump_json(corpus: AbiCorpus) -> str:
    return json.dumps(dump(corpus), sort_keys=True, indent=2) + "\n"
