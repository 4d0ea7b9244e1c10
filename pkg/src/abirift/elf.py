"""ELF container reader.

Parses ELF32/ELF64 little-endian files directly from their bytes: section
headers, symbol tables (.symtab/.dynsym) with GNU symbol versioning, the
dynamic section (SONAME), build-ID notes and .gnu_debuglink. Big-endian
files are rejected with UnsupportedLayout.

Everything here is read-only; an opened ElfFile is immutable and safe to
share across threads.
"""

from __future__ import annotations

import enum
import os
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    InputKindError,
    MissingSymbolTables,
    NotElf,
    TruncatedFile,
    UnsupportedLayout,
)

ELF_MAGIC = b"\x7fELF"

# e_type values
ET_REL, ET_EXEC, ET_DYN = 1, 2, 3

# sh_type values
SHT_NULL = 0
SHT_SYMTAB = 2
SHT_STRTAB = 3
SHT_DYNAMIC = 6
SHT_NOTE = 7
SHT_NOBITS = 8
SHT_DYNSYM = 11
SHT_GNU_VERDEF = 0x6FFFFFFD
SHT_GNU_VERNEED = 0x6FFFFFFE
SHT_GNU_VERSYM = 0x6FFFFFFF

# st_shndx reserved values
SHN_UNDEF = 0
SHN_LORESERVE = 0xFF00
SHN_ABS = 0xFFF1
SHN_COMMON = 0xFFF2
SHN_XINDEX = 0xFFFF

DT_NULL = 0
DT_SONAME = 14

NT_GNU_BUILD_ID = 3


class ElfClass(enum.Enum):
    ELF32 = "Elf32"
    ELF64 = "Elf64"


class FileType(enum.Enum):
    SHARED_OBJECT = "shared_object"
    EXECUTABLE = "executable"
    RELOCATABLE = "relocatable"
    OTHER = "other"


class SymType(enum.Enum):
    FUNC = "func"
    OBJECT = "object"
    TLS = "tls"
    NOTYPE = "notype"
    OTHER = "other"


class Binding(enum.Enum):
    LOCAL = "local"
    GLOBAL = "global"
    WEAK = "weak"


class Visibility(enum.Enum):
    DEFAULT = "default"
    INTERNAL = "internal"
    HIDDEN = "hidden"
    PROTECTED = "protected"


_SYM_TYPES = {0: SymType.NOTYPE, 1: SymType.OBJECT, 2: SymType.FUNC, 6: SymType.TLS}
# STB_GNU_UNIQUE (10) behaves like a global definition for linking purposes.
_BINDINGS = {0: Binding.LOCAL, 1: Binding.GLOBAL, 2: Binding.WEAK, 10: Binding.GLOBAL}
_VISIBILITIES = {
    0: Visibility.DEFAULT,
    1: Visibility.INTERNAL,
    2: Visibility.HIDDEN,
    3: Visibility.PROTECTED,
}


@dataclass(frozen=True)
class SectionMeta:
    name: str
    sh_type: int
    flags: int
    addr: int
    offset: int
    size: int
    link: int
    info: int
    entsize: int


@dataclass(frozen=True)
class RawSymbol:
    """One symbol table entry, name kept mangled exactly as stored."""

    name: str
    value: int
    size: int
    sym_type: SymType
    binding: Binding
    visibility: Visibility
    # "undefined" | "absolute" | "common" | regular section index (int)
    section_index: int | str
    version: str | None = None


@dataclass(frozen=True)
class SonameInfo:
    soname: str | None


@dataclass(frozen=True)
class ElfFile:
    path: str
    elf_class: ElfClass
    endianness: str  # "little" (big-endian rejected at open)
    file_type: FileType
    size_bytes: int
    sections: tuple[SectionMeta, ...]
    build_id: bytes | None
    debug_link: str | None
    data: bytes = field(repr=False)

    def section(self, name: str) -> SectionMeta | None:
        for sec in self.sections:
            if sec.name == name:
                return sec
        return None

    def section_bytes(self, sec: SectionMeta) -> bytes:
        if sec.sh_type == SHT_NOBITS:
            return b""
        return self.data[sec.offset : sec.offset + sec.size]

    def has_dwarf(self) -> bool:
        sec = self.section(".debug_info")
        return sec is not None and sec.size > 0


def _cstr(buf: bytes, offset: int) -> str:
    end = buf.find(b"\x00", offset)
    if end < 0:
        end = len(buf)
    return buf[offset:end].decode("utf-8", errors="replace")


def open_elf(path: str | os.PathLike) -> ElfFile:
    """Parse the ELF container at path.

    Raises NotElf on a magic mismatch (the usual signal for linker scripts
    masquerading as libraries), TruncatedFile when headers point past the
    end of the file, and UnsupportedLayout for big-endian objects.
    """
    path = os.fspath(path)
    with open(path, "rb") as fh:
        data = fh.read()

    if len(data) < 4 or data[:4] != ELF_MAGIC:
        raise NotElf(f"{path}: not an ELF object")
    if len(data) < 16:
        raise TruncatedFile(f"{path}: ELF identification truncated")

    ei_class, ei_data = data[4], data[5]
    if len(data) < (52 if ei_class == 1 else 64):
        raise TruncatedFile(f"{path}: ELF header truncated")
    if ei_data == 2:
        raise UnsupportedLayout(f"{path}: big-endian ELF is not supported")
    if ei_data != 1:
        raise NotElf(f"{path}: invalid EI_DATA {ei_data}")
    if ei_class == 1:
        elf_class = ElfClass.ELF32
        e_type, _machine, _ver, _entry, _phoff, shoff = struct.unpack_from("<HHIIII", data, 16)
        (_flags, _ehsize, _phentsize, _phnum, shentsize, shnum, shstrndx) = struct.unpack_from(
            "<IHHHHHH", data, 36
        )
        shdr_fmt, shdr_size = "<IIIIIIIIII", 40
    elif ei_class == 2:
        elf_class = ElfClass.ELF64
        e_type, _machine, _ver, _entry, _phoff, shoff = struct.unpack_from("<HHIQQQ", data, 16)
        (_flags, _ehsize, _phentsize, _phnum, shentsize, shnum, shstrndx) = struct.unpack_from(
            "<IHHHHHH", data, 48
        )
        shdr_fmt, shdr_size = "<IIQQQQIIQQ", 64
    else:
        raise NotElf(f"{path}: invalid EI_CLASS {ei_class}")

    file_type = {
        ET_DYN: FileType.SHARED_OBJECT,
        ET_EXEC: FileType.EXECUTABLE,
        ET_REL: FileType.RELOCATABLE,
    }.get(e_type, FileType.OTHER)

    raw_sections: list[tuple[int, ...]] = []
    if shoff:
        if shentsize < shdr_size:
            raise TruncatedFile(f"{path}: section header entry size {shentsize} too small")
        if shoff + shdr_size > len(data):
            raise TruncatedFile(f"{path}: section header table out of bounds")
        first = struct.unpack_from(shdr_fmt, data, shoff)
        # Extended numbering: a zero e_shnum stores the real count in
        # section 0's sh_size, and SHN_XINDEX stores e_shstrndx in sh_link.
        if shnum == 0:
            shnum = first[5]
        if shstrndx == SHN_XINDEX:
            shstrndx = first[6]
        if shoff + shnum * shentsize > len(data):
            raise TruncatedFile(f"{path}: section header table out of bounds")
        for i in range(shnum):
            raw_sections.append(struct.unpack_from(shdr_fmt, data, shoff + i * shentsize))

    strtab = b""
    if raw_sections and shstrndx < len(raw_sections):
        s = raw_sections[shstrndx]
        strtab = data[s[4] : s[4] + s[5]]

    sections = []
    for s in raw_sections:
        sh_name, sh_type, sh_flags, sh_addr, sh_offset, sh_size, sh_link, sh_info, _align, sh_entsize = s
        meta = SectionMeta(
            name=_cstr(strtab, sh_name),
            sh_type=sh_type,
            flags=sh_flags,
            addr=sh_addr,
            offset=sh_offset,
            size=sh_size,
            link=sh_link,
            info=sh_info,
            entsize=sh_entsize,
        )
        # NOBITS sections occupy no file bytes, so their size may legitimately
        # extend past the end of the file image.
        if sh_type not in (SHT_NULL, SHT_NOBITS) and sh_offset + sh_size > len(data):
            raise TruncatedFile(f"{path}: section {meta.name!r} extends past end of file")
        sections.append(meta)

    elf = ElfFile(
        path=path,
        elf_class=elf_class,
        endianness="little",
        file_type=file_type,
        size_bytes=len(data),
        sections=tuple(sections),
        build_id=None,
        debug_link=None,
        data=data,
    )
    object.__setattr__(elf, "build_id", _read_build_id(elf))
    object.__setattr__(elf, "debug_link", _read_debug_link(elf))
    return elf


def _read_build_id(elf: ElfFile) -> bytes | None:
    for sec in elf.sections:
        if sec.sh_type != SHT_NOTE:
            continue
        buf = elf.section_bytes(sec)
        pos = 0
        while pos + 12 <= len(buf):
            namesz, descsz, n_type = struct.unpack_from("<III", buf, pos)
            pos += 12
            name = buf[pos : pos + namesz]
            pos += (namesz + 3) & ~3
            desc = buf[pos : pos + descsz]
            pos += (descsz + 3) & ~3
            if n_type == NT_GNU_BUILD_ID and name.rstrip(b"\x00") == b"GNU":
                return bytes(desc)
    return None


def _read_debug_link(elf: ElfFile) -> str | None:
    sec = elf.section(".gnu_debuglink")
    if sec is None:
        return None
    buf = elf.section_bytes(sec)
    return _cstr(buf, 0) or None


def _split_versioned_name(name: str) -> tuple[str, str | None]:
    # .symtab entries spell versions inside the name: "f@VER" or "f@@VER".
    if "@" not in name:
        return name, None
    base, _, ver = name.partition("@")
    return base, ver.lstrip("@") or None


class _VersionTables:
    """Resolves .gnu.version indices to version names for .dynsym symbols."""

    def __init__(self, elf: ElfFile, dynsym_index: int):
        self.versym: bytes | None = None
        self.names: dict[int, str] = {}
        for sec in elf.sections:
            if sec.sh_type == SHT_GNU_VERSYM and sec.link == dynsym_index:
                self.versym = elf.section_bytes(sec)
        for sec in elf.sections:
            strs = elf.section_bytes(elf.sections[sec.link]) if sec.link < len(elf.sections) else b""
            if sec.sh_type == SHT_GNU_VERDEF:
                self._parse_verdef(elf.section_bytes(sec), strs)
            elif sec.sh_type == SHT_GNU_VERNEED:
                self._parse_verneed(elf.section_bytes(sec), strs)

    def _parse_verdef(self, buf: bytes, strs: bytes) -> None:
        pos = 0
        while pos + 20 <= len(buf):
            _ver, _flags, ndx, cnt, _hash, aux, nxt = struct.unpack_from("<HHHHIII", buf, pos)
            if cnt > 0 and pos + aux + 8 <= len(buf):
                vda_name, _vda_next = struct.unpack_from("<II", buf, pos + aux)
                self.names[ndx & 0x7FFF] = _cstr(strs, vda_name)
            if nxt == 0:
                break
            pos += nxt

    def _parse_verneed(self, buf: bytes, strs: bytes) -> None:
        pos = 0
        while pos + 16 <= len(buf):
            _ver, cnt, _file, aux, nxt = struct.unpack_from("<HHIII", buf, pos)
            apos = pos + aux
            for _ in range(cnt):
                if apos + 16 > len(buf):
                    break
                _hash, _flags, other, vna_name, vna_next = struct.unpack_from("<IHHII", buf, apos)
                self.names[other & 0x7FFF] = _cstr(strs, vna_name)
                if vna_next == 0:
                    break
                apos += vna_next
            if nxt == 0:
                break
            pos += nxt

    def version_for(self, sym_index: int) -> str | None:
        if self.versym is None or 2 * sym_index + 2 > len(self.versym):
            return None
        (idx,) = struct.unpack_from("<H", self.versym, 2 * sym_index)
        idx &= 0x7FFF  # high bit marks the hidden/non-default binding
        if idx in (0, 1):  # VER_NDX_LOCAL / VER_NDX_GLOBAL
            return None
        return self.names.get(idx)


def _iter_table_symbols(elf: ElfFile, sec_index: int) -> list[RawSymbol]:
    sec = elf.sections[sec_index]
    data = elf.section_bytes(sec)
    strs = elf.section_bytes(elf.sections[sec.link]) if sec.link < len(elf.sections) else b""
    if elf.elf_class is ElfClass.ELF64:
        fmt, entsize = "<IBBHQQ", 24
    else:
        fmt, entsize = "<IIIBBH", 16
    if sec.entsize:
        entsize = max(entsize, sec.entsize)

    versions = _VersionTables(elf, sec_index) if sec.sh_type == SHT_DYNSYM else None

    out = []
    count = len(data) // entsize if entsize else 0
    for i in range(count):
        if elf.elf_class is ElfClass.ELF64:
            st_name, st_info, st_other, st_shndx, st_value, st_size = struct.unpack_from(
                fmt, data, i * entsize
            )
        else:
            st_name, st_value, st_size, st_info, st_other, st_shndx = struct.unpack_from(
                fmt, data, i * entsize
            )
        name, version = _split_versioned_name(_cstr(strs, st_name))
        if versions is not None and version is None:
            version = versions.version_for(i)
        if st_shndx == SHN_UNDEF:
            shndx: int | str = "undefined"
        elif st_shndx == SHN_ABS:
            shndx = "absolute"
        elif st_shndx == SHN_COMMON:
            shndx = "common"
        else:
            shndx = st_shndx
        out.append(
            RawSymbol(
                name=name,
                value=st_value,
                size=st_size,
                sym_type=_SYM_TYPES.get(st_info & 0xF, SymType.OTHER),
                binding=_BINDINGS.get(st_info >> 4, Binding.GLOBAL),
                visibility=_VISIBILITIES[st_other & 0x3],
                section_index=shndx,
                version=version,
            )
        )
    return out


def read_symbols(elf: ElfFile) -> list[RawSymbol]:
    """Union of .symtab and .dynsym entries, deduplicated and sorted.

    Deduplication is keyed on (name, version, value, size) since the same
    export typically appears in both tables. Raises MissingSymbolTables when
    the binary has neither table (stripped static binary); callers may treat
    that as an empty export set.
    """
    tables = [i for i, s in enumerate(elf.sections) if s.sh_type in (SHT_SYMTAB, SHT_DYNSYM)]
    if not tables:
        raise MissingSymbolTables(f"{elf.path}: no .symtab or .dynsym")
    seen: dict[tuple, RawSymbol] = {}
    for sec_index in tables:
        for sym in _iter_table_symbols(elf, sec_index):
            seen.setdefault((sym.name, sym.version, sym.value, sym.size), sym)
    return sorted(
        seen.values(), key=lambda s: (s.name, s.version or "", s.value, s.size)
    )


def read_soname(elf: ElfFile) -> SonameInfo:
    """SONAME from the dynamic section; absent when no DT_SONAME entry exists."""
    if elf.file_type is not FileType.SHARED_OBJECT:
        raise InputKindError(f"{elf.path}: SONAME is only defined for shared objects")
    for sec in elf.sections:
        if sec.sh_type != SHT_DYNAMIC:
            continue
        strs = elf.section_bytes(elf.sections[sec.link]) if sec.link < len(elf.sections) else b""
        buf = elf.section_bytes(sec)
        step = 16 if elf.elf_class is ElfClass.ELF64 else 8
        fmt = "<qQ" if elf.elf_class is ElfClass.ELF64 else "<iI"
        for pos in range(0, len(buf) - step + 1, step):
            d_tag, d_val = struct.unpack_from(fmt, buf, pos)
            if d_tag == DT_NULL:
                break
            if d_tag == DT_SONAME:
                return SonameInfo(soname=_cstr(strs, d_val))
    return SonameInfo(soname=None)


_SCRIPT_DIRECTIVES = {"GROUP", "INPUT", "OUTPUT_FORMAT"}
_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def is_linker_script(path: str | os.PathLike) -> bool:
    """True iff the file looks like a GNU ld script rather than a binary.

    Text files (no NUL bytes, valid UTF-8) qualify when they start with a
    block comment or when the first non-comment token is a linker directive.
    """
    with open(path, "rb") as fh:
        head = fh.read(4096)
    if not head or b"\x00" in head:
        return False
    try:
        text = head.decode("utf-8")
    except UnicodeDecodeError:
        return False
    stripped = text.lstrip()
    if stripped.startswith("/*"):
        return True
    no_comments = re.sub(r"/\*.*?\*/", " ", text, flags=re.S)
    m = _TOKEN_RE.search(no_comments)
    return m is not None and m.group(0) in _SCRIPT_DIRECTIVES


def locate_debug_info(elf: ElfFile, search_roots: list[str | os.PathLike]) -> Path | None:
    """Find the DWARF for elf: itself when embedded, else a separate file.

    Separate files are looked up first by build-ID under each root
    (<root>/.build-id/xx/rest.debug), then by .gnu_debuglink base name
    anywhere under the roots. Returns None when nothing is found.
    """
    if elf.has_dwarf():
        return Path(elf.path)
    if elf.build_id:
        hexid = elf.build_id.hex()
        for root in search_roots:
            candidate = Path(root) / ".build-id" / hexid[:2] / (hexid[2:] + ".debug")
            if candidate.is_file():
                return candidate
    if elf.debug_link:
        for root in search_roots:
            hits = []
            for dirpath, dirnames, filenames in os.walk(root):
                dirnames.sort()
                if elf.debug_link in filenames:
                    hits.append(Path(dirpath) / elf.debug_link)
            if hits:
                return sorted(hits)[0]
    return None
