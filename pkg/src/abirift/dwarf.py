"""Minimal DWARF 4/5 debug-info reader.

Parses .debug_info DIE trees (with .debug_abbrev, .debug_str,
.debug_line_str and .debug_str_offsets) into plain Python structures. The
attribute set decoded generically covers what ABI extraction needs: names,
linkage names, types, sizes, member offsets, virtuality and vtable slots,
enumerator values and linkage flags.

Scope limits (reported as MalformedDwarf): DWARF versions other than 4/5
and 64-bit DWARF, neither of which current mainstream toolchains emit by
default.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import MalformedDwarf

# Tag constants (DW_TAG_*)
TAG_ARRAY_TYPE = 0x01
TAG_CLASS_TYPE = 0x02
TAG_ENUMERATION_TYPE = 0x04
TAG_FORMAL_PARAMETER = 0x05
TAG_MEMBER = 0x0D
TAG_POINTER_TYPE = 0x0F
TAG_REFERENCE_TYPE = 0x10
TAG_COMPILE_UNIT = 0x11
TAG_STRUCTURE_TYPE = 0x13
TAG_SUBROUTINE_TYPE = 0x15
TAG_TYPEDEF = 0x16
TAG_UNION_TYPE = 0x17
TAG_UNSPECIFIED_PARAMETERS = 0x18
TAG_INHERITANCE = 0x1C
TAG_SUBRANGE_TYPE = 0x21
TAG_BASE_TYPE = 0x24
TAG_CONST_TYPE = 0x26
TAG_ENUMERATOR = 0x28
TAG_SUBPROGRAM = 0x2E
TAG_VARIABLE = 0x34
TAG_VOLATILE_TYPE = 0x35
TAG_RESTRICT_TYPE = 0x37
TAG_NAMESPACE = 0x39
TAG_UNSPECIFIED_TYPE = 0x3B
TAG_RVALUE_REFERENCE_TYPE = 0x42

# Attribute constants (DW_AT_*)
AT_NAME = 0x03
AT_BYTE_SIZE = 0x0B
AT_BIT_OFFSET = 0x0C
AT_BIT_SIZE = 0x0D
AT_LOW_PC = 0x11
AT_CONST_VALUE = 0x1C
AT_UPPER_BOUND = 0x2F
AT_ABSTRACT_ORIGIN = 0x31
AT_ARTIFICIAL = 0x34
AT_COUNT = 0x37
AT_DATA_MEMBER_LOCATION = 0x38
AT_DECL_FILE = 0x3A
AT_DECL_LINE = 0x3B
AT_DECLARATION = 0x3C
AT_EXTERNAL = 0x3F
AT_SPECIFICATION = 0x47
AT_TYPE = 0x49
AT_VIRTUALITY = 0x4C
AT_VTABLE_ELEM_LOCATION = 0x4D
AT_DATA_BIT_OFFSET = 0x6B
AT_LINKAGE_NAME = 0x6E
AT_STR_OFFSETS_BASE = 0x72
AT_MIPS_LINKAGE_NAME = 0x2007

_REF_ATTRS = {AT_TYPE, AT_SPECIFICATION, AT_ABSTRACT_ORIGIN}

# Form constants (DW_FORM_*)
_F_ADDR = 0x01
_F_BLOCK2 = 0x03
_F_BLOCK4 = 0x04
_F_DATA2 = 0x05
_F_DATA4 = 0x06
_F_DATA8 = 0x07
_F_STRING = 0x08
_F_BLOCK = 0x09
_F_BLOCK1 = 0x0A
_F_DATA1 = 0x0B
_F_FLAG = 0x0C
_F_SDATA = 0x0D
_F_STRP = 0x0E
_F_UDATA = 0x0F
_F_REF_ADDR = 0x10
_F_REF1 = 0x11
_F_REF2 = 0x12
_F_REF4 = 0x13
_F_REF8 = 0x14
_F_REF_UDATA = 0x15
_F_INDIRECT = 0x16
_F_SEC_OFFSET = 0x17
_F_EXPRLOC = 0x18
_F_FLAG_PRESENT = 0x19
_F_STRX = 0x1A
_F_ADDRX = 0x1B
_F_REF_SUP4 = 0x1C
_F_STRP_SUP = 0x1D
_F_DATA16 = 0x1E
_F_LINE_STRP = 0x1F
_F_REF_SIG8 = 0x20
_F_IMPLICIT_CONST = 0x21
_F_LOCLISTX = 0x22
_F_RNGLISTX = 0x23
_F_REF_SUP8 = 0x24
_F_STRX1 = 0x25
_F_STRX2 = 0x26
_F_STRX3 = 0x27
_F_STRX4 = 0x28
_F_ADDRX1 = 0x29
_F_ADDRX2 = 0x2A
_F_ADDRX3 = 0x2B
_F_ADDRX4 = 0x2C

# DWARF expression opcodes needed for constant locations
_OP_PLUS_UCONST = 0x23
_OP_CONSTU = 0x10
_OP_CONSTS = 0x11


def _uleb(buf: bytes, pos: int) -> tuple[int, int]:
    result = shift = 0
    while True:
        if pos >= len(buf):
            raise MalformedDwarf("ULEB128 runs past end of section")
        byte = buf[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos
        shift += 7


def _sleb(buf: bytes, pos: int) -> tuple[int, int]:
    result = shift = 0
    while True:
        if pos >= len(buf):
            raise MalformedDwarf("SLEB128 runs past end of section")
        byte = buf[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            if byte & 0x40:
                result -= 1 << shift
            return result, pos


def _cstr(buf: bytes, offset: int) -> str:
    end = buf.find(b"\x00", offset)
    if end < 0:
        end = len(buf)
    return buf[offset:end].decode("utf-8", errors="replace")


@dataclass
class Die:
    tag: int
    offset: int  # global offset within .debug_info
    attrs: dict[int, Any]
    children: list["Die"] = field(default_factory=list)
    parent: "Die | None" = field(default=None, repr=False)

    def attr(self, at: int, default: Any = None) -> Any:
        return self.attrs.get(at, default)


@dataclass
class CompileUnit:
    offset: int
    version: int
    address_size: int
    root: Die


@dataclass
class DwarfInfo:
    cus: list[CompileUnit]
    die_by_offset: dict[int, Die]

    def resolve_ref(self, ref: int) -> Die | None:
        return self.die_by_offset.get(ref)


def const_from_location(value: Any) -> int | None:
    """Constant offset/slot from an attribute that may be an int or exprloc.

    Handles the plain-constant forms plus single-op DW_OP_plus_uconst /
    DW_OP_constu / DW_OP_consts expressions, which is how compilers encode
    member offsets and vtable slot numbers.
    """
    if isinstance(value, int):
        return value
    if isinstance(value, (bytes, bytearray)) and value:
        op = value[0]
        try:
            if op == _OP_PLUS_UCONST or op == _OP_CONSTU:
                return _uleb(value, 1)[0]
            if op == _OP_CONSTS:
                return _sleb(value, 1)[0]
        except MalformedDwarf:
            return None
    return None


class _AbbrevTable:
    def __init__(self, buf: bytes, offset: int):
        self.decls: dict[int, tuple[int, bool, list[tuple[int, int, int | None]]]] = {}
        pos = offset
        while pos < len(buf):
            code, pos = _uleb(buf, pos)
            if code == 0:
                break
            tag, pos = _uleb(buf, pos)
            if pos >= len(buf):
                raise MalformedDwarf("abbrev table truncated")
            has_children = buf[pos] != 0
            pos += 1
            specs: list[tuple[int, int, int | None]] = []
            while True:
                at, pos = _uleb(buf, pos)
                form, pos = _uleb(buf, pos)
                implicit = None
                if form == _F_IMPLICIT_CONST:
                    implicit, pos = _sleb(buf, pos)
                if at == 0 and form == 0:
                    break
                specs.append((at, form, implicit))
            self.decls[code] = (tag, has_children, specs)


class _UnitReader:
    def __init__(self, sections: Mapping[str, bytes], info: bytes, cu_offset: int):
        self.sections = sections
        self.info = info
        self.cu_offset = cu_offset
        self.address_size = 8
        self.str_offsets_base = 8  # just past the v5 .debug_str_offsets header

    def read_form(self, form: int, pos: int, implicit: int | None) -> tuple[Any, int]:
        buf = self.info
        if form == _F_ADDR:
            n = self.address_size
            return int.from_bytes(buf[pos : pos + n], "little"), pos + n
        if form == _F_DATA1:
            return buf[pos], pos + 1
        if form == _F_DATA2:
            return struct.unpack_from("<H", buf, pos)[0], pos + 2
        if form == _F_DATA4:
            return struct.unpack_from("<I", buf, pos)[0], pos + 4
        if form == _F_DATA8:
            return struct.unpack_from("<Q", buf, pos)[0], pos + 8
        if form == _F_DATA16:
            return bytes(buf[pos : pos + 16]), pos + 16
        if form == _F_SDATA:
            return _sleb(buf, pos)
        if form == _F_UDATA:
            return _uleb(buf, pos)
        if form == _F_STRING:
            end = buf.find(b"\x00", pos)
            if end < 0:
                raise MalformedDwarf("inline string runs past end of .debug_info")
            return buf[pos:end].decode("utf-8", errors="replace"), end + 1
        if form == _F_STRP:
            off = struct.unpack_from("<I", buf, pos)[0]
            return _cstr(self.sections.get(".debug_str", b""), off), pos + 4
        if form == _F_LINE_STRP:
            off = struct.unpack_from("<I", buf, pos)[0]
            return _cstr(self.sections.get(".debug_line_str", b""), off), pos + 4
        if form == _F_STRP_SUP:
            return "", pos + 4
        if form in (_F_STRX, _F_STRX1, _F_STRX2, _F_STRX3, _F_STRX4):
            if form == _F_STRX:
                idx, pos = _uleb(buf, pos)
            else:
                n = form - _F_STRX1 + 1
                idx = int.from_bytes(buf[pos : pos + n], "little")
                pos += n
            return self._strx(idx), pos
        if form == _F_REF_ADDR:
            return struct.unpack_from("<I", buf, pos)[0], pos + 4
        if form in (_F_REF1, _F_REF2, _F_REF4, _F_REF8):
            n = {_F_REF1: 1, _F_REF2: 2, _F_REF4: 4, _F_REF8: 8}[form]
            return self.cu_offset + int.from_bytes(buf[pos : pos + n], "little"), pos + n
        if form == _F_REF_UDATA:
            val, pos = _uleb(buf, pos)
            return self.cu_offset + val, pos
        if form in (_F_REF_SUP4, _F_REF_SUP8):
            n = 4 if form == _F_REF_SUP4 else 8
            return None, pos + n
        if form == _F_REF_SIG8:
            return ("sig", struct.unpack_from("<Q", buf, pos)[0]), pos + 8
        if form == _F_SEC_OFFSET:
            return struct.unpack_from("<I", buf, pos)[0], pos + 4
        if form == _F_EXPRLOC or form == _F_BLOCK:
            n, pos = _uleb(buf, pos)
            return bytes(buf[pos : pos + n]), pos + n
        if form in (_F_BLOCK1, _F_BLOCK2, _F_BLOCK4):
            size = {_F_BLOCK1: 1, _F_BLOCK2: 2, _F_BLOCK4: 4}[form]
            n = int.from_bytes(buf[pos : pos + size], "little")
            pos += size
            return bytes(buf[pos : pos + n]), pos + n
        if form == _F_FLAG:
            return buf[pos] != 0, pos + 1
        if form == _F_FLAG_PRESENT:
            return True, pos
        if form == _F_IMPLICIT_CONST:
            return implicit, pos
        if form in (_F_ADDRX, _F_ADDRX1, _F_ADDRX2, _F_ADDRX3, _F_ADDRX4):
            if form == _F_ADDRX:
                return _uleb(buf, pos)
            n = form - _F_ADDRX1 + 1
            return int.from_bytes(buf[pos : pos + n], "little"), pos + n
        if form in (_F_LOCLISTX, _F_RNGLISTX):
            return _uleb(buf, pos)
        if form == _F_INDIRECT:
            real, pos = _uleb(buf, pos)
            return self.read_form(real, pos, None)
        raise MalformedDwarf(f"unsupported DWARF form 0x{form:x}")

    def _strx(self, idx: int) -> str:
        offsets = self.sections.get(".debug_str_offsets", b"")
        pos = self.str_offsets_base + 4 * idx
        if pos + 4 > len(offsets):
            return ""
        off = struct.unpack_from("<I", offsets, pos)[0]
        return _cstr(self.sections.get(".debug_str", b""), off)


def parse_dwarf(sections: Mapping[str, bytes]) -> DwarfInfo:
    """Parse every compile unit in .debug_info.

    Raises MalformedDwarf for truncated data, unsupported versions (<4, >5),
    or 64-bit DWARF.
    """
    info = sections.get(".debug_info", b"")
    abbrev_section = sections.get(".debug_abbrev", b"")
    cus: list[CompileUnit] = []
    by_offset: dict[int, Die] = {}

    pos = 0
    while pos + 4 <= len(info):
        cu_offset = pos
        (unit_length,) = struct.unpack_from("<I", info, pos)
        if unit_length == 0xFFFFFFFF:
            raise MalformedDwarf("64-bit DWARF is not supported")
        if unit_length == 0:
            break
        unit_end = pos + 4 + unit_length
        if unit_end > len(info):
            raise MalformedDwarf(".debug_info unit extends past end of section")
        (version,) = struct.unpack_from("<H", info, pos + 4)
        if version == 4:
            abbrev_off, address_size = struct.unpack_from("<IB", info, pos + 6)
            die_pos = pos + 11
        elif version == 5:
            unit_type, address_size = struct.unpack_from("<BB", info, pos + 6)
            (abbrev_off,) = struct.unpack_from("<I", info, pos + 8)
            die_pos = pos + 12
            if unit_type == 0x02:  # type unit: signature + type offset
                die_pos += 12
            elif unit_type in (0x04, 0x05):  # skeleton/split: dwo_id
                die_pos += 8
        else:
            raise MalformedDwarf(f"unsupported DWARF version {version}")

        reader = _UnitReader(sections, info, cu_offset)
        reader.address_size = address_size
        abbrevs = _AbbrevTable(abbrev_section, abbrev_off)

        root: Die | None = None
        stack: list[Die] = []
        pos2 = die_pos
        while pos2 < unit_end:
            die_offset = pos2
            code, pos2 = _uleb(info, pos2)
            if code == 0:
                if stack:
                    stack.pop()
                if not stack and root is not None:
                    break
                continue
            decl = abbrevs.decls.get(code)
            if decl is None:
                raise MalformedDwarf(f"abbrev code {code} not in table")
            tag, has_children, specs = decl
            attrs: dict[int, Any] = {}
            for at, form, implicit in specs:
                value, pos2 = reader.read_form(form, pos2, implicit)
                attrs[at] = value
            die = Die(tag=tag, offset=die_offset, attrs=attrs)
            by_offset[die_offset] = die
            if stack:
                die.parent = stack[-1]
                stack[-1].children.append(die)
            if root is None:
                root = die
                if die.attr(AT_STR_OFFSETS_BASE) is not None:
                    reader.str_offsets_base = die.attr(AT_STR_OFFSETS_BASE)
            if has_children:
                stack.append(die)

        if root is not None:
            cus.append(CompileUnit(offset=cu_offset, version=version, address_size=address_size, root=root))
        pos = unit_end

    if not cus and info:
        raise MalformedDwarf("no parsable compile units in .debug_info")
    return DwarfInfo(cus=cus, die_by_offset=by_offset)
