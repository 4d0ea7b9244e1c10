import json
import struct
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def manifest() -> dict:
    with open(FIXTURES / "manifest.json") as fh:
        return json.load(fh)


def fixture_pair(manifest: dict, fixture_id: str) -> tuple[Path, Path]:
    for entry in manifest["fixtures"]:
        if entry["fixture_id"] == fixture_id:
            return FIXTURES / entry["old_lib"], FIXTURES / entry["new_lib"]
    raise KeyError(fixture_id)


def make_minimal_elf(e_type: int, elf_class: int = 2, ei_data: int = 1) -> bytes:
    """A headers-only ELF image (no sections), enough to exercise open_elf."""
    ident = b"\x7fELF" + bytes([elf_class, ei_data, 1, 0, 0]) + b"\x00" * 7
    if elf_class == 2:
        rest = struct.pack("<HHIQQQIHHHHHH", e_type, 0x3E, 1, 0, 0, 0, 0, 64, 0, 0, 64, 0, 0)
    else:
        rest = struct.pack("<HHIIIIIHHHHHH", e_type, 3, 1, 0, 0, 0, 0, 52, 0, 0, 40, 0, 0)
    return ident + rest


def make_elf32_with_symtab() -> bytes:
    """Handcrafted ELF32 shared object with a one-entry .symtab.

    Exercises the 32-bit section-header and symbol layouts without needing
    a 32-bit toolchain: one global function symbol "hello" of size 4.
    """
    strtab = b"\x00hello\x00"
    shstrtab = b"\x00.symtab\x00.strtab\x00.shstrtab\x00"
    # Elf32_Sym: st_name, st_value, st_size, st_info, st_other, st_shndx
    null_sym = struct.pack("<IIIBBH", 0, 0, 0, 0, 0, 0)
    func_sym = struct.pack("<IIIBBH", 1, 0x1000, 4, (1 << 4) | 2, 0, 5)
    symtab = null_sym + func_sym

    ehsize, shentsize = 52, 40
    offs = {}
    pos = ehsize
    for name, blob in (("symtab", symtab), ("strtab", strtab), ("shstrtab", shstrtab)):
        offs[name] = pos
        pos += len(blob)
    shoff = pos

    def shdr(name_off, sh_type, offset, size, link, entsize):
        return struct.pack("<IIIIIIIIII", name_off, sh_type, 0, 0, offset, size, link, 0, 1, entsize)

    sections = (
        shdr(0, 0, 0, 0, 0, 0)
        + shdr(1, 2, offs["symtab"], len(symtab), 2, 16)  # .symtab -> .strtab
        + shdr(9, 3, offs["strtab"], len(strtab), 0, 0)
        + shdr(17, 3, offs["shstrtab"], len(shstrtab), 0, 0)
    )
    ident = b"\x7fELF" + bytes([1, 1, 1, 0, 0]) + b"\x00" * 7
    header = ident + struct.pack(
        "<HHIIIIIHHHHHH", 3, 3, 1, 0, 0, shoff, 0, ehsize, 0, 0, shentsize, 4, 3
    )
    return header + symtab + strtab + shstrtab + sections
