"""Exception hierarchy shared across the toolkit."""


class AbiriftError(Exception):
    """Base class for all toolkit errors."""


class NotElf(AbiriftError):
    """File does not carry the ELF magic (possibly a linker script)."""


class TruncatedFile(AbiriftError):
    """File is shorter than its own headers claim."""


class UnsupportedLayout(AbiriftError):
    """Valid ELF, but a layout we do not handle (e.g. big-endian)."""


class MissingSymbolTables(AbiriftError):
    """Neither .symtab nor .dynsym is present."""


class InputKindError(AbiriftError):
    """Operation requires a different kind of ELF object (e.g. a shared object)."""


class DebugInfoMismatch(AbiriftError):
    """Separate debug file does not belong to the binary (build-ID differs)."""


class MalformedDwarf(AbiriftError):
    """DWARF data could not be parsed (unsupported version or corrupt bytes)."""


class DanglingTypeRef(AbiriftError):
    """A type reference does not resolve within its corpus."""


class EmptyStratum(AbiriftError):
    """A statistics computation was asked for a stratum with no usable records."""
