"""Bounded Itanium-ABI demangler.

Covers the subset needed to display exported C++ symbols and to correlate
removed/added overloads that share a scope-qualified base name:

    <mangled>     ::= "_Z" <name> <param-type>*
    <name>        ::= "N" [rVK]* [RO]? <source-name>+ "E" | <source-name>
    <source-name> ::= <decimal length> <that many chars>
    <param-type>  ::= ("P" | "R" | "K")* (<builtin> | <source-name> | <nested name>)

Anything outside the subset (templates, substitutions, ctors/dtors,
operators, vendor extensions) comes back as Unparsed, never as an error;
callers fall back to the raw string.
"""

from __future__ import annotations

from dataclasses import dataclass

_BUILTINS = {
    "v": "void",
    "b": "bool",
    "c": "char",
    "a": "signed char",
    "h": "unsigned char",
    "s": "short",
    "t": "unsigned short",
    "i": "int",
    "j": "unsigned int",
    "l": "long",
    "m": "unsigned long",
    "x": "long long",
    "y": "unsigned long long",
    "f": "float",
    "d": "double",
    "e": "long double",
    "w": "wchar_t",
}


@dataclass(frozen=True)
class DemangledName:
    qualified_name: tuple[str, ...]
    parameter_types: tuple[str, ...]
    raw: str
    is_function: bool = True

    def base(self) -> str:
        """Scope-qualified name without the parameter list."""
        return "::".join(self.qualified_name)

    def render(self) -> str:
        if not self.is_function:
            return self.base()
        return f"{self.base()}({', '.join(self.parameter_types)})"


@dataclass(frozen=True)
class Unparsed:
    raw: str


def _parse_source_name(raw: str, pos: int) -> tuple[str, int] | None:
    start = pos
    while pos < len(raw) and raw[pos].isdigit():
        pos += 1
    if pos == start:
        return None
    length = int(raw[start:pos])
    end = pos + length
    if length == 0 or end > len(raw):
        return None
    return raw[pos:end], end


def _parse_nested(raw: str, pos: int) -> tuple[list[str], int] | None:
    # pos sits just past the leading "N"
    while pos < len(raw) and raw[pos] in "rVK":
        pos += 1
    if pos < len(raw) and raw[pos] in "RO":
        pos += 1
    parts: list[str] = []
    while pos < len(raw) and raw[pos] != "E":
        part = _parse_source_name(raw, pos)
        if part is None:
            return None
        name, pos = part
        parts.append(name)
    if pos >= len(raw) or not parts:
        return None
    return parts, pos + 1


def _parse_type(raw: str, pos: int) -> tuple[str, int] | None:
    # Collect P/R/K prefixes iteratively, innermost type last, so arbitrarily
    # long modifier chains cannot recurse.
    mods: list[str] = []
    while pos < len(raw) and raw[pos] in "PRK":
        mods.append(raw[pos])
        pos += 1
    if pos >= len(raw):
        return None
    ch = raw[pos]
    if ch in _BUILTINS:
        spelling, pos = _BUILTINS[ch], pos + 1
    elif ch.isdigit():
        part = _parse_source_name(raw, pos)
        if part is None:
            return None
        spelling, pos = part
    elif ch == "N":
        nested = _parse_nested(raw, pos + 1)
        if nested is None:
            return None
        parts, pos = nested
        spelling = "::".join(parts)
    else:
        return None
    for mod in reversed(mods):
        if mod == "P":
            spelling += "*"
        elif mod == "R":
            spelling += "&"
        else:
            spelling += " const"
    return spelling, pos


def demangle(raw: str) -> DemangledName | Unparsed:
    """Decode raw into a structured name, or Unparsed when out of subset."""
    if not isinstance(raw, str) or not raw.startswith("_Z"):
        return Unparsed(raw)
    pos = 2
    if pos < len(raw) and raw[pos] == "N":
        nested = _parse_nested(raw, pos + 1)
        if nested is None:
            return Unparsed(raw)
        parts, pos = nested
    else:
        part = _parse_source_name(raw, pos)
        if part is None:
            return Unparsed(raw)
        name, pos = part
        parts = [name]

    if pos == len(raw):
        # No parameter list: a mangled data symbol such as a namespaced global.
        return DemangledName(tuple(parts), (), raw, is_function=False)

    params: list[str] = []
    while pos < len(raw):
        typ = _parse_type(raw, pos)
        if typ is None:
            return Unparsed(raw)
        spelling, pos = typ
        params.append(spelling)
    if params == ["void"]:
        params = []
    return DemangledName(tuple(parts), tuple(params), raw)


def base_name(d: DemangledName) -> str:
    return d.base()


def display(raw: str) -> str:
    """Demangled rendering when possible, otherwise the raw string."""
    result = demangle(raw)
    return result.render() if isinstance(result, DemangledName) else raw
