"""Library matching across two system trees.

Walks each root, resolves symlinks, keeps only regular files that open as
ELF shared objects (linker scripts and other text files are excluded), and
keys every library by (parent directory relative to its root, file-name
prefix up to the first ".so"). Matching is an inner join on that key;
keys with more than one distinct target in a root are reported as
ambiguities rather than guessed at.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .elf import FileType, is_linker_script, open_elf
from .errors import NotElf, TruncatedFile, UnsupportedLayout

MatchKey = tuple[str, str]  # (parent dir relative to root, prefix)


@dataclass(frozen=True)
class MatchedPair:
    key: MatchKey
    old_path: str
    new_path: str
    filename_changed: bool
    old_size_bytes: int
    new_size_bytes: int


@dataclass
class Enumeration:
    root: str
    libraries: dict[MatchKey, str] = field(default_factory=dict)
    ambiguities: dict[MatchKey, list[str]] = field(default_factory=dict)
    linker_scripts: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)


@dataclass
class MatchResult:
    pairs: list[MatchedPair]
    unmatched_old: list[MatchKey]
    unmatched_new: list[MatchKey]
    ambiguous: dict[MatchKey, dict[str, list[str]]]  # key -> {"old": [...], "new": [...]}
    old_enumeration: Enumeration
    new_enumeration: Enumeration


def _prefix(name: str) -> str | None:
    idx = name.find(".so")
    if idx <= 0:
        return None
    return name[:idx]


def enumerate_libraries(root: str | os.PathLike) -> Enumeration:
    """Find every shared library under root, keyed for cross-tree matching.

    Symlinks are fully resolved first; entries resolving to the same file
    collapse to one candidate, while distinct files sharing a key are kept
    as an ambiguity. Unreadable entries are collected, not fatal.
    """
    root_path = Path(root)
    result = Enumeration(root=str(root_path))
    candidates: dict[MatchKey, dict[str, None]] = {}

    for dirpath, dirnames, filenames in os.walk(root_path):
        dirnames.sort()
        for fname in sorted(filenames):
            entry = Path(dirpath) / fname
            try:
                resolved = entry.resolve(strict=True)
                if not resolved.is_file():
                    continue
                prefix = _prefix(resolved.name)
                if prefix is None:
                    continue
                if is_linker_script(resolved):
                    result.linker_scripts.append(str(entry))
                    continue
                elf = open_elf(resolved)
                if elf.file_type is not FileType.SHARED_OBJECT:
                    continue
            except (NotElf, TruncatedFile, UnsupportedLayout):
                continue
            except OSError as exc:
                result.errors.append(f"{entry}: {exc}")
                continue
            rel_parent = Path(dirpath).relative_to(root_path).as_posix()
            key = (rel_parent, prefix)
            candidates.setdefault(key, {})[str(resolved)] = None

    for key, paths in sorted(candidates.items()):
        if len(paths) == 1:
            result.libraries[key] = next(iter(paths))
        else:
            result.ambiguities[key] = sorted(paths)
    return result


def match_pairs(old_root: str | os.PathLike, new_root: str | os.PathLike) -> MatchResult:
    """Pair equivalent libraries between two roots by matching key.

    file-name change is judged on the fully resolved base names. Keys that
    are ambiguous on either side never produce a pair.
    """
    old_enum = enumerate_libraries(old_root)
    new_enum = enumerate_libraries(new_root)

    ambiguous_keys = set(old_enum.ambiguities) | set(new_enum.ambiguities)
    ambiguous = {
        key: {
            "old": old_enum.ambiguities.get(key, []),
            "new": new_enum.ambiguities.get(key, []),
        }
        for key in sorted(ambiguous_keys)
    }

    old_keys = set(old_enum.libraries) - ambiguous_keys
    new_keys = set(new_enum.libraries) - ambiguous_keys

    pairs = []
    for key in sorted(old_keys & new_keys):
        old_path = old_enum.libraries[key]
        new_path = new_enum.libraries[key]
        pairs.append(
            MatchedPair(
                key=key,
                old_path=old_path,
                new_path=new_path,
                filename_changed=os.path.basename(old_path) != os.path.basename(new_path),
                old_size_bytes=os.path.getsize(old_path),
                new_size_bytes=os.path.getsize(new_path),
            )
        )

    return MatchResult(
        pairs=pairs,
        unmatched_old=sorted(old_keys - new_keys),
        unmatched_new=sorted(new_keys - old_keys),
        ambiguous=ambiguous,
        old_enumeration=old_enum,
        new_enumeration=new_enum,
    )
