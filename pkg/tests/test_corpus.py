import pytest

from abirift import corpus, elf
from abirift.corpus import (
    AbiCorpus,
    MemberField,
    TypeDescriptor,
    build_corpus,
    dump_json,
    resolve_type,
    type_fingerprint,
    type_spelling,
)
from abirift.errors import DanglingTypeRef, DebugInfoMismatch

from conftest import fixture_pair


def load(path):
    return build_corpus(elf.open_elf(path))


# -- extraction against the DWARF-dump oracle --------------------------------


def test_struct_layout_matches_dwarf_dump(manifest, fixtures_dir):
    # oracle: readelf reports S with byte_size 16, members x and d
    old, _ = fixture_pair(manifest, "struct-layout")
    c = load(old)
    s = next(t for t in c.types.values() if t.kind == "struct_or_class" and t.name == "S")
    assert s.byte_size == 16
    assert [(m.name, m.byte_offset) for m in s.members] == [("x", 0), ("d", 8)]
    assert type_spelling(c, s.members[0].type) == "int"
    assert type_spelling(c, s.members[1].type) == "double"


def test_every_exported_function_present(manifest, fixtures_dir):
    for entry in manifest["fixtures"]:
        c = load(fixtures_dir / entry["old_lib"])
        func_exports = {
            name for (name, _), s in c.exports.items() if s.sym_type is elf.SymType.FUNC
        }
        assert func_exports <= set(c.functions), entry["fixture_id"]
        for name in func_exports:
            assert c.functions[name].is_exported


def test_all_type_refs_resolve(manifest, fixtures_dir):
    for entry in manifest["fixtures"]:
        c = load(fixtures_dir / entry["old_lib"])
        for fn in c.functions.values():
            for ref in list(fn.parameters) + [fn.return_type]:
                if ref is not None:
                    resolve_type(c, ref)  # raises on dangling


def test_vtable_slots_from_dwarf(manifest, fixtures_dir):
    # oracle: readelf shows bar at DW_OP_constu 0, baz at DW_OP_constu 1
    old, new = fixture_pair(manifest, "vtable-add")
    assert load(old).vtables["Base"].entries == ((0, "bar"),)
    assert load(new).vtables["Base"].entries == ((0, "bar"), (1, "baz"))


def test_enumeration_extraction(manifest, fixtures_dir):
    old, _ = fixture_pair(manifest, "enum-value")
    enums = load(old).enumerations()
    assert enums["Foo"].enumerators == (("ONE", 0), ("TWO", 1), ("THREE", 2))


def test_global_linkage_extraction(manifest, fixtures_dir):
    old, new = fixture_pair(manifest, "global-static")
    old_globals = load(old).globals
    assert old_globals["x"].linkage == "external"
    assert old_globals["y"].linkage == "external"
    assert load(new).globals["y"].linkage == "internal"


def test_exports_subset_of_filter(manifest, fixtures_dir):
    from abirift.symbols import exported

    old, _ = fixture_pair(manifest, "vtable-add")
    parsed = elf.open_elf(old)
    c = build_corpus(parsed)
    assert set(c.exports) <= set(exported(elf.read_symbols(parsed)))


def test_symbols_only_fallback(fixtures_dir):
    stripped = fixtures_dir / "debug-layout" / "libsplit.so"
    c = load(stripped)
    assert not c.has_debug_info
    assert not c.functions and not c.types and not c.vtables and not c.globals
    assert c.exports


def test_separate_debug_file(fixtures_dir):
    stripped = fixtures_dir / "debug-layout" / "libsplit.so"
    debug = fixtures_dir / "debug-layout" / "libsplit.so.debug"
    c = build_corpus(elf.open_elf(stripped), str(debug))
    assert c.has_debug_info
    assert any(t.name == "S" for t in c.types.values() if t.kind == "struct_or_class")


def test_debug_info_mismatch(manifest, fixtures_dir):
    stripped = fixtures_dir / "debug-layout" / "libsplit.so"
    other, _ = fixture_pair(manifest, "no-change")
    with pytest.raises(DebugInfoMismatch):
        build_corpus(elf.open_elf(stripped), str(other))


def test_dump_deterministic(manifest, fixtures_dir):
    for entry in manifest["fixtures"]:
        path = fixtures_dir / entry["old_lib"]
        assert dump_json(load(path)) == dump_json(load(path)), entry["fixture_id"]


def test_dump_carries_schema_version(manifest, fixtures_dir):
    import json

    old, _ = fixture_pair(manifest, "no-change")
    doc = json.loads(dump_json(load(old)))
    assert doc["corpus_version"] == 1


# -- resolve_type / fingerprints over synthetic corpora ----------------------


def synthetic(types: dict[str, TypeDescriptor]) -> AbiCorpus:
    return AbiCorpus(path="synthetic", types=types, has_debug_info=True)


def test_resolve_typedef_chain():
    c = synthetic(
        {
            "t_int": TypeDescriptor(kind="base", name="int", byte_size=4),
            "t_u": TypeDescriptor(kind="typedef", name="U", element="t_int"),
            "t_t": TypeDescriptor(kind="typedef", name="T", element="t_u"),
        }
    )
    assert resolve_type(c, "t_t").name == "int"


def test_resolve_qualified_chain():
    c = synthetic(
        {
            "t_int": TypeDescriptor(kind="base", name="int", byte_size=4),
            "t_const": TypeDescriptor(kind="qualified", name="const", element="t_int"),
        }
    )
    assert resolve_type(c, "t_const").kind == "base"


def test_resolve_dangling_ref():
    c = synthetic({})
    with pytest.raises(DanglingTypeRef):
        resolve_type(c, "nope")


def test_self_referential_struct_terminates():
    c = synthetic(
        {
            "t_node": TypeDescriptor(
                kind="struct_or_class",
                name="Node",
                byte_size=8,
                members=(MemberField(name="next", type="t_ptr", byte_offset=0),),
            ),
            "t_ptr": TypeDescriptor(kind="pointer", byte_size=8, element="t_node"),
        }
    )
    assert resolve_type(c, "t_node").name == "Node"
    fp = type_fingerprint(c, "t_node")
    assert fp == type_fingerprint(c, "t_node")


def test_fingerprint_equal_for_same_base():
    c = synthetic({"t_int": TypeDescriptor(kind="base", name="int", byte_size=4)})
    assert type_fingerprint(c, "t_int") == type_fingerprint(c, "t_int")


def test_fingerprint_differs_on_member_type():
    def mk(member_type):
        return synthetic(
            {
                "t_int": TypeDescriptor(kind="base", name="int", byte_size=4),
                "t_double": TypeDescriptor(kind="base", name="double", byte_size=8),
                "t_base": TypeDescriptor(
                    kind="struct_or_class",
                    name="Base",
                    byte_size=8,
                    members=(MemberField(name="x", type=member_type, byte_offset=0),),
                ),
            }
        )

    a, b = mk("t_int"), mk("t_double")
    assert type_fingerprint(a, "t_base", 0) != type_fingerprint(b, "t_base", 0)


def test_fingerprint_includes_member_names():
    def mk(member_name):
        return synthetic(
            {
                "t_int": TypeDescriptor(kind="base", name="int", byte_size=4),
                "t_s": TypeDescriptor(
                    kind="struct_or_class",
                    name="S",
                    byte_size=4,
                    members=(MemberField(name=member_name, type="t_int", byte_offset=0),),
                ),
            }
        )

    assert type_fingerprint(mk("a"), "t_s") != type_fingerprint(mk("b"), "t_s")


def test_fingerprint_depth_limit_degrades_to_name():
    # past the depth budget the record contributes its name only
    def mk(inner_member):
        return synthetic(
            {
                "t_int": TypeDescriptor(kind="base", name="int", byte_size=4),
                "t_double": TypeDescriptor(kind="base", name="double", byte_size=8),
                "t_inner": TypeDescriptor(
                    kind="struct_or_class",
                    name="Inner",
                    byte_size=8,
                    members=(MemberField(name="v", type=inner_member, byte_offset=0),),
                ),
                "t_outer": TypeDescriptor(
                    kind="struct_or_class",
                    name="Outer",
                    byte_size=8,
                    members=(MemberField(name="i", type="t_inner", byte_offset=0),),
                ),
            }
        )

    a, b = mk("t_int"), mk("t_double")
    assert type_fingerprint(a, "t_outer", 2) != type_fingerprint(b, "t_outer", 2)
    assert type_fingerprint(a, "t_outer", 0) == type_fingerprint(b, "t_outer", 0)


def test_inheritance_recorded(manifest, fixtures_dir):
    old, _ = fixture_pair(manifest, "subtype-change")
    c = load(old)
    derived = next(
        t for t in c.types.values()
        if t.kind == "struct_or_class" and t.name == "Derived" and t.byte_size is not None
    )
    assert len(derived.base_classes) == 1
    assert resolve_type(c, derived.base_classes[0]).name == "Base"


def test_fingerprint_real_subtype_chain(manifest, fixtures_dir):
    # Derived* differs only two levels down (Base member retyped)
    old, new = fixture_pair(manifest, "subtype-change")
    c_old, c_new = load(old), load(new)
    p_old = c_old.functions["_Z3fooP7Derived"].parameters[0]
    p_new = c_new.functions["_Z3fooP7Derived"].parameters[0]
    assert type_spelling(c_old, p_old) == type_spelling(c_new, p_new) == "Derived*"
    assert type_fingerprint(c_old, p_old) != type_fingerprint(c_new, p_new)
