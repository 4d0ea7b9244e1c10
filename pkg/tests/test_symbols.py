from hypothesis import given, settings
from hypothesis import strategies as st

from abirift import elf, symbols
from abirift.elf import Binding, RawSymbol, SymType, Visibility

from conftest import fixture_pair


def raw(name, size=8, sym_type=SymType.FUNC, binding=Binding.GLOBAL, shndx=10, version=None):
    return RawSymbol(
        name=name,
        value=0x1000,
        size=size,
        sym_type=sym_type,
        binding=binding,
        visibility=Visibility.DEFAULT,
        section_index=shndx,
        version=version,
    )


def test_filter_excludes_local():
    out = symbols.exported([raw("f", binding=Binding.LOCAL)])
    assert out == {}


def test_filter_excludes_undefined_section():
    out = symbols.exported([raw("printf", shndx="undefined")])
    assert out == {}


def test_filter_excludes_zero_size():
    out = symbols.exported([raw("f", size=0)])
    assert out == {}


def test_filter_excludes_notype():
    out = symbols.exported([raw("_init_marker", sym_type=SymType.NOTYPE)])
    assert out == {}


def test_filter_keeps_weak():
    out = symbols.exported([raw("f", binding=Binding.WEAK)])
    assert ("f", None) in out


def test_filter_keeps_versioned_identity():
    out = symbols.exported([raw("f", version="V1"), raw("f", version="V2")])
    assert set(out) == {("f", "V1"), ("f", "V2")}


def test_fixture_export_set(manifest, fixtures_dir):
    old, _ = fixture_pair(manifest, "param-change")
    exports = symbols.exported(elf.read_symbols(elf.open_elf(old)))
    assert ("_ZN11MathLibrary10Arithmetic3AddEii", None) in exports


def test_missing_simple_difference():
    a = symbols.exported([raw("f"), raw("g")])
    b = symbols.exported([raw("f")])
    verdict = symbols.missing_previously_found_exports(a, b)
    assert [s.name for s in verdict.missing] == ["g"]
    assert not verdict.compatible


def test_missing_identity_case():
    a = symbols.exported([raw("f"), raw("g")])
    verdict = symbols.missing_previously_found_exports(a, a)
    assert verdict.compatible and verdict.missing == ()


def test_additions_are_not_breaks():
    a = symbols.exported([])
    b = symbols.exported([raw("h")])
    assert symbols.missing_previously_found_exports(a, b).compatible


def test_verdict_fast_on_large_sets():
    import time

    a = symbols.exported([raw(f"sym{i}") for i in range(10_000)])
    b = symbols.exported([raw(f"sym{i}") for i in range(5_000, 15_000)])
    start = time.perf_counter()
    verdict = symbols.missing_previously_found_exports(a, b)
    elapsed = time.perf_counter() - start
    assert len(verdict.missing) == 5_000
    assert elapsed < 0.050, f"{elapsed * 1000:.1f} ms for two 10^4 sets"


def test_paper_add_pair_detected(manifest, fixtures_dir):
    old, new = fixture_pair(manifest, "param-change")
    a = symbols.exported(elf.read_symbols(elf.open_elf(old)))
    b = symbols.exported(elf.read_symbols(elf.open_elf(new)))
    verdict = symbols.missing_previously_found_exports(a, b)
    assert not verdict.compatible
    assert any(s.name == "_ZN11MathLibrary10Arithmetic3AddEii" for s in verdict.missing)


# -- properties ---------------------------------------------------------------

names = st.text(alphabet="abcdefgh", min_size=1, max_size=4)
versions = st.sampled_from([None, "V1", "V2"])
symbol_sets = st.lists(st.tuples(names, versions), max_size=40).map(
    lambda pairs: symbols.exported([raw(n, version=v) for n, v in pairs])
)


@given(a=symbol_sets, b=symbol_sets)
def test_property_matches_naive_scan(a, b):
    got = {s.identity for s in symbols.missing_previously_found_exports(a, b).missing}
    b_idents = list(b)
    want = {ident for ident in a if ident not in b_idents}
    assert got == want


@given(a=symbol_sets, b=symbol_sets, extra=st.tuples(names, versions))
def test_property_monotonic_in_b(a, b, extra):
    before = symbols.missing_previously_found_exports(a, b)
    grown = dict(b)
    sym = symbols.ExportedSymbol(extra[0], extra[1], 8, SymType.FUNC)
    grown[sym.identity] = sym
    after = symbols.missing_previously_found_exports(a, grown)
    if before.compatible:
        assert after.compatible


@given(a=symbol_sets)
@settings(max_examples=25)
def test_property_reflexive(a):
    assert symbols.missing_previously_found_exports(a, a).compatible


@given(a=symbol_sets, b=symbol_sets)
def test_property_antisymmetry(a, b):
    ab = symbols.missing_previously_found_exports(a, b)
    ba = symbols.missing_previously_found_exports(b, a)
    if not ab.compatible and ba.compatible:
        # b lost something and gained nothing: strict subset
        assert set(b) < set(a)
