import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abirift.mangle import DemangledName, Unparsed, base_name, demangle, display


def test_paper_add_int_variant():
    d = demangle("_ZN11MathLibrary10Arithmetic3AddEii")
    assert isinstance(d, DemangledName)
    assert d.render() == "MathLibrary::Arithmetic::Add(int, int)"
    assert d.parameter_types == ("int", "int")


def test_paper_add_double_variant():
    d = demangle("_ZN11MathLibrary10Arithmetic3AddEdd")
    assert isinstance(d, DemangledName)
    assert d.render() == "MathLibrary::Arithmetic::Add(double, double)"


def test_base_name_is_parameter_independent():
    ints = demangle("_ZN11MathLibrary10Arithmetic3AddEii")
    doubles = demangle("_ZN11MathLibrary10Arithmetic3AddEdd")
    assert base_name(ints) == base_name(doubles) == "MathLibrary::Arithmetic::Add"


def test_c_symbol_is_unparsed():
    result = demangle("Add")
    assert isinstance(result, Unparsed)
    assert display("Add") == "Add"


# expected renderings verified against a system demangler (c++filt)
@pytest.mark.parametrize(
    "raw,rendered",
    [
        ("_Z3foov", "foo()"),
        ("_Z3foo1S", "foo(S)"),
        ("_Z3fooP7Derived", "foo(Derived*)"),
        ("_Z1fPKc", "f(char const*)"),
        ("_Z4funcRKi", "func(int const&)"),
        ("_Z1gPPPi", "g(int***)"),
        ("_ZN4Base3bazEv", "Base::baz()"),
        ("_ZN3foo3barE", "foo::bar"),
    ],
)
def test_subset_goldens(raw, rendered):
    assert display(raw) == rendered


def test_top_level_function_base_name():
    d = demangle("_Z3foov")
    assert isinstance(d, DemangledName)
    assert d.base() == "foo"


@pytest.mark.parametrize(
    "raw",
    [
        "_ZSt4cout",  # std abbreviation: outside the subset
        "_ZNSt6vectorIiSaIiEE9push_backERKi",  # templates
        "_ZTV4Base",  # vtable special name
        "_ZN4BaseC2Ev",  # constructor
        "_Z",
        "_ZN",
        "_ZNE",
        "_Z99999999999x",
        "",
    ],
)
def test_out_of_subset_is_unparsed_not_error(raw):
    result = demangle(raw)
    assert isinstance(result, Unparsed)
    assert result.raw == raw


def test_raw_preserved_verbatim():
    raw = "_ZN11MathLibrary10Arithmetic3AddEii"
    d = demangle(raw)
    assert d.raw == raw


def test_rendering_deterministic():
    raw = "_ZN11MathLibrary10Arithmetic3AddEii"
    assert demangle(raw) == demangle(raw)
    assert display(raw) == display(raw)


@given(st.binary(max_size=64))
@settings(max_examples=500)
def test_fuzz_never_raises(data):
    result = demangle(data.decode("latin-1"))
    assert isinstance(result, (DemangledName, Unparsed))


@given(st.text(alphabet="_ZNEPRKivdbcfm0123456789", max_size=48))
@settings(max_examples=500)
def test_fuzz_mangling_alphabet_never_raises(text):
    result = demangle(text)
    assert isinstance(result, (DemangledName, Unparsed))
    if isinstance(result, DemangledName):
        assert result.raw == text
