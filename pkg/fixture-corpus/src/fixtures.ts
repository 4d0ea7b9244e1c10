/**
 * Fixture definitions: one before/after source pair per ABI breakage kind,
 * with the categories a correct differ must report for the pair and the
 * verdict the exported-symbols comparison alone reaches.
 */

export type SymbolsVerdict = "compatible" | "incompatible";

export interface FixtureSpec {
  id: string;
  language: "c" | "c++";
  oldSource: string;
  newSource: string;
  expectedCategories: string[];
  expectedSymbolsVerdict: SymbolsVerdict;
  /** [old soname, new soname] when the pair is linked with explicit sonames */
  sonamePair?: [string, string];
}

const BALLAST_SOURCE = `#include <map>
#include <string>
#include <vector>

std::vector<std::string> catalog_names() { return {"alpha", "beta", "gamma"}; }

std::map<std::string, std::vector<double>> catalog_table() {
    return {{"alpha", {1.0, 2.0}}};
}

void append_sample(std::vector<int> &values, int sample) { values.push_back(sample); }

double sum_samples(const std::vector<double> &values) {
    double total = 0;
    for (double v : values) total += v;
    return total;
}
`;

export const FIXTURES: FixtureSpec[] = [
  {
    // Changing a parameter type changes the mangled string, so the old
    // symbol disappears: visible to both predictor families.
    id: "param-change",
    language: "c++",
    oldSource: `namespace MathLibrary {
namespace Arithmetic {
int Add(int a, int b) { return a + b; }
}
}
`,
    newSource: `namespace MathLibrary {
namespace Arithmetic {
int Add(double a, double b) { return static_cast<int>(a + b); }
}
}
`,
    expectedCategories: ["FunctionParamChanged"],
    expectedSymbolsVerdict: "incompatible",
  },
  {
    // The same parameter-type change in C keeps the symbol name, so only
    // a debug-info comparison can see it.
    id: "c-param-change",
    language: "c",
    oldSource: `int add(int a, int b) { return a + b; }
`,
    newSource: `int add(double a, double b) { return (int)(a + b); }
`,
    expectedCategories: ["FunctionParamChanged"],
    expectedSymbolsVerdict: "compatible",
  },
  {
    // Struct member retyped: the function signature (and symbol) never
    // changes but the passed layout does.
    id: "struct-layout",
    language: "c++",
    oldSource: `struct S { int x; double d; };
void foo(S s) { (void)s; }
`,
    newSource: `struct S { int x; char *p; };
void foo(S s) { (void)s; }
`,
    expectedCategories: ["FunctionSubtypeChanged"],
    expectedSymbolsVerdict: "compatible",
  },
  {
    // The change hides one inheritance level below the parameter type.
    // The static instance forces the compiler to emit the full class
    // definitions into the debug info of a pointer-only interface.
    id: "subtype-change",
    language: "c++",
    oldSource: `struct Base { int x; };
struct Derived : Base {};
void foo(Derived *d) { (void)d; }
static Derived complete_type_anchor;
`,
    newSource: `struct Base { double x; };
struct Derived : Base {};
void foo(Derived *d) { (void)d; }
static Derived complete_type_anchor;
`,
    expectedCategories: ["FunctionSubtypeChanged"],
    expectedSymbolsVerdict: "compatible",
  },
  {
    // Return types are not encoded in mangled strings.
    id: "return-type",
    language: "c++",
    oldSource: `struct S { int x; double d; };
S foo() { return S{1, 2.0}; }
`,
    newSource: `int foo() { return 0; }
`,
    expectedCategories: ["FunctionReturnTypeChanged"],
    expectedSymbolsVerdict: "compatible",
  },
  {
    // A new virtual function is a new exported symbol (informational) and
    // a new vtable entry (breaking: the table layout shifts).
    id: "vtable-add",
    language: "c++",
    oldSource: `struct Base { virtual void bar(); };
void Base::bar() {}
void foo(Base *b) { (void)b; }
`,
    newSource: `struct Base {
    virtual void bar();
    virtual void baz();
};
void Base::bar() {}
void Base::baz() {}
void foo(Base *b) { (void)b; }
`,
    expectedCategories: ["FunctionAdded", "VtableEntryAdded"],
    expectedSymbolsVerdict: "compatible",
  },
  {
    // A grown enumeration changes the data contract of every function
    // taking it, hence the accompanying subtype report.
    id: "enum-add",
    language: "c++",
    oldSource: `enum class Foo { ONE, TWO };
void foo(Foo f) { (void)f; }
`,
    newSource: `enum class Foo { ONE, TWO, THREE };
void foo(Foo f) { (void)f; }
`,
    expectedCategories: ["EnumeratorAdded", "FunctionSubtypeChanged"],
    expectedSymbolsVerdict: "compatible",
  },
  {
    // Re-basing the first enumerator shifts every value.
    id: "enum-value",
    language: "c++",
    oldSource: `enum class Foo { ONE, TWO, THREE };
void foo(Foo f) { (void)f; }
`,
    newSource: `enum class Foo { ONE = 17, TWO, THREE };
void foo(Foo f) { (void)f; }
`,
    expectedCategories: ["EnumeratorValueChanged", "FunctionSubtypeChanged"],
    expectedSymbolsVerdict: "compatible",
  },
  {
    // Adding "static" moves y to internal linkage: gone from the ABI
    // surface and from the export set.
    id: "global-static",
    language: "c++",
    oldSource: `int x = 1;
int y = 2;
`,
    newSource: `int x = 1;
static int y = 2;
`,
    expectedCategories: ["GlobalLinkageChanged"],
    expectedSymbolsVerdict: "incompatible",
  },
  {
    // Identical code, different SONAME: the versioning convention alone
    // signals the break.
    id: "soname-change",
    language: "c++",
    oldSource: `int answer() { return 42; }
`,
    newSource: `int answer() { return 42; }
`,
    expectedCategories: ["SonameChanged"],
    expectedSymbolsVerdict: "compatible",
    sonamePair: ["libsoname-change.so.1", "libsoname-change.so.2"],
  },
  {
    id: "no-change",
    language: "c++",
    oldSource: `int answer() { return 42; }
`,
    newSource: `int answer() { return 42; }
`,
    expectedCategories: [],
    expectedSymbolsVerdict: "compatible",
  },
  {
    // Identical template-heavy code on both sides. Gives the corpus one
    // library with debug-info volume resembling a real distribution
    // binary, so speed comparisons are not dominated by container
    //-parsing overhead on toy inputs.
    id: "ballast",
    language: "c++",
    oldSource: BALLAST_SOURCE,
    newSource: BALLAST_SOURCE,
    expectedCategories: [],
    expectedSymbolsVerdict: "compatible",
  },
];

/** Names planted in the sysroot trees for the matcher contract checks. */
export const SYSROOT_SPECIALS = {
  renamedPrefix: "libx",
  renamedOld: "libx.so.1",
  renamedNew: "libx.so.2",
  symlinkPrefix: "libz",
  symlinkName: "libz.so.1",
  symlinkTarget: "libz.so.1.2.13",
  collisionPrefix: "liby",
  collisionFiles: ["liby.so.1", "liby.so.1.0"],
  linkerScriptName: "libc.so",
  linkerScriptText: "/* GNU ld script */\nGROUP ( libnotreal.so.6 )\n",
} as const;
