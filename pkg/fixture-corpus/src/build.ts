/**
 * Builds the fixture corpus: compiles every before/after pair to shared
 * objects with full debug info, assembles two sysroot trees for harness
 * runs, produces a split-debug asset pair, and writes the manifest the
 * verification suites consume.
 */

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";

import { FIXTURES, FixtureSpec, SYSROOT_SPECIALS } from "./fixtures.js";

export const COMMON_FLAGS = [
  "-g",
  "-O0",
  "-fPIC",
  "-shared",
  "-fno-eliminate-unused-debug-types",
];

export interface BuildOptions {
  cxx?: string;
  cc?: string;
  verbose?: boolean;
}

export interface BuildResult {
  outDir: string;
  manifestPath: string;
  libraries: string[];
}

function run(cmd: string, args: string[], verbose: boolean | undefined): void {
  if (verbose) console.error(`+ ${cmd} ${args.join(" ")}`);
  execFileSync(cmd, args, { stdio: ["ignore", "inherit", "inherit"] });
}

function compile(
  fixture: FixtureSpec,
  side: "old" | "new",
  outDir: string,
  opts: BuildOptions
): string {
  const compiler = fixture.language === "c" ? opts.cc ?? "gcc" : opts.cxx ?? "g++";
  const srcDir = path.join(outDir, "src", fixture.id);
  fs.mkdirSync(srcDir, { recursive: true });
  const ext = fixture.language === "c" ? "c" : "cpp";
  const srcPath = path.join(srcDir, `${side}.${ext}`);
  fs.writeFileSync(srcPath, side === "old" ? fixture.oldSource : fixture.newSource);

  const libDir = path.join(outDir, "fixtures", fixture.id, side);
  fs.mkdirSync(libDir, { recursive: true });
  const libPath = path.join(libDir, `lib${fixture.id}.so`);

  const args = [...COMMON_FLAGS];
  if (fixture.sonamePair) {
    const soname = side === "old" ? fixture.sonamePair[0] : fixture.sonamePair[1];
    args.push(`-Wl,-soname,${soname}`);
  }
  args.push("-o", libPath, srcPath);
  try {
    run(compiler, args, opts.verbose);
  } catch (err) {
    throw new Error(`fixture ${fixture.id} (${side}) failed to build: ${err}`);
  }
  return libPath;
}

function copy(src: string, dst: string): void {
  fs.mkdirSync(path.dirname(dst), { recursive: true });
  fs.copyFileSync(src, dst);
}

/**
 * Arrange every fixture into two comparable system trees. Beyond the
 * one-library-per-fixture layout, the trees plant the four matcher edge
 * cases: a renamed library, a symlinked name, a key collision (old tree
 * only), and a linker-script text file masquerading as a library.
 */
function buildSysroots(outDir: string): void {
  const lib = (root: string, ...parts: string[]) =>
    path.join(outDir, "sysroots", root, "usr", "lib", ...parts);

  for (const fixture of FIXTURES) {
    const name = `lib${fixture.id}.so.1`;
    copy(
      path.join(outDir, "fixtures", fixture.id, "old", `lib${fixture.id}.so`),
      lib("old", fixture.id, name)
    );
    copy(
      path.join(outDir, "fixtures", fixture.id, "new", `lib${fixture.id}.so`),
      lib("new", fixture.id, name)
    );
  }

  const s = SYSROOT_SPECIALS;
  const noChangeOld = path.join(outDir, "fixtures", "no-change", "old", "libno-change.so");
  const noChangeNew = path.join(outDir, "fixtures", "no-change", "new", "libno-change.so");
  const distinctOld = path.join(outDir, "fixtures", "param-change", "old", "libparam-change.so");

  // Renamed but unchanged content: file-name change alone is not a break.
  copy(noChangeOld, lib("old", "renamed", s.renamedOld));
  copy(noChangeNew, lib("new", "renamed", s.renamedNew));

  // A versioned symlink pointing at the real file, in both trees.
  for (const root of ["old", "new"]) {
    const target = lib(root, "zlinked", s.symlinkTarget);
    copy(root === "old" ? noChangeOld : noChangeNew, target);
    fs.symlinkSync(s.symlinkTarget, lib(root, "zlinked", s.symlinkName));
  }

  // Two distinct files sharing one matching key in the old tree.
  copy(noChangeOld, lib("old", "collide", s.collisionFiles[0]));
  copy(distinctOld, lib("old", "collide", s.collisionFiles[1]));
  copy(noChangeNew, lib("new", "collide", s.collisionFiles[0]));

  for (const root of ["old", "new"]) {
    const scriptPath = lib(root, "script", s.linkerScriptName);
    fs.mkdirSync(path.dirname(scriptPath), { recursive: true });
    fs.writeFileSync(scriptPath, s.linkerScriptText);
  }
}

/**
 * Produce a stripped library plus its separate .debug file so the
 * build-ID / debug-link lookup paths can be exercised without a compiler,
 * and a fully stripped variant whose only symbol table is .dynsym.
 */
function buildDebugSplit(outDir: string, opts: BuildOptions): void {
  const dir = path.join(outDir, "debug-layout");
  fs.mkdirSync(dir, { recursive: true });
  const source = path.join(outDir, "fixtures", "struct-layout", "old", "libstruct-layout.so");
  const lib = path.join(dir, "libsplit.so");
  const debug = path.join(dir, "libsplit.so.debug");
  fs.copyFileSync(source, lib);
  run("objcopy", ["--only-keep-debug", lib, debug], opts.verbose);
  run("objcopy", ["--strip-debug", lib], opts.verbose);
  run("objcopy", [`--add-gnu-debuglink=${debug}`, lib], opts.verbose);

  const dynOnly = path.join(dir, "libdynonly.so");
  fs.copyFileSync(source, dynOnly);
  run("objcopy", ["--strip-all", dynOnly], opts.verbose);
}

export function buildAll(outDir: string, opts: BuildOptions = {}): BuildResult {
  fs.rmSync(outDir, { recursive: true, force: true });
  fs.mkdirSync(outDir, { recursive: true });

  const libraries: string[] = [];
  const entries = [];
  for (const fixture of FIXTURES) {
    const oldLib = compile(fixture, "old", outDir, opts);
    const newLib = compile(fixture, "new", outDir, opts);
    libraries.push(oldLib, newLib);
    entries.push({
      fixture_id: fixture.id,
      old_lib: path.relative(outDir, oldLib),
      new_lib: path.relative(outDir, newLib),
      expected_categories: fixture.expectedCategories,
      expected_symbols_verdict: fixture.expectedSymbolsVerdict,
      soname_pair: fixture.sonamePair ?? null,
    });
  }

  buildSysroots(outDir);
  buildDebugSplit(outDir, opts);

  const manifest = {
    manifest_version: 1,
    toolchain: {
      cxx: opts.cxx ?? "g++",
      cc: opts.cc ?? "gcc",
      flags: COMMON_FLAGS,
    },
    fixtures: entries,
    sysroots: { old: "sysroots/old", new: "sysroots/new" },
    sysroot_specials: {
      renamed_prefix: SYSROOT_SPECIALS.renamedPrefix,
      symlink_prefix: SYSROOT_SPECIALS.symlinkPrefix,
      collision_prefix: SYSROOT_SPECIALS.collisionPrefix,
      linker_script_name: SYSROOT_SPECIALS.linkerScriptName,
    },
    debug_layout: {
      library: "debug-layout/libsplit.so",
      debug_file: "debug-layout/libsplit.so.debug",
    },
  };
  const manifestPath = path.join(outDir, "manifest.json");
  fs.writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + "\n");

  // Compilation scratch is not part of the corpus.
  fs.rmSync(path.join(outDir, "src"), { recursive: true, force: true });

  return { outDir, manifestPath, libraries };
}
