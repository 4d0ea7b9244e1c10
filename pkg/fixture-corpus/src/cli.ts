import * as path from "node:path";
import { parseArgs } from "node:util";

import { buildAll } from "./build.js";

const { values } = parseArgs({
  options: {
    out: { type: "string", default: path.join("dist", "corpus") },
    verbose: { type: "boolean", default: false },
  },
});

const result = buildAll(path.resolve(values.out as string), {
  verbose: values.verbose as boolean,
});
console.log(`built ${result.libraries.length} libraries under ${result.outDir}`);
console.log(`manifest: ${result.manifestPath}`);
