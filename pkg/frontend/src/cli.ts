#!/usr/bin/env node
/** render --kind {heatmap,sr-curve,squint,runtime} --in a.csv[,b.csv] --out fig.svg */

import { writeFileSync } from "node:fs";
import { SchemaError } from "./csv.js";
import { FigureKind, FigureSpec, render } from "./render.js";

function parseArgs(argv: string[]): FigureSpec {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    if (argv[i].startsWith("--")) {
      args.set(argv[i].slice(2), argv[i + 1] ?? "");
      i++;
    } else if (argv[i] === "render") {
      continue;
    }
  }
  const kind = args.get("kind") as FigureKind | undefined;
  const input = args.get("in");
  const output = args.get("out");
  if (!kind || !input || !output) {
    throw new SchemaError("usage: render --kind {heatmap,sr-curve,squint,runtime} --in a.csv[,b.csv] --out fig.svg");
  }
  const spec: FigureSpec = { kind, inputs: input.split(","), output };
  if (args.has("color-range")) {
    const [lo, hi] = args.get("color-range")!.split(",").map(Number);
    spec.colorRange = [lo, hi];
  }
  if (args.has("labels")) spec.labels = args.get("labels")!.split(",");
  if (args.has("title")) spec.title = args.get("title");
  return spec;
}

export function main(argv: string[]): number {
  let spec: FigureSpec;
  try {
    spec = parseArgs(argv);
    const svg = render(spec);
    writeFileSync(spec.output, svg);
  } catch (e) {
    if (e instanceof SchemaError) {
      process.stderr.write(`error: ${e.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${e}\n`);
    return 1;
  }
  process.stdout.write(`wrote ${spec.output}\n`);
  return 0;
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
