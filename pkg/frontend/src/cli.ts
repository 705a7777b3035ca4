/** Shared argv handling for the two adapter executables:
 *    adapt-transcript <media> -o <out.json> [--backend id]
 *    adapt-landmarks <media> -o <out.jsonl> [--backend id]
 */

import { AdapterError } from "./errors.js";

export interface CliArgs {
  media: string;
  out: string;
  backend: string;
}

export function parseArgs(argv: string[], usage: string): CliArgs {
  let media = "";
  let out = "";
  let backend = "offline";
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "-o" || arg === "--out") out = argv[++i] ?? "";
    else if (arg === "--backend") backend = argv[++i] ?? "";
    else if (arg === "-h" || arg === "--help") throw new UsageRequested(usage);
    else if (arg.startsWith("-")) throw new AdapterError(`unknown flag ${arg}\n${usage}`);
    else if (!media) media = arg;
    else throw new AdapterError(`unexpected argument ${arg}\n${usage}`);
  }
  if (!media || !out || !backend) throw new AdapterError(`missing arguments\n${usage}`);
  return { media, out, backend };
}

export class UsageRequested extends Error {}

export function runCli(name: string, adapt: (media: string, out: string, backend: string) => unknown): number {
  const usage = `usage: ${name} <media> -o <output> [--backend <id>]`;
  try {
    const args = parseArgs(process.argv.slice(2), usage);
    adapt(args.media, args.out, args.backend);
    return 0;
  } catch (err) {
    if (err instanceof UsageRequested) {
      console.log(err.message);
      return 0;
    }
    console.error(err instanceof Error ? err.message : String(err));
    return 2;
  }
}
