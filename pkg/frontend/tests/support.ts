/**
 * Test scaffolding: a seeded PRNG, a projective-tree sampler written from
 * first principles (a random walk over shift/left-arc/right-arc transitions,
 * sharing no code with the service), a CoNLL-U serializer matching the CLI's
 * output format byte for byte, and process helpers that run the real CLI and
 * host a live service instance for the duration of a test file.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export type Rng = () => number;

/** Deterministic 32-bit PRNG (mulberry32); returns floats in [0, 1). */
export function mulberry32(seed: number): Rng {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Uniform integer in [lo, hi] inclusive. */
export function randInt(rng: Rng, lo: number, hi: number): number {
  return lo + Math.floor(rng() * (hi - lo + 1));
}

export function choice<T>(rng: Rng, pool: readonly T[]): T {
  const picked = pool[randInt(rng, 0, pool.length - 1)];
  if (picked === undefined) {
    throw new Error("choice from empty pool");
  }
  return picked;
}

export const LABEL_POOL = [
  "nsubj",
  "obj",
  "det",
  "amod",
  "advmod",
  "case",
  "nmod",
  "obl",
] as const;

const WORD_POOL = [
  "the",
  "old",
  "cat",
  "dog",
  "bird",
  "sees",
  "chased",
  "finds",
  "under",
  "near",
  "slowly",
  "red",
] as const;

/**
 * Sample a random projective head vector (1-based heads, 0 = root) by walking
 * the legal moves of an arc-standard transition system until one stack
 * element survives. Every vector produced this way is a projective tree.
 */
export function arcStandardHeads(rng: Rng, n: number): number[] {
  if (n < 1) {
    throw new Error("need at least one word");
  }
  const heads = new Array<number>(n + 1).fill(0);
  const stack: number[] = [];
  let next = 1;
  while (next <= n || stack.length > 1) {
    const moves: string[] = [];
    if (next <= n) {
      moves.push("shift");
    }
    if (stack.length >= 2) {
      moves.push("left", "right");
    }
    const move = choice(rng, moves);
    if (move === "shift") {
      stack.push(next);
      next += 1;
    } else if (move === "left") {
      const dep = stack.splice(stack.length - 2, 1)[0]!;
      heads[dep] = stack[stack.length - 1]!;
    } else {
      const dep = stack.pop()!;
      heads[dep] = stack[stack.length - 1]!;
    }
  }
  heads[stack[0]!] = 0;
  return heads.slice(1);
}

export interface Sentence {
  heads: number[];
  deprels: string[];
  forms: string[];
}

/** Random projective sentence with labels and forms from fixed pools. */
export function randomSentence(rng: Rng, n: number): Sentence {
  const heads = arcStandardHeads(rng, n);
  return {
    heads,
    deprels: heads.map((h) => (h === 0 ? "root" : choice(rng, LABEL_POOL))),
    forms: heads.map(() => choice(rng, WORD_POOL)),
  };
}

/** Serialize sentences in the ten-column format the CLI reads and writes. */
export function conlluOf(sentences: Sentence[]): string {
  if (sentences.length === 0) {
    return "";
  }
  const blocks = sentences.map((s) =>
    s.heads
      .map((head, i) => `${i + 1}\t${s.forms[i]}\t_\t_\t_\t_\t${head}\t${s.deprels[i]}\t_\t_`)
      .join("\n"),
  );
  return blocks.join("\n\n") + "\n";
}

/** Fresh scratch directory plus a writer and a recursive cleaner. */
export function scratchDir(): {
  dir: string;
  write: (name: string, text: string) => string;
  cleanup: () => void;
} {
  const dir = mkdtempSync(join(tmpdir(), "hexaparse-client-"));
  return {
    dir,
    write(name: string, text: string): string {
      const path = join(dir, name);
      writeFileSync(path, text, "utf8");
      return path;
    },
    cleanup() {
      rmSync(dir, { recursive: true, force: true });
    },
  };
}

/** Run the installed CLI, returning stdout; non-zero exit raises. */
export function runCli(args: string[]): string {
  return execFileSync("hexaparse", args, { encoding: "utf8" });
}

export interface LiveServer {
  baseUrl: string;
  stop: () => Promise<void>;
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForExit(child: ChildProcess): Promise<void> {
  if (child.exitCode !== null || child.signalCode !== null) {
    return;
  }
  await new Promise<void>((resolve) => child.once("exit", () => resolve()));
}

/**
 * Start `hexaparse serve` on a free port and wait until /version answers.
 * Retries on a fresh port if the first pick is already taken.
 */
export async function startServer(): Promise<LiveServer> {
  let lastError = "";
  for (let attempt = 0; attempt < 5; attempt += 1) {
    const port = 18000 + Math.floor(Math.random() * 20000);
    const baseUrl = `http://127.0.0.1:${port}`;
    const child = spawn("hexaparse", ["serve", "--port", String(port)], {
      stdio: ["ignore", "ignore", "pipe"],
    });
    let stderr = "";
    child.stderr?.on("data", (chunk: Buffer) => {
      stderr += chunk.toString();
    });

    const deadline = Date.now() + 30_000;
    while (Date.now() < deadline && child.exitCode === null) {
      try {
        const response = await fetch(`${baseUrl}/version`);
        if (response.ok) {
          return {
            baseUrl,
            async stop() {
              child.kill("SIGTERM");
              await Promise.race([waitForExit(child), sleep(5_000)]);
              if (child.exitCode === null && child.signalCode === null) {
                child.kill("SIGKILL");
                await waitForExit(child);
              }
            },
          };
        }
      } catch {
        await sleep(100);
      }
    }
    child.kill("SIGKILL");
    await waitForExit(child);
    lastError = stderr || "timed out waiting for /version";
  }
  throw new Error(`could not start hexaparse serve: ${lastError}`);
}
