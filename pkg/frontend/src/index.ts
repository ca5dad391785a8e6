/**
 * Typed HTTP client for the hexaparse service.
 *
 * The service linearizes projective dependency trees into tag sequences
 * (two terminal tag kinds, four nonterminal kinds), decodes per-word score
 * tables back into trees with an exact Viterbi search, and checks tag
 * sequences against the stack-depth validity automaton. This client exposes
 * exactly those operations: `encode`, `decode`, `isValid`, and `version`.
 *
 * Score tables are validated locally before anything crosses the wire, so
 * malformed shapes fail fast with a `ServiceError` carrying no HTTP status.
 */

export type BinarizationOrder = "left" | "right";

export interface EncodeOptions {
  /** Arc labels, parallel to `heads`; required when `labeled` is set. */
  deprels?: string[];
  /** Which side's dependents bind closer to the head word (default "left"). */
  order?: BinarizationOrder;
  /** Emit `tl/<label>` terminals instead of bare `tl`/`tr`. */
  labeled?: boolean;
}

export interface ScoreInput {
  /** n × W log-score rows, one per word; W is the terminal tag count. */
  terminalScores: number[][];
  /** (n−1) × 4 log-score rows in tag order LL, LR, RL, RR. */
  nonterminalScores: number[][];
  /** Surface forms to thread through to the decoded tree. */
  tokens?: string[];
  /** Deprel inventory; its sorted, deduplicated form fixes W = 2·|labels|. */
  labels?: string[];
  /** Stack-depth cap for the decoder (≥ 1); omit for exact search. */
  maxDepth?: number;
}

export interface DecodedTree {
  heads: number[];
  deprels: string[];
  tags: string[];
  logScore: number;
}

export interface Validity {
  valid: boolean;
  reason: string | null;
  /** Stack depth after each accepted tag (stops at the offending one). */
  depthProfile: number[];
}

export interface VersionInfo {
  name: string;
  version: string;
}

export interface HexaparseClient {
  /** Tag sequence for a projective head vector (1-based heads, 0 = root). */
  encode(heads: number[], options?: EncodeOptions): Promise<string[]>;
  /** Highest-scoring tree under a score table. */
  decode(input: ScoreInput): Promise<DecodedTree>;
  /** Run the validity automaton over serialized tags. */
  isValid(tags: string[], maxDepth?: number): Promise<Validity>;
  /** Service identity and version. */
  version(): Promise<VersionInfo>;
}

/** Error raised for rejected requests — locally (no `status`) or by the service. */
export class ServiceError extends Error {
  /** HTTP status when the service rejected the request. */
  readonly status?: number;
  /** Crossing arc pair [[lo, hi], [lo, hi]] for non-projective input. */
  readonly crossingArcs?: [number, number][];

  constructor(message: string, status?: number, crossingArcs?: [number, number][]) {
    super(message);
    this.name = "ServiceError";
    this.status = status;
    this.crossingArcs = crossingArcs;
  }
}

function isFiniteMatrix(rows: number[][], width: number): boolean {
  return rows.every(
    (row) => Array.isArray(row) && row.length === width && row.every(Number.isFinite),
  );
}

function checkScoreInput(input: ScoreInput): void {
  const n = input.terminalScores.length;
  if (n < 1) {
    throw new ServiceError("terminalScores must have at least one row");
  }
  const width = input.labels === undefined ? 2 : 2 * new Set(input.labels).size;
  if (width < 2) {
    throw new ServiceError("labels must be non-empty when provided");
  }
  if (!isFiniteMatrix(input.terminalScores, width)) {
    throw new ServiceError(`terminalScores rows must each hold ${width} finite numbers`);
  }
  if (input.nonterminalScores.length !== n - 1 || !isFiniteMatrix(input.nonterminalScores, 4)) {
    throw new ServiceError(`nonterminalScores must be a ${n - 1} × 4 matrix of finite numbers`);
  }
  if (input.tokens !== undefined && input.tokens.length !== n) {
    throw new ServiceError(`got ${input.tokens.length} tokens for ${n} score rows`);
  }
  if (input.maxDepth !== undefined && (!Number.isInteger(input.maxDepth) || input.maxDepth < 1)) {
    throw new ServiceError(`maxDepth must be a positive integer, got ${input.maxDepth}`);
  }
}

function errorFromDetail(status: number, detail: unknown): ServiceError {
  if (typeof detail === "string") {
    return new ServiceError(detail, status);
  }
  if (detail !== null && typeof detail === "object" && "message" in detail) {
    const body = detail as { message: string; crossing_arcs?: [number, number][] };
    return new ServiceError(body.message, status, body.crossing_arcs);
  }
  return new ServiceError(`request failed with status ${status}`, status);
}

async function request<T>(baseUrl: string, path: string, body?: unknown): Promise<T> {
  const url = new URL(path, baseUrl);
  const response = await fetch(url, {
    method: body === undefined ? "GET" : "POST",
    headers: body === undefined ? undefined : { "content-type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  if (!response.ok) {
    let detail: unknown;
    try {
      detail = ((await response.json()) as { detail?: unknown }).detail;
    } catch {
      detail = undefined;
    }
    throw errorFromDetail(response.status, detail);
  }
  return (await response.json()) as T;
}

/** Client bound to one service instance, e.g. `createClient("http://127.0.0.1:8000")`. */
export function createClient(baseUrl: string): HexaparseClient {
  return {
    async encode(heads, options = {}) {
      const { tags } = await request<{ tags: string[] }>(baseUrl, "/encode", {
        heads,
        deprels: options.deprels,
        order: options.order ?? "left",
        labeled: options.labeled ?? false,
      });
      return tags;
    },

    async decode(input) {
      checkScoreInput(input);
      const payload = await request<{
        heads: number[];
        deprels: string[];
        tags: string[];
        log_score: number;
      }>(baseUrl, "/decode", {
        terminal_scores: input.terminalScores,
        nonterminal_scores: input.nonterminalScores,
        tokens: input.tokens,
        labels: input.labels,
        max_depth: input.maxDepth,
      });
      return {
        heads: payload.heads,
        deprels: payload.deprels,
        tags: payload.tags,
        logScore: payload.log_score,
      };
    },

    async isValid(tags, maxDepth) {
      const payload = await request<{
        valid: boolean;
        reason?: string | null;
        depth_profile?: number[] | null;
      }>(baseUrl, "/validate", { tags, max_depth: maxDepth });
      return {
        valid: payload.valid,
        reason: payload.reason ?? null,
        depthProfile: payload.depth_profile ?? [],
      };
    },

    version() {
      return request<VersionInfo>(baseUrl, "/version");
    },
  };
}
