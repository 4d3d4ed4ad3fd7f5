/**
 * The service's wire contract, as zod schemas.
 *
 * Everything the client consumes is validated at the boundary; the rest of
 * the code works with the inferred types and never re-checks shapes. A
 * document that fails validation raises SchemaMismatchError, which the
 * shell turns into a banner instead of rendering stale or garbled state.
 */

import { z } from "zod";

export const EXPLANATION_SCHEMA = "abr-explanation/1";

const treeNodeBase = z.object({
  literal: z.string(),
  kind: z.enum(["rule", "fact", "hypothesis", "builtin"]),
  ruleId: z.string().optional(),
});

export type TreeNode = z.infer<typeof treeNodeBase> & { children: TreeNode[] };

export const treeNodeSchema: z.ZodType<TreeNode> = treeNodeBase.extend({
  children: z.lazy(() => treeNodeSchema.array()),
});

export const attackSchema = z.object({
  counterRoot: z.string(),
  verdict: z.enum(["aStrictlyDefeatsB", "bStrictlyDefeatsA", "mutualAttack"]),
  preferences: z.string().array(),
});

export const hintSchema = z.object({
  kind: z.enum(["hypothesis", "missingPremise"]),
  enablingRule: z.string(),
  missing: z.string().array().nonempty(),
  wouldConclude: z.string(),
});

export const answerStatusSchema = z.enum([
  "sceptical",
  "credulous",
  "notSupported",
]);

export const explanationDocSchema = z.object({
  schema: z.literal(EXPLANATION_SCHEMA),
  goal: z.string(),
  binding: z.record(z.string()),
  status: answerStatusSchema,
  tree: treeNodeSchema,
  hypotheses: z.string().array(),
  attacks: attackSchema.array(),
  hints: hintSchema.array().optional(),
});

export const queryResponseSchema = z.object({
  qid: z.string(),
  goal: z.string(),
  watermark: z.number().int(),
  config: z.record(z.unknown()),
  answers: explanationDocSchema.array(),
  hints: hintSchema.array(),
});

export const evidenceRowSchema = z.object({
  seq: z.number().int(),
  op: z.enum(["assert", "retract"]),
  fact: z.string(),
  ts: z.number(),
  target: z.number().int().optional(),
});

export const sessionDocSchema = z.object({
  sessionId: z.string(),
  baseScenario: z.string().nullable(),
  evidenceLog: evidenceRowSchema.array(),
  activeFacts: z.string().array(),
  queryHistory: z
    .object({
      qid: z.string(),
      goal: z.string(),
      ts: z.number(),
      digest: z.string(),
    })
    .array(),
});

export const inputErrorSchema = z.object({
  error: z.enum(["parseError", "badFact"]),
  message: z.string(),
  line: z.number().int(),
  col: z.number().int(),
});

export const scenarioListSchema = z.object({
  scenarios: z
    .object({
      name: z.string(),
      notes: z.string(),
      evidenceFacts: z.string().array(),
    })
    .array(),
});

export type ExplanationDoc = z.infer<typeof explanationDocSchema>;
export type QueryResponse = z.infer<typeof queryResponseSchema>;
export type SessionDoc = z.infer<typeof sessionDocSchema>;
export type Hint = z.infer<typeof hintSchema>;
export type Attack = z.infer<typeof attackSchema>;
export type InputError = z.infer<typeof inputErrorSchema>;
export type ScenarioList = z.infer<typeof scenarioListSchema>;
export type AnswerStatus = z.infer<typeof answerStatusSchema>;

export class SchemaMismatchError extends Error {
  readonly issues: string[];

  constructor(what: string, issues: string[]) {
    super(`${what} does not match the expected schema: ${issues.join("; ")}`);
    this.name = "SchemaMismatchError";
    this.issues = issues;
  }
}

export function parseWith<T>(
  schema: z.ZodType<T>,
  value: unknown,
  what: string,
): T {
  const result = schema.safeParse(value);
  if (!result.success) {
    const issues = result.error.issues.map(
      (issue) => `${issue.path.join(".") || "<root>"}: ${issue.message}`,
    );
    throw new SchemaMismatchError(what, issues);
  }
  return result.data;
}
