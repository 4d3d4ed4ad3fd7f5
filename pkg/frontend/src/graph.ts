/**
 * Turn an explanation document into a drawable graph model.
 *
 * Pure and deterministic: node ids follow the tree's pre-order walk, leaf
 * x positions are assigned left to right, parents sit centered over their
 * children. Counter-arguments from the attack log hang below the tree and
 * point at its root with red edges (the wire format does not say which
 * inner node they hit).
 */

import {
  type Attack,
  type ExplanationDoc,
  type TreeNode,
  explanationDocSchema,
  parseWith,
} from "./schema.js";

export interface GraphNode {
  id: string;
  label: string;
  sublabel: string;
  kind: "rule" | "fact" | "hypothesis" | "builtin" | "counter";
  dashed: boolean;
  x: number;
  y: number;
}

export interface GraphEdge {
  from: string;
  to: string;
  kind: "support" | "defeat";
  color: "black" | "red";
  label: string;
}

export interface GraphModel {
  nodes: GraphNode[];
  edges: GraphEdge[];
  width: number;
  height: number;
}

const COL = 190;
const ROW = 80;
const MARGIN = 30;

function sublabelOf(node: TreeNode): string {
  if (node.kind === "hypothesis") return "hypothesis";
  if (node.kind === "builtin") return "built-in";
  return node.ruleId ?? "";
}

function attackLabel(attack: Attack): string {
  return attack.preferences.length
    ? attack.preferences.join(", ")
    : attack.verdict;
}

export function renderAnswerGraph(doc: unknown): GraphModel {
  const parsed: ExplanationDoc = parseWith(
    explanationDocSchema,
    doc,
    "explanation document",
  );

  const nodes: GraphNode[] = [];
  const edges: GraphEdge[] = [];
  let nextLeafX = 0;
  let maxDepth = 0;

  // pre-order ids, post-order x placement
  const place = (node: TreeNode, depth: number): GraphNode => {
    const id = `n${nodes.length}`;
    maxDepth = Math.max(maxDepth, depth);
    const mine: GraphNode = {
      id,
      label: node.literal,
      sublabel: sublabelOf(node),
      kind: node.kind,
      dashed: node.kind === "hypothesis",
      x: 0,
      y: MARGIN + depth * ROW,
    };
    nodes.push(mine);
    if (node.children.length === 0) {
      mine.x = MARGIN + nextLeafX * COL;
      nextLeafX += 1;
      return mine;
    }
    const placed = node.children.map((child) => {
      const childNode = place(child, depth + 1);
      edges.push({
        from: mine.id,
        to: childNode.id,
        kind: "support",
        color: "black",
        label: "",
      });
      return childNode;
    });
    const first = placed[0]!;
    const last = placed[placed.length - 1]!;
    mine.x = (first.x + last.x) / 2;
    return mine;
  };

  place(parsed.tree, 0);

  const counterY = MARGIN + (maxDepth + 1) * ROW;
  parsed.attacks.forEach((attack, i) => {
    const id = `c${i}`;
    nodes.push({
      id,
      label: attack.counterRoot,
      sublabel: "counter-argument",
      kind: "counter",
      dashed: false,
      x: MARGIN + i * COL,
      y: counterY,
    });
    edges.push({
      from: id,
      to: "n0",
      kind: "defeat",
      color: "red",
      label: attackLabel(attack),
    });
  });

  const width = Math.max(nextLeafX, parsed.attacks.length) * COL + MARGIN;
  const height =
    counterY + (parsed.attacks.length ? ROW : 0) + MARGIN;
  return { nodes, edges, width, height };
}

export function treeNodeCount(tree: TreeNode): number {
  return 1 + tree.children.reduce((n, child) => n + treeNodeCount(child), 0);
}
