// Domain types for payloads the server sends, as the client consumes them.

export interface Member {
  id: string;
  name: string;
}

export interface Span {
  start: number;
  end: number;
}

export interface ArgumentPick {
  strategy: string;
  reasons: string[];
  span: Span | null;
  freetext: string | null;
}

export interface TaskCard {
  strategy: string;
  value: number;
  strategy_rerolls: number;
  value_rerolls: number;
  score: number;
}

export interface RevealedTask {
  strategy: string;
  value: number;
}

export interface ConfigSummary {
  path_length: number;
  point_values: number[];
  strategy_reroll_cost: number;
  value_reroll_cost: number;
  discussion_message_limit: number;
  discussion_time_limit_s: number;
  unanimity_bonus: number;
  off_task_award: number;
  convince_bonus: number;
  taxonomies: Record<string, string[]>;
}

export interface TextState {
  textId: string;
  title: string;
  sentences: string[];
  targetIndex: number;
}

export interface ScoreSummary {
  stage: "first_vote" | "revote";
  outcome: string | null;
  accepted: string[];
  deltas: Record<string, number>;
  totals: Record<string, number>;
  task: RevealedTask | null;
  acceptancePoints: Record<string, number> | null;
  convincePoints: Record<string, number> | null;
  revotes: Record<string, string[]> | null;
}

export interface ChatMessage {
  sender: string;
  senderName: string;
  scope: string;
  text: string;
  remaining: number | null;
}

export interface DiceOutcome {
  player: string;
  dice: number[];
  total: number;
}

export interface EventOutcome {
  player: string;
  kind: string;
  amount: number;
  powerGranted: boolean;
}

/** The five strategies a task card can name. */
export const TASK_STRATEGIES = [
  "bridging",
  "comprehension_monitoring",
  "elaboration",
  "paraphrasing",
  "prediction",
] as const;

/** Everything a vote may name: the five tasks plus the escape hatch. */
export const VOTE_STRATEGIES = [...TASK_STRATEGIES, "other"] as const;

export const STRATEGY_LABELS: Record<string, string> = {
  bridging: "Bridging",
  comprehension_monitoring: "Comprehension Monitoring",
  elaboration: "Elaboration",
  paraphrasing: "Paraphrasing",
  prediction: "Prediction",
  other: "Other",
};

export function strategyLabel(value: string): string {
  return STRATEGY_LABELS[value] ?? value;
}
