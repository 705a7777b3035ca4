/** Map model-specific emotion labels onto the closed expression vocabulary
 * the pipeline accepts. Top-1 label only; confidence filtering is left to
 * the downstream frequency floor. */

import { EXPRESSIONS } from "./formats.js";
import { UnknownExpression } from "./errors.js";

export type Expression = (typeof EXPRESSIONS)[number];

const ALIASES: Record<string, Expression> = {
  fear: "fear",
  afraid: "fear",
  scared: "fear",
  neutral: "neutral",
  calm: "neutral",
  disgust: "disgust",
  disgusted: "disgust",
  sad: "sad",
  sadness: "sad",
  surprise: "surprise",
  surprised: "surprise",
  happy: "happy",
  happiness: "happy",
  joy: "happy",
  anger: "anger",
  angry: "anger",
};

export function mapExpression(label: string): Expression {
  const mapped = ALIASES[label.trim().toLowerCase()];
  if (!mapped) throw new UnknownExpression(`cannot map expression label '${label}'`);
  return mapped;
}
