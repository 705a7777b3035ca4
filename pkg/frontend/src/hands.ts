/** Hand-openness from finger landmark curl.
 *
 * A hand counts as open when at least three fingertips lie farther from the
 * wrist than their own middle joints; a curled finger folds its tip back
 * toward the palm, so the tip-to-wrist distance drops below the joint's.
 */

export type Point2 = [number, number];

export interface FingerLandmarks {
  tip: Point2;
  middleJoint: Point2;
}

const OPEN_FINGER_MINIMUM = 3;

function dist(a: Point2, b: Point2): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

export function fingerExtended(wrist: Point2, finger: FingerLandmarks): boolean {
  return dist(finger.tip, wrist) > dist(finger.middleJoint, wrist);
}

export function handOpen(wrist: Point2, fingers: FingerLandmarks[]): boolean {
  const extended = fingers.filter((f) => fingerExtended(wrist, f)).length;
  return extended >= OPEN_FINGER_MINIMUM;
}
