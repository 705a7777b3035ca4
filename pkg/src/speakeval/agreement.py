"""Weighted Cohen's kappa between model and human ratings, with band labels.

Scores are ordinal 0-4 (5 categories). Disagreement weights are
|i-j|/(k-1) (linear) or ((i-j)/(k-1))^2 (quadratic) and
kappa = 1 - sum(W*O) / sum(W*E) with E from the marginal products.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InsufficientPairs, NoOverlap, OutOfDomain, OutOfRangeScore

CATEGORY_COUNT = 5


@dataclass
class RatingPairs:
    rubric_id: int
    pairs: list  # of (rater_a, rater_b)


@dataclass
class RubricAgreement:
    kappa: float
    n: int
    band: str
    degenerate: bool = False


@dataclass
class KappaReport:
    provider_id: str
    weighting: str
    per_rubric: dict  # rubric_id -> RubricAgreement
    mean_kappa: float
    excluded_sessions: list = field(default_factory=list)


def _weight_matrix(weighting: str) -> np.ndarray:
    i = np.arange(CATEGORY_COUNT)[:, None]
    j = np.arange(CATEGORY_COUNT)[None, :]
    if weighting == "linear":
        return np.abs(i - j) / (CATEGORY_COUNT - 1)
    if weighting == "quadratic":
        return ((i - j) / (CATEGORY_COUNT - 1)) ** 2
    raise ValueError(f"unknown weighting '{weighting}'")


def weighted_kappa(pairs: Sequence, weighting: str = "quadratic") -> float:
    """Weighted Cohen's kappa over (rater_a, rater_b) score pairs."""
    if len(pairs) < 2:
        raise InsufficientPairs(f"need >= 2 pairs, got {len(pairs)}")
    for a, b in pairs:
        if a not in range(CATEGORY_COUNT) or b not in range(CATEGORY_COUNT):
            raise OutOfRangeScore(f"pair ({a}, {b}) outside 0..4")

    observed = np.zeros((CATEGORY_COUNT, CATEGORY_COUNT))
    for a, b in pairs:
        observed[a, b] += 1
    observed /= len(pairs)
    expected = np.outer(observed.sum(axis=1), observed.sum(axis=0))
    weights = _weight_matrix(weighting)
    denom = float(np.sum(weights * expected))
    if denom == 0.0:
        # both raters constant and equal: agreement is trivially perfect
        return 1.0
    return 1.0 - float(np.sum(weights * observed)) / denom


def is_degenerate(pairs: Sequence) -> bool:
    a_values = {a for a, _ in pairs}
    b_values = {b for _, b in pairs}
    return len(a_values) == 1 and a_values == b_values


def interpret_kappa(kappa: float) -> str:
    """Map kappa to the agreement band vocabulary (contiguous half-open intervals)."""
    if not -1.0 <= kappa <= 1.0:
        raise OutOfDomain(f"kappa {kappa} outside [-1, 1]")
    if kappa == 1.0:
        return "Perfect agreement"
    if kappa <= 0.0:
        return "No agreement"
    if kappa <= 0.20:
        return "Slight agreement"
    if kappa <= 0.40:
        return "Fair agreement"
    if kappa <= 0.60:
        return "Moderate agreement"
    if kappa <= 0.80:
        return "Substantial agreement"
    return "Near perfect agreement"


def build_report(model_scores: Sequence, human_entries: dict,
                 weighting: str = "quadratic", provider_id: str = "") -> KappaReport:
    """Per-rubric kappa of model vs human, matched on (session_id, rubric_id)."""
    by_rubric = {}
    excluded = set()
    matched_any = False
    for r in model_scores:
        key = (r.session_id, r.rubric_id)
        if key in human_entries:
            by_rubric.setdefault(r.rubric_id, []).append((r.score, human_entries[key]))
            matched_any = True
        else:
            excluded.add(r.session_id)
    if not matched_any:
        raise NoOverlap("no (session, rubric) pair scored by both model and human")

    per_rubric = {}
    kappas = []
    for rubric_id in sorted(by_rubric):
        pairs = by_rubric[rubric_id]
        if len(pairs) < 2:
            continue
        kappa = weighted_kappa(pairs, weighting)
        per_rubric[rubric_id] = RubricAgreement(
            kappa=kappa, n=len(pairs), band=interpret_kappa(kappa),
            degenerate=is_degenerate(pairs))
        kappas.append(kappa)
    if not kappas:
        raise NoOverlap("no rubric with >= 2 matched pairs")
    return KappaReport(
        provider_id=provider_id,
        weighting=weighting,
        per_rubric=per_rubric,
        mean_kappa=float(np.mean(kappas)),
        excluded_sessions=sorted(excluded),
    )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def report_to_json(report: KappaReport) -> str:
    obj = {
        "provider_id": report.provider_id,
        "weighting": report.weighting,
        "mean_kappa": report.mean_kappa,
        "excluded_sessions": report.excluded_sessions,
        "per_rubric": {
            str(rid): {"kappa": ra.kappa, "n": ra.n, "band": ra.band,
                       "degenerate": ra.degenerate}
            for rid, ra in report.per_rubric.items()
        },
    }
    return json.dumps(obj, indent=1, ensure_ascii=False)


def report_to_text(report: KappaReport) -> str:
    lines = [
        f"Provider: {report.provider_id}   Weighting: {report.weighting}",
        f"{'Rubric':>6}  {'n':>4}  {'Kappa':>8}  Band",
    ]
    for rid in sorted(report.per_rubric):
        ra = report.per_rubric[rid]
        lines.append(f"{rid:>6}  {ra.n:>4}  {ra.kappa:>8.3f}  {ra.band}")
    lines.append(f"  Mean        {report.mean_kappa:>8.3f}  {interpret_kappa(max(-1.0, min(1.0, report.mean_kappa)))}")
    if report.excluded_sessions:
        lines.append("Excluded sessions: " + ", ".join(report.excluded_sessions))
    return "\n".join(lines) + "\n"


def report_to_csv(report: KappaReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["provider_id", "rubric_id", "n", "kappa", "band"])
    for rid in sorted(report.per_rubric):
        ra = report.per_rubric[rid]
        writer.writerow([report.provider_id, rid, ra.n, f"{ra.kappa:.6f}", ra.band])
    return buf.getvalue()
