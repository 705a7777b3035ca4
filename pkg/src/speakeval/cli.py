"""Command-line entry point: extract, assemble, evaluate, agree, run."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import agreement, llm_client, pipeline, rubric, segmenter
from .config import PipelineConfig, load_config
from .errors import (
    AuthError,
    ChannelLengthMismatch,
    NoOverlap,
    SpeakevalError,
)
from .ingest import load_human_scores, load_session, validate_session

log = logging.getLogger("speakeval")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FUSION = 3
EXIT_EVALUATION = 4
EXIT_AGREEMENT = 5


def _load_bundles(config: PipelineConfig):
    bundles = []
    for s in config.sessions:
        bundle = load_session(s.session_id, s.audio, s.transcript, s.landmarks)
        report = validate_session(bundle, gap_warning_s=config.tunables.gap_warning_s)
        for w in report.warnings:
            log.warning("%s: %s", s.session_id, w)
        if not report.ok:
            raise SpeakevalError(f"{s.session_id}: " + "; ".join(report.failures))
        bundles.append(bundle)
    return bundles


def _features_to_json(features: pipeline.SessionFeatures) -> str:
    def thresholds(t):
        return None if t is None else {"q1": t.q1, "q3": t.q3, "feature_name": t.feature_name}

    obj = {
        "session_id": features.session_id,
        "windows": [{"start_s": w.start_s, "end_s": w.end_s, "index": w.index}
                    for w in features.windows],
        "subframes": [
            [dataclasses.asdict(s) for s in per_window]
            for per_window in features.subframes_per_window
        ],
        "gestures": [
            {
                "axis": g.axis,
                "laterality": g.laterality,
                "spread": g.spread,
                "t_s": g.t_s,
                "area_px_s": g.area_px_s,
                "events": [dataclasses.asdict(e) for e in g.events],
            }
            for g in features.gestures
        ],
        "thresholds": {
            "pitch": thresholds(features.pitch_thresholds),
            "rms": thresholds(features.rms_thresholds),
            "intonation": thresholds(features.intonation_thresholds),
            "gesture_area_x": thresholds(features.area_thresholds.get("x")),
            "gesture_area_y": thresholds(features.area_thresholds.get("y")),
        },
    }
    return json.dumps(obj, indent=1, ensure_ascii=False)


def cmd_extract(config: PipelineConfig, dry_run: bool = False) -> int:
    bundles = _load_bundles(config)
    if dry_run:
        for b in bundles:
            log.info("%s: valid (%.1f s audio, %d words, %d frames)",
                     b.session_id, b.audio.duration_s, len(b.transcript), len(b.landmarks))
        return EXIT_OK
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    def one(bundle):
        features = pipeline.extract_features(bundle, config.tunables)
        (out / f"{bundle.session_id}.features.json").write_text(
            _features_to_json(features), encoding="utf-8")

    with ThreadPoolExecutor(max_workers=max(1, config.jobs)) as pool:
        list(pool.map(one, bundles))
    return EXIT_OK


def cmd_assemble(config: PipelineConfig) -> int:
    bundles = _load_bundles(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    def one(bundle):
        records = pipeline.assemble_session(bundle, tunables=config.tunables)
        (out / f"{bundle.session_id}.rich.txt").write_text(
            segmenter.render_session(records), encoding="utf-8")
        (out / f"{bundle.session_id}.rich.json").write_text(
            segmenter.records_to_json(records), encoding="utf-8")

    with ThreadPoolExecutor(max_workers=max(1, config.jobs)) as pool:
        list(pool.map(one, bundles))
    return EXIT_OK


def cmd_evaluate(config: PipelineConfig, rubric_ids=None, include_raw: bool = True) -> int:
    specs, defs = rubric.load_catalog(config.rubric_catalog or None)
    if rubric_ids:
        specs = [s for s in specs if s.id in rubric_ids]
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    results = []
    failures = []
    for provider in config.providers:
        dead = False
        for s in config.sessions:
            records_path = out / f"{s.session_id}.rich.json"
            records = segmenter.records_from_json(records_path.read_text(encoding="utf-8"))
            payloads = {m: rubric.select_payload(records, m) for m in rubric.MODALITIES}

            def one(spec):
                prompt = rubric.build_prompt(spec, defs, payloads[spec.modality])
                return llm_client.evaluate(prompt, provider,
                                           session_id=s.session_id, rubric_id=spec.id)

            with ThreadPoolExecutor(max_workers=provider.max_concurrency) as pool:
                futures = {pool.submit(one, spec): spec for spec in specs}
                for future, spec in futures.items():
                    try:
                        results.append(future.result())
                    except AuthError as e:
                        log.error("%s: auth failure, skipping provider: %s",
                                  provider.provider_id, e)
                        dead = True
                    except SpeakevalError as e:
                        log.error("%s/%s rubric %d: %s", provider.provider_id,
                                  s.session_id, spec.id, e)
                        failures.append((provider.provider_id, s.session_id, spec.id, str(e)))
            if dead:
                break

    lines = [llm_client.result_to_json(r, include_raw=include_raw) for r in results]
    (out / "results.jsonl").write_text("\n".join(lines) + ("\n" if lines else ""),
                                       encoding="utf-8")
    if failures:
        (out / "evaluation_failures.json").write_text(
            json.dumps([{"provider_id": p, "session_id": s, "rubric_id": r, "error": e}
                        for p, s, r, e in failures], indent=1), encoding="utf-8")
    return EXIT_OK if results else EXIT_EVALUATION


def cmd_agree(config: PipelineConfig, weighting=None) -> int:
    weighting = weighting or config.weighting
    out = Path(config.output_dir)
    results_path = out / "results.jsonl"
    results = [llm_client.result_from_json(line)
               for line in results_path.read_text(encoding="utf-8").splitlines() if line.strip()]
    human = load_human_scores(config.human_scores)
    if not results or not human.entries:
        log.error("no model results or no human scores")
        return EXIT_AGREEMENT

    providers = sorted({r.provider_id for r in results})
    reports = []
    for provider_id in providers:
        subset = [r for r in results if r.provider_id == provider_id]
        try:
            reports.append(agreement.build_report(subset, human.entries,
                                                  weighting=weighting,
                                                  provider_id=provider_id))
        except NoOverlap as e:
            log.error("%s: %s", provider_id, e)
    if not reports:
        return EXIT_AGREEMENT

    (out / "kappa_report.json").write_text(
        "[" + ",\n".join(agreement.report_to_json(r) for r in reports) + "]\n",
        encoding="utf-8")
    (out / "kappa_report.txt").write_text(
        "\n".join(agreement.report_to_text(r) for r in reports), encoding="utf-8")
    (out / "kappa_report.csv").write_text(
        "".join(agreement.report_to_csv(r) if i == 0
                else "".join(agreement.report_to_csv(r).splitlines(True)[1:])
                for i, r in enumerate(reports)),
        encoding="utf-8")
    for r in reports:
        sys.stdout.write(agreement.report_to_text(r))
    return EXIT_OK


def _parse_rubric_list(text):
    if not text:
        return None
    try:
        ids = sorted({int(tok) for tok in text.split(",") if tok.strip()})
    except ValueError:
        raise SpeakevalError(f"bad --rubrics list: {text!r}")
    if any(i < 1 or i > 12 for i in ids):
        raise SpeakevalError("--rubrics ids must be in 1..12")
    return ids


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="speakeval",
        description="Multi-modal public speaking assessment pipeline")
    parser.add_argument("--config", required=True, help="JSON pipeline config")
    parser.add_argument("--jobs", type=int, help="parallel sessions")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("extract", help="validate inputs and write feature files") \
        .add_argument("--dry-run", action="store_true")
    sub.add_parser("assemble", help="write rich-record text and JSON files")
    p_eval = sub.add_parser("evaluate", help="score records with LLM providers")
    p_eval.add_argument("--provider", help="restrict to one provider id")
    p_eval.add_argument("--rubrics", help="comma-separated rubric ids")
    p_eval.add_argument("--no-raw", action="store_true")
    p_agree = sub.add_parser("agree", help="weighted kappa vs human scores")
    p_agree.add_argument("--weighting", choices=("linear", "quadratic"))
    p_run = sub.add_parser("run", help="extract + assemble + evaluate + agree")
    p_run.add_argument("--provider", help="restrict to one provider id")
    p_run.add_argument("--rubrics", help="comma-separated rubric ids")
    p_run.add_argument("--no-raw", action="store_true")
    p_run.add_argument("--weighting", choices=("linear", "quadratic"))

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")

    try:
        config = load_config(args.config)
        if args.jobs:
            config.jobs = args.jobs
        provider_filter = getattr(args, "provider", None)
        if provider_filter:
            config.providers = [p for p in config.providers
                                if p.provider_id == provider_filter]
            if not config.providers:
                config.providers = [llm_client.ProviderConfig(provider_id=provider_filter)]
        rubric_ids = _parse_rubric_list(getattr(args, "rubrics", None))

        if args.command == "extract":
            return cmd_extract(config, dry_run=args.dry_run)
        if args.command == "assemble":
            try:
                return cmd_assemble(config)
            except ChannelLengthMismatch as e:
                log.error("fusion error: %s", e)
                return EXIT_FUSION
        if args.command == "evaluate":
            return cmd_evaluate(config, rubric_ids=rubric_ids,
                                include_raw=not args.no_raw)
        if args.command == "agree":
            return cmd_agree(config, weighting=args.weighting)
        if args.command == "run":
            code = cmd_extract(config)
            if code:
                return code
            try:
                code = cmd_assemble(config)
            except ChannelLengthMismatch as e:
                log.error("fusion error: %s", e)
                return EXIT_FUSION
            if code:
                return code
            code = cmd_evaluate(config, rubric_ids=rubric_ids,
                                include_raw=not args.no_raw)
            if code:
                return code
            return cmd_agree(config, weighting=args.weighting)
        parser.error(f"unknown command {args.command}")
    except ChannelLengthMismatch as e:
        log.error("fusion error: %s", e)
        return EXIT_FUSION
    except (SpeakevalError, OSError) as e:
        log.error("%s", e)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
