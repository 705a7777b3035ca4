import json

import pytest

from speakeval import rubric, segmenter
from speakeval.errors import CatalogCorrupt, ModalityMismatch
from speakeval.gesture import NonverbalSegmentSummary
from speakeval.prosody import VocalLabelTrack

VOCAL_KEYS = ("pitch", "loudness", "speech_rate", "intonation_pattern")
NONVERBAL_KEYS = ("posture", "pose", "face_expression", "horizontal_gesture",
                  "vertical_gesture", "hand_configuration")


@pytest.fixture(scope="module")
def catalog():
    return rubric.load_catalog()


@pytest.fixture
def records():
    window = segmenter.SegmentWindow(start_s=70.0, end_s=80.0, index=0)
    vocal = VocalLabelTrack(pitch_labels=["Normal"] * 10,
                            loudness_labels=["High"] * 10,
                            intonation_labels=["Low"] * 10,
                            speech_rate_text="144.00 words per minute")
    nonverbal = NonverbalSegmentSummary(
        posture_labels=["Upright"],
        pose_labels=["Open Pose (Arms Uncrossed)"],
        horizontal_gesture=["high wide unified gesture towards the right"],
        vertical_gesture=["normal unilateral down or up gesture"],
        hand_configuration=["Left hand: open, Right hand: open",
                            "Hands on top of each other: No"],
        face_expression=["neutral"],
    )
    return [segmenter.assemble_record(window, "Now, we try to evaluate", vocal, nonverbal)]


class TestCatalog:
    def test_twelve_rubrics(self, catalog):
        specs, _ = catalog
        assert len(specs) == 12
        assert [s.id for s in specs] == list(range(1, 13))

    def test_rubric9_descriptors(self, catalog):
        specs, _ = catalog
        nine = specs[8]
        assert nine.name == "Vocal Expression"
        assert "Excellent modulation" in nine.levels[4]

    def test_modalities(self, catalog):
        specs, _ = catalog
        assert all(specs[i - 1].modality == "text_only" for i in range(1, 9))
        assert specs[8].modality == "text_vocal"
        assert specs[9].modality == "text_nonverbal"
        assert specs[10].modality == "full"
        assert specs[11].modality == "full"

    def test_new_criteria_present(self, catalog):
        specs, _ = catalog
        assert specs[10].name == "Dynamic Emphasis"
        assert "Strategic vocal/physical emphasis" in specs[10].levels[4]
        assert specs[11].name == "Emotional Resonance"
        assert "alignment enhances authenticity" in specs[11].levels[4]

    def test_wrong_count_rejected(self, tmp_path, catalog):
        specs, _ = catalog
        data = [{"id": s.id, "name": s.name, "modality": s.modality,
                 "levels": {str(k): v for k, v in s.levels.items()}} for s in specs[:11]]
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(data))
        with pytest.raises(CatalogCorrupt):
            rubric.load_catalog(rubric_path=p)

    def test_missing_level_rejected(self, tmp_path, catalog):
        specs, _ = catalog
        data = [{"id": s.id, "name": s.name, "modality": s.modality,
                 "levels": {str(k): v for k, v in s.levels.items()}} for s in specs]
        del data[4]["levels"]["2"]
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(data))
        with pytest.raises(CatalogCorrupt):
            rubric.load_catalog(rubric_path=p)

    def test_cue_definitions_cover_expression_mapping(self, catalog):
        _, defs = catalog
        expr = [e for e in defs.entries if e["name"] == "Expression"]
        assert expr and "Anxiety/Stress (Fear)" in expr[0]["physiological_response"]


class TestSelectPayload:
    def test_text_only(self, records):
        payload = rubric.select_payload(records, "text_only")
        assert '"transcript"' in payload.rich_data_text
        for key in VOCAL_KEYS + NONVERBAL_KEYS:
            assert f'"{key}"' not in payload.rich_data_text

    def test_text_vocal(self, records):
        payload = rubric.select_payload(records, "text_vocal")
        assert '"speech_rate"' in payload.rich_data_text
        for key in NONVERBAL_KEYS:
            assert f'"{key}"' not in payload.rich_data_text

    def test_text_nonverbal(self, records):
        payload = rubric.select_payload(records, "text_nonverbal")
        assert '"posture"' in payload.rich_data_text
        for key in VOCAL_KEYS:
            assert f'"{key}"' not in payload.rich_data_text

    def test_full_has_all_keys(self, records):
        payload = rubric.select_payload(records, "full")
        for key in segmenter.RECORD_KEYS:
            assert f'"{key}"' in payload.rich_data_text

    def test_permitted_fields_lossless(self, records):
        payload = rubric.select_payload(records, "full")
        body = json.loads(payload.rich_data_text.split('"secs"]: ', 1)[1])
        assert body == records[0].payload()

    def test_header_retained(self, records):
        payload = rubric.select_payload(records, "text_only")
        assert payload.rich_data_text.startswith('[70.0 - 80.0 "secs"]: ')


class TestBuildPrompt:
    def test_rubric9_prompt(self, catalog, records):
        specs, defs = catalog
        payload = rubric.select_payload(records, "text_vocal")
        prompt = rubric.build_prompt(specs[8], defs, payload)
        assert "You are an expert evaluator." in prompt
        assert '"Vocal Expression"' in prompt
        assert "- Advanced (4): Excellent modulation, clear enunciation, engaging" in prompt
        assert "Pitch" in prompt and "Posture" not in prompt.split("Data:")[0]
        assert '"score": an integer from 0 to 4' in prompt

    def test_text_only_prompt_has_no_definitions(self, catalog, records):
        specs, defs = catalog
        payload = rubric.select_payload(records, "text_only")
        prompt = rubric.build_prompt(specs[0], defs, payload)
        assert "Use the following definitions" not in prompt

    def test_modality_mismatch(self, catalog, records):
        specs, defs = catalog
        payload = rubric.select_payload(records, "text_only")
        with pytest.raises(ModalityMismatch):
            rubric.build_prompt(specs[11], defs, payload)

    def test_exactly_one_rubric_per_prompt(self, catalog, records):
        specs, defs = catalog
        for spec in specs:
            payload = rubric.select_payload(records, spec.modality)
            prompt = rubric.build_prompt(spec, defs, payload)
            assert prompt.count("Advanced (4)") == 1

    def test_deterministic(self, catalog, records):
        specs, defs = catalog
        payload = rubric.select_payload(records, "full")
        assert rubric.build_prompt(specs[11], defs, payload) == \
            rubric.build_prompt(specs[11], defs, payload)
