import hashlib
import json
import os
from pathlib import Path

import pytest

import signcrowd

DATA = Path(os.environ.get("SIGNCROWD_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))

FOUR = "আমি আগামীকাল বেড়াতে যাবো"


def four_glosses():
    return {
        "kind": "gloss",
        "recording_id": "r",
        "annotator_id": "a",
        "segments": [
            {"start_ms": 500, "end_ms": 1500, "text": "আমি"},
            {"start_ms": 1600, "end_ms": 2600, "text": "আগামীকাল"},
            {"start_ms": 2700, "end_ms": 3600, "text": "বেড়াতে"},
            {"start_ms": 3700, "end_ms": 4500, "text": "যাবো"},
        ],
    }


def test_lifecycle():
    assert len(signcrowd.states()) == 5
    assert len(signcrowd.events()) == 7
    legal = 0
    for s in signcrowd.states():
        for e in signcrowd.events():
            try:
                signcrowd.transition(s, e)
                legal += 1
            except signcrowd.SigncrowdError as err:
                assert signcrowd.error_code(err) == "E_ILLEGAL_TRANSITION"
    assert legal == 6
    log = ["VideoSubmitted", "VideoVerdictCorrect", "AnnotationSubmitted", "AnnotationVerdictAccepted"]
    assert signcrowd.replay(log) == "AnnotationValidated"


def test_tracks_and_subtitles():
    track = four_glosses()
    assert signcrowd.validate_track(track, (0, 5000), FOUR) == []
    track["segments"][2]["start_ms"] = 2500
    issues = signcrowd.validate_track(track, (0, 5000), FOUR)
    assert issues[0][0] == "E_OVERLAP"

    srt = signcrowd.render_srt(four_glosses(), (500, 4600))
    assert srt == (DATA / "srt" / "four_glosses.srt").read_text(encoding="utf-8")
    assert signcrowd.parse_srt(srt, 500) == four_glosses()["segments"]


def manifest_entry(rid, content_type, content, trim, script=None):
    return {
        "recording_id": rid,
        "signer": "s-0",
        "language": "bn-BdSL",
        "prompt": {"content": content, "content_type": content_type},
        "script": script,
        "demographics": {"gender": None, "age_band": None, "locality": None},
        "meta": {
            "lighting": "indoor",
            "camera_view": "front",
            "resolution": {"width": 1280, "height": 720},
            "duration_ms": trim[1] + 1000,
            "fps": {"num": 30, "den": 1},
            "container": "webm",
        },
        "trim": {"start_ms": trim[0], "end_ms": trim[1]},
        "video": {"key": "videos/" + "0" * 64 + ".webm", "path": "videos/" + rid + ".webm"},
        "subtitles": {},
        "keypoints": {"key": None, "path": None},
        "license": "CC BY-NC-SA 4.0",
    }


def test_stats_and_keypoints():
    entries = [
        manifest_entry("a", "text", "এক দুই তিন চার পাঁচ", (0, 10000)),
        manifest_entry("b", "topic", "বিষয়", (2000, 18000), script="এক দুই তিন। চার পাঁচ ছয়। সাত আট নয়।"),
    ]
    manifest = "".join(json.dumps(e, ensure_ascii=False) + "\n" for e in entries)
    stats = signcrowd.compute_stats(manifest)
    assert stats["recording_count"] == 2
    assert stats["total_words"] == 14
    assert stats["unique_words"] == 9
    assert stats["avg_duration_s"] == pytest.approx(13.0)
    assert "avg_words_per_recording: 7.000" in signcrowd.format_stats(manifest)

    assert signcrowd.expected_frame_count(13374, 30, 1) == 401
    for n in range(395, 408):
        try:
            signcrowd.check_frame_alignment(n, 13374, 30, 1)
            accepted = True
        except signcrowd.SigncrowdError as err:
            assert signcrowd.error_code(err) == "E_FRAME_MISMATCH"
            accepted = False
        assert accepted == (400 <= n <= 402)


def test_content_key():
    assert signcrowd.content_key(b"", ".webm") == "videos/" + hashlib.sha256(b"").hexdigest() + ".webm"
    assert signcrowd.content_key(b"abc", ".mp4") == "videos/" + hashlib.sha256(b"abc").hexdigest() + ".mp4"


def test_platform_and_cli(tmp_path):
    config = tmp_path / "site.conf"
    config.write_text(
        "language = bn-BdSL | Bangla\ndatabase = db.sqlite\nstorage.root = objects\n"
        "pseudonym_secret = py-secret\n",
        encoding="utf-8",
    )
    code, out, _ = signcrowd.run_cli("--config", config, "ingest", DATA / "csv" / "basic.csv")
    assert code == 1  # en-ASL rows are not configured here
    assert "accepted: 3" in out

    platform = signcrowd.Platform(config)
    report = platform.ingest_csv("content,content_type,language\nনতুন বাক্য,text,bn-BdSL\n")
    assert report["accepted"] == 1
    user = platform.register_user("operator1", "long-password", "bn-BdSL", ["admin"])
    assert user["username"] == "operator1"
    with pytest.raises(signcrowd.SigncrowdError) as err:
        platform.register_user("operator1", "long-password", "bn-BdSL")
    assert signcrowd.error_code(err.value) == "E_CONFLICT"

    assert platform.stats()["recording_count"] == 0
    export = platform.export_snapshot(tmp_path / "out", "2026-01-01")
    assert export["empty"] is True
    assert Path(export["snapshot_dir"], "manifest.jsonl").exists()

    code, out, err = signcrowd.run_cli("--config", config, "stats")
    assert code == 0
    assert out.startswith("recording_count: 0\n")
    assert signcrowd.run_cli("stats")[0] == 2
