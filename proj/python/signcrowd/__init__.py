"""Python access to the signcrowd core: lifecycle, tracks, subtitles,
statistics, keypoint alignment, content addressing and the operator tool."""

import json

from . import _signcrowd
from ._signcrowd import (
    SigncrowdError,
    check_frame_alignment,
    content_key,
    events,
    expected_frame_count,
    replay,
    states,
    transition,
)

__all__ = [
    "Platform",
    "SigncrowdError",
    "check_frame_alignment",
    "compute_stats",
    "content_key",
    "error_code",
    "events",
    "expected_frame_count",
    "format_stats",
    "parse_srt",
    "render_srt",
    "replay",
    "run_cli",
    "states",
    "transition",
    "validate_track",
]


def error_code(err):
    """The E_* name carried by a SigncrowdError."""
    return err.args[0]


def validate_track(track, trim, reference, free_gloss_labels=False):
    """Issues as (code, index, detail) tuples; empty when the track is valid."""
    start, end = trim
    return _signcrowd.validate_track(json.dumps(track), start, end, reference, free_gloss_labels)


def render_srt(track, trim):
    start, end = trim
    return _signcrowd.render_srt(json.dumps(track), start, end)


def parse_srt(text, offset_ms=0):
    return json.loads(_signcrowd.parse_srt(text, offset_ms))


def compute_stats(manifest_jsonl):
    return json.loads(_signcrowd.compute_stats(manifest_jsonl))


def format_stats(manifest_jsonl):
    return _signcrowd.format_stats(manifest_jsonl)


def run_cli(*args):
    """Runs an operator command in-process; returns (exit_code, stdout, stderr)."""
    return tuple(_signcrowd.run_cli([str(a) for a in args]))


class Platform:
    """A deployment opened from its config file."""

    def __init__(self, config_path):
        self._impl = _signcrowd.Platform(str(config_path))

    def ingest_csv(self, text):
        return json.loads(self._impl.ingest_csv(text))

    def stats(self, language=None):
        return json.loads(self._impl.stats(language))

    def export_snapshot(self, out_dir, date="", language=None):
        return json.loads(self._impl.export_snapshot(str(out_dir), date, language))

    def register_user(self, username, password, language, roles=()):
        return json.loads(self._impl.register_user(username, password, language, list(roles)))

    def recording(self, recording_id):
        return json.loads(self._impl.recording(recording_id))

    def requeue(self, recording_id):
        return self._impl.requeue(recording_id)
