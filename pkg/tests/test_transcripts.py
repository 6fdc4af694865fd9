"""Recorded transcript freshness: replaying every "in" line against a fresh
mock app must reproduce every "out" line byte for byte. Keeps the recorded
fixtures honest for any other protocol implementation tested against them."""

import json
import pathlib

import pytest

from spoofkit.mockdev import MockApp, config_from_doc

TRANSCRIPTS = sorted((pathlib.Path(__file__).resolve().parent / "transcripts").glob("*.json"))


def test_transcripts_present():
    assert len(TRANSCRIPTS) == 5


@pytest.mark.parametrize("path", TRANSCRIPTS, ids=lambda p: p.stem)
def test_transcript_replays_exactly(path):
    doc = json.loads(path.read_text())
    process, baseline, rules, tamper = config_from_doc(doc["config"])
    app = MockApp(process, baseline, rules, tamper)
    for i, exchange in enumerate(doc["exchanges"]):
        got = app.deliver_line(exchange["in"])
        assert got == exchange["out"], f"{path.stem} exchange {i}"


@pytest.mark.parametrize("path", TRANSCRIPTS, ids=lambda p: p.stem)
def test_transcript_lines_are_canonical(path):
    from spoofkit import wire

    doc = json.loads(path.read_text())
    for exchange in doc["exchanges"]:
        for line in [exchange["in"], *exchange["out"]]:
            assert wire.encode_line(wire.decode_line(line)) == line
