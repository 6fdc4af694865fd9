"""Golden agent scripts: emission output is frozen byte for byte."""

import pathlib

import pytest

from spoofkit.hookplan import compile as compile_plan, emit_agent_script
from spoofkit.profile import parse_profile

from conftest import FULL_PROFILE, profile_text

GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"

CASES = {
    "battery5": profile_text(system=[{"key": "battery.level", "value": 5}]),
    "full": FULL_PROFILE,
    "empty": profile_text(),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_agent_script_matches_golden(name):
    script = emit_agent_script(compile_plan(parse_profile(CASES[name])))
    golden = (GOLDEN / f"{name}_agent.js").read_text()
    assert script == golden


def test_goldens_exist_for_all_cases():
    assert {p.stem for p in GOLDEN.glob("*_agent.js")} == {f"{n}_agent" for n in CASES}
