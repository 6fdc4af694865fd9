import json

import pytest

from spoofkit.mockdev import spawn_mock_app
from spoofkit.transport import MockTransport


def profile_doc(process="com.example.app", sensors=(), system=(), rate=None):
    doc = {
        "version": 1,
        "target": {"process": process},
        "overrides": {"sensors": list(sensors), "system": list(system)},
    }
    if rate is not None:
        doc["default_rate_hz"] = rate
    return doc


def profile_text(**kwargs):
    return json.dumps(profile_doc(**kwargs))


@pytest.fixture
def battery5_text():
    return profile_text(system=[{"key": "battery.level", "value": 5}])


@pytest.fixture
def walking_text():
    return profile_text(sensors=[{"sensor": "accelerometer", "mode": "walking"}], rate=50)


@pytest.fixture
def mock_pair():
    """A registered mock app plus its transport, default baseline."""
    transport = MockTransport()
    app = spawn_mock_app({"process": "com.example.app"}, transport)
    return app, transport


# One override for every target API: all four sensors, both battery keys,
# both clock keys, and the three build fields.
FULL_PROFILE = profile_text(
    sensors=[
        {"sensor": "accelerometer", "mode": "walking"},
        {"sensor": "gyroscope", "mode": "walking"},
        {"sensor": "step_counter", "mode": "walking"},
        {"sensor": "ambient_temperature", "mode": "constant", "params": {"value": 24.5}},
    ],
    system=[
        {"key": "battery.level", "program": {"mode": "battery_discharge", "params": {"start_level": 64, "discharge_rate": 2}}},
        {"key": "battery.charging", "value": False},
        {"key": "clock.offset_ms", "program": {"mode": "clock_warp", "params": {"offset_ms": 60000}}},
        {"key": "clock.scale", "program": {"mode": "clock_warp", "params": {"scale": 10}}},
        {"key": "build.model", "value": "Pixel 4"},
        {"key": "build.manufacturer", "value": "Google"},
        {"key": "build.android_version", "value": "13"},
    ],
    rate=50,
)
