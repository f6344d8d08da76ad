from __future__ import annotations

from pathlib import Path

import pytest

from vodmlg.instances import diamond

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIOS


@pytest.fixture
def diamond_graph():
    return diamond().graph()
