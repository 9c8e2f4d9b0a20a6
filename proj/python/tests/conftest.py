from pathlib import Path

import pytest


@pytest.fixture
def smoke_config():
    return str(Path(__file__).resolve().parents[2] / "configs" / "smoke.cfg")
