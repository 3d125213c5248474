import os
import sys

import pytest

script_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, script_dir)

FIXTURES_DIR = os.path.join(script_dir, "fixtures")


@pytest.fixture
def fixture_path():
    """Absolute path of a bundled fixture file."""
    def path(name: str) -> str:
        return os.path.join(FIXTURES_DIR, name)
    return path
