"""Pytest configuration and fixtures."""

from pathlib import Path

import pytest
from click.testing import CliRunner

from sepfrag.config import SEED_ENV

DATA_DIR = Path(__file__).parent / 'data'


@pytest.fixture(autouse=True)
def _no_seed_from_environment(monkeypatch):
    """Keep a SEPFRAG_SEED of the calling shell out of the tests."""
    monkeypatch.delenv(SEED_ENV, raising=False)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write_file(tmp_path):
    """Factory writing text to a file under tmp_path and returning its path."""
    def write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


@pytest.fixture
def data_file():
    """Path of a file under tests/data."""
    def find(name: str) -> Path:
        return DATA_DIR / name

    return find
