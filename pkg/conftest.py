import sys
from pathlib import Path

import pytest

# Make the ``scripts`` package importable without installing it
sys.path.insert(0, str(Path(__file__).resolve().parent))


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run full-size trajectory suites"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full N=11 trajectories up to t/tau=30")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return

    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
