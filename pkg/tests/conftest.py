import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def pytest_addoption(parser):
    parser.addoption(
        "--skip-acceptance",
        action="store_true",
        default=False,
        help="skip the long-running acceptance criteria",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--skip-acceptance"):
        marker = pytest.mark.skip(reason="--skip-acceptance given")
        for item in items:
            if "acceptance" in item.nodeid:
                item.add_marker(marker)
