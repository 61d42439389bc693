# Test configuration for the X-ray transform library

import os

import pytest

# Test environment configuration
os.environ.setdefault("XRT_LOG_LEVEL", "DEBUG")
os.environ.setdefault("XRT_LOG_FORMAT", "simple")

pytest_plugins = ["tests.fixtures.base_fixtures"]


# Test collection configuration
def pytest_collection_modifyitems(config, items):
    """Add default markers by directory."""
    for item in items:
        path = str(item.fspath)
        if f"{os.sep}unit{os.sep}" in path:
            item.add_marker(pytest.mark.unit)
        elif f"{os.sep}integration{os.sep}" in path:
            item.add_marker(pytest.mark.integration)
