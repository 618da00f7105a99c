import shutil
from pathlib import Path

import pytest

from jasper.app import demo_root
from jasper.mail import MemoryTransport
from jasper.properties import PropertyMap
from jasper.server import ServerConfig

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and not report.failed):
        return
    number, title = marker.args
    ok, _ = _criteria.get(number, (True, title))
    _criteria[number] = (ok and report.passed, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        ok, title = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def props():
    return PropertyMap()


@pytest.fixture
def site(tmp_path):
    """A writable copy of the bundled demo site."""
    root = tmp_path / "site"
    shutil.copytree(demo_root(), root)
    return root


@pytest.fixture
def transport():
    return MemoryTransport()


@pytest.fixture
def server_config(site, transport):
    return ServerConfig(root_dir=site, transport=transport)


def write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))
    return path
