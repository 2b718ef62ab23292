"""Shared fixtures and the acceptance-criteria terminal summary."""
import socket

import pytest

from uccx.annotation import (
    load_annotations,
    load_ground_truth,
    sample_annotations_path,
    sample_ground_truth_path,
)
from uccx.corpus import load_corpus, sample_corpus_path

# nodeid -> "PASS" | "FAIL", in execution order
_acceptance_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call":
        _acceptance_results[report.nodeid] = "PASS" if report.passed else "FAIL"
    elif report.failed:  # setup or teardown blew up
        _acceptance_results.setdefault(report.nodeid, "FAIL")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _acceptance_results.items():
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{outcome} {name}")


@pytest.fixture
def no_network(monkeypatch):
    """Make any real socket connection attempt fail loudly."""

    def blocked(self, *args, **kwargs):
        raise RuntimeError("test tried to open a network connection")

    monkeypatch.setattr(socket.socket, "connect", blocked)


@pytest.fixture(scope="session")
def sample_corpus():
    return load_corpus(sample_corpus_path())


@pytest.fixture(scope="session")
def sample_gt():
    return load_ground_truth(sample_ground_truth_path())


@pytest.fixture(scope="session")
def sample_annotation_sets():
    return load_annotations(sample_annotations_path())
