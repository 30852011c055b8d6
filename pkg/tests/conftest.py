from __future__ import annotations

import pytest

from timeweave.fixtures import golden_scenario, metrics_scenario
from timeweave.pipeline import SessionStore, process_session
from timeweave.scenario import generate


@pytest.fixture(scope="session")
def golden_fixture(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixtures") / "golden"
    return generate(golden_scenario(), out)


@pytest.fixture(scope="session")
def metrics_fixture(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixtures") / "metrics-demo"
    return generate(metrics_scenario(), out)


@pytest.fixture(scope="session")
def golden_store(tmp_path_factory, golden_fixture) -> SessionStore:
    root = tmp_path_factory.mktemp("store")
    process_session(golden_fixture.manifest_path, root)
    return SessionStore(root)
