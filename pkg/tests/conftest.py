from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from kg_reason import build_type_graph, load_graph

from helpers import FIXTURES

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def factkg_graph():
    return load_graph(str(FIXTURES / "factkg_graph.tsv"), str(FIXTURES / "factkg_types.tsv"))


@pytest.fixture(scope="session")
def factkg_type_graph(factkg_graph):
    return build_type_graph(factkg_graph)


@pytest.fixture(scope="session")
def metaqa_graph():
    return load_graph(str(FIXTURES / "metaqa_graph.tsv"))


@pytest.fixture(scope="session")
def metaqa_type_graph(metaqa_graph):
    return build_type_graph(metaqa_graph)


@pytest.fixture(scope="session")
def crewed_flight_graph():
    return load_graph(str(FIXTURES / "crewed_flight_graph.tsv"), str(FIXTURES / "crewed_flight_types.tsv"))


@pytest.fixture(scope="session")
def crewed_flight_type_graph(crewed_flight_graph):
    return build_type_graph(crewed_flight_graph)
