from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from scorer_service.app import create_app
from scorer_service.backends import HeuristicNliModel, OverlapRelevanceModel


@pytest.fixture
def client():
    """App with prewired builtin models; ready from the first request."""
    return TestClient(create_app(relevance=OverlapRelevanceModel(), nli=HeuristicNliModel()))
