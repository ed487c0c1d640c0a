"""Cross-package contract: the verification pipeline's remote clients against this app.

Runs only when the pipeline package is installed alongside; the service
itself has no dependency on it.
"""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from scorer_service.app import create_app
from scorer_service.backends import HeuristicNliModel, OverlapRelevanceModel

factpipe = pytest.importorskip("factpipe")

from factpipe.backends.nli import RemoteNliBackend  # noqa: E402
from factpipe.backends.scorer import RemoteRelevanceScorer  # noqa: E402
from factpipe.errors import NliBackendUnavailable, ScorerUnavailable  # noqa: E402


@pytest.fixture
def service_client():
    return TestClient(create_app(relevance=OverlapRelevanceModel(), nli=HeuristicNliModel()))


def test_remote_scorer_round_trip(service_client):
    scorer = RemoteRelevanceScorer("http://testserver/score", client=service_client)
    candidates = ["alpha beta", "gamma delta", "alpha beta gamma"]
    scores = scorer.score("alpha beta gamma", candidates)
    assert len(scores) == len(candidates)
    assert scores[2] == max(scores)
    assert scorer.score("alpha beta gamma", candidates) == scores


def test_remote_nli_round_trip(service_client):
    backend = RemoteNliBackend("http://testserver/nli", client=service_client)
    rows = backend.judge(
        [
            ("Alice was born in Canada.", "Alice's birthplace is Canada."),
            ("Alice was born in Canada.", "Alice was not born in Canada."),
        ]
    )
    assert len(rows) == 2
    assert rows[0].entailment == max(rows[0].as_tuple())
    assert rows[1].contradiction == max(rows[1].as_tuple())


def test_clients_surface_loading_state_as_backend_errors():
    unready = TestClient(create_app(scorer_model="builtin:missing", nli_model="builtin:missing"))
    with pytest.raises(ScorerUnavailable):
        RemoteRelevanceScorer("http://testserver/score", client=unready).score("c", ["x"])
    with pytest.raises(NliBackendUnavailable):
        RemoteNliBackend("http://testserver/nli", client=unready).judge([("p", "h")])
