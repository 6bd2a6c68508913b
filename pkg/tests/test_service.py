import concurrent.futures
import json

import pytest
from fastapi.testclient import TestClient

from prefsort.io import format_dataset_csv
from prefsort.service import create_app
from prefsort import fixtures

CREDIT_SESSION_BODY = {
    "strategy": "ES",
    "alpha": fixtures.ALPHA,
    "q": fixtures.Q,
    "subinterval_counts": list(fixtures.SUBINTERVALS),
    "termination": {"kind": "budget", "T": fixtures.BUDGET},
    "initial_examples": [
        {"id": ex.alternative_id, "category": ex.category}
        for ex in fixtures.INITIAL_EXAMPLES
    ],
}


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "data", seed=0, workers=2)
    with TestClient(app) as c:
        yield c


def upload_credit(client):
    csv_text = format_dataset_csv(fixtures.credit_matrix())
    resp = client.post("/datasets", json={"csv": csv_text})
    assert resp.status_code == 200, resp.text
    return resp.json()


def start_credit_session(client, ds_id, **overrides):
    body = dict(CREDIT_SESSION_BODY, dataset_id=ds_id, **overrides)
    resp = client.post("/sessions?wait=true", json=body)
    assert resp.status_code == 200, resp.text
    return resp.json()


class TestDatasets:
    def test_create_echoes_shape(self, client):
        doc = upload_credit(client)
        assert doc["n"] == 20
        assert doc["m"] == 3
        assert doc["id"] == "ds-0001"

    def test_header_only_rejected(self, client):
        resp = client.post("/datasets", json={"csv": "id,g1,label\n"})
        assert resp.status_code == 400
        body = resp.json()
        assert body["code"] == "invalid_input"
        assert set(body) == {"code", "message"}

    def test_duplicate_ids_rejected(self, client):
        resp = client.post("/datasets", json={"csv": "id,g\na,1\na,2\n"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "invalid_input"

    def test_get_dataset(self, client):
        ds = upload_credit(client)
        resp = client.get(f"/datasets/{ds['id']}")
        assert resp.status_code == 200
        assert len(resp.json()["alternative_ids"]) == 20

    def test_unknown_dataset_404(self, client):
        resp = client.get("/datasets/ds-9999")
        assert resp.status_code == 404
        assert resp.json()["code"] == "not_found"


class TestSessions:
    def test_first_question_is_a17(self, client):
        ds = upload_credit(client)
        doc = start_credit_session(client, ds["id"])
        assert doc["status"] == "awaiting_answer"
        assert doc["pending_question"] == "a17"
        assert doc["question"]["alternative_id"] == "a17"
        assert len(doc["question"]["performances"]) == 3
        assert doc["question"]["categories"] == [1, 2, 3, 4]
        assert len(doc["scores"]) == 16

    def test_zero_budget_finishes_immediately(self, client):
        ds = upload_credit(client)
        doc = start_credit_session(
            client, ds["id"], termination={"kind": "budget", "T": 0}
        )
        assert doc["status"] == "finished"
        assert "final" in doc

    def test_unknown_alternative_in_examples(self, client):
        ds = upload_credit(client)
        body = dict(
            CREDIT_SESSION_BODY,
            dataset_id=ds["id"],
            initial_examples=[{"id": "nope", "category": 1}],
        )
        resp = client.post("/sessions", json=body)
        assert resp.status_code == 400
        assert resp.json()["code"] == "invalid_input"

    def test_unknown_dataset(self, client):
        resp = client.post(
            "/sessions", json=dict(CREDIT_SESSION_BODY, dataset_id="ds-404")
        )
        assert resp.status_code == 404

    def test_polling_reaches_question(self, client):
        ds = upload_credit(client)
        resp = client.post(
            "/sessions", json=dict(CREDIT_SESSION_BODY, dataset_id=ds["id"])
        )
        sid = resp.json()["id"]
        for _ in range(200):
            doc = client.get(f"/sessions/{sid}").json()
            if doc["status"] == "awaiting_answer":
                break
        assert doc["pending_question"] == "a17"


class TestAnswerFlow:
    def test_full_replication_sequence(self, client):
        ds = upload_credit(client)
        doc = start_credit_session(client, ds["id"])
        sid = doc["id"]
        asked = [doc["pending_question"]]
        while doc["status"] != "finished":
            aid = doc["pending_question"]
            doc = client.post(
                f"/sessions/{sid}/answer?wait=true",
                json={
                    "alternative_id": aid,
                    "category": fixtures.TRUE_LABELS[aid],
                },
            ).json()
            if doc.get("pending_question"):
                asked.append(doc["pending_question"])
        assert tuple(asked) == fixtures.EXPECTED_SEQUENCE
        final = doc["final"]
        for got, expected in zip(
            final["normalized"]["thresholds"],
            fixtures.EXPECTED_NORMALIZED_THRESHOLDS,
        ):
            assert abs(got - expected) <= 0.05
        assert len(final["assignments"]) == 8

    def test_double_answer_conflict(self, client):
        ds = upload_credit(client)
        doc = start_credit_session(client, ds["id"])
        sid = doc["id"]
        body = {"alternative_id": "a17", "category": 4}
        first = client.post(f"/sessions/{sid}/answer?wait=true", json=body)
        assert first.status_code == 200
        second = client.post(f"/sessions/{sid}/answer", json=body)
        assert second.status_code == 409
        assert second.json()["code"] == "state_conflict"
        # state unchanged: the next pending question survives
        doc = client.get(f"/sessions/{sid}?wait=true").json()
        assert doc["pending_question"] == "a14"

    def test_out_of_range_category(self, client):
        ds = upload_credit(client)
        doc = start_credit_session(client, ds["id"])
        resp = client.post(
            f"/sessions/{doc['id']}/answer",
            json={"alternative_id": "a17", "category": 7},
        )
        assert resp.status_code == 400
        assert resp.json()["code"] == "invalid_input"

    def test_concurrent_conflicting_answers(self, client):
        ds = upload_credit(client)
        doc = start_credit_session(client, ds["id"])
        sid = doc["id"]
        body = {"alternative_id": "a17", "category": 4}

        def post():
            return client.post(f"/sessions/{sid}/answer", json=body).status_code

        with concurrent.futures.ThreadPoolExecutor(max_workers=2) as pool:
            codes = sorted(pool.map(lambda _: post(), range(2)))
        assert codes == [200, 409]


class TestModelViews:
    def test_candidate_scores_listed(self, client):
        ds = upload_credit(client)
        doc = start_credit_session(client, ds["id"])
        resp = client.get(f"/sessions/{doc['id']}/candidates")
        payload = resp.json()
        assert len(payload["scores"]) == 16
        assert len(payload["candidate_ids"]) == 16
        assert payload["probabilities"]["a17"]

    def test_model_payload_shape(self, client):
        ds = upload_credit(client)
        doc = start_credit_session(client, ds["id"])
        resp = client.get(f"/sessions/{doc['id']}/model")
        payload = resp.json()
        assert len(payload["criteria"]) == 3
        assert len(payload["criteria"][0]["utilities"]) == 5
        assert payload["normalized"]["thresholds"][0] == 0.0
        assert len(payload["assignments"]) == 20
        assert payload["iteration"] == 0

    def test_model_cached_between_calls(self, client):
        ds = upload_credit(client)
        doc = start_credit_session(client, ds["id"])
        a = client.get(f"/sessions/{doc['id']}/model").json()
        b = client.get(f"/sessions/{doc['id']}/model").json()
        assert a == b

    def test_finalize_early(self, client):
        ds = upload_credit(client)
        doc = start_credit_session(client, ds["id"])
        resp = client.post(f"/sessions/{doc['id']}/finalize")
        final = resp.json()
        assert final["early"] is True
        assert len(final["assignments"]) == 16
        doc = client.get(f"/sessions/{doc['id']}").json()
        assert doc["status"] == "finished"


class TestPersistenceAndDeterminism:
    def test_session_survives_restart(self, client, tmp_path):
        ds = upload_credit(client)
        doc = start_credit_session(client, ds["id"])
        sid = doc["id"]
        client.post(
            f"/sessions/{sid}/answer?wait=true",
            json={"alternative_id": "a17", "category": 4},
        )
        # a fresh app over the same data directory sees the session
        app2 = create_app(tmp_path / "data", seed=0, workers=2)
        with TestClient(app2) as client2:
            doc = client2.get(f"/sessions/{sid}?wait=true").json()
            assert doc["iteration"] == 1
            assert doc["pending_question"] == "a14"

    def test_replay_byte_identical(self, tmp_path):
        def run(tag):
            app = create_app(tmp_path / tag, seed=7, workers=1)
            bodies = []
            with TestClient(app) as c:
                ds = upload_credit(c)
                bodies.append(json.dumps(ds, sort_keys=True))
                doc = start_credit_session(c, ds["id"])
                sid = doc["id"]
                bodies.append(json.dumps(doc, sort_keys=True))
                ans = c.post(
                    f"/sessions/{sid}/answer?wait=true",
                    json={"alternative_id": "a17", "category": 4},
                ).json()
                bodies.append(json.dumps(ans, sort_keys=True))
                cand = c.get(f"/sessions/{sid}/candidates").json()
                bodies.append(json.dumps(cand, sort_keys=True))
            return bodies

        assert run("one") == run("two")
