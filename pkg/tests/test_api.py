"""HTTP facade: the consortium workflow over routes, error mapping, canonical reads."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from chainshare.api import create_app
from chainshare.canonical import canonical_dumps, loads_exact
from chainshare.descriptor import parse_chain_descriptor
from chainshare.engine import result_to_tree, run_sharing


@pytest.fixture()
def client():
    return TestClient(create_app())


def build_via_api(client: TestClient, doc: dict, *, seal: bool = True, run: bool = True) -> int:
    """Drive the full build sequence of a raw descriptor document through the API."""
    rid = doc["requestId"]
    response = client.post(
        "/requests",
        json={
            "requestId": rid,
            "originator": doc.get("originator", ""),
            "p": doc.get("p", 0),
            "d": doc.get("d", 0),
            "levs": doc.get("levs", 0),
            "ress": doc.get("ress", 0),
            "sups": doc.get("sups", 0),
        },
    )
    assert response.status_code == 201, response.text
    options = doc.get("sharingOptions")
    if options:
        assert client.post(f"/requests/{rid}/options", json=options).status_code == 201
    for level in doc.get("levels", []):
        for position, resource in enumerate(level.get("resources", [])):
            k = resource.get("k", position)
            response = client.post(
                f"/requests/{rid}/levels/{level['i']}/resources/{k}",
                json={
                    "resourceName": resource.get("resourceName", ""),
                    "g": resource.get("g", 0),
                    "BOM": resource.get("BOM", 0),
                },
            )
            assert response.status_code == 201, response.text
            for sposition, supply in enumerate(resource.get("supplyList", [])):
                economic = supply.get("economicProfile", {})
                production = supply.get("productionProfile", {})
                data = supply.get("supplierData", {})
                response = client.post(
                    f"/requests/{rid}/levels/{level['i']}/resources/{k}/supplies",
                    json={
                        "m": supply.get("m", sposition),
                        "supplierName": data.get("supplierName", ""),
                        "supplierId": data.get("supplierId", ""),
                        "cf": economic.get("cf", 0),
                        "cv": economic.get("cv", 0),
                        "additionalData": economic.get("additionalData", {}),
                        "q": production.get("q", 0),
                        "tp": production.get("tp", 0),
                    },
                )
                assert response.status_code == 201, response.text
    services = doc.get("serviceLevel", {})
    for service in services.get("financialServices", []):
        assert (
            client.post(f"/requests/{rid}/services/financial", json=service).status_code == 201
        )
    for service in services.get("itServices", []):
        assert client.post(f"/requests/{rid}/services/it", json=service).status_code == 201
    if seal:
        assert client.post(f"/requests/{rid}/seal").status_code == 201
    if run:
        assert client.post(f"/requests/{rid}/run").status_code == 201
    return rid


class TestWorkflow:
    def test_create_returns_receipt(self, client):
        response = client.post(
            "/requests",
            json={"requestId": 1, "originator": "O", "p": 450, "d": 4, "levs": 2, "ress": 3, "sups": 4},
        )
        assert response.status_code == 201
        receipt = response.json()
        assert receipt["sequence"] == 0
        assert len(receipt["blockHash"]) == 64

    def test_supplier_submission(self, client):
        client.post(
            "/requests",
            json={"requestId": 1, "originator": "O", "p": 450, "d": 4, "levs": 2, "ress": 3, "sups": 4},
        )
        client.post(
            "/requests/1/levels/1/resources/1",
            json={"resourceName": "K1", "g": 1, "BOM": 8},
        )
        response = client.post(
            "/requests/1/levels/1/resources/1/supplies",
            json={"m": 0, "supplierName": "M0", "cf": 35, "cv": 35, "q": 12, "tp": 365},
        )
        assert response.status_code == 201

    def test_full_listing_build(self, client, listing_path, listing_chain):
        rid = build_via_api(client, json.loads(listing_path.read_text()))
        view = client.get(f"/requests/{rid}")
        assert view.status_code == 200
        body = loads_exact(view.content)
        assert body["phase"] == "COMPUTED"
        stored = parse_chain_descriptor(canonical_dumps(body["chain"]))
        assert stored == listing_chain
        expected = result_to_tree(run_sharing(listing_chain))
        assert canonical_dumps(body["result"]) == canonical_dumps(expected)

    def test_result_endpoint_matches_engine(self, client, listing_path, listing_chain):
        rid = build_via_api(client, json.loads(listing_path.read_text()))
        response = client.get(f"/requests/{rid}/result")
        assert response.status_code == 200
        assert response.content == canonical_dumps(result_to_tree(run_sharing(listing_chain))).encode()

    def test_read_your_writes_before_run(self, client, mini_path, mini_chain):
        rid = build_via_api(client, json.loads(mini_path.read_text()), seal=False, run=False)
        body = loads_exact(client.get(f"/requests/{rid}").content)
        assert body["phase"] == "OPEN"
        assert parse_chain_descriptor(canonical_dumps(body["chain"])) == mini_chain
        assert body["result"] is None


class TestErrors:
    def test_unknown_request_404(self, client):
        response = client.get("/requests/999")
        assert response.status_code == 404
        assert response.json()["code"] == "UNKNOWN_REQUEST"

    def test_run_while_open_409(self, client):
        client.post(
            "/requests",
            json={"requestId": 1, "originator": "O", "p": 1, "d": 1, "levs": 1, "ress": 1, "sups": 1},
        )
        response = client.post("/requests/1/run")
        assert response.status_code == 409
        body = response.json()
        assert body["code"] == "ILLEGAL_TRANSITION"
        assert body["httpStatus"] == 409

    def test_schema_violation_400_names_path(self, client):
        response = client.post(
            "/requests",
            json={"requestId": 1, "p": "not-a-number"},
        )
        assert response.status_code == 400
        body = response.json()
        assert body["code"] == "SCHEMA_VIOLATION"
        assert body["path"] == "$.p"

    def test_seal_invalid_422_with_violations(self, client, badquota_path):
        rid = build_via_api(client, json.loads(badquota_path.read_text()), seal=False, run=False)
        response = client.post(f"/requests/{rid}/seal")
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "VALIDATION_FAILED"
        assert any(v["code"] == "QUOTA_SUM" for v in body["violations"])

    def test_duplicate_group_409(self, client):
        client.post(
            "/requests",
            json={"requestId": 1, "originator": "O", "p": 1, "d": 1, "levs": 1, "ress": 1, "sups": 1},
        )
        body = {"resourceName": "K", "g": 1, "BOM": 1}
        assert client.post("/requests/1/levels/1/resources/0", json=body).status_code == 201
        response = client.post("/requests/1/levels/1/resources/0", json=body)
        assert response.status_code == 409
        assert response.json()["code"] == "DUPLICATE_KEY"

    def test_result_before_run_404(self, client, mini_path):
        rid = build_via_api(client, json.loads(mini_path.read_text()), run=False)
        response = client.get(f"/requests/{rid}/result")
        assert response.status_code == 404
        assert response.json()["code"] == "NOT_FOUND"

    def test_unknown_route_is_api_error_shaped(self, client):
        response = client.get("/nonexistent")
        assert response.status_code == 404
        assert response.json()["code"] == "NOT_FOUND"


class TestCanonicalReads:
    def test_two_gets_byte_identical(self, client, mini_path):
        rid = build_via_api(client, json.loads(mini_path.read_text()))
        assert client.get(f"/requests/{rid}").content == client.get(f"/requests/{rid}").content

    def test_mutations_add_exactly_one_block(self, client):
        ledger = client.app.state.ledger
        assert len(ledger) == 0
        client.post(
            "/requests",
            json={"requestId": 1, "originator": "O", "p": 1, "d": 1, "levs": 1, "ress": 1, "sups": 1},
        )
        assert len(ledger) == 1
        client.post("/requests/1/levels/1/resources/0", json={"resourceName": "K", "g": 1, "BOM": 1})
        assert len(ledger) == 2
        # a rejected transaction appends nothing
        client.post("/requests/1/run")
        assert len(ledger) == 2

    def test_get_never_mutates_state_hash(self, client, mini_path):
        rid = build_via_api(client, json.loads(mini_path.read_text()))
        ledger = client.app.state.ledger
        before = ledger.state_hash()
        client.get(f"/requests/{rid}")
        client.get(f"/requests/{rid}/result")
        client.get("/ledger/integrity")
        assert ledger.state_hash() == before

    def test_integrity_endpoint(self, client, mini_path):
        build_via_api(client, json.loads(mini_path.read_text()))
        body = client.get("/ledger/integrity").json()
        assert body["ok"] is True
        assert body["blocks"] == len(client.app.state.ledger)
        assert len(body["stateHash"]) == 64


class TestAuth:
    def test_bearer_token_maps_to_actor(self, tmp_path):
        tokens = tmp_path / "tokens.json"
        tokens.write_text(json.dumps({"sekrit": "alice"}))
        client = TestClient(create_app(auth_tokens_path=tokens))
        response = client.post(
            "/requests",
            json={"requestId": 1, "originator": "O", "p": 1, "d": 1, "levs": 1, "ress": 1, "sups": 1},
            headers={"Authorization": "Bearer sekrit"},
        )
        assert response.status_code == 201
        _block, tx = client.app.state.ledger.records()[0]
        assert tx.actor_id == "alice"

    def test_missing_token_401(self, tmp_path):
        tokens = tmp_path / "tokens.json"
        tokens.write_text(json.dumps({"sekrit": "alice"}))
        client = TestClient(create_app(auth_tokens_path=tokens))
        response = client.post(
            "/requests",
            json={"requestId": 1, "originator": "O", "p": 1, "d": 1, "levs": 1, "ress": 1, "sups": 1},
        )
        assert response.status_code == 401

    def test_persistent_ledger_across_instances(self, tmp_path, mini_path):
        log = tmp_path / "api-ledger.log"
        client = TestClient(create_app(ledger_path=log))
        rid = build_via_api(client, json.loads(mini_path.read_text()))
        fresh = TestClient(create_app(ledger_path=log))
        assert fresh.get(f"/requests/{rid}").content == client.get(f"/requests/{rid}").content
