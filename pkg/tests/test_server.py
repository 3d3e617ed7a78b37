"""HTTP API and TCP ingest, exercised in-process over real sockets."""

import json
import socket
import threading
import time
import urllib.error
import urllib.request

import pytest

from synth_stream import make_depletion_stream
from agrisim.server import AgrisimServer
from agrisim.service import DecisionService
from agrisim.wire import parse_telemetry_line, serialize_record
from test_service import rec


@pytest.fixture
def server():
    svc = DecisionService()
    srv = AgrisimServer(svc, http_port=0, ingest_port=0)
    srv.start()
    yield srv
    srv.stop()


def get(srv, path, expect=200):
    url = f"http://127.0.0.1:{srv.http_port}{path}"
    try:
        with urllib.request.urlopen(url, timeout=5) as resp:
            return resp.status, resp.read().decode()
    except urllib.error.HTTPError as err:
        assert err.code == expect, f"{path}: got {err.code}, body {err.read()!r}"
        return err.code, err.read().decode()


def send(srv, path, body, method="POST"):
    url = f"http://127.0.0.1:{srv.http_port}{path}"
    req = urllib.request.Request(
        url, data=json.dumps(body).encode(), method=method,
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req, timeout=5) as resp:
            return resp.status, resp.read().decode()
    except urllib.error.HTTPError as err:
        return err.code, err.read().decode()


def test_latest_empty_store_is_404(server):
    status, _ = get(server, "/api/latest?node=n1", expect=404)
    assert status == 404


def test_ingest_then_query(server):
    server.service.ingest(rec(1000))
    status, body = get(server, "/api/latest?node=n1")
    assert status == 200
    assert parse_telemetry_line(body) == rec(1000)


def test_tcp_ingest_stream(server):
    records = make_depletion_stream(20, node="tcp-node")
    with socket.create_connection(("127.0.0.1", server.ingest_port), timeout=5) as sock:
        payload = "".join(serialize_record(r) + "\n" for r in records)
        sock.sendall(payload.encode())
    deadline = time.time() + 5
    while time.time() < deadline:
        if "tcp-node" in server.service.nodes() and len(
            server.service.history("tcp-node")
        ) == len(records):
            break
        time.sleep(0.02)
    assert server.service.history("tcp-node") == records


def test_tcp_ingest_survives_bad_lines(server):
    lines = [serialize_record(rec(1000)), "garbage", serialize_record(rec(2000))]
    with socket.create_connection(("127.0.0.1", server.ingest_port), timeout=5) as sock:
        sock.sendall(("\n".join(lines) + "\n").encode())
    deadline = time.time() + 5
    while time.time() < deadline:
        if "n1" in server.service.nodes() and len(server.service.history("n1")) == 2:
            break
        time.sleep(0.02)
    assert [r.ts_ms for r in server.service.history("n1")] == [1000, 2000]


def test_history_window_and_equality(server):
    records = make_depletion_stream(60)
    for r in records:
        server.service.ingest(r)
    status, body = get(server, f"/api/history?node={records[0].node}")
    assert status == 200
    got = [parse_telemetry_line(json.dumps(obj)) for obj in json.loads(body)]
    assert got == records
    mid = records[len(records) // 2].ts_ms
    status, body = get(server, f"/api/history?node={records[0].node}&from={mid}")
    assert all(obj["ts_ms"] >= mid for obj in json.loads(body))


def test_policy_round_trip(server):
    status, body = send(server, "/api/policy/tomato", {"m_on_pct": 35, "m_off_pct": 60}, "PUT")
    assert status == 200
    status, body = get(server, "/api/policy/tomato")
    obj = json.loads(body)
    assert (obj["m_on_pct"], obj["m_off_pct"]) == (35, 60)


def test_policy_validation_400(server):
    status, body = send(server, "/api/policy/tomato", {"m_on_pct": 60, "m_off_pct": 35}, "PUT")
    assert status == 400
    assert json.loads(body)["field"] == "m_on_pct"


def test_policy_missing_404(server):
    status, _ = get(server, "/api/policy/nothing", expect=404)
    assert status == 404


def test_override_flow(server):
    server.service.ingest(rec(1000))
    status, _ = send(server, "/api/override", {"node": "n1", "state": "off", "ttl_s": 600})
    assert status == 202
    status, body = get(server, "/api/override?node=n1")
    obj = json.loads(body)
    assert obj["state"] == "off" and 0 < obj["ttl_remaining_s"] <= 600
    status, _ = send(server, "/api/override", {"node": "n1", "state": "clear"})
    assert status == 202
    assert json.loads(get(server, "/api/override?node=n1")[1])["state"] == "none"


def test_override_ttl_zero_is_400(server):
    server.service.ingest(rec(1000))
    status, _ = send(server, "/api/override", {"node": "n1", "state": "on", "ttl_s": 0})
    assert status == 400


def test_override_unknown_node_404(server):
    status, _ = send(server, "/api/override", {"node": "ghost", "state": "on", "ttl_s": 60})
    assert status == 404


def test_model_endpoint(server):
    records = make_depletion_stream(10)
    for r in records:
        server.service.ingest(r)
    status, body = get(server, "/api/model")
    obj = json.loads(body)
    assert len(obj["w"]) == 4 and obj["n_samples"] == 10


def test_recommendation_endpoint(server):
    now_ms = round(time.time() * 1000)
    server.service.ingest(rec(ts_ms=now_ms, m_pct=50))
    send(server, "/api/policy/tomato", {"m_on_pct": 35, "m_off_pct": 60}, "PUT")
    status, body = get(server, "/api/recommendation?crop=tomato")
    obj = json.loads(body)
    assert status == 200
    assert obj["crop_id"] == "tomato"
    assert obj["next_irrigation_eta_s"] is None  # untrained model predicts nothing
    assert obj["suggested_duration_s"] > 0


def test_recommendation_stale_is_409(server):
    server.service.ingest(rec(ts_ms=1000))  # 1970: hopelessly stale
    send(server, "/api/policy/tomato", {"m_on_pct": 35, "m_off_pct": 60}, "PUT")
    status, _ = get(server, "/api/recommendation?crop=tomato", expect=409)
    assert status == 409


def test_console_static_serving(tmp_path):
    (tmp_path / "index.html").write_text("<!doctype html><title>console</title>")
    (tmp_path / "js").mkdir()
    (tmp_path / "js" / "main.js").write_text("export {};")
    svc = DecisionService()
    srv = AgrisimServer(svc, http_port=0, ingest_port=0, console_dir=tmp_path)
    srv.start()
    try:
        status, body = get(srv, "/")
        assert status == 200 and "console" in body
        status, _ = get(srv, "/js/main.js")
        assert status == 200
        status, _ = get(srv, "/../pyproject.toml", expect=404)
        assert status == 404
    finally:
        srv.stop()


def test_concurrent_ingest_two_nodes(server):
    def pump(node):
        for i in range(50):
            server.service.ingest(rec(ts_ms=1000 + i, node=node))

    threads = [threading.Thread(target=pump, args=(f"node-{i}",)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(len(server.service.history(f"node-{i}")) == 50 for i in range(4))
