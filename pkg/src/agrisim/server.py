"""Network front of the decision service: TCP ingest plus the HTTP API.

Ingest is a plain TCP listener taking newline-delimited telemetry records
(one streaming connection per node); bad or stale lines are counted and
skipped so one glitch never kills a stream.  The query/control API is
HTTP/1.1 with every body in the canonical JSON subset; telemetry records
are emitted through the exact wire serializer so clients see the same
bytes that live in the log.

Endpoints:
    GET  /api/latest?node=ID
    GET  /api/history?node=ID&from=ms&to=ms
    GET  /api/policy/CROP          PUT /api/policy/CROP
    POST /api/override             GET /api/override?node=ID
    GET  /api/model
    GET  /api/recommendation?crop=CROP[&node=ID]

GET /api/override is the pickup channel for edge nodes (and shows the
effective pump reason); everything else matches the operator console's
needs.  With a console directory configured the server also serves its
static files at /.
"""

from __future__ import annotations

import logging
import socketserver
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .controller import ConfigError, IrrigationPolicy
from .service import (
    DecisionService,
    StaleRecord,
    StaleTelemetry,
    UnknownCrop,
    UnknownNode,
)
from .wire import WireError, canonical_dumps, serialize_record

log = logging.getLogger("agrisim.server")

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".json": "application/json",
}


def _now_ms() -> int:
    return round(time.time() * 1000)


class IngestHandler(socketserver.StreamRequestHandler):
    """One telemetry stream: parse each line, ingest, never crash the loop."""

    def handle(self):
        service: DecisionService = self.server.service  # type: ignore[attr-defined]
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            try:
                service.ingest_line(line)
            except (WireError, StaleRecord, ValueError) as exc:
                log.warning("ingest: dropped line (%s)", exc)


class ApiHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def service(self) -> DecisionService:
        return self.server.service  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):
        log.debug("http: " + fmt, *args)

    def _reply(self, status: int, body: str, content_type="application/json"):
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _error(self, status: int, message: str, field: str | None = None):
        body = {"error": message}
        if field:
            body["field"] = field
        self._reply(status, canonical_dumps(body))

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        import json

        try:
            obj = json.loads(self.rfile.read(length).decode("utf-8") or "{}")
        except json.JSONDecodeError:
            raise ValueError("body is not valid JSON")
        if not isinstance(obj, dict):
            raise ValueError("body must be a JSON object")
        return obj

    def _query(self, url) -> dict:
        return {k: v[0] for k, v in parse_qs(url.query).items()}

    # -- GET ----------------------------------------------------------------

    def do_GET(self):
        url = urlparse(self.path)
        q = self._query(url)
        try:
            if url.path == "/api/latest":
                rec = self.service.latest(self._require(q, "node"))
                self._reply(200, serialize_record(rec))
            elif url.path == "/api/history":
                node = self._require(q, "node")
                from_ms = int(q["from"]) if "from" in q else None
                to_ms = int(q["to"]) if "to" in q else None
                recs = self.service.history(node, from_ms, to_ms)
                self._reply(200, "[" + ",".join(serialize_record(r) for r in recs) + "]")
            elif url.path.startswith("/api/policy/"):
                pol = self.service.get_policy(url.path.removeprefix("/api/policy/"))
                self._reply(200, _policy_json(pol))
            elif url.path == "/api/model":
                self._reply(200, canonical_dumps(self.service.model_snapshot()))
            elif url.path == "/api/override":
                status = self.service.override_status(self._require(q, "node"), _now_ms())
                self._reply(200, canonical_dumps(status))
            elif url.path == "/api/recommendation":
                crop = self._require(q, "crop")
                node = q.get("node") or self._single_node()
                rec = self.service.recommendation(crop, node, _now_ms())
                self._reply(
                    200,
                    canonical_dumps(
                        {
                            "crop_id": rec.crop_id,
                            "next_irrigation_eta_s": rec.next_irrigation_eta_s,
                            "suggested_duration_s": rec.suggested_duration_s,
                            "predicted_depletion_frac_per_hr": rec.predicted_depletion_frac_per_hr,
                        }
                    ),
                )
            else:
                self._static(url.path)
        except UnknownNode as exc:
            self._error(404, f"unknown node: {exc.args[0]}", "node")
        except UnknownCrop as exc:
            self._error(404, f"unknown crop: {exc.args[0]}", "crop")
        except StaleTelemetry as exc:
            self._error(409, str(exc))
        except ValueError as exc:
            self._error(400, str(exc))

    def _require(self, q: dict, key: str) -> str:
        if key not in q:
            raise ValueError(f"missing query parameter: {key}")
        return q[key]

    def _single_node(self) -> str:
        nodes = self.service.nodes()
        if len(nodes) != 1:
            raise ValueError("node parameter required when not exactly one node is known")
        return nodes[0]

    def _static(self, path: str):
        root = getattr(self.server, "console_dir", None)
        if root is None:
            self._error(404, f"no such endpoint: {path}")
            return
        name = "index.html" if path in ("", "/") else path.lstrip("/")
        target = (Path(root) / name).resolve()
        if not str(target).startswith(str(Path(root).resolve())) or not target.is_file():
            self._error(404, f"no such file: {path}")
            return
        ctype = _STATIC_TYPES.get(target.suffix, "application/octet-stream")
        self._reply(200, target.read_text(encoding="utf-8"), content_type=ctype)

    # -- PUT / POST ----------------------------------------------------------

    def do_PUT(self):
        url = urlparse(self.path)
        if not url.path.startswith("/api/policy/"):
            self._error(404, f"no such endpoint: {url.path}")
            return
        crop = url.path.removeprefix("/api/policy/")
        try:
            body = self._read_body()
            pol = IrrigationPolicy(
                crop_id=crop,
                m_on_pct=int(body["m_on_pct"]),
                m_off_pct=int(body["m_off_pct"]),
                min_on_s=float(body.get("min_on_s", 30.0)),
                dht_period_s=float(body.get("dht_period_s", 1.0)),
                tick_s=float(body.get("tick_s", 1.0)),
            )
        except ConfigError as exc:
            self._error(400, str(exc), exc.field)
            return
        except (KeyError, TypeError, ValueError) as exc:
            self._error(400, f"bad policy body: {exc}")
            return
        self.service.put_policy(pol)
        self._reply(200, _policy_json(pol))

    def do_POST(self):
        url = urlparse(self.path)
        if url.path != "/api/override":
            self._error(404, f"no such endpoint: {url.path}")
            return
        try:
            body = self._read_body()
            node = body["node"]
            state = body["state"]
            ttl_s = float(body.get("ttl_s", 0))
        except (KeyError, TypeError, ValueError) as exc:
            self._error(400, f"bad override body: {exc}")
            return
        try:
            self.service.apply_override(node, state, ttl_s, _now_ms())
        except UnknownNode as exc:
            self._error(404, f"unknown node: {exc.args[0]}", "node")
            return
        except ValueError as exc:
            self._error(400, str(exc), "ttl_s")
            return
        self._reply(202, canonical_dumps({"accepted": True, "node": node, "state": state}))


def _policy_json(pol: IrrigationPolicy) -> str:
    return canonical_dumps(
        {
            "crop_id": pol.crop_id,
            "m_on_pct": pol.m_on_pct,
            "m_off_pct": pol.m_off_pct,
            "min_on_s": pol.min_on_s,
            "dht_period_s": pol.dht_period_s,
            "tick_s": pol.tick_s,
        }
    )


class _IngestServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class _HttpServer(ThreadingHTTPServer):
    daemon_threads = True


class AgrisimServer:
    """Both listeners plus the service, started together, stopped together."""

    def __init__(
        self,
        service: DecisionService,
        http_port: int = 8080,
        ingest_port: int = 7070,
        host: str = "127.0.0.1",
        console_dir: str | Path | None = None,
    ):
        self.service = service
        self._http = _HttpServer((host, http_port), ApiHandler)
        self._http.service = service  # type: ignore[attr-defined]
        self._http.console_dir = console_dir  # type: ignore[attr-defined]
        self._ingest = _IngestServer((host, ingest_port), IngestHandler)
        self._ingest.service = service  # type: ignore[attr-defined]
        self.http_port = self._http.server_address[1]
        self.ingest_port = self._ingest.server_address[1]
        self._threads: list[threading.Thread] = []

    def start(self) -> None:
        for srv, name in ((self._http, "http"), (self._ingest, "ingest")):
            t = threading.Thread(
                target=lambda s=srv: s.serve_forever(poll_interval=0.05),
                name=f"agrisim-{name}",
                daemon=True,
            )
            t.start()
            self._threads.append(t)
        log.info("serving http on :%d, ingest on :%d", self.http_port, self.ingest_port)

    def stop(self) -> None:
        self._http.shutdown()
        self._ingest.shutdown()
        self._http.server_close()
        self._ingest.server_close()
        for t in self._threads:
            t.join(timeout=5)
        self.service.close()
