"""Designer HTTP service (JSON over HTTP, versioned under /v1).

GET  /v1/health                   liveness + field readiness
GET  /v1/mesh                     pattern triangulation + piece outlines
GET  /v1/heatmap                  per-face densities + log bin edges
POST /v1/terminals?session=ID     replace the session's terminal set
POST /v1/solve?session=ID         {"baseline": bool, "eta": number|"auto"}
GET  /v1/compare?session=ID       metrics rows of the session's last solves

Solves are serialized per session; a request queued behind a running
solve is superseded (409) as soon as a newer request arrives. Identical
inputs produce byte-identical responses: solve ids are content hashes
and all JSON is dumped with sorted keys.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

import numpy as np

from .config import ProjectConfig
from .errors import WirelayError
from .exports import log_bins
from .mesh import make_terminal_set
from .pipeline import Scenario, field_for, run_solve

log = logging.getLogger(__name__)


class _Session:
    def __init__(self):
        self.lock = threading.Condition()
        self.terminals = None
        self.busy = False
        self.latest_ticket = 0
        self.ticket_counter = 0
        self.last = {}  # "weighted" / "baseline" -> payload dict


class AppState:
    def __init__(self, config: ProjectConfig, cache_dir=None):
        self.config = config
        self.scenario = Scenario.load(config)
        self.cache_dir = cache_dir
        self.field = None
        self.field_error = None
        self._field_lock = threading.Lock()
        self.sessions: dict[str, _Session] = {}
        self._sessions_lock = threading.Lock()
        self._solve_cache: dict[str, bytes] = {}
        self._solve_cache_lock = threading.Lock()
        self._field_thread = threading.Thread(target=self._compute_field, daemon=True)
        self._field_thread.start()

    def _compute_field(self):
        try:
            field = field_for(self.scenario)
            with self._field_lock:
                self.field = field
        except Exception as exc:  # surfaced as 500 on dependent endpoints
            log.exception("strain field computation failed")
            with self._field_lock:
                self.field_error = str(exc)

    def field_ready(self) -> bool:
        with self._field_lock:
            return self.field is not None

    def wait_field(self, timeout=None) -> bool:
        self._field_thread.join(timeout)
        return self.field_ready()

    def session(self, sid: str) -> _Session:
        with self._sessions_lock:
            if sid not in self.sessions:
                self.sessions[sid] = _Session()
            return self.sessions[sid]

    # -- payload builders ---------------------------------------------------

    def mesh_payload(self) -> dict:
        mesh = self.scenario.mesh
        pattern = np.asarray(mesh.pattern)
        return {
            "vertices2d": [[float(u), float(v)] for u, v in pattern],
            "faces": [[int(a), int(b), int(c)] for a, b, c in np.asarray(mesh.faces)],
            "pieces": [int(p) for p in np.asarray(mesh.piece_id)],
            "boundaryEdges": [
                [int(mesh.edges[e][0]), int(mesh.edges[e][1])]
                for e in mesh.boundary_edges()
            ],
            "bounds": {
                "min": [float(x) for x in pattern.min(axis=0)],
                "max": [float(x) for x in pattern.max(axis=0)],
            },
            "wd": self.config.wd,
        }

    def heatmap_payload(self) -> dict:
        with self._field_lock:
            field = self.field
        edges, _ = log_bins(field.per_face_density)
        return {
            "density": [float(x) for x in field.per_face_density],
            "binEdges": [float(x) for x in edges],
            "logScale": True,
            "variant": field.variant,
        }

    def solve_payload(self, session: _Session, baseline: bool, eta) -> bytes:
        entries = session.terminals
        key_src = json.dumps(
            {
                "terminals": [list(e) if not isinstance(e, int) else e for e in entries.entries],
                "baseline": baseline,
                "eta": eta,
                "wd": self.config.wd,
                "variant": self.config.energy_variant,
            },
            sort_keys=True,
            default=list,
        )
        solve_id = hashlib.sha256(key_src.encode()).hexdigest()[:12]
        with self._solve_cache_lock:
            cached = self._solve_cache.get(solve_id)
        if cached is not None:
            body, payload = cached
            session.last["baseline" if baseline else "weighted"] = payload
            return body
        with self._field_lock:
            field = self.field
        result, _, _, _ = run_solve(
            self.scenario,
            field,
            entries,
            baseline=baseline,
            eta=eta,
            cache_dir=self.cache_dir,
        )
        payload = result.to_json_dict()
        payload["solveId"] = solve_id
        body = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
        with self._solve_cache_lock:
            self._solve_cache[solve_id] = (body, payload)
        session.last["baseline" if baseline else "weighted"] = payload
        return body


class _Handler(BaseHTTPRequestHandler):
    server_version = "wirelay/0.1"
    app: AppState = None  # set by make_server

    # -- plumbing ------------------------------------------------------------

    def log_message(self, fmt, *args):
        log.debug("http: " + fmt, *args)

    def _send(self, code: int, body: bytes, ctype="application/json"):
        self.send_response(code)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def _json(self, code: int, payload: dict):
        self._send(code, json.dumps(payload, sort_keys=True, separators=(",", ":")).encode())

    def _error(self, code: int, message: str):
        self._json(code, {"error": message})

    def _read_body(self):
        length = int(self.headers.get("Content-Length", 0) or 0)
        raw = self.rfile.read(length) if length else b"{}"
        try:
            return json.loads(raw or b"{}")
        except json.JSONDecodeError:
            return None

    def _route(self):
        parsed = urlparse(self.path)
        query = {k: v[-1] for k, v in parse_qs(parsed.query).items()}
        return parsed.path.rstrip("/"), query

    def do_OPTIONS(self):  # CORS preflight for the browser UI
        self._send(204, b"")

    # -- GET -----------------------------------------------------------------

    def do_GET(self):
        path, query = self._route()
        try:
            if path == "/v1/health":
                self._json(
                    200,
                    {
                        "status": "ok",
                        "fieldReady": self.app.field_ready(),
                        "fieldError": self.app.field_error,
                    },
                )
            elif path == "/v1/mesh":
                self._json(200, self.app.mesh_payload())
            elif path == "/v1/heatmap":
                if not self.app.field_ready():
                    self._error(503, "strain field not yet computed")
                    return
                self._json(200, self.app.heatmap_payload())
            elif path == "/v1/compare":
                session = self.app.session(query.get("session", "default"))
                rows = []
                for name in ("weighted", "baseline"):
                    if name in session.last:
                        row = dict(session.last[name]["metrics"])
                        row["name"] = name
                        row["solveId"] = session.last[name]["solveId"]
                        rows.append(row)
                self._json(200, {"rows": rows})
            else:
                self._error(404, f"no such endpoint {path}")
        except BrokenPipeError:
            pass
        except Exception as exc:
            log.exception("GET %s failed", path)
            self._error(500, str(exc))

    # -- POST ----------------------------------------------------------------

    def do_POST(self):
        path, query = self._route()
        try:
            if path == "/v1/terminals":
                body = self._read_body()
                if body is None or "terminals" not in body:
                    self._error(400, "body must be {'terminals': [...]}")
                    return
                entries = []
                try:
                    for t in body["terminals"]:
                        if isinstance(t, dict) and "vertex" in t:
                            entries.append(int(t["vertex"]))
                        elif isinstance(t, dict) and "face" in t:
                            entries.append((int(t["face"]), tuple(float(x) for x in t["bary"])))
                        else:
                            raise WirelayError(f"bad terminal entry {t!r}")
                    tset = make_terminal_set(entries)
                except (WirelayError, KeyError, TypeError, ValueError) as exc:
                    self._error(400, f"invalid terminals: {exc}")
                    return
                session = self.app.session(query.get("session", "default"))
                with session.lock:
                    session.terminals = tset
                self._json(200, {"count": tset.count})
            elif path == "/v1/solve":
                self._handle_solve(query)
            else:
                self._error(404, f"no such endpoint {path}")
        except BrokenPipeError:
            pass
        except Exception as exc:
            log.exception("POST %s failed", path)
            self._error(500, str(exc))

    def _handle_solve(self, query):
        if not self.app.field_ready():
            self._error(503, "strain field not yet computed")
            return
        body = self._read_body()
        if body is None:
            self._error(400, "malformed JSON body")
            return
        baseline = bool(body.get("baseline", False))
        eta = body.get("eta", None)
        if eta is not None and eta != "auto":
            try:
                eta = float(eta)
            except (TypeError, ValueError):
                self._error(400, "eta must be a number or 'auto'")
                return
        session = self.app.session(query.get("session", "default"))
        with session.lock:
            if session.terminals is None or session.terminals.count < 2:
                self._error(400, "session needs at least 2 terminals")
                return
            session.ticket_counter += 1
            ticket = session.ticket_counter
            session.latest_ticket = ticket
            while session.busy:
                if session.latest_ticket != ticket:
                    self._error(409, "solve superseded by a newer request")
                    return
                session.lock.wait(timeout=0.05)
            if session.latest_ticket != ticket:
                self._error(409, "solve superseded by a newer request")
                return
            session.busy = True
        try:
            payload = self.app.solve_payload(session, baseline, eta)
        except WirelayError as exc:
            self._error(400, str(exc))
            return
        finally:
            with session.lock:
                session.busy = False
                session.lock.notify_all()
        self._send(200, payload)


def make_server(config: ProjectConfig, host="127.0.0.1", port=8080, cache_dir=None):
    app = AppState(config, cache_dir=cache_dir)
    handler = type("BoundHandler", (_Handler,), {"app": app})
    server = ThreadingHTTPServer((host, port), handler)
    server.app_state = app
    return server


def serve_http(config: ProjectConfig, host="127.0.0.1", port=8080):
    server = make_server(config, host, port)
    log.info("serving on http://%s:%d/v1 (ctrl-c to stop)", host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
