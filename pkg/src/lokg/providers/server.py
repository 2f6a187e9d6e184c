"""Reference wire-protocol server backed by the built-in providers.

Development and test tool: lets the external-client path run against a real
HTTP endpoint without any model dependencies, and pins down the protocol's
error behavior (400 malformed, 503 busy) in runnable form.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from lokg.errors import LokgError
from lokg.providers.builtin import BuiltinDetector, BuiltinEmbedder, BuiltinTranslator


class _Handler(BaseHTTPRequestHandler):
    server_version = "lokg-builtin/0.1"

    def log_message(self, *args):
        pass

    def _send(self, status: int, payload: dict):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path == "/healthz":
            self._send(200, {"status": "ok"})
        else:
            self._send(404, {"error": "not found"})

    def do_POST(self):
        if self.server.fail_requests > 0:
            self.server.fail_requests -= 1
            self._send(503, {"error": "model unavailable"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            doc = json.loads(self.rfile.read(length).decode("utf-8"))
            if not isinstance(doc, dict):
                raise ValueError("body must be a JSON object")
        except (ValueError, UnicodeDecodeError) as exc:
            self._send(400, {"error": f"malformed body: {exc}"})
            return
        try:
            if self.path == "/detect":
                self._send(200, self._detect(doc))
            elif self.path == "/translate":
                self._send(200, self._translate(doc))
            elif self.path == "/embed":
                self._send(200, self._embed(doc))
            else:
                self._send(404, {"error": "not found"})
        except (KeyError, TypeError, ValueError) as exc:
            self._send(400, {"error": f"bad request: {exc}"})
        except LokgError as exc:
            self._send(400, {"error": f"{type(exc).__name__}: {exc}"})

    @staticmethod
    def _texts_of(doc) -> list[str]:
        texts = doc["texts"]
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            raise ValueError("'texts' must be a list of strings")
        return texts

    def _detect(self, doc):
        verdicts = [self.server.detector.detect(t) for t in self._texts_of(doc)]
        return {"verdicts": [{"lang": v.lang, "confidence": v.confidence} for v in verdicts]}

    def _translate(self, doc):
        source, target = doc["source"], doc["target"]
        if not isinstance(source, str) or not isinstance(target, str):
            raise ValueError("'source' and 'target' must be strings")
        results = self.server.translator.translate_batch(self._texts_of(doc), source, target)
        return {"texts": [r.text for r in results]}

    def _embed(self, doc):
        doc["model"]  # required by the protocol; builtin backend ignores the value
        vectors = self.server.embedder.embed_batch(self._texts_of(doc))
        return {"dim": self.server.embedder.dim,
                "vectors": [list(v.values) for v in vectors]}


class BuiltinProviderServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), _Handler)
        self.detector = BuiltinDetector()
        self.translator = BuiltinTranslator()
        self.embedder = BuiltinEmbedder()
        self.fail_requests = 0  # test hook: next N POSTs answer 503

    @property
    def base_url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "BuiltinProviderServer":
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return self
