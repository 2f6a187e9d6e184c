"""FastAPI app implementing /embed (wire protocol) plus /healthz.

Stateless per request: no cross-request caching, so the pipeline's own
embedding cache stays the single source of reuse.  503 until the model has
loaded; 400 for anything malformed or over the request limits.
"""

from __future__ import annotations

from contextlib import asynccontextmanager

import uvicorn
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from embed_service.config import ServiceConfig
from embed_service.model import load_backend


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    state = {"backend": None}

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        state["backend"] = load_backend(config.model, config.model_dir,
                                        config.device, config.normalize)
        yield
        state["backend"] = None

    app = FastAPI(title="embed-service", lifespan=lifespan)

    def bad_request(message: str) -> JSONResponse:
        return JSONResponse({"error": message}, status_code=400)

    @app.get("/healthz")
    async def healthz():
        backend = state["backend"]
        if backend is None:
            return JSONResponse({"status": "loading"}, status_code=503)
        return {"status": "ok", "model": backend.name, "dim": backend.dim}

    @app.post("/embed")
    async def embed(request: Request):
        backend = state["backend"]
        if backend is None:
            return JSONResponse({"error": "model not ready"}, status_code=503)
        try:
            doc = await request.json()
        except Exception:
            return bad_request("body must be valid JSON")
        if not isinstance(doc, dict):
            return bad_request("body must be a JSON object")
        if "model" not in doc or not isinstance(doc["model"], str):
            return bad_request("'model' must be a string")
        texts = doc.get("texts")
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            return bad_request("'texts' must be a list of strings")
        if any(not t.strip() for t in texts):
            return bad_request("texts must be non-empty")
        if len(texts) > config.max_batch:
            return bad_request(f"batch of {len(texts)} exceeds max_batch {config.max_batch}")
        if sum(len(t) for t in texts) > config.max_request_chars:
            return bad_request("request exceeds size limit")
        if not texts:
            return {"dim": backend.dim, "vectors": []}
        try:
            vectors = backend.encode(texts)
        except ValueError as exc:
            return bad_request(str(exc))
        return {"dim": backend.dim, "vectors": vectors}

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted."""
    uvicorn.run(create_app(config), host=config.host, port=config.port,
                log_level="warning")
