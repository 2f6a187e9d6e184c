"""Shared conformance checks for any wire-protocol implementation.

Run against a live base URL; every helper raises AssertionError with a
readable message on violation.  The sidecar service and the reference
server both have to pass the checks for the endpoints they expose.
"""

from __future__ import annotations

import requests

from lokg.providers.client import PROTO_HEADER

DEFAULT_TIMEOUT = 10.0


def _post(base_url, path, payload, timeout=DEFAULT_TIMEOUT):
    return requests.post(base_url.rstrip("/") + path, json=payload,
                         headers=PROTO_HEADER, timeout=timeout)


def check_embed(base_url: str, model: str = "default") -> None:
    resp = _post(base_url, "/embed", {"model": model, "texts": ["a", "a"]})
    assert resp.status_code == 200, f"/embed returned {resp.status_code}"
    doc = resp.json()
    assert isinstance(doc.get("dim"), int) and doc["dim"] >= 1, "dim must be a positive int"
    vectors = doc.get("vectors")
    assert isinstance(vectors, list) and len(vectors) == 2, "one vector per input text"
    assert all(len(v) == doc["dim"] for v in vectors), "vector length must equal dim"
    assert vectors[0] == vectors[1], "identical texts must embed identically"

    # order preserved and stable across calls
    texts = ["alpha", "beta", "gamma"]
    first = _post(base_url, "/embed", {"model": model, "texts": texts}).json()["vectors"]
    second = _post(base_url, "/embed",
                   {"model": model, "texts": list(reversed(texts))}).json()["vectors"]
    assert first == list(reversed(second)), "response order must follow request order"
    third = _post(base_url, "/embed", {"model": model, "texts": texts}).json()["vectors"]
    assert first == third, "same request must produce identical vectors"


def check_embed_errors(base_url: str) -> None:
    assert _post(base_url, "/embed", {"texts": "not-a-list", "model": "m"}).status_code == 400
    assert _post(base_url, "/embed", {"model": "m"}).status_code == 400
    resp = requests.post(base_url.rstrip("/") + "/embed", data=b"{{{",
                         headers={**PROTO_HEADER, "Content-Type": "application/json"},
                         timeout=DEFAULT_TIMEOUT)
    assert resp.status_code == 400, "malformed JSON body must give 400"


def check_detect(base_url: str) -> None:
    resp = _post(base_url, "/detect", {"texts": ["the and of it", "und der die das"]})
    assert resp.status_code == 200, f"/detect returned {resp.status_code}"
    verdicts = resp.json().get("verdicts")
    assert isinstance(verdicts, list) and len(verdicts) == 2
    for v in verdicts:
        assert isinstance(v.get("lang"), str) and len(v["lang"]) == 2
        assert 0.0 <= v["confidence"] <= 1.0
    assert _post(base_url, "/detect", {}).status_code == 400


def check_translate(base_url: str) -> None:
    resp = _post(base_url, "/translate",
                 {"source": "de", "target": "en", "texts": ["Pflege und Kommunikation"]})
    assert resp.status_code == 200, f"/translate returned {resp.status_code}"
    texts = resp.json().get("texts")
    assert isinstance(texts, list) and len(texts) == 1 and isinstance(texts[0], str)
    assert _post(base_url, "/translate", {"texts": ["x"]}).status_code == 400


def run_conformance(base_url: str, capabilities=("detect", "translate", "embed"),
                    model: str = "default") -> list[str]:
    """Run every check the endpoint claims to support; returns the list run."""
    ran = []
    if "embed" in capabilities:
        check_embed(base_url, model=model)
        check_embed_errors(base_url)
        ran += ["embed", "embed_errors"]
    if "detect" in capabilities:
        check_detect(base_url)
        ran.append("detect")
    if "translate" in capabilities:
        check_translate(base_url)
        ran.append("translate")
    return ran
