"""CLI entry: embed-service [--model ...] [--host ...] [--port ...]"""

import argparse

from embed_service.app import serve
from embed_service.config import ServiceConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="embed-service",
        description="Sentence-embedding sidecar for the lokg provider protocol.")
    defaults = ServiceConfig()
    parser.add_argument("--model", default=defaults.model,
                        help="charproj-v1 or st:<sentence-transformers id>")
    parser.add_argument("--host", default=defaults.host)
    parser.add_argument("--port", type=int, default=defaults.port)
    parser.add_argument("--max-batch", type=int, default=defaults.max_batch)
    parser.add_argument("--model-dir", default=defaults.model_dir)
    parser.add_argument("--device", default=defaults.device)
    parser.add_argument("--no-normalize", action="store_true")
    args = parser.parse_args(argv)
    serve(ServiceConfig(
        model=args.model, host=args.host, port=args.port,
        max_batch=args.max_batch, model_dir=args.model_dir,
        device=args.device, normalize=not args.no_normalize,
    ))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
