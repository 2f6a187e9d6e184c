#!/usr/bin/env python3
"""Serve the built-in providers over the wire protocol (dev/test tool).

Lets the external-provider code path run locally:
    python scripts/serve_providers.py --port 8080
then point [providers.*] at mode = "external", endpoint = "http://127.0.0.1:8080".
"""

import argparse

from lokg.providers.server import BuiltinProviderServer


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    args = parser.parse_args()
    server = BuiltinProviderServer(host=args.host, port=args.port)
    print(f"serving builtin providers at {server.base_url} (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()


if __name__ == "__main__":
    main()
