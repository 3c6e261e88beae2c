"""``python -m miboard`` runs the game server (same as miboard-server)."""

from .cli import server_main

if __name__ == "__main__":
    raise SystemExit(server_main())
