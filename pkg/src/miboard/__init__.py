"""MiBoard: a server-authoritative, networked board game in which players
take turns self-explaining sentences of a science text while the others
identify the comprehension strategy used, with voting, discussion, and
board movement layered on top.

The package splits into:

- :mod:`miboard.core`        pure seeded rules engine (no I/O)
- :mod:`miboard.protocol`    wire codec and chat gating
- :mod:`miboard.matchmaking` zones, rooms, auto-join
- :mod:`miboard.persistence` text corpus, event logs, replay, export
- :mod:`miboard.server`      websocket host binding it all together
- :mod:`miboard.bots`        scripted headless players for testing
"""

__version__ = "0.1.0"
