"""Concolic SQL-injection detection for event-driven mini-apps."""

import json

from . import _core
from ._core import DEFAULT_PAYLOAD, FormatError, ReplayError, SqlError, format_app, parse_query

__all__ = [
    "DEFAULT_PAYLOAD",
    "FormatError",
    "ReplayError",
    "SqlError",
    "analyze",
    "format_app",
    "parse_query",
    "replay",
]


def analyze(source, *, strategy="guided", max_paths=256, seed=0, first_hit=False,
            int_bound=1000, str_maxlen=16, nonlinear="reject", db=None, payload=DEFAULT_PAYLOAD):
    """Analyze app source text. `db` is a fixture dict; when given, every report is replayed."""
    db_text = json.dumps(db) if db is not None else None
    return json.loads(_core.analyze(source, strategy, max_paths, seed, first_hit, int_bound,
                                    str_maxlen, nonlinear, db_text, payload))


def replay(source, report, db, *, payload=DEFAULT_PAYLOAD, payload_all=False):
    """Replay one report dict (as returned by `analyze`) against a fixture dict."""
    return json.loads(_core.replay(source, json.dumps(report), json.dumps(db), payload, payload_all))
