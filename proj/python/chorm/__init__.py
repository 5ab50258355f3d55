"""Python facade for the choreography toolkit.

The compiled extension returns JSON strings; this module decodes them into
plain dicts so callers get ordinary Python data.
"""

import json as _json

from . import _core  # type: ignore[attr-defined]

__version__ = _core.__version__

__all__ = [
    "parse_choreography",
    "parse_global_types",
    "merge",
    "run",
    "typecheck",
    "extract",
    "mesh",
    "verify",
]


def parse_choreography(text):
    """Parse a choreography source string into an AST document."""
    return _json.loads(_core.parse_choreography(text))


def parse_global_types(text):
    """Parse ``protocol NAME { ... }`` declarations."""
    return _json.loads(_core.parse_global_types(text))


def merge(text, session="", chan="c"):
    """Collapse every session of a choreography onto one fresh session."""
    return _json.loads(_core.merge(text, session, chan))


def run(text, env_json="", fuel=64):
    """Execute a choreography under a scripted builtin environment."""
    if isinstance(env_json, dict):
        env_json = _json.dumps(env_json)
    return _json.loads(_core.run(text, env_json, fuel))


def typecheck(text, protocols, env_json="", binds=()):
    """Typecheck a choreography against protocol declarations."""
    if isinstance(env_json, dict):
        env_json = _json.dumps(env_json)
    return _json.loads(_core.typecheck(text, protocols, env_json, list(binds)))


def extract(text, env_json=""):
    """Extract the global type of a single-session choreography."""
    if isinstance(env_json, dict):
        env_json = _json.dumps(env_json)
    return _json.loads(_core.extract(text, env_json))


def mesh(candidate, originals, depth=8, base=5, components=0):
    """Bounded mesh membership of a candidate type in a set of originals."""
    return _json.loads(_core.mesh(candidate, originals, depth, base, components))


def verify(text, session="", env_json="", depth=12):
    """Bounded soundness/completeness check of the merge transformation."""
    if isinstance(env_json, dict):
        env_json = _json.dumps(env_json)
    return _json.loads(_core.verify(text, session, env_json, depth))
