"""Architecture JSON, schema "ghn-arch/1"

A document looks like::

    {"edges": [[0, 2], [1, 2]],
     "inputs": [0, 1],
     "join": "sum",
     "mode": "standard",
     "nodes": [{"id": 0, "op": "conv1x1"}, {"id": 1, "op": "conv1x1"},
               {"id": 2, "op": "sep_conv3x3"}],
     "schema": "ghn-arch/1"}

Anytime nodes also carry "scale" ("full", "half" or "quarter"),
"early_exit" and "block". Keys are written sorted.
"""
import hashlib
import json

from ..errors import ArchParseError
from .graph import (
    ANYTIME, MODES, JOIN, OpKind, Scale, AnytimeAttrs, ArchNode, ArchGraph,
)


SCHEMA = "ghn-arch/1"


def to_dict(g):
    """Plain-data form of a graph"""
    nodes = []
    for n in g.nodes:
        d = {"id": int(n.id), "op": n.op.value}
        if n.anytime is not None:
            d["scale"] = n.anytime.scale.value
            d["early_exit"] = bool(n.anytime.early_exit)
            d["block"] = int(n.anytime.block)
        nodes.append(d)
    return {
        "schema": SCHEMA,
        "mode": g.mode,
        "join": g.join,
        "inputs": [int(i) for i in g.input_ids],
        "nodes": nodes,
        "edges": [[int(u), int(v)] for u, v in g.edges],
    }


def serialize(g, indent=None):
    """JSON text of a graph, keys sorted"""
    return json.dumps(to_dict(g), sort_keys=True, indent=indent)


def graph_hash(g):
    """Short content hash of a graph (first 16 hex digits of SHA-256)"""
    return hashlib.sha256(serialize(g).encode("utf-8")).hexdigest()[:16]


def deserialize(text):
    """Parse JSON text into an ArchGraph

    Raises
    ------
    ArchParseError
       for malformed JSON, a wrong schema version, unknown op or scale
       names, or missing fields; the error names where parsing failed
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ArchParseError(
            f"malformed JSON: {e.msg}", f"line {e.lineno} column {e.colno}"
        ) from None
    return from_dict(doc)


def _get(d, key, where):
    if not isinstance(d, dict):
        raise ArchParseError("expected an object", where)
    if key not in d:
        raise ArchParseError(f'missing field "{key}"', where)
    return d[key]


def _list(doc, key):
    x = _get(doc, key, "document")
    if not isinstance(x, list):
        raise ArchParseError(f"expected a list, got {x!r}", key)
    return x


def _int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ArchParseError(f"expected an integer, got {x!r}", where)
    return x


def _enum(cls, token, where, what):
    try:
        return cls(token)
    except ValueError:
        raise ArchParseError(f"unknown {what} {token!r}", where) from None


def from_dict(doc):
    """ArchGraph from the plain-data form"""
    schema = _get(doc, "schema", "document")
    if schema != SCHEMA:
        emsg = f"schema version {schema!r} is not {SCHEMA!r}"
        raise ArchParseError(emsg, "schema")

    mode = _get(doc, "mode", "document")
    if mode not in MODES:
        raise ArchParseError(f"unknown mode {mode!r}", "mode")
    join = doc.get("join", JOIN[mode])

    inputs = [_int(i, f"inputs[{k}]")
              for k, i in enumerate(_list(doc, "inputs"))]

    nodes = []
    for k, d in enumerate(_list(doc, "nodes")):
        where = f"nodes[{k}]"
        nid = _int(_get(d, "id", where), f"{where}.id")
        op = _enum(OpKind, _get(d, "op", where), f"{where}.op", "op")
        attrs = None
        if mode == ANYTIME:
            attrs = AnytimeAttrs(
                _enum(Scale, _get(d, "scale", where), f"{where}.scale",
                      "scale"),
                bool(_get(d, "early_exit", where)),
                _int(_get(d, "block", where), f"{where}.block"),
            )
        nodes.append(ArchNode(nid, op, attrs))

    edges = []
    for k, e in enumerate(_list(doc, "edges")):
        where = f"edges[{k}]"
        if not isinstance(e, list) or len(e) != 2:
            raise ArchParseError("edge must be a [source, target] pair", where)
        edges.append((_int(e[0], where), _int(e[1], where)))

    return ArchGraph(nodes, edges, inputs, mode, join)


def load(path):
    """Read an architecture file"""
    with open(path, "r") as f:
        return deserialize(f.read())


def dump(g, path):
    """Write an architecture file"""
    with open(path, "w") as f:
        f.write(serialize(g, indent=1))
        f.write("\n")
