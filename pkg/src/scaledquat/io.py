"""Text documents for nodes and matrices.

A node document is JSON with lowercase keys::

    {
      "t": -1,
      "kind": "line-junitary",
      "a": [[[x0, x1, x2, x3], ...], ...],
      "b": ..., "c": ..., "d": ...,
      "j": ..., "h": ...,
      "metadata": {...}
    }

Matrices are row-major nested arrays of quadruples (coefficients of
1, i, j_t, k_t).  ``kind``, ``j``, ``h`` and ``metadata`` are optional.  Empty
state dimensions are written as ``[]`` and their sizes inferred from ``d``.
A matrix document has ``t`` and ``matrix`` (plus optional ``metadata``).

Numbers are written with 17 significant digits, so parse -> serialize is
exact for every double.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from json.decoder import scanstring

import numpy as np

from .core import AlgebraContext
from .errors import ParseError
from .matrix import HtMatrix
from .realization import Node
from .structured import Kind

_NUMBER = re.compile(r"-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][-+]?\d+)?")
_WS = re.compile(r"[ \t\n\r]*")


class _Reader:
    """Minimal JSON reader that remembers where every array started."""

    def __init__(self, text):
        self.s = text
        self.pos = {}

    def where(self, i):
        line = self.s.count("\n", 0, i) + 1
        col = i - (self.s.rfind("\n", 0, i) + 1) + 1
        return line, col

    def fail(self, msg, i):
        raise ParseError(msg, *self.where(i))

    def ws(self, i):
        return _WS.match(self.s, i).end()

    def value(self, i):
        i = self.ws(i)
        if i >= len(self.s):
            self.fail("unexpected end of input", i)
        ch = self.s[i]
        if ch == "{":
            return self.obj(i)
        if ch == "[":
            return self.arr(i)
        if ch == '"':
            try:
                return scanstring(self.s, i + 1)
            except json.JSONDecodeError as exc:
                self.fail(exc.msg, exc.pos)
        for lit, v in (("true", True), ("false", False), ("null", None)):
            if self.s.startswith(lit, i):
                return v, i + len(lit)
        m = _NUMBER.match(self.s, i)
        if not m:
            self.fail(f"unexpected character {ch!r}", i)
        txt = m.group()
        v = float(txt) if any(c in txt for c in ".eE") else int(txt)
        return v, m.end()

    def arr(self, i):
        out = []
        self.pos[id(out)] = i
        i = self.ws(i + 1)
        if self.s[i:i + 1] == "]":
            return out, i + 1
        while True:
            v, i = self.value(i)
            out.append(v)
            i = self.ws(i)
            ch = self.s[i:i + 1]
            if ch == "]":
                return out, i + 1
            if ch != ",":
                self.fail("expected ',' or ']'", i)
            i += 1

    def obj(self, i):
        out = {}
        self.pos[id(out)] = i
        i = self.ws(i + 1)
        if self.s[i:i + 1] == "}":
            return out, i + 1
        while True:
            i = self.ws(i)
            if self.s[i:i + 1] != '"':
                self.fail("expected a string key", i)
            k, i = scanstring(self.s, i + 1)
            i = self.ws(i)
            if self.s[i:i + 1] != ":":
                self.fail("expected ':'", i)
            v, i = self.value(i + 1)
            if k in out:
                self.fail(f"duplicate key {k!r}", i)
            out[k] = v
            i = self.ws(i)
            ch = self.s[i:i + 1]
            if ch == "}":
                return out, i + 1
            if ch != ",":
                self.fail("expected ',' or '}'", i)
            i += 1

    def parse(self):
        v, i = self.value(0)
        i = self.ws(i)
        if i != len(self.s):
            self.fail("trailing characters", i)
        return v


def _matrix(rd: _Reader, obj, name, ctx, shape=None) -> HtMatrix:
    at = rd.pos.get(id(obj), 0)
    if not isinstance(obj, list):
        rd.fail(f"{name}: expected an array of rows", at)
    if len(obj) == 0:
        n, m = shape if shape is not None else (0, 0)
        if n and m:
            rd.fail(f"{name}: empty matrix but expected shape {n}x{m}", at)
        return HtMatrix.zeros(n, m, ctx)
    rows = []
    for r, row in enumerate(obj):
        if not isinstance(row, list):
            rd.fail(f"{name}[{r}]: expected an array of quadruples", rd.pos.get(id(row), at))
        vals = []
        for c, q in enumerate(row):
            qa = rd.pos.get(id(q), rd.pos.get(id(row), at))
            if not isinstance(q, list) or len(q) != 4 or not all(
                    isinstance(v, (int, float)) and not isinstance(v, bool) for v in q):
                rd.fail(f"{name}[{r}][{c}]: expected a quadruple of 4 numbers", qa)
            vals.append([float(v) for v in q])
        rows.append(vals)
    m = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != m:
            rd.fail(f"{name}: row {r} has {len(row)} entries, expected {m}", rd.pos.get(id(obj[r]), at))
    if shape is not None and shape[1] is not None and (len(rows), m) != tuple(shape):
        rd.fail(f"{name}: shape {len(rows)}x{m}, expected {shape[0]}x{shape[1]}", at)
    X = np.array(rows, dtype=float).reshape(len(rows), m, 4)
    return HtMatrix.from_quads(X, ctx)


@dataclass
class NodeDocument:
    t: float
    node: Node
    J: HtMatrix | None = None
    H: HtMatrix | None = None
    kind: Kind | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def ctx(self):
        return self.node.ctx


def _ctx(rd, doc):
    if "t" not in doc:
        rd.fail("missing key 't'", rd.pos.get(id(doc), 0))
    t = doc["t"]
    if not isinstance(t, (int, float)) or isinstance(t, bool) or t == 0:
        rd.fail("'t' must be a nonzero number", rd.pos.get(id(doc), 0))
    return AlgebraContext(float(t))


def parse_node_document(text: str) -> NodeDocument:
    rd = _Reader(text)
    doc = rd.parse()
    if not isinstance(doc, dict):
        rd.fail("a node document must be a JSON object", 0)
    known = {"t", "kind", "a", "b", "c", "d", "j", "h", "metadata"}
    for k in doc:
        if k not in known:
            rd.fail(f"unknown key {k!r}", rd.pos.get(id(doc), 0))
    ctx = _ctx(rd, doc)
    for k in "abcd":
        if k not in doc:
            rd.fail(f"missing key {k!r}", rd.pos.get(id(doc), 0))
    D = _matrix(rd, doc["d"], "d", ctx)
    n, m = D.shape
    N = len(doc["a"]) if isinstance(doc["a"], list) else 0
    A = _matrix(rd, doc["a"], "a", ctx, (N, N))
    B = _matrix(rd, doc["b"], "b", ctx, (N, m))
    C = _matrix(rd, doc["c"], "c", ctx, (n, N))
    J = _matrix(rd, doc["j"], "j", ctx, (n, n)) if doc.get("j") is not None else None
    H = _matrix(rd, doc["h"], "h", ctx, (N, N)) if doc.get("h") is not None else None
    kind = None
    if doc.get("kind") is not None:
        try:
            kind = Kind.parse(doc["kind"])
        except ValueError as exc:
            rd.fail(str(exc), rd.pos.get(id(doc), 0))
    meta = doc.get("metadata") or {}
    if not isinstance(meta, dict):
        rd.fail("metadata must be an object", rd.pos.get(id(meta), 0))
    return NodeDocument(ctx.t, Node(A, B, C, D), J, H, kind, meta)


def parse_matrix_document(text: str) -> HtMatrix:
    rd = _Reader(text)
    doc = rd.parse()
    if not isinstance(doc, dict) or "matrix" not in doc:
        rd.fail("a matrix document needs keys 't' and 'matrix'", 0)
    ctx = _ctx(rd, doc)
    return _matrix(rd, doc["matrix"], "matrix", ctx)


def fmt_number(v: float) -> str:
    v = float(v)
    if v == 0:
        return "0"
    return "%.17g" % v


def _fmt_matrix(M: HtMatrix, indent="  ") -> str:
    if M.rows == 0 or M.cols == 0:
        return "[]"
    Q = M.quads()
    rows = []
    for r in range(M.rows):
        qs = ", ".join("[" + ", ".join(fmt_number(v) for v in Q[r, c]) + "]" for c in range(M.cols))
        rows.append(f"{indent}  [{qs}]")
    return "[\n" + ",\n".join(rows) + f"\n{indent}]"


def format_node_document(doc: NodeDocument) -> str:
    n = doc.node
    parts = [f'  "t": {fmt_number(doc.t)}']
    if doc.kind is not None:
        parts.append(f'  "kind": "{doc.kind.value}"')
    for key, M in (("a", n.A), ("b", n.B), ("c", n.C), ("d", n.D), ("j", doc.J), ("h", doc.H)):
        if M is not None:
            parts.append(f'  "{key}": {_fmt_matrix(M)}')
    if doc.metadata:
        parts.append('  "metadata": ' + json.dumps(doc.metadata, sort_keys=True))
    return "{\n" + ",\n".join(parts) + "\n}\n"


def format_matrix_document(M: HtMatrix, metadata=None) -> str:
    parts = [f'  "t": {fmt_number(M.t)}', f'  "matrix": {_fmt_matrix(M)}']
    if metadata:
        parts.append('  "metadata": ' + json.dumps(metadata, sort_keys=True))
    return "{\n" + ",\n".join(parts) + "\n}\n"


def load_node(path) -> NodeDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_node_document(fh.read())


def save_node(path, doc: NodeDocument):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_node_document(doc))


def load_matrix(path) -> HtMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix_document(fh.read())


def save_matrix(path, M: HtMatrix, metadata=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix_document(M, metadata))
