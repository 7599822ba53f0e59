"""graph6 encoding/decoding plus the JSON sidecar for constructed graphs.

graph6 is the standard header-less bit-packed text format for undirected
graphs: N(n) followed by the upper triangle in column order, 6 bits per
printable character (offset 63).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .graphalg import Graph

SIDECAR_VERSION = 1


class Graph6ParseError(ValueError):
    """Malformed graph6 input; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def _encode_n(n: int) -> str:
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    if n <= 68719476735:
        return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))
    raise ValueError("vertex count too large for graph6")


def _decode_n(s: str) -> tuple[int, int]:
    if not s:
        raise Graph6ParseError("empty graph6 string", 0)
    if s[0] != "~":
        return ord(s[0]) - 63, 1
    if len(s) >= 2 and s[1] != "~":
        if len(s) < 4:
            raise Graph6ParseError("truncated 4-byte vertex count", len(s))
        n = 0
        for c in s[1:4]:
            n = (n << 6) | (ord(c) - 63)
        return n, 4
    if len(s) < 8:
        raise Graph6ParseError("truncated 8-byte vertex count", len(s))
    n = 0
    for c in s[2:8]:
        n = (n << 6) | (ord(c) - 63)
    return n, 8


def graph6_encode(n: int, edges: np.ndarray) -> str:
    """graph6 string of the simple graph on vertices 0..n-1."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    nbits = n * (n - 1) // 2
    bits = np.zeros(nbits, dtype=np.uint8)
    if len(edges):
        lo = edges.min(axis=1)
        hi = edges.max(axis=1)
        pos = hi * (hi - 1) // 2 + lo
        bits[pos] = 1
    pad = (-nbits) % 6
    bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    groups = bits.reshape(-1, 6)
    weights = np.array([32, 16, 8, 4, 2, 1], dtype=np.uint8)
    vals = (groups * weights).sum(axis=1).astype(np.uint8) + 63
    return _encode_n(n) + vals.tobytes().decode("ascii")


def graph6_decode(s: str) -> tuple[int, np.ndarray]:
    """(n, edges) from a graph6 string (optional >>graph6<< header allowed)."""
    s = s.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    n, off = _decode_n(s)
    nbits = n * (n - 1) // 2
    nchars = (nbits + 5) // 6
    body = s[off:]
    if len(body) < nchars:
        raise Graph6ParseError(
            f"need {nchars} payload bytes for n={n}, found {len(body)}", off + len(body))
    if len(body) > nchars:
        raise Graph6ParseError("trailing bytes after graph6 payload", off + nchars)
    raw = np.frombuffer(body.encode("ascii"), dtype=np.uint8).astype(np.int64) - 63
    if (raw < 0).any() or (raw > 63).any():
        bad = int(np.nonzero((raw < 0) | (raw > 63))[0][0])
        raise Graph6ParseError("character out of graph6 range", off + bad)
    bits = ((raw[:, None] >> np.array([5, 4, 3, 2, 1, 0])) & 1).reshape(-1)[:nbits]
    pos = np.nonzero(bits)[0]
    # invert pos = hi*(hi-1)/2 + lo
    hi = ((1 + np.sqrt(1 + 8 * pos.astype(np.float64))) / 2).astype(np.int64)
    hi = np.where(hi * (hi - 1) // 2 > pos, hi - 1, hi)
    lo = pos - hi * (hi - 1) // 2
    edges = np.column_stack([lo, hi])
    return n, edges


def write_graph(g: Graph, path: str | Path):
    """Write <path> (graph6) and <path>.json (sidecar with parts/provenance)."""
    path = Path(path)
    path.write_text(graph6_encode(g.num_vertices, g.edges) + "\n")
    meta = {k: v for k, v in g.meta.items()
            if isinstance(v, (str, int, float, bool, list, type(None)))}
    family_meta = g.meta.get("family_meta")
    if isinstance(family_meta, dict):
        meta["family_meta"] = {k: v for k, v in family_meta.items()
                               if isinstance(v, (str, int, float, bool, list, type(None)))}
    sidecar = {
        "sidecar_version": SIDECAR_VERSION,
        "num_vertices": g.num_vertices,
        "num_edges": int(g.num_edges),
        "parts": None if g.parts is None else
                 [int(np.sum(g.parts == 0)), int(np.sum(g.parts == 1))],
        "part_of_first": None if g.parts is None else int(g.parts[0]),
        "vertex_order": "points first by coordinate code, then lines by "
                        "(K index, anchor code)",
        "meta": meta,
    }
    Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=2) + "\n")


def read_graph(path: str | Path) -> Graph:
    """Read a graph6 file, attaching parts and provenance from the sidecar."""
    path = Path(path)
    n, edges = graph6_decode(path.read_text())
    sidecar_path = Path(str(path) + ".json")
    parts = None
    meta = {}
    if sidecar_path.exists():
        sidecar = json.loads(sidecar_path.read_text())
        meta = sidecar.get("meta", {})
        ps = sidecar.get("parts")
        if ps is not None:
            parts = np.concatenate([np.zeros(ps[0], dtype=np.int64),
                                    np.ones(ps[1], dtype=np.int64)])
    return Graph(n, edges, parts, meta)
