from __future__ import annotations

from typing import Any
import json

import networkx as nx

from polycrystal.models import IndexId, PathVector, format_index
from polycrystal.modules.oracle import CrystalGraph


class GraphFormatError(ValueError):
    pass


def _index_to_json(index: IndexId) -> Any:
    if isinstance(index, tuple):
        return list(index)
    return index


def _index_from_json(raw: Any) -> IndexId:
    if isinstance(raw, list):
        return tuple(int(v) for v in raw)
    return raw


def export_dot(g: CrystalGraph) -> str:
    ids = {x: f"n{pos}" for pos, x in enumerate(g.nodes())}
    lines = ["digraph crystal {", "  rankdir=TB;"]
    for x, name in ids.items():
        lines.append(f'  {name} [label="{x}"];')
    for x, i, y in g.edges():
        lines.append(f'  {ids[x]} -> {ids[y]} [label="{format_index(i)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_json(g: CrystalGraph) -> str:
    payload = {
        "depth": g.depth,
        "window": g.window,
        "indices": [_index_to_json(i) for i in g.indices],
        "nodes": [str(x) for x in g.nodes()],
        "edges": [
            {"src": str(x), "label": format_index(i), "index": _index_to_json(i), "dst": str(y)}
            for x, i, y in g.edges()
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def parse_json(text: str) -> CrystalGraph:
    """Inverse of ``export_json``; the result carries no crystal."""
    try:
        payload = json.loads(text)
        nodes = [PathVector.parse(raw) for raw in payload["nodes"]]
        g = nx.DiGraph()
        for x in nodes:
            g.add_node(x, degree=x.degree())
        for edge in payload["edges"]:
            src, dst = PathVector.parse(edge["src"]), PathVector.parse(edge["dst"])
            if src not in g or dst not in g:
                raise GraphFormatError(f"edge {edge['src']} -> {edge['dst']} uses an unknown node")
            g.add_edge(src, dst, index=_index_from_json(edge.get("index", edge.get("label"))))
        return CrystalGraph(
            graph=g,
            depth=int(payload["depth"]),
            window=int(payload["window"]),
            indices=tuple(_index_from_json(i) for i in payload.get("indices", [])),
        )
    except GraphFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"not a crystal graph document: {exc}") from exc
