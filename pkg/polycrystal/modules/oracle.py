from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence
import logging

import networkx as nx
import pandas as pd

from polycrystal.models import IndexId, PathVector, Weight, format_index, index_sort_key
from polycrystal.modules.zinfty import SequenceCrystal

logger = logging.getLogger(__name__)

ENUMERATION_COLUMNS = ["degree", "vector", "weight"]
CHARACTER_COLUMNS = ["degree", "weight", "count"]
VERIFY_COLUMNS = ["check", "node", "detail"]
STABILIZATION_COLUMNS = ["window", "degree", "count", "stable"]


def collapse_level(index: IndexId) -> IndexId:
    """(level, copy) -> level; plain indices are kept."""
    if isinstance(index, tuple):
        return index[0]
    return index


@dataclass
class CrystalGraph:
    """f_tilde closure of the zero vector, cut at total degree ``depth``."""

    graph: nx.DiGraph
    depth: int
    window: int
    indices: tuple[IndexId, ...] = ()
    crystal: SequenceCrystal | None = field(default=None, repr=False)
    window_hits: int = 0

    @classmethod
    def empty(cls, depth: int, window: int, indices: Sequence[IndexId] = ()) -> "CrystalGraph":
        g = nx.DiGraph()
        g.add_node(PathVector(), degree=0)
        return cls(graph=g, depth=depth, window=window, indices=tuple(indices))

    def add_edge(self, x: PathVector, i: IndexId, y: PathVector) -> None:
        if y not in self.graph:
            self.graph.add_node(y, degree=y.degree())
        self.graph.add_edge(x, y, index=i)

    def nodes(self) -> list[PathVector]:
        return sorted(self.graph.nodes, key=PathVector.sort_key)

    def node_set(self) -> frozenset[PathVector]:
        return frozenset(self.graph.nodes)

    def edges(self) -> list[tuple[PathVector, IndexId, PathVector]]:
        triples = [(x, data["index"], y) for x, y, data in self.graph.edges(data=True)]
        return sorted(triples, key=lambda e: (e[0].sort_key(), e[2].sort_key()))

    def edge_set(self) -> frozenset[tuple[PathVector, IndexId, PathVector]]:
        return frozenset(self.edges())

    def __len__(self) -> int:
        return self.graph.number_of_nodes()

    def __contains__(self, x: object) -> bool:
        return x in self.graph

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for x in self.nodes():
            weight = self.crystal.wt(x) if self.crystal is not None else Weight()
            rows.append({"degree": x.degree(), "vector": str(x), "weight": str(weight)})
        return pd.DataFrame(rows, columns=ENUMERATION_COLUMNS)


def enumeration_indices(crystal: SequenceCrystal, window: int) -> list[IndexId]:
    """Every index of the datum plus any further index the sequence places in 1..window.

    Generated data (the Monster) list their validated sample; copies outside it that
    still sit inside the window are picked up from the sequence.
    """
    seen: dict[IndexId, None] = dict.fromkeys(crystal.datum.indices)
    for i in crystal.iota.indices_within(window):
        seen.setdefault(i, None)
    return sorted(seen, key=index_sort_key)


def bfs_image(
    crystal: SequenceCrystal,
    depth: int,
    window: int | None = None,
    order: str = "breadth",
) -> CrystalGraph:
    """Close {0} under f_tilde for every datum index, up to total degree ``depth``.

    Steps whose new entry lands past ``window`` are kept and counted in ``window_hits``.

    ``order`` is "breadth" (degree by degree) or "depth" (stack); both give the same node set.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    size = window if window is not None else max(1, 3 * depth)
    if size < 1:
        raise ValueError(f"window must be >= 1, got {size}")
    indices = enumeration_indices(crystal, size)
    result = CrystalGraph.empty(depth, size, indices)
    result.crystal = crystal

    pending: list[PathVector] = [PathVector()]
    while pending:
        if order == "breadth":
            frontier, pending = pending, []
            logger.debug("bfs frontier of %d nodes", len(frontier))
        elif order == "depth":
            frontier = [pending.pop()]
        else:
            raise ValueError(f"unknown traversal order {order!r}")
        for x in frontier:
            if x.degree() >= depth:
                continue
            for i in indices:
                k = crystal.nf(x, i)
                if k > size:
                    result.window_hits += 1
                y = x.bump(k, 1)
                fresh = y not in result
                result.add_edge(x, i, y)
                if fresh:
                    pending.append(y)

    if result.window_hits:
        logger.warning(
            "%d f_tilde steps landed beyond window %d; enlarge the window", result.window_hits, size
        )
    logger.info("enumerated %d nodes up to degree %d in window %d", len(result), depth, size)
    return result


def character_counts(g: CrystalGraph, collapse: Callable[[IndexId], IndexId] | None = None) -> Counter:
    if g.crystal is None:
        raise ValueError("graph carries no crystal to weigh its nodes")
    counts: Counter = Counter()
    for x in g.graph.nodes:
        weight = g.crystal.wt(x)
        if collapse is not None:
            weight = weight.collapse(collapse)
        counts[weight] += 1
    return counts


def character(g: CrystalGraph, collapse_levels: bool = False) -> pd.DataFrame:
    """Weight multiplicities of the enumerated image, grouped by total degree."""
    counts = character_counts(g, collapse_level if collapse_levels else None)
    rows = [
        {"degree": weight.height(), "weight": str(weight), "count": count}
        for weight, count in counts.items()
    ]
    frame = pd.DataFrame(rows, columns=CHARACTER_COLUMNS)
    if frame.empty:
        return frame
    return frame.sort_values(["degree", "weight"], kind="mergesort").reset_index(drop=True)


def verify_graph(g: CrystalGraph) -> pd.DataFrame:
    """Zero vector present, everything reachable, edges invert under e_tilde, every nonzero node lowers."""
    rows: list[dict[str, str]] = []
    zero = PathVector()
    if zero not in g:
        rows.append({"check": "zero vector present", "node": "[]", "detail": "missing"})
        return pd.DataFrame(rows, columns=VERIFY_COLUMNS)
    reachable = nx.descendants(g.graph, zero) | {zero}
    for x in g.nodes():
        if x not in reachable:
            rows.append({"check": "reachable from zero", "node": str(x), "detail": "no f_tilde path"})
    if g.crystal is None:
        return pd.DataFrame(rows, columns=VERIFY_COLUMNS)
    crystal = g.crystal
    for x, i, y in g.edges():
        if crystal.e_tilde(y, i) != x:
            rows.append(
                {"check": "edge inverts", "node": str(y), "detail": f"e_{format_index(i)} does not return {x}"}
            )
    for x in g.nodes():
        if x.is_zero():
            continue
        lowered = [crystal.e_tilde(x, i) for i in g.indices]
        hits = [z for z in lowered if z is not None]
        if not hits:
            rows.append({"check": "some e_tilde defined", "node": str(x), "detail": "every e_tilde is null"})
        elif any(z not in g for z in hits):
            rows.append({"check": "e_tilde stays inside", "node": str(x), "detail": "lowered vector not enumerated"})
    if rows:
        logger.warning("graph verification found %d problems", len(rows))
    return pd.DataFrame(rows, columns=VERIFY_COLUMNS)


def degree_counts(g: CrystalGraph) -> dict[int, int]:
    counts: Counter = Counter(x.degree() for x in g.graph.nodes)
    return {d: counts.get(d, 0) for d in range(g.depth + 1)}


def window_stabilization(crystal: SequenceCrystal, depth: int, windows: Iterable[int]) -> pd.DataFrame:
    """Per-degree node counts over growing windows; ``stable`` marks windows whose counts no longer change."""
    sizes = sorted(set(windows))
    per_window = {w: degree_counts(bfs_image(crystal, depth, w)) for w in sizes}
    stable_from: int | None = None
    for pos, w in enumerate(sizes):
        if all(per_window[w] == per_window[later] for later in sizes[pos:]):
            stable_from = w
            break
    rows = [
        {"window": w, "degree": d, "count": c, "stable": stable_from is not None and w >= stable_from}
        for w in sizes
        for d, c in per_window[w].items()
    ]
    return pd.DataFrame(rows, columns=STABILIZATION_COLUMNS)
