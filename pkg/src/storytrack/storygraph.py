"""Weighted undirected entity co-occurrence graph.

Edges come from entity pairs co-occurring inside a position-decaying text
window; node weights come from PageRank biased toward the seed graph's
top-10 entities.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict

from .entitylink import AnnotatedDocument

BIAS_SET_SIZE = 10


class GraphError(ValueError):
    pass


class GraphUpdateError(GraphError):
    """add/remove mismatch: removing co-occurrences the graph never saw."""


@dataclass
class GraphConfig:
    window_start: float = 500.0   # window length (chars) at document start
    window_shrink: float = 400.0  # total shrink by document end
    damping: float = 0.85
    tol: float = 1e-10
    max_iter: int = 200


def window_length(position: int, doc_length: int,
                  config: GraphConfig | None = None) -> float:
    """Co-occurrence window length for an entity at ``position`` in a
    document of ``doc_length`` characters; shrinks linearly toward the end."""
    if doc_length <= 0:
        raise GraphError("document length must be positive")
    cfg = config or GraphConfig()
    return cfg.window_start - cfg.window_shrink * (position / doc_length)


def _cooccurrence_pairs(doc: AnnotatedDocument,
                        config: GraphConfig) -> Counter:
    """Multiset of unordered entity pairs co-occurring within the window."""
    anns = doc.annotations
    if any(a.position > b.position for a, b in zip(anns, anns[1:])):
        anns = sorted(anns, key=lambda a: a.position)
    length = len(doc.doc.text)
    pairs: Counter = Counter()
    for i, e in enumerate(anns):
        limit = window_length(e.position, length, config)
        for j in range(i + 1, len(anns)):
            other = anns[j]
            if other.position - e.position > limit:
                break  # annotations are position-sorted
            if other.entity_id != e.entity_id:
                u, v = sorted((e.entity_id, other.entity_id))
                pairs[(u, v)] += 1
    return pairs


class EntityGraph:
    """Co-occurrence graph with frozen teleport bias and PageRank weights."""

    def __init__(self, config: GraphConfig | None = None):
        self.config = config or GraphConfig()
        self.weights: Dict[str, float] = {}
        self._adj: Dict[str, Dict[str, int]] = {}
        self.bias: list[str] = []
        self._bias_frozen = False

    @property
    def n_nodes(self) -> int:
        return len(self._adj)

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def nodes(self):
        return self._adj.keys()

    def edge_count(self, u: str, v: str) -> int:
        return self._adj.get(u, {}).get(v, 0)

    def node_weight(self, entity_id: str) -> float:
        return self.weights.get(entity_id, 0.0)

    def _inc_edge(self, u: str, v: str, by: int) -> None:
        self._adj.setdefault(u, {})
        self._adj.setdefault(v, {})
        self._adj[u][v] = self._adj[u].get(v, 0) + by
        self._adj[v][u] = self._adj[v].get(u, 0) + by

    def add_document(self, doc: AnnotatedDocument) -> None:
        """Create/increment co-occurrence edges for one document.

        Node weights are not recomputed here; call pagerank() after a
        mutation batch.
        """
        for (u, v), count in _cooccurrence_pairs(doc, self.config).items():
            self._inc_edge(u, v, count)

    def remove_document(self, doc: AnnotatedDocument) -> None:
        """Exact inverse of add_document for a previously added document."""
        pairs = _cooccurrence_pairs(doc, self.config)
        for (u, v), count in pairs.items():
            if self.edge_count(u, v) < count:
                raise GraphUpdateError(
                    f"edge ({u!r}, {v!r}) has count {self.edge_count(u, v)}, "
                    f"cannot remove {count}"
                )
        for (u, v), count in pairs.items():
            self._inc_edge(u, v, -count)
            if self._adj[u][v] == 0:
                del self._adj[u][v]
                del self._adj[v][u]
        for node in [n for n, nb in self._adj.items() if not nb]:
            del self._adj[node]
            self.weights.pop(node, None)

    def _teleport(self) -> Dict[str, float]:
        members = [b for b in self.bias if b in self._adj]
        if not members:
            members = sorted(self._adj)
        share = 1.0 / len(members)
        t = {n: 0.0 for n in self._adj}
        for m in members:
            t[m] = share
        return t

    def pagerank(self) -> Dict[str, float]:
        """Power iteration with teleport restricted to the frozen bias set
        (uniform over all nodes while no bias is set). Stores and returns
        the node weights, which sum to 1."""
        if not self._adj:
            self.weights = {}
            return {}
        nodes = sorted(self._adj)
        n = len(nodes)
        d = self.config.damping
        t = self._teleport()
        degree = {u: float(sum(self._adj[u].values())) for u in nodes}
        x = {u: 1.0 / n for u in nodes}
        for _ in range(self.config.max_iter):
            nxt = {u: (1.0 - d) * t[u] for u in nodes}
            dangling = 0.0
            for u in nodes:
                if degree[u] == 0.0:
                    dangling += x[u]
                    continue
                share = d * x[u] / degree[u]
                for v, count in self._adj[u].items():
                    nxt[v] += share * count
            if dangling:
                for u in nodes:
                    nxt[u] += d * dangling * t[u]
            delta = sum(abs(nxt[u] - x[u]) for u in nodes)
            x = nxt
            if delta < self.config.tol:
                break
        total = sum(x.values())
        self.weights = {u: w / total for u, w in x.items()}
        return dict(self.weights)

    def initialize_bias(self) -> None:
        """Freeze the teleport set to the current graph's top-10 entities.

        The bootstrap ranking runs unbiased (uniform teleport); ties at the
        cut go to the lexicographically smaller id. Calling twice is an
        error: the bias anchors the story to its seed for good.
        """
        if self._bias_frozen:
            raise GraphError("bias set is frozen and cannot be re-initialized")
        self.bias = []
        weights = self.pagerank()
        ranked = sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))
        self.bias = [node for node, _ in ranked[:BIAS_SET_SIZE]]
        self._bias_frozen = True

    def snapshot(self) -> dict:
        """JSON-friendly debug export."""
        return {
            "nodes": [
                {"id": n, "weight": self.weights.get(n, 0.0)}
                for n in sorted(self._adj)
            ],
            "edges": [
                {"u": u, "v": v, "count": c}
                for u in sorted(self._adj)
                for v, c in sorted(self._adj[u].items())
                if u < v
            ],
            "bias": list(self.bias),
        }
