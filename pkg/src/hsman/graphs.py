"""Hoffman-Singleton graph, Petersen subgraph census, and the edge-frame labeling.

Everything here is exact integer combinatorics.  Graphs are small (<= 50
vertices), so adjacency is kept both as neighbor sets and as bitmasks; the
exhaustive searches (automorphisms, pentagon completions) run on the bitmask
representation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

__all__ = [
    "Graph",
    "GraphInvariants",
    "EdgeFrame",
    "WHexagon",
    "LemmaViolation",
    "PropertyViolation",
    "build_petersen",
    "build_hsg",
    "graph_invariants",
    "automorphism_order",
    "automorphism_exists",
    "vertex_orbit",
    "pentagon_census",
    "all_pentagons",
    "count_pentagons_direct",
    "petersen_extension",
    "petersen_census",
    "edge_frame",
    "sylvester_checks",
    "hexagon_decomposition",
    "row_subgraph",
]


class LemmaViolation(RuntimeError):
    """An exhaustively checked combinatorial statement failed."""


class PropertyViolation(RuntimeError):
    """A structural property of a constructed graph failed."""


class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    def __init__(self, n, edges):
        edges = list(edges)
        self.n = n
        self.adj = [set() for _ in range(n)]
        for a, b in edges:
            if a == b:
                raise PropertyViolation("self-loop at %d" % a)
            self.adj[a].add(b)
            self.adj[b].add(a)
        self.edges = sorted(tuple(sorted(e)) for e in {frozenset(e) for e in edges})
        if len(self.edges) != len(edges):
            raise PropertyViolation("parallel edges in input")
        self.masks = [0] * n
        for a, b in self.edges:
            self.masks[a] |= 1 << b
            self.masks[b] |= 1 << a

    @property
    def edge_count(self):
        return len(self.edges)

    def degree(self, v):
        return len(self.adj[v])

    def has_edge(self, a, b):
        return b in self.adj[a]

    def induced(self, vertices):
        """Induced subgraph; returns (Graph, old-id list in new-id order)."""
        vs = sorted(vertices)
        idx = {v: i for i, v in enumerate(vs)}
        es = [(idx[a], idx[b]) for a, b in self.edges if a in idx and b in idx]
        return Graph(len(vs), es), vs

    def to_json(self):
        return json.dumps({"n": self.n, "edges": [list(e) for e in self.edges]})

    def __repr__(self):
        return "Graph(n=%d, m=%d)" % (self.n, self.edge_count)


@dataclass(frozen=True)
class GraphInvariants:
    vertex_count: int
    edge_count: int
    min_degree: int
    max_degree: int
    girth: int | None  # None for acyclic graphs
    diameter: int


def _bfs_dist(g, src, skip_edge=None):
    dist = [-1] * g.n
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.adj[u]:
                if skip_edge and {u, w} == skip_edge:
                    continue
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def graph_invariants(g):
    """Exact invariants via BFS; raises on disconnected input (infinite diameter)."""
    degs = [g.degree(v) for v in range(g.n)]
    diameter = 0
    for v in range(g.n):
        dist = _bfs_dist(g, v)
        if min(dist) < 0:
            raise PropertyViolation("graph is disconnected: infinite diameter")
        diameter = max(diameter, max(dist))
    # Girth: the shortest cycle through edge (a,b) has length 1 + d(a,b) in G - ab.
    girth = None
    for a, b in g.edges:
        d = _bfs_dist(g, a, skip_edge={a, b})[b]
        if d >= 0 and (girth is None or d + 1 < girth):
            girth = d + 1
    return GraphInvariants(g.n, g.edge_count, min(degs), max(degs), girth, diameter)


def build_petersen():
    """Petersen graph as the Kneser graph K(5,2)."""
    pairs = list(combinations(range(5), 2))
    idx = {p: i for i, p in enumerate(pairs)}
    edges = [
        (idx[p], idx[q])
        for p, q in combinations(pairs, 2)
        if not (set(p) & set(q))
    ]
    return Graph(10, edges)


def build_hsg():
    """Hoffman-Singleton graph from five pentagons and five pentagrams over Z5.

    Pentagon P_h occupies ids 5h+j, pentagram Q_i ids 25+5i+j.  Vertex j of P_h
    is joined to vertex (h*i + j) mod 5 of Q_i.  The result is certified by the
    invariant suite (50 vertices, 175 edges, 7-regular, girth 5, diameter 2),
    which determines the graph uniquely.
    """
    edges = []
    for h in range(5):
        for j in range(5):
            edges.append((5 * h + j, 5 * h + (j + 1) % 5))
    for i in range(5):
        for j in range(5):
            edges.append((25 + 5 * i + j, 25 + 5 * i + (j + 2) % 5))
    for h in range(5):
        for j in range(5):
            for i in range(5):
                edges.append((5 * h + j, 25 + 5 * i + (h * i + j) % 5))
    g = Graph(50, edges)
    inv = graph_invariants(g)
    if (inv.vertex_count, inv.edge_count, inv.min_degree, inv.max_degree,
            inv.girth, inv.diameter) != (50, 175, 7, 7, 5, 2):
        raise PropertyViolation("Hoffman-Singleton invariants failed: %r" % (inv,))
    return g


# ---------------------------------------------------------------------------
# Automorphisms: plain backtracking over vertex images with bitmask pruning.
# ---------------------------------------------------------------------------

class _AutSearch:
    """Backtracking search for graph automorphisms.

    Vertices are processed in a static order: a base vertex, then its
    neighborhood, then greedily by the number of already-ordered neighbors.
    A candidate image must reproduce the exact adjacency pattern to all
    previously assigned images (one bitmask equality per candidate).
    """

    def __init__(self, g, initial=()):
        self.g = g
        n = g.n
        order = list(initial)
        placed = set(order)
        if not order:
            order = [0]
            placed = {0}
        for v in sorted(g.adj[order[0]]):
            if v not in placed:
                order.append(v)
                placed.add(v)
        while len(order) < n:
            best, best_key = None, None
            for v in range(n):
                if v in placed:
                    continue
                key = (-len(g.adj[v] & placed), v)
                if best_key is None or key < best_key:
                    best, best_key = v, key
            order.append(best)
            placed.add(best)
        self.order = order
        self.anchors = []
        for i, v in enumerate(order):
            self.anchors.append([order.index(u) for u in g.adj[v] if u in set(order[:i])])
        self.deg = [g.degree(v) for v in range(n)]

    def run(self, prefix=(), count_limit=None, collect=False):
        """Enumerate automorphisms extending ``prefix`` (images of order[0:k]).

        Returns (count, found) where found is a list of image tuples when
        ``collect`` (or a single first solution when count_limit == 1).
        """
        g, order, anchors, deg = self.g, self.order, self.anchors, self.deg
        n = g.n
        masks = g.masks
        img = [-1] * n
        image_mask = 0
        found = []
        count = 0
        k = len(prefix)
        for i, w in enumerate(prefix):
            x = order[i]
            if deg[w] != deg[x]:
                return 0, []
            j = 0
            for p in anchors[i]:
                j |= 1 << img[order[p]]
            if masks[w] & image_mask != j or (image_mask >> w) & 1:
                return 0, []
            img[x] = w
            image_mask |= 1 << w

        def dfs(i, image_mask):
            nonlocal count
            if i == n:
                count += 1
                if collect or count_limit == 1:
                    found.append(tuple(img))
                return count_limit is not None and count >= count_limit
            x = order[i]
            anc = anchors[i]
            j = 0
            for p in anc:
                j |= 1 << img[order[p]]
            if not anc:
                cand = ((1 << n) - 1) & ~image_mask
            elif len(anc) == 1:
                cand = masks[img[order[anc[0]]]] & ~image_mask
            else:
                cand = masks[img[order[anc[0]]]] & masks[img[order[anc[1]]]] & ~image_mask
            dx = deg[x]
            while cand:
                c = (cand & -cand).bit_length() - 1
                cand &= cand - 1
                if deg[c] != dx or masks[c] & image_mask != j:
                    continue
                img[x] = c
                if dfs(i + 1, image_mask | (1 << c)):
                    img[x] = -1
                    return True
                img[x] = -1
            return False

        dfs(k, image_mask)
        return count, found


def automorphism_order(g, exhaustive=False):
    """Exact order of Aut(g).

    By default the order is assembled as |orbit(v0)| * |Stab(v0)| with both
    factors computed by backtracking (one stabilizer enumeration plus one
    existence search per candidate image of the base vertex); this is exact by
    orbit-stabilizer.  ``exhaustive`` forces a single full enumeration instead.
    """
    search = _AutSearch(g)
    if exhaustive or g.n <= 12:
        count, _ = search.run()
        return count
    base = search.order[0]
    stab, _ = search.run(prefix=(base,))
    orbit = 0
    for w in range(g.n):
        cnt, _ = search.run(prefix=(w,), count_limit=1)
        orbit += 1 if cnt else 0
    return orbit * stab


def automorphism_exists(g, mapping):
    """Whether some automorphism sends mapping[i] -> mapping[i] images.

    ``mapping`` is a list of (source, target) pairs; sources must be extendable
    to the search order prefix, so they should start at a vertex and walk its
    neighborhood (e.g. the two ends of an edge).
    """
    sources = [s for s, _ in mapping]
    targets = tuple(t for _, t in mapping)
    search = _AutSearch(g, initial=sources)
    cnt, found = search.run(prefix=targets, count_limit=1)
    return found[0] if cnt else None


def vertex_orbit(g, start=0):
    """Orbit of ``start`` under automorphisms found by the existence searches."""
    search = _AutSearch(g)
    gens = []
    for w in range(g.n):
        cnt, found = search.run(prefix=(w,), count_limit=1)
        if cnt:
            gens.append(found[0])
    orbit = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for p in gens:
                if p[v] not in orbit:
                    orbit.add(p[v])
                    nxt.append(p[v])
        frontier = nxt
    return orbit


# ---------------------------------------------------------------------------
# Pentagons and Petersen subgraphs.
# ---------------------------------------------------------------------------

def _common_neighbor_table(g):
    """cn[a][b] = the unique common neighbor of non-adjacent a != b, else -1.

    Requires the Moore property (girth 5, diameter 2): adjacent pairs have no
    common neighbor, non-adjacent pairs exactly one.
    """
    n = g.n
    cn = [[-1] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            m = g.masks[a] & g.masks[b]
            k = m.bit_count()
            if g.has_edge(a, b):
                if k != 0:
                    raise PropertyViolation("triangle through %d-%d" % (a, b))
            else:
                if k != 1:
                    raise PropertyViolation("common-neighbor count %d for %d,%d" % (k, a, b))
                cn[a][b] = cn[b][a] = m.bit_length() - 1
    return cn


def all_pentagons(g, cn=None):
    """All 5-cycles via unique completion of 3-edge paths.

    Returns (pentagon set of frozensets, unique_completion flag, path count).
    Each 3-edge path a-b-c-d is completed by the common neighbors of a and d.
    """
    cn = cn or _common_neighbor_table(g)
    pentagons = set()
    paths = 0
    unique = True
    for b, c in g.edges:
        for a in g.adj[b]:
            if a == c:
                continue
            for d in g.adj[c]:
                if d == b or d == a:
                    continue
                paths += 1
                comp = g.masks[a] & g.masks[d] & ~((1 << b) | (1 << c))
                if g.has_edge(a, d):
                    unique = False
                    continue
                if comp.bit_count() != 1:
                    unique = False
                    continue
                x = comp.bit_length() - 1
                pentagons.add(frozenset((a, b, c, d, x)))
    return pentagons, unique, paths // 2


def count_pentagons_direct(g):
    """Independent 5-cycle count by rooted path enumeration."""
    total = 0
    for v0 in range(g.n):
        for v1 in g.adj[v0]:
            if v1 < v0:
                continue
            for v2 in g.adj[v1]:
                if v2 <= v0 or v2 == v0:
                    continue
                for v3 in g.adj[v2]:
                    if v3 <= v0 or v3 == v1:
                        continue
                    for v4 in g.adj[v3]:
                        if v4 <= v0 or v4 in (v1, v2):
                            continue
                        if g.has_edge(v4, v0) and v4 > v1:
                            total += 1
    return total


def pentagon_census(g):
    """(pentagon_count, unique_completion) for the 3-edge-path completion claim."""
    pents, unique, _ = all_pentagons(g)
    return len(pents), unique


def _cycle_order(g, vertices):
    """Order ``vertices`` (inducing a single cycle in g) cyclically."""
    vs = set(vertices)
    start = min(vs)
    cyc = [start]
    prev = None
    cur = start
    while True:
        nbrs = [w for w in g.adj[cur] if w in vs and w != prev]
        if not nbrs:
            raise PropertyViolation("not a cycle at %d" % cur)
        nxt = min(nbrs) if prev is None else nbrs[0]
        if nxt == start:
            break
        cyc.append(nxt)
        prev, cur = cur, nxt
        if len(cyc) > len(vs):
            raise PropertyViolation("cycle walk did not close")
    if len(cyc) != len(vs):
        raise PropertyViolation("vertices do not form a single cycle")
    return cyc


def petersen_extension(g, pentagon, e, cn=None):
    """The unique induced Petersen subgraph of g containing pentagon and e.

    ``pentagon`` is a 5-tuple tracing the cycle, ``e = (p, x)`` an edge with
    exactly one endpoint p on the pentagon.  The five outer vertices are forced
    one by one as unique common neighbors; the result is verified to induce a
    3-regular girth-5 graph on 10 vertices (hence a Petersen graph).  Raises
    LemmaViolation if the forced candidate fails.
    """
    cn = cn or _common_neighbor_table(g)
    p = list(pentagon)
    a, x = e
    if a not in p:
        a, x = x, a
    i = p.index(a)
    p = p[i:] + p[:i]  # p[0] is the attachment vertex
    if x in p or not g.has_edge(p[0], x):
        raise ValueError("edge does not attach to the pentagon at one vertex")
    w = [x, None, None, None, None]  # w[k] is matched to p[k], pentagram w[k] ~ w[k+2]
    try:
        w[2] = _forced(cn, x, p[2])
        w[3] = _forced(cn, x, p[3])
        w[1] = _forced(cn, p[1], w[3])
        w[4] = _forced(cn, p[4], w[2])
    except LemmaViolation as exc:
        raise LemmaViolation("no Petersen completion for %r + %r: %s" % (pentagon, e, exc))
    verts = frozenset(p) | frozenset(w)
    if len(verts) != 10:
        raise LemmaViolation("forced completion collapsed for %r + %r" % (pentagon, e))
    sub, _ = g.induced(verts)
    inv = graph_invariants(sub)
    if (inv.edge_count, inv.min_degree, inv.max_degree, inv.girth) != (15, 3, 3, 5):
        raise LemmaViolation("completion of %r + %r is not a Petersen graph" % (pentagon, e))
    return verts


def _forced(cn, a, b):
    v = cn[a][b]
    if v < 0:
        raise LemmaViolation("no unique common neighbor of %d,%d" % (a, b))
    return v


def petersen_census(g):
    """Run the extension lemma over every (pentagon, incident edge) pair.

    Returns (case_count, distinct Petersen vertex sets, pentagons).
    """
    cn = _common_neighbor_table(g)
    pents, unique, _ = all_pentagons(g, cn)
    if not unique:
        raise LemmaViolation("3-edge paths do not complete uniquely")
    subgraphs = set()
    cases = 0
    for pent in sorted(pents, key=sorted):
        cyc = _cycle_order(g, pent)
        for p in cyc:
            for x in g.adj[p]:
                if x in pent:
                    continue
                cases += 1
                subgraphs.add(petersen_extension(g, tuple(cyc), (p, x), cn))
    return cases, subgraphs, pents


def petersen_completions_brute(g, pentagon):
    """Independent oracle: all induced Petersen subgraphs containing a pentagon.

    Plain exhaustion over every 5-subset of the remaining vertices with a fast
    bitmask edge-count filter, then a full invariant check (10 vertices,
    15 induced edges, 3-regular, girth 5 characterizes the Petersen graph by
    the Moore bound).  No common-neighbor shortcuts.
    """
    pent = set(pentagon)
    rest = [v for v in range(g.n) if v not in pent]
    pent_mask = 0
    for v in pent:
        pent_mask |= 1 << v
    results = set()
    for extra in combinations(rest, 5):
        m = pent_mask
        for v in extra:
            m |= 1 << v
        deg_ok = True
        twice_edges = 0
        for v in pent:
            d = (g.masks[v] & m).bit_count()
            if d != 3:
                deg_ok = False
                break
            twice_edges += d
        if not deg_ok:
            continue
        for v in extra:
            d = (g.masks[v] & m).bit_count()
            if d != 3:
                deg_ok = False
                break
            twice_edges += d
        if not deg_ok or twice_edges != 30:
            continue
        verts = frozenset(pent | set(extra))
        sub, _ = g.induced(verts)
        inv = graph_invariants(sub)
        if (inv.edge_count, inv.min_degree, inv.max_degree, inv.girth) == (15, 3, 3, 5):
            results.add(verts)
    return results


# ---------------------------------------------------------------------------
# Edge frame, Sylvester graph, hexagon decomposition.
# ---------------------------------------------------------------------------

@dataclass
class EdgeFrame:
    """Labeling of the HSG relative to a base edge uv.

    Rows index the six extra neighbors of u, columns those of v; the remaining
    36 vertices (the set W) are labeled by (row, column) pairs in {1..6}^2.
    """
    graph: Graph
    u: int
    v: int
    u_nbrs: list  # u_nbrs[i-1] is u_i
    v_nbrs: list
    w_label: dict = field(repr=False)  # vertex -> (i, j)
    w_by_label: dict = field(repr=False)

    def rows_of(self, w):
        return self.w_label[w][0]

    def cols_of(self, w):
        return self.w_label[w][1]


def edge_frame(g, e):
    u, v = e
    if not g.has_edge(u, v):
        raise ValueError("base pair %r is not an edge" % (e,))
    u_nbrs = sorted(g.adj[u] - {v})
    v_nbrs = sorted(g.adj[v] - {u})
    framed = {u, v} | set(u_nbrs) | set(v_nbrs)
    if len(framed) != 14:
        raise PropertyViolation("frame vertices not distinct around edge %r" % (e,))
    w_label, w_by_label = {}, {}
    for w in range(g.n):
        if w in framed:
            continue
        i = [k + 1 for k, un in enumerate(u_nbrs) if g.has_edge(w, un)]
        j = [k + 1 for k, vn in enumerate(v_nbrs) if g.has_edge(w, vn)]
        if len(i) != 1 or len(j) != 1:
            raise PropertyViolation("vertex %d not uniquely framed" % w)
        w_label[w] = (i[0], j[0])
        if (i[0], j[0]) in w_by_label:
            raise PropertyViolation("label %r repeated" % ((i[0], j[0]),))
        w_by_label[(i[0], j[0])] = w
    if len(w_label) != 36:
        raise PropertyViolation("|W| = %d != 36" % len(w_label))
    return EdgeFrame(g, u, v, u_nbrs, v_nbrs, w_label, w_by_label)


def sylvester_checks(frame):
    """Induced graph on W with the three row/column properties and the crosses lemma.

    Returns (Graph on 36 vertices, list of W ids in new order).
    """
    g = frame.graph
    sub, ids = g.induced(frame.w_label.keys())
    lab = [frame.w_label[w] for w in ids]
    for a, b in sub.edges:
        (i, j), (k, m) = lab[a], lab[b]
        if i == k:
            raise PropertyViolation("same-row edge %r-%r" % (lab[a], lab[b]))
        if j == m:
            raise PropertyViolation("same-column edge %r-%r" % (lab[a], lab[b]))
    for a in range(sub.n):
        i, j = lab[a]
        rows = sorted(lab[b][0] for b in sub.adj[a])
        cols = sorted(lab[b][1] for b in sub.adj[a])
        if rows != [r for r in range(1, 7) if r != i]:
            raise PropertyViolation("vertex %r misses a row neighbor" % ((i, j),))
        if cols != [c for c in range(1, 7) if c != j]:
            raise PropertyViolation("vertex %r misses a column neighbor" % ((i, j),))
    inv = graph_invariants(sub)
    if inv.girth is not None and inv.girth < 5:
        raise PropertyViolation("triangle or square inside W (girth %d)" % inv.girth)
    # Crosses lemma: (i,j)~(k,m) forces (i,m)~(k,j).
    for a, b in sub.edges:
        (i, j), (k, m) = lab[a], lab[b]
        p = frame.w_by_label[(i, m)]
        q = frame.w_by_label[(k, j)]
        if not g.has_edge(p, q):
            raise LemmaViolation("crosses partner of %r-%r missing" % (lab[a], lab[b]))
    return sub, ids


@dataclass(frozen=True)
class WHexagon:
    """One of the three hexagons induced by a row triple: a 6-cycle of W vertices."""
    triple: tuple  # sorted 3-row tuple
    cycle: tuple  # 6 W vertex ids, cyclic


def row_subgraph(frame, rows):
    verts = [w for w, (i, _) in frame.w_label.items() if i in rows]
    return frame.graph.induced(verts)


def hexagon_decomposition(frame, triple):
    """The induced subgraph on three rows as exactly 3 disjoint column-complete hexagons."""
    triple = tuple(sorted(triple))
    sub, ids = row_subgraph(frame, set(triple))
    if any(sub.degree(x) != 2 for x in range(sub.n)):
        raise LemmaViolation("row triple %r: vertex of degree != 2" % (triple,))
    seen = set()
    hexes = []
    for x in range(sub.n):
        if x in seen:
            continue
        comp = {x}
        frontier = [x]
        while frontier:
            y = frontier.pop()
            for z in sub.adj[y]:
                if z not in comp:
                    comp.add(z)
                    frontier.append(z)
        seen |= comp
        if len(comp) != 6:
            raise LemmaViolation("row triple %r: component of size %d" % (triple, len(comp)))
        cyc = [ids[x] for x in _cycle_order(sub, comp)]
        cols = sorted(frame.w_label[w][1] for w in cyc)
        if cols != [1, 2, 3, 4, 5, 6]:
            raise LemmaViolation("row triple %r: hexagon misses a column" % (triple,))
        hexes.append(WHexagon(triple, tuple(cyc)))
    if len(hexes) != 3:
        raise LemmaViolation("row triple %r: %d components" % (triple, len(hexes)))
    hexes.sort(key=lambda h: h.cycle)
    return hexes
