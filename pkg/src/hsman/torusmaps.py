"""Torus maps from the hexagon decomposition, the five-map structure, and the
planar development of the 12-hexagon map.

Lattice points are integer pairs (a, b) representing lambda*(a + b*omega) with
omega = exp(i*pi/6 * 2) ... i.e. omega = exp(i*pi/3), so Z[omega] is the
triangular lattice.  All layout geometry is exact integer arithmetic; complex
coordinates only appear at export time.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import combinations

from .graphs import LemmaViolation, PropertyViolation, WHexagon, hexagon_decomposition

__all__ = [
    "LAMBDA",
    "OMEGA",
    "TorusMap",
    "Maniplex",
    "PlanarLayout",
    "small_map",
    "big_map",
    "build_maniplex",
    "canonical_relabel",
    "develop_layout",
    "lat_add",
    "lat_sub",
    "lat_omega",
    "lat_omega_pow",
    "lat_conj",
    "lat_neg",
    "lat_color",
    "lat_to_complex",
]

LAMBDA = math.sqrt(2.0 / 3.0)
OMEGA = cmath.exp(1j * math.pi / 3)


def lat_add(x, y):
    return (x[0] + y[0], x[1] + y[1])


def lat_sub(x, y):
    return (x[0] - y[0], x[1] - y[1])


def lat_neg(x):
    return (-x[0], -x[1])


def lat_omega(x):
    # (a + b*w)*w = -b + (a+b)*w  since w^2 = w - 1
    return (-x[1], x[0] + x[1])


def lat_omega_pow(x, k):
    for _ in range(k % 6):
        x = lat_omega(x)
    return x


def lat_conj(x):
    # conj(a + b*w) = (a+b) - b*w
    return (x[0] + x[1], -x[1])


def lat_color(x):
    """3-coloring of the triangular lattice; hexagon centers sit in class 0."""
    return (x[0] - x[1]) % 3


def lat_to_complex(x, scale=LAMBDA):
    return scale * (x[0] + x[1] * OMEGA)


def _unit(k):
    return lat_omega_pow((1, 0), k)


# ---------------------------------------------------------------------------
# Torus maps.
# ---------------------------------------------------------------------------

@dataclass
class TorusMap:
    """Hexagonal faces with a fixed-point-free slot pairing.

    Slot (f, k) is the edge of face f between cycle[k] and cycle[k+1].  After
    the quotient described by ``vertex_of`` the map has ``counts = (V, E, F)``.
    """
    faces: list  # list of WHexagon
    pairing: dict  # (f, k) -> (f', k')
    orientation: list  # +1 / -1 per face making paired slots opposite
    counts: tuple  # (V, E, F)
    kind: str  # "small" | "big"

    @property
    def euler_characteristic(self):
        v, e, f = self.counts
        return v - e + f

    def slot_vertices(self, f, k):
        cyc = self.faces[f].cycle
        return cyc[k], cyc[(k + 1) % 6]


def _check_pairing(faces, pairing, traverse):
    """Common validation: involution without fixed points, cross-face, orientable.

    ``traverse(f, k)`` returns the ordered label pair a slot induces on the
    quotient; paired slots must carry the same unordered pair and admit face
    orientations making the ordered traversals opposite.  Returns orientation.
    """
    slots = {(f, k) for f in range(len(faces)) for k in range(6)}
    for s, t in pairing.items():
        if s == t:
            raise PropertyViolation("slot %r paired with itself" % (s,))
        if s[0] == t[0]:
            raise PropertyViolation("slot %r paired within its own face" % (s,))
        if pairing[t] != s:
            raise PropertyViolation("pairing is not an involution at %r" % (s,))
        if set(traverse(*s)) != set(traverse(*t)):
            raise PropertyViolation("paired slots %r,%r disagree on labels" % (s, t))
    if set(pairing) != slots:
        raise PropertyViolation("pairing does not cover all slots")
    orientation = [0] * len(faces)
    orientation[0] = 1
    stack = [0]
    while stack:
        f = stack.pop()
        for k in range(6):
            f2, k2 = pairing[(f, k)]
            fwd = traverse(f, k) if orientation[f] == 1 else tuple(reversed(traverse(f, k)))
            # the partner must traverse the shared edge in the opposite order
            want = tuple(reversed(fwd))
            for sign in (1, -1):
                got = traverse(f2, k2) if sign == 1 else tuple(reversed(traverse(f2, k2)))
                if got == want:
                    if orientation[f2] == 0:
                        orientation[f2] = sign
                        stack.append(f2)
                    elif orientation[f2] != sign:
                        raise PropertyViolation("orientation conflict at face %d" % f2)
                    break
            else:
                raise PropertyViolation("no orientation matches slots %r,%r" % ((f, k), (f2, k2)))
    if any(o == 0 for o in orientation):
        raise PropertyViolation("map is disconnected")
    return orientation


def small_map(frame, triple):
    """Torus map from one row triple: 3 hexagons glued along crosses partners.

    W-edges (i,a)(j,b) and (i,b)(j,a) project to the same map edge; the
    quotient has (V, E, F) = (6, 9, 3) on the column labels.
    """
    triple = tuple(sorted(triple))
    faces = hexagon_decomposition(frame, triple)
    lab = frame.w_label
    slot_by_edge = {}
    for f, hexa in enumerate(faces):
        for k in range(6):
            w1, w2 = hexa.cycle[k], hexa.cycle[(k + 1) % 6]
            slot_by_edge[frozenset((w1, w2))] = (f, k)
    pairing = {}
    for f, hexa in enumerate(faces):
        for k in range(6):
            w1, w2 = hexa.cycle[k], hexa.cycle[(k + 1) % 6]
            (i, a), (j, b) = lab[w1], lab[w2]
            partner = frozenset((frame.w_by_label[(i, b)], frame.w_by_label[(j, a)]))
            if partner not in slot_by_edge:
                raise LemmaViolation("crosses partner of slot %r not in triple %r" % ((f, k), triple))
            pairing[(f, k)] = slot_by_edge[partner]

    def traverse(f, k):
        w1, w2 = faces[f].cycle[k], faces[f].cycle[(k + 1) % 6]
        return (lab[w1][1], lab[w2][1])

    orientation = _check_pairing(faces, pairing, traverse)
    # each row pair must contribute 3 distinct column pairs
    by_rowpair = {}
    for f, hexa in enumerate(faces):
        for k in range(6):
            w1, w2 = hexa.cycle[k], hexa.cycle[(k + 1) % 6]
            (i, a), (j, b) = lab[w1], lab[w2]
            by_rowpair.setdefault(frozenset((i, j)), set()).add(frozenset((a, b)))
    for rp, cps in by_rowpair.items():
        if len(cps) != 3:
            raise PropertyViolation("row pair %r has %d column pairs" % (set(rp), len(cps)))
    counts = (6, 9, 3)
    m = TorusMap(faces, pairing, orientation, counts, "small")
    if m.euler_characteristic != 0:
        raise PropertyViolation("small map is not a torus")
    return m


def big_map(frame, rows4=(1, 2, 3, 4)):
    """Torus map on the 12 hexagons of four rows, glued along shared W-edges."""
    rows4 = tuple(sorted(rows4))
    faces = []
    for triple in combinations(rows4, 3):
        faces.extend(hexagon_decomposition(frame, triple))
    slots_by_edge = {}
    for f, hexa in enumerate(faces):
        for k in range(6):
            e = frozenset((hexa.cycle[k], hexa.cycle[(k + 1) % 6]))
            slots_by_edge.setdefault(e, []).append((f, k))
    pairing = {}
    for e, ss in slots_by_edge.items():
        if len(ss) != 2:
            raise LemmaViolation("W-edge %r lies in %d hexagons, expected 2" % (sorted(e), len(ss)))
        pairing[ss[0]] = ss[1]
        pairing[ss[1]] = ss[0]

    def traverse(f, k):
        return (faces[f].cycle[k], faces[f].cycle[(k + 1) % 6])

    orientation = _check_pairing(faces, pairing, traverse)
    verts = {w for hexa in faces for w in hexa.cycle}
    if len(verts) != 24:
        raise PropertyViolation("big map has %d vertices" % len(verts))
    for w in verts:
        inside = sum(1 for hexa in faces if w in hexa.cycle)
        if inside != 3:
            raise PropertyViolation("W-vertex %d lies in %d hexagons" % (w, inside))
    counts = (24, len(slots_by_edge), 12)
    m = TorusMap(faces, pairing, orientation, counts, "big")
    if m.euler_characteristic != 0:
        raise PropertyViolation("big map is not a torus")
    return m


# ---------------------------------------------------------------------------
# The five-map structure.
# ---------------------------------------------------------------------------

@dataclass
class Maniplex:
    frame: object
    rows4: tuple
    small_maps: dict  # triple -> TorusMap
    big: TorusMap
    membership: dict  # WHexagon -> (triple, "big")
    multigraph: dict  # frozenset(column pair) -> multiplicity over the 18 identified edges
    doubled_pairs: list  # the 3 column pairs of multiplicity 2
    column_relabel: tuple = (1, 2, 3, 4, 5, 6)  # applied permutation, pi[c-1] = new label


def build_maniplex(frame, rows4=(1, 2, 3, 4)):
    rows4 = tuple(sorted(rows4))
    smalls = {t: small_map(frame, t) for t in combinations(rows4, 3)}
    big = big_map(frame, rows4)
    membership = {}
    for t, m in smalls.items():
        for hexa in m.faces:
            membership.setdefault(hexa, []).append(t)
    for hexa in big.faces:
        if hexa not in membership:
            raise PropertyViolation("big-map hexagon missing from its small map")
        membership[hexa].append("big")
    for hexa, where in membership.items():
        if len(where) != 2:
            raise PropertyViolation("hexagon %r lies in %d maps" % (hexa, len(where)))
    # identified multigraph on columns: the 36 H4 edges fall in crosses pairs
    lab = frame.w_label
    edge_classes = set()
    for hexa in big.faces:
        for k in range(6):
            w1, w2 = hexa.cycle[k], hexa.cycle[(k + 1) % 6]
            (i, a), (j, b) = lab[w1], lab[w2]
            edge_classes.add((frozenset((i, j)), frozenset((a, b))))
    if len(edge_classes) != 18:
        raise PropertyViolation("%d identified edges, expected 18" % len(edge_classes))
    multigraph = {}
    for _, cp in edge_classes:
        multigraph[cp] = multigraph.get(cp, 0) + 1
    doubled = sorted([cp for cp, mult in multigraph.items() if mult == 2], key=sorted)
    singles = [cp for cp, mult in multigraph.items() if mult == 1]
    if len(doubled) != 3 or len(singles) != 12 or set(multigraph.values()) - {1, 2}:
        raise PropertyViolation("identified graph is not K6 plus 3 doubled pairs")
    touched = sorted(c for cp in doubled for c in cp)
    if touched != [1, 2, 3, 4, 5, 6]:
        raise PropertyViolation("doubled pairs do not form a perfect matching")
    return Maniplex(frame, rows4, smalls, big, membership, multigraph, doubled)


def canonical_relabel(maniplex):
    """Relabel columns so the doubled pairs become {1,2},{3,4},{5,6}.

    Chooses the lexicographically least permutation among all that map the
    doubled matching onto the target matching; idempotent.
    """
    target = [frozenset((1, 2)), frozenset((3, 4)), frozenset((5, 6))]
    best = None
    from itertools import permutations as _perms
    for assign in _perms(range(3)):
        for flips in range(8):
            perm = [0] * 6
            ok = True
            for idx, cp in enumerate(maniplex.doubled_pairs):
                lo, hi = sorted(cp)
                tgt = sorted(target[assign[idx]])
                if (flips >> idx) & 1:
                    tgt = [tgt[1], tgt[0]]
                perm[lo - 1], perm[hi - 1] = tgt[0], tgt[1]
            if ok:
                tperm = tuple(perm)
                if best is None or tperm < best:
                    best = tperm
    perm = best
    if perm == (1, 2, 3, 4, 5, 6):
        m = maniplex
    else:
        frame = _relabel_frame(maniplex.frame, perm)
        m = build_maniplex(frame, maniplex.rows4)
    composed = tuple(perm[c - 1] for c in maniplex.column_relabel)
    m.column_relabel = composed
    if sorted(map(sorted, m.doubled_pairs)) != [[1, 2], [3, 4], [5, 6]]:
        raise PropertyViolation("canonical relabeling failed")
    return m


def _relabel_frame(frame, perm):
    from .graphs import EdgeFrame
    v_nbrs = [None] * 6
    for c in range(1, 7):
        v_nbrs[perm[c - 1] - 1] = frame.v_nbrs[c - 1]
    w_label = {w: (i, perm[j - 1]) for w, (i, j) in frame.w_label.items()}
    w_by_label = {lab: w for w, lab in w_label.items()}
    return EdgeFrame(frame.graph, frame.u, frame.v, list(frame.u_nbrs), v_nbrs,
                     w_label, w_by_label)


def maniplex_certificate(maniplex):
    """Isomorphism-insensitive fingerprint used by the frame-independence oracle."""
    lab = maniplex.frame.w_label

    def face_key(hexa):
        cols = [lab[w][1] for w in hexa.cycle]
        variants = []
        for d in (1, -1):
            seq = cols[::d]
            for r in range(6):
                variants.append(tuple(seq[r:] + seq[:r]))
        return min(variants)

    small_part = tuple(sorted(
        tuple(sorted(face_key(h) for h in m.faces)) for m in maniplex.small_maps.values()
    ))
    doubled = tuple(sorted(tuple(sorted(cp)) for cp in maniplex.doubled_pairs))
    return small_part, doubled


# ---------------------------------------------------------------------------
# Planar development of the big map.
# ---------------------------------------------------------------------------

@dataclass
class PlanarLayout:
    """Exact development of the 12-hexagon torus into the hexagonal tessellation.

    ``centers[f]`` and ``vertex_pos[(f, k)]`` are lattice pairs (a, b) in units
    of lambda; ``rotations[f]`` places vertex slot k at centers[f] + w^(r+k).
    """
    big: TorusMap
    centers: dict
    rotations: dict
    vertex_pos: dict  # (f, k) -> lattice pair
    periods: tuple  # lattice pairs generating the deck lattice
    lam: float = LAMBDA
    omega: complex = OMEGA

    def center_c(self, f):
        return lat_to_complex(self.centers[f])

    def vertex_c(self, f, k):
        return lat_to_complex(self.vertex_pos[(f, k)])

    def reduce_mod_periods(self, x):
        return (x[0] % 6, x[1] % 6)


def develop_layout(big):
    """BFS development of the big map; see PlanarLayout.

    Faces are first reoriented positively (using the orientation signs computed
    when the map was built), then placed one by one: crossing the pairing of
    slot (f, k) puts the partner face across the shared edge traversing it in
    the opposite direction.  Re-encounters must agree up to a deck translation;
    the collected translations must generate the index-12 lattice 6*Z[w].
    """
    faces = []
    for f, hexa in enumerate(big.faces):
        cyc = hexa.cycle if big.orientation[f] == 1 else tuple(reversed(hexa.cycle))
        faces.append(WHexagon(hexa.triple, cyc))
    slot_by_edge = {}
    for f, hexa in enumerate(faces):
        for k in range(6):
            e = frozenset((hexa.cycle[k], hexa.cycle[(k + 1) % 6]))
            slot_by_edge.setdefault(e, []).append((f, k))
    pairing = {}
    for e, ss in slot_by_edge.items():
        pairing[ss[0]] = ss[1]
        pairing[ss[1]] = ss[0]

    centers = {0: (0, 0)}
    rotations = {0: 0}
    periods = []
    queue = [0]
    seen = {0}
    while queue:
        f = queue.pop(0)
        c, r = centers[f], rotations[f]
        for k in range(6):
            f2, k2 = pairing[(f, k)]
            a = (r + k) % 6
            c2 = lat_add(c, lat_add(_unit(a), _unit(a + 1)))
            r2 = (a + 3 - k2) % 6
            if f2 not in seen:
                centers[f2] = c2
                rotations[f2] = r2
                seen.add(f2)
                queue.append(f2)
            else:
                if rotations[f2] != r2:
                    raise PropertyViolation(
                        "development rotation conflict at face %d (%d vs %d)" % (f2, rotations[f2], r2))
                delta = lat_sub(c2, centers[f2])
                if delta != (0, 0):
                    periods.append(delta)
    if len(seen) != len(faces):
        raise PropertyViolation("big map develops disconnected")
    basis = _lattice_basis(periods)
    if basis != ((6, 0), (0, 6)):
        raise PropertyViolation("period lattice %r is not 6*Z[w]" % (basis,))
    vertex_pos = {}
    for f in centers:
        for k in range(6):
            vertex_pos[(f, k)] = lat_add(centers[f], _unit(rotations[f] + k))
    # structural invariants of the development
    for f, c in centers.items():
        if lat_color(c) != 0:
            raise PropertyViolation("center of face %d off the color-0 class" % f)
    for (f, k), p in vertex_pos.items():
        if lat_color(p) == 0:
            raise PropertyViolation("vertex (%d,%d) on the center color class" % (f, k))
    if len({(c[0] % 6, c[1] % 6) for c in centers.values()}) != 12:
        raise PropertyViolation("face centers collide modulo the period lattice")
    pos_mod = {}
    for (f, k), p in vertex_pos.items():
        w = faces[f].cycle[k]
        pos_mod.setdefault(w, set()).add((p[0] % 6, p[1] % 6))
    for w, ps in pos_mod.items():
        if len(ps) != 1:
            raise PropertyViolation("W-vertex %d placed inconsistently: %r" % (w, ps))
    if len({next(iter(ps)) for ps in pos_mod.values()}) != 24:
        raise PropertyViolation("W-vertices collide modulo the period lattice")
    oriented = TorusMap(faces, pairing, [1] * len(faces), big.counts, big.kind)
    return PlanarLayout(oriented, centers, rotations, vertex_pos, ((6, 0), (0, 6)))


def _lattice_basis(vectors):
    """Hermite-style basis of the integer span of lattice pairs."""
    vecs = [v for v in vectors if v != (0, 0)]
    if not vecs:
        return ()
    # integer row reduction on 2 columns
    import math as _m

    def _gcd_reduce(rows):
        rows = [list(r) for r in rows]
        # eliminate first column
        col0 = [r for r in rows if r[0] != 0]
        rest = [r for r in rows if r[0] == 0]
        while len(col0) > 1:
            col0.sort(key=lambda r: abs(r[0]))
            a = col0[0]
            out = [a]
            for r in col0[1:]:
                q = r[0] // a[0]
                rr = [r[0] - q * a[0], r[1] - q * a[1]]
                (out if rr[0] != 0 else rest).append(rr)
            col0 = out
            if len(col0) == 1:
                break
        lead = col0[0] if col0 else None
        col1 = [r[1] for r in rest if r[1] != 0]
        g = 0
        for x in col1:
            g = _m.gcd(g, x)
        basis = []
        if lead:
            if lead[0] < 0:
                lead = [-lead[0], -lead[1]]
            basis.append(lead)
        if g:
            basis.append([0, g])
        if len(basis) == 2 and g:
            basis[0][1] %= g
        return tuple(tuple(b) for b in basis)

    return _gcd_reduce(vecs)
