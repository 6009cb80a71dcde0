"""The fundamental region: 24 hexagonal cones over the developed layout, the
288 characteristic tetrahedra, the 39 face-pairing isometries, and the full
manifold verification (wall matches, edge cycles, vertex links, cusps, volume,
generator reduction).

Tetrahedra are addressed combinatorially as (face, direction, edge slot,
endpoint); all 1-cell identifications are walked combinatorially through a
glue table, while every isometry synthesized along the way is re-verified
numerically against the geometry it is supposed to move.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from . import halfspace as hs
from .halfspace import (
    INF,
    Isometry,
    PlaneH3,
    PointH3,
    dist,
    inversion_unit,
    reflection_in_plane,
    three_point_map,
    translation,
    rotation_pi,
    tetrahedron_volume,
)
from .torusmaps import (
    LAMBDA,
    OMEGA,
    lat_add,
    lat_color,
    lat_sub,
    lat_to_complex,
)

__all__ = [
    "Region",
    "FacePairing",
    "PairingGroup",
    "CuspData",
    "PairingError",
    "PoincareError",
    "build_region",
    "build_face_pairings",
    "verify_pairings",
    "edge_cycle_check",
    "vertex_link_check",
    "cusp_analysis",
    "total_volume",
    "generator_reduction",
    "paper_example_isometry",
    "paper_example_check",
    "classify_pairing_forms",
]

H_V = 1.0 / math.sqrt(3.0)  # hexagon vertices
H_M = 1.0 / math.sqrt(2.0)  # edge midpoints
H_T = 1.0  # hexagon tops

EDGE_FACES = {
    "VM": ("A", "D"),
    "VT": ("A", "C"),
    "MT": ("A", "B"),
    "VP": ("C", "D"),
    "MP": ("B", "D"),
    "TP": ("B", "C"),
}
EDGE_ANGLES = {
    "VM": math.pi / 4,
    "VT": math.pi / 2,
    "MT": math.pi / 2,
    "VP": math.pi / 3,
    "MP": math.pi / 2,
    "TP": math.pi / 6,
}
EXPECTED_FAN = {"VM": 8, "VT": 4, "MT": 4, "VP": 6, "MP": 4, "TP": 12}

T1, T2, T3 = 36, 37, 38  # generator ids of the three translations


class PairingError(RuntimeError):
    pass


class PoincareError(RuntimeError):
    pass


@dataclass(frozen=True)
class Tet:
    """Characteristic tetrahedron (f, dir, k, e): hexagon f, up/down cone,
    edge slot k, endpoint e; corners are vertex / midpoint / top / apex."""
    tid: int
    f: int
    direction: str  # "u" | "d"
    k: int
    e: int


@dataclass
class Region:
    layout: object
    maniplex: object
    tets: list
    tet_index: dict  # (f, dir, k, e) -> tid
    centers_c: dict  # f -> complex
    vertex_c: dict  # (f, k) -> complex
    mid_lat2: dict  # (f, k) -> doubled lattice pair of the edge midpoint
    cone_faces: dict = field(default_factory=dict)  # (f, dir) -> face records

    def tet_count(self):
        return len(self.tets)

    def corner_points(self, tet):
        """(V, M, T, apex) with apex INF for up or a boundary complex for down."""
        f, k, e = tet.f, tet.k, tet.e
        v = PointH3(self.vertex_c[(f, (k + e) % 6)], H_V)
        m = PointH3(lat_to_complex(self.mid_lat2[(f, k)], 0.5 * LAMBDA), H_M)
        t = PointH3(self.centers_c[f], H_T)
        apex = INF if tet.direction == "u" else self.centers_c[f]
        return v, m, t, apex

    def tet_planes(self, tet):
        f, k, e = tet.f, tet.k, tet.e
        c = self.centers_c[f]
        vz = self.vertex_c[(f, (k + e) % 6)]
        mz = lat_to_complex(self.mid_lat2[(f, k)], 0.5 * LAMBDA)
        face_a = PlaneH3.sphere(c, 1.0)
        face_b = PlaneH3.vertical_through(c, mz)
        face_c = PlaneH3.vertical_through(c, vz)
        if tet.direction == "u":
            face_d = PlaneH3.vertical_through(vz, mz)
        else:
            face_d = PlaneH3.sphere(mz, H_M)
        return {"A": face_a, "B": face_b, "C": face_c, "D": face_d}


def build_region(layout, maniplex):
    """Assemble the 288 tetrahedra over the 12 developed hexagons and verify
    that every one is congruent to the characteristic tetrahedron."""
    centers_c = {f: lat_to_complex(c) for f, c in layout.centers.items()}
    vertex_c = {fk: lat_to_complex(p) for fk, p in layout.vertex_pos.items()}
    mid_lat2 = {}
    for f in layout.centers:
        for k in range(6):
            p1 = layout.vertex_pos[(f, k)]
            p2 = layout.vertex_pos[(f, (k + 1) % 6)]
            mid_lat2[(f, k)] = lat_add(p1, p2)
    tets = []
    tet_index = {}
    for f in sorted(layout.centers):
        for direction in ("u", "d"):
            for k in range(6):
                for e in (0, 1):
                    tid = len(tets)
                    tet = Tet(tid, f, direction, k, e)
                    tets.append(tet)
                    tet_index[(f, direction, k, e)] = tid
    region = Region(layout, maniplex, tets, tet_index, centers_c, vertex_c, mid_lat2)
    if region.tet_count() != 288:
        raise PoincareError("expected 288 tetrahedra, got %d" % region.tet_count())
    reference = sorted(hs.characteristic_tetrahedron().dihedral_angles().values())
    for tet in tets:
        planes = region.tet_planes(tet)
        angles = sorted(
            hs.dihedral_angle(planes[x], planes[y])
            for x, y in [("B", "D"), ("A", "B"), ("A", "C"), ("C", "D"), ("A", "D"), ("B", "C")]
        )
        if any(abs(a - b) > 1e-9 for a, b in zip(angles, reference)):
            raise PoincareError("tetrahedron %r not congruent to the reference" % (tet,))
    _build_cone_faces(region)
    return region


def _build_cone_faces(region):
    lay = region.layout
    for f in lay.centers:
        c = region.centers_c[f]
        for direction in ("u", "d"):
            faces = []
            sph = PlaneH3.sphere(c, 1.0)
            sign = 1.0 if direction == "u" else -1.0  # up-cone lies outside the hemisphere
            faces.append(("A", sph, sign))
            for k in range(6):
                if direction == "u":
                    pl = PlaneH3.vertical_through(region.vertex_c[(f, k)],
                                                  region.vertex_c[(f, (k + 1) % 6)])
                    s = pl.side(c)
                    faces.append((("D", k), pl, 1.0 if s > 0 else -1.0))
                else:
                    mz = lat_to_complex(region.mid_lat2[(f, k)], 0.5 * LAMBDA)
                    pl = PlaneH3.sphere(mz, H_M)
                    faces.append((("D", k), pl, 1.0))  # cone is outside each wall sphere
            region.cone_faces[(f, direction)] = faces


def total_volume(region):
    return region.tet_count() * tetrahedron_volume()


# ---------------------------------------------------------------------------
# Face pairings.
# ---------------------------------------------------------------------------

@dataclass
class FacePairing:
    gen_id: int
    kind: str  # "downward" | "translation"
    source: tuple | None  # slot (f, k) for downward pairings
    target: tuple | None
    iso: Isometry
    endpoint_map: tuple | None = None  # e -> e' on the target slot

    def __repr__(self):
        return "FacePairing(%d, %s, %r->%r)" % (self.gen_id, self.kind, self.source, self.target)


@dataclass
class PairingGroup:
    generators: list  # 39 FacePairing, downward first
    directed: dict  # slot -> (gen_id, exp, iso, target_slot, endpoint_map)
    translations: list  # the three translation pairings
    reduced: list | None = None  # generator ids of a reduced generating set
    witnesses: dict | None = None  # removed gen id -> word over reduced ids

    def generator(self, gid):
        return self.generators[gid]

    def iso_of_letter(self, letter):
        gid, exp = letter
        iso = self.generators[gid].iso
        return iso if exp == 1 else iso.inverse()

    def word_iso(self, word):
        g = Isometry.identity()
        for letter in word:
            g = self.iso_of_letter(letter) * g
        return g


def _slot_columns(maniplex, layout, f, k):
    lab = maniplex.frame.w_label
    cyc = layout.big.faces[f].cycle
    return lab[cyc[k]][1], lab[cyc[(k + 1) % 6]][1]


def _slot_wedge(maniplex, layout, f, k):
    lab = maniplex.frame.w_label
    cyc = layout.big.faces[f].cycle
    return lab[cyc[k]], lab[cyc[(k + 1) % 6]]


def build_face_pairings(region, maniplex):
    """Synthesize the 36 downward pairings from the crosses combinatorics plus
    the three translations.

    The downward wall over slot (f, k) is glued to the wall over the crosses
    partner slot within the same row triple; the isometry is the unique
    orientation-preserving map carrying (vertex, vertex, apex) to the partner's
    triple with matching column labels.
    """
    layout = region.layout
    lab = maniplex.frame.w_label
    by_label = maniplex.frame.w_by_label
    faces = layout.big.faces
    slot_of_edge = {}
    for f, hexa in enumerate(faces):
        for k in range(6):
            e = frozenset((hexa.cycle[k], hexa.cycle[(k + 1) % 6]))
            slot_of_edge.setdefault(e, []).append((f, k))

    def crosses_partner(f, k):
        (i, a), (j, b) = _slot_wedge(maniplex, layout, f, k)
        partner = frozenset((by_label[(i, b)], by_label[(j, a)]))
        cands = [s for s in slot_of_edge[partner] if faces[s[0]].triple == faces[f].triple]
        if len(cands) != 1:
            raise PairingError("crosses partner of slot %r not unique" % ((f, k),))
        return cands[0]

    def anchors(f, k):
        p1 = PointH3(region.vertex_c[(f, k)], H_V)
        p2 = PointH3(region.vertex_c[(f, (k + 1) % 6)], H_V)
        return p1, p2, region.centers_c[f]

    generators = []
    directed = {}
    done = set()
    for f in sorted(layout.centers):
        for k in range(6):
            s = (f, k)
            if s in done:
                continue
            t = crosses_partner(f, k)
            if crosses_partner(*t) != s:
                raise PairingError("crosses pairing is not an involution at %r" % (s,))
            a1, a2 = _slot_columns(maniplex, layout, *s)
            b1, b2 = _slot_columns(maniplex, layout, *t)
            if {a1, a2} != {b1, b2}:
                raise PairingError("column labels differ across pairing %r -> %r" % (s, t))
            emap = (0, 1) if (b1 == a1) else (1, 0)
            p1, p2, ap_s = anchors(*s)
            tq = anchors(*t)
            q_for_e0 = tq[emap[0]]
            q_for_e1 = tq[emap[1]]
            iso = three_point_map((p1, p2, ap_s), (q_for_e0, q_for_e1, tq[2]))
            gid = len(generators)
            pairing = FacePairing(gid, "downward", s, t, iso, emap)
            generators.append(pairing)
            directed[s] = (gid, 1, iso, t, emap)
            directed[t] = (gid, -1, iso.inverse(), s, emap)
            done.add(s)
            done.add(t)
    if len(generators) != 36:
        raise PairingError("synthesized %d downward pairings, expected 36" % len(generators))
    trans = [
        FacePairing(T1, "translation", None, None, translation(6 * LAMBDA)),
        FacePairing(T2, "translation", None, None, translation(6 * LAMBDA * OMEGA)),
        FacePairing(T3, "translation", None, None, translation(6 * LAMBDA * (1 + OMEGA))),
    ]
    generators.extend(trans)
    return PairingGroup(generators, directed, trans)


def verify_pairings(pg, region, tol=1e-9):
    """Every downward pairing maps its wall anchors exactly; inverse pairs and
    orientation signs are checked as well.  Returns a report dict."""
    failures = []
    layout = region.layout
    for gp in pg.generators:
        if gp.kind != "downward":
            continue
        (f, k), (f2, k2) = gp.source, gp.target
        p = [PointH3(region.vertex_c[(f, k)], H_V),
             PointH3(region.vertex_c[(f, (k + 1) % 6)], H_V)]
        q = [PointH3(region.vertex_c[(f2, k2)], H_V),
             PointH3(region.vertex_c[(f2, (k2 + 1) % 6)], H_V)]
        img0, img1 = gp.iso(p[0]), gp.iso(p[1])
        want0, want1 = q[gp.endpoint_map[0]], q[gp.endpoint_map[1]]
        errs = [abs(img0.z - want0.z), abs(img0.t - want0.t),
                abs(img1.z - want1.z), abs(img1.t - want1.t)]
        apex_img = gp.iso(region.centers_c[f])
        errs.append(abs(complex(apex_img) - region.centers_c[f2]))
        m_src = PointH3(lat_to_complex(region.mid_lat2[(f, k)], 0.5 * LAMBDA), H_M)
        m_tgt = PointH3(lat_to_complex(region.mid_lat2[(f2, k2)], 0.5 * LAMBDA), H_M)
        gm = gp.iso(m_src)
        errs.extend([abs(gm.z - m_tgt.z), abs(gm.t - m_tgt.t)])
        if max(errs) > tol:
            failures.append((gp.gen_id, max(errs)))
        if gp.iso.orientation != 1:
            failures.append((gp.gen_id, "orientation"))
        back = pg.directed[gp.target]
        if not back[2].projectively_equal(gp.iso.inverse()):
            failures.append((gp.gen_id, "inverse mismatch"))
    count = sum(1 for g in pg.generators if g.kind == "downward")
    report = {
        "generator_count": len(pg.generators),
        "downward": count,
        "translations": len(pg.translations),
        "failures": failures,
        "pass": not failures and len(pg.generators) == 39,
    }
    if failures:
        raise PairingError("wall matches failed: %r" % failures)
    return report


# ---------------------------------------------------------------------------
# Glue table and the combinatorial fan walks.
# ---------------------------------------------------------------------------

def _translation_letters(delta):
    """Word over the translation generators for a lattice vector in 6Z[w]."""
    p, q = delta[0] // 6, delta[1] // 6
    if (delta[0], delta[1]) != (6 * p, 6 * q):
        raise PoincareError("rim shift %r is not in the period lattice" % (delta,))
    if (p, q) == (1, 1):
        return [(T3, 1)]
    if (p, q) == (-1, -1):
        return [(T3, -1)]
    word = []
    word.extend([(T1, 1 if p > 0 else -1)] * abs(p))
    word.extend([(T2, 1 if q > 0 else -1)] * abs(q))
    return word


def build_glue_table(region, pg):
    """glue[(tid, face)] = (tid', iso, letters): the tetrahedron on the other
    side of each face, with the chart-change isometry and its generator word
    (empty for coincident interior faces)."""
    layout = region.layout
    idx = region.tet_index
    glue = {}
    for tet in region.tets:
        f, d, k, e = tet.f, tet.direction, tet.k, tet.e
        glue[(tet.tid, "A")] = (idx[(f, "d" if d == "u" else "u", k, e)], Isometry.identity(), [])
        glue[(tet.tid, "B")] = (idx[(f, d, k, 1 - e)], Isometry.identity(), [])
        if e == 0:
            glue[(tet.tid, "C")] = (idx[(f, d, (k - 1) % 6, 1)], Isometry.identity(), [])
        else:
            glue[(tet.tid, "C")] = (idx[(f, d, (k + 1) % 6, 0)], Isometry.identity(), [])
        if d == "u":
            f2, k2 = layout.big.pairing[(f, k)]
            e2 = 1 - e
            delta = lat_sub(layout.vertex_pos[(f2, (k2 + e2) % 6)],
                            layout.vertex_pos[(f, (k + e) % 6)])
            delta_other = lat_sub(layout.vertex_pos[(f2, (k2 + (1 - e2)) % 6)],
                                  layout.vertex_pos[(f, (k + 1 - e) % 6)])
            if delta != delta_other:
                raise PoincareError("up-wall slots %r,%r are not translates" % ((f, k), (f2, k2)))
            if delta == (0, 0):
                iso, letters = Isometry.identity(), []
            else:
                iso = translation(lat_to_complex(delta))
                letters = _translation_letters(delta)
            glue[(tet.tid, "D")] = (idx[(f2, "u", k2, e2)], iso, letters)
        else:
            gid, exp, iso, (f2, k2), emap = pg.directed[(f, k)]
            e2 = emap[e] if exp == 1 else emap.index(e)
            glue[(tet.tid, "D")] = (idx[(f2, "d", k2, e2)], iso, [(gid, exp)])
    for (tid, face), (tid2, _, _) in glue.items():
        back = glue[(tid2, face)]
        if back[0] != tid:
            raise PoincareError("glue table asymmetric at (%d, %s)" % (tid, face))
    return glue


@dataclass
class EdgeClass:
    etype: str
    members: list  # (tid, enter_face) in fan order
    angle_sum: float
    word: list  # generator letters around the fan
    return_iso: Isometry
    cells: set  # exact geometric 1-cell keys


@dataclass
class EdgeCycleReport:
    classes: list
    profile: dict  # etype -> sorted fan sizes
    relations: list  # nonempty words whose composition is the identity
    max_angle_defect: float
    max_return_residual: float

    @property
    def ok(self):
        return self.max_angle_defect < 1e-9


def _cell_key(region, tet, etype):
    """Exact key of the geometric 1-cell (translation-reduced unless it ends
    at a downward apex, which is only ever identified through pairings)."""
    f, k, e = tet.f, tet.k, tet.e
    lay = region.layout
    v2 = tuple(2 * x for x in lay.vertex_pos[(f, (k + e) % 6)])
    m2 = region.mid_lat2[(f, k)]
    t2 = tuple(2 * x for x in lay.centers[f])
    first = {"VM": (v2, "v"), "VT": (v2, "v"), "MT": (m2, "m"),
             "VP": (v2, "v"), "MP": (m2, "m"), "TP": (t2, "t")}[etype]
    second = {"VM": (m2, "m"), "VT": (t2, "t"), "MT": (t2, "t"),
              "VP": None, "MP": None, "TP": None}[etype]
    if second is None:
        if tet.direction == "d":
            # apex cells are only identified through pairings: exact key
            return (etype + "dn", first, ("ap",) + t2)
        c1, h1 = first
        shift = (c1[0] - (c1[0] % 12), c1[1] - (c1[1] % 12))
        return (etype + "up", ((c1[0] - shift[0], c1[1] - shift[1]), h1), ("inf",))
    # finite 1-cells: reduce the pair by a common period-lattice shift
    (c1, h1), (c2, h2) = first, second
    shift = (c1[0] - (c1[0] % 12), c1[1] - (c1[1] % 12))
    return (etype, ((c1[0] - shift[0], c1[1] - shift[1]), h1),
            ((c2[0] - shift[0], c2[1] - shift[1]), h2))


def edge_cycle_check(region, pg, glue=None):
    """Walk the fan around every 1-cell class; angle sums must all be 2*pi and
    the composed return isometry the identity.  The boundary profiles (8 x pi/4
    and 6 x pi/3) are recorded for the acceptance suite."""
    glue = glue or build_glue_table(region, pg)
    visited = set()
    classes = []
    relations = []
    max_defect = 0.0
    max_resid = 0.0
    for tet in region.tets:
        for etype, faces in EDGE_FACES.items():
            if (tet.tid, etype) in visited:
                continue
            members = []
            cells = set()
            word = []
            iso = Isometry.identity()
            angle = 0.0
            tid, enter = tet.tid, faces[0]
            while True:
                members.append((tid, enter))
                visited.add((tid, etype))
                cells.add(_cell_key(region, region.tets[tid], etype))
                angle += EDGE_ANGLES[etype]
                exit_face = faces[1] if enter == faces[0] else faces[0]
                tid2, step_iso, letters = glue[(tid, exit_face)]
                iso = step_iso * iso
                word.extend(letters)
                tid, enter = tid2, exit_face
                if tid == tet.tid and enter == faces[0]:
                    break
                if len(members) > 64:
                    raise PoincareError("fan walk did not close at %r" % ((tet.tid, etype),))
            defect = abs(angle - 2 * math.pi)
            max_defect = max(max_defect, defect)
            ident = iso.projectively_equal(Isometry.identity(), tol=1e-8)
            resid = 0.0 if ident else float("inf")
            if not ident:
                raise PoincareError("return isometry around %r is not the identity" % ((tet.tid, etype),))
            m = max(abs(u - v) for u, v in zip(_normalize_sign(iso.matrix()),
                                               _normalize_sign(Isometry.identity().matrix())))
            max_resid = max(max_resid, m)
            classes.append(EdgeClass(etype, members, angle, word, iso, cells))
            if word:
                relations.append(list(word))
    profile = {}
    for cl in classes:
        profile.setdefault(cl.etype, []).append(len(cl.members))
    for etype, sizes in profile.items():
        if set(sizes) != {EXPECTED_FAN[etype]}:
            raise PoincareError("fan sizes for %s: %r" % (etype, sorted(set(sizes))))
    report = EdgeCycleReport(classes, {k: sorted(v) for k, v in profile.items()},
                             relations, max_defect, max_resid)
    if max_defect > 1e-9:
        raise PoincareError("angle sum defect %g" % max_defect)
    return report


def _normalize_sign(m):
    for x in m:
        if abs(x) > 1e-6:
            return m if (x.real, x.imag) >= (0, 0) else tuple(-u for u in m)
    return m


# ---------------------------------------------------------------------------
# Vertex links.
# ---------------------------------------------------------------------------

@dataclass
class VertexLinkReport:
    classes: list  # lists of vertex keys (lattice pairs mod the periods)
    tets_per_class: list
    link_euler: list
    columns: list  # the common column label of each class

    @property
    def ok(self):
        return (len(self.classes) == 6 and all(len(c) == 4 for c in self.classes)
                and set(self.tets_per_class) == {48} and set(self.link_euler) == {2})


def vertex_link_check(region, pg, glue=None, cycle_report=None):
    glue = glue or build_glue_table(region, pg)
    cycle_report = cycle_report or edge_cycle_check(region, pg, glue)
    lay = region.layout
    lab = region.maniplex.frame.w_label

    def vkey(f, k):
        p = lay.vertex_pos[(f, k)]
        return (p[0] % 6, p[1] % 6)

    keys = {vkey(f, k) for f in lay.centers for k in range(6)}
    if len(keys) != 24:
        raise PoincareError("expected 24 region vertices, got %d" % len(keys))
    parent = {k: k for k in keys}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for gp in pg.generators:
        if gp.kind != "downward":
            continue
        (f, k), (f2, k2) = gp.source, gp.target
        for e in (0, 1):
            e2 = gp.endpoint_map[e]
            union(vkey(f, (k + e) % 6), vkey(f2, (k2 + e2) % 6))
    groups = {}
    for k in keys:
        groups.setdefault(find(k), []).append(k)
    classes = sorted((sorted(v) for v in groups.values()), key=lambda g: g[0])
    # column labels must be constant on each class
    col_of_key = {}
    for f in lay.centers:
        for k in range(6):
            w = lay.big.faces[f].cycle[k]
            col_of_key.setdefault(vkey(f, k), set()).add(lab[w][1])
    columns = []
    for cl in classes:
        cols = set()
        for key in cl:
            cols |= col_of_key[key]
        if len(cols) != 1:
            raise PoincareError("vertex class %r mixes columns %r" % (cl, cols))
        columns.append(next(iter(cols)))
    # tetrahedra per class and link Euler characteristic
    tets_by_class = {i: [] for i in range(len(classes))}
    class_of_key = {}
    for i, cl in enumerate(classes):
        for key in cl:
            class_of_key[key] = i
    for tet in region.tets:
        key = vkey(tet.f, (tet.k + tet.e) % 6)
        tets_by_class[class_of_key[key]].append(tet.tid)
    fan_class_of = {}
    for ci, cl in enumerate(cycle_report.classes):
        for tid, _ in cl.members:
            fan_class_of[(tid, cl.etype)] = ci
    link_euler = []
    for i in range(len(classes)):
        tids = set(tets_by_class[i])
        f_l = len(tids)
        pairs = set()
        for tid in tids:
            for face in ("A", "C", "D"):
                tid2 = glue[(tid, face)][0]
                if tid2 not in tids:
                    raise PoincareError("link of class %d leaks through %s" % (i, face))
                pairs.add(frozenset(((tid, face), (tid2, face))))
        e_l = len(pairs)
        germs = set()
        for tid in tids:
            for etype in ("VM", "VT", "VP"):
                germs.add(fan_class_of[(tid, etype)])
        v_l = len(germs)
        link_euler.append(v_l - e_l + f_l)
    report = VertexLinkReport(classes, [len(tets_by_class[i]) for i in range(len(classes))],
                              link_euler, columns)
    if not report.ok:
        raise PoincareError("vertex link check failed: %r" % report)
    return report


# ---------------------------------------------------------------------------
# Cusps.
# ---------------------------------------------------------------------------

@dataclass
class CuspData:
    classes: list  # [("inf",)] plus apex classes as face-id tuples
    lattices: dict  # class index -> (b1, b2) complex basis after conjugation to inf
    moduli: dict  # class index -> normalized shape modulus
    volumes: dict  # class index -> horoball volume at reference height 1
    parabolic: bool
    triples: dict  # class index -> row triple (None for the big cusp)

    @property
    def sizes(self):
        return sorted(len(c) for c in self.classes)


def cusp_analysis(region, pg):
    """Ideal classes, holonomy lattices, shapes and reference-height volumes.

    Each finite class is conjugated to infinity by z -> -1/(z - apex); loop
    words in the pairing graph give the holonomy lattice, which must be
    parabolic (completeness) with shape e^{i pi/3}.
    """
    lay = region.layout
    faces = sorted(lay.centers)
    parent = {f: f for f in faces}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for gp in pg.generators:
        if gp.kind != "downward":
            continue
        f, f2 = gp.source[0], gp.target[0]
        edges.append((f, f2, gp.iso))
        edges.append((f2, f, gp.iso.inverse()))
        rx, ry = find(f), find(f2)
        if rx != ry:
            parent[rx] = ry
    groups = {}
    for f in faces:
        groups.setdefault(find(f), []).append(f)
    apex_classes = sorted((tuple(sorted(v)) for v in groups.values()), key=lambda c: c[0])
    classes = [("inf",)] + apex_classes
    triples = {0: None}
    for i, cls in enumerate(apex_classes, start=1):
        trs = {lay.big.faces[f].triple for f in cls}
        if len(trs) != 1 or len(cls) != 3:
            raise PoincareError("apex class %r is not one row triple" % (cls,))
        triples[i] = next(iter(trs))

    lattices, moduli, volumes = {}, {}, {}
    parabolic = True
    # big cusp: holonomies are the translations
    b1, b2 = 6 * LAMBDA + 0j, 6 * LAMBDA * OMEGA
    lattices[0] = (b1, b2)
    moduli[0] = _normalize_modulus(b2 / b1)
    volumes[0] = abs((b1.conjugate() * b2).imag) / 2.0
    for i, cls in enumerate(apex_classes, start=1):
        base = cls[0]
        apex = region.centers_c[base]
        nu = Isometry(0, -1, 1, -apex)
        tree = {base: Isometry.identity()}
        queue = [base]
        cls_set = set(cls)
        adj = {}
        for f, f2, iso in edges:
            if f in cls_set and f2 in cls_set:
                adj.setdefault(f, []).append((f2, iso))
        while queue:
            f = queue.pop(0)
            for f2, iso in adj[f]:
                if f2 not in tree:
                    tree[f2] = iso * tree[f]
                    queue.append(f2)
        if set(tree) != cls_set:
            raise PoincareError("apex class %r is not pairing-connected" % (cls,))
        taus = []
        for f, f2, iso in edges:
            if f not in cls_set or f2 not in cls_set:
                continue
            loop = tree[f2].inverse() * iso * tree[f]
            h = nu * loop * nu.inverse()
            if abs(h.c) > 1e-8:
                parabolic = False
                raise PoincareError("cusp loop does not fix infinity")
            mult = h.a / h.d
            if abs(mult - 1) > 1e-8 and abs(mult + 1) > 1e-8:
                parabolic = False
                raise PoincareError("non-parabolic cusp holonomy (multiplier %r)" % (mult,))
            tau = h.b / h.d
            if abs(tau) > 1e-9:
                taus.append(tau)
        basis = _lattice_reduce(taus)
        if basis is None:
            raise PoincareError("cusp lattice of class %r is degenerate" % (cls,))
        lb1, lb2 = basis
        for tau in taus:
            if not _in_lattice(tau, lb1, lb2):
                raise PoincareError("holonomy %r outside the reduced lattice" % (tau,))
        lattices[i] = (lb1, lb2)
        moduli[i] = _normalize_modulus(lb2 / lb1)
        volumes[i] = abs((lb1.conjugate() * lb2).imag) / 2.0
    return CuspData(classes, lattices, moduli, volumes, parabolic, triples)


def _lattice_reduce(taus):
    """Gauss-reduced basis of the lattice generated by the translations.

    The two shortest independent holonomies are reduced against each other;
    the closure check in the caller guarantees exactness (every input lies in
    the span, and the basis vectors are themselves inputs).
    """
    vecs = [t for t in taus if abs(t) > 1e-9]
    if not vecs:
        return None
    b1 = min(vecs, key=abs)
    indep = [t for t in vecs
             if abs((t.conjugate() * b1).imag) > 1e-9 * abs(b1) * abs(t)]
    if not indep:
        return None
    b2 = min(indep, key=abs)
    for _ in range(100):
        n = round((b2 * b1.conjugate()).real / (abs(b1) ** 2))
        b2 = b2 - n * b1
        if abs(b2) < abs(b1):
            b1, b2 = b2, b1
        else:
            break
    if (b1.conjugate() * b2).imag < 0:
        b2 = -b2
    return b1, b2


def _in_lattice(t, b1, b2, tol=1e-7):
    det = (b1.conjugate() * b2).imag
    x = (t.conjugate() * b2).imag / det
    y = (b1.conjugate() * t).imag / det
    return abs(x - round(x)) < tol and abs(y - round(y)) < tol


def _normalize_modulus(tau):
    """Lattice shape reduced to the modular fundamental domain.

    On the boundary |tau| = 1 the representative with Re(tau) >= 0 is chosen,
    so a hexagonal lattice always reports e^{i pi/3}.
    """
    if tau.imag < 0:
        tau = tau.conjugate()
    for _ in range(100):
        tau = complex(tau.real - round(tau.real), tau.imag)
        if abs(tau) < 1 - 1e-12:
            tau = -1 / tau
        else:
            break
    if tau.real < -1e-9 and abs(abs(tau) - 1) < 1e-9:
        tau = -1 / tau  # on the unit circle this flips the sign of Re
    return tau


# ---------------------------------------------------------------------------
# Generator reduction.
# ---------------------------------------------------------------------------

@dataclass
class ReductionReport:
    kept: list  # generator ids
    witnesses: dict  # removed id -> word over kept ids
    max_residual: float

    @property
    def ok(self):
        return len(self.kept) <= 18


def _word_inverse(w):
    return [(g, -e) for g, e in reversed(w)]


def generator_reduction(pg, relations, max_word_len=6, restarts=64):
    """Reduce the 39 generators using the edge-cycle relations.

    Each relation word composes to the identity, so a generator occurring
    exactly once in a relation is a word in the others.  A seeded randomized
    greedy (with substitution of earlier witnesses and rollback when a
    substitution would exceed the word-length bound) is run a few times and
    the smallest generating set kept; witness words are always expressed over
    the final kept set.
    """
    import random as _random

    seen = set()
    rels = []
    for w in relations + [[(T1, 1), (T2, 1), (T3, -1)]]:
        key = tuple(w)
        if key not in seen and 2 <= len(w) <= max_word_len + 1:
            seen.add(key)
            rels.append(list(w))

    def attempt(seed):
        rng = _random.Random(seed)
        order = list(range(len(rels)))
        rng.shuffle(order)
        order.sort(key=lambda i: len(rels[i]))
        removed = {}

        def expand(word):
            out = []
            for g, e in word:
                if g in removed:
                    sub = removed[g] if e == 1 else _word_inverse(removed[g])
                    out.extend(sub)
                else:
                    out.append((g, e))
            return out

        progress = True
        while progress:
            progress = False
            for i in order:
                rel = rels[i]
                gens_in = [g for g, _ in rel]
                cands = [pos for pos, (g, _) in enumerate(rel)
                         if g not in removed and gens_in.count(g) == 1]
                rng.shuffle(cands)
                for pos in cands:
                    g, exp = rel[pos]
                    w1, w2 = rel[:pos], rel[pos + 1:]
                    word = _word_inverse(w1) + _word_inverse(w2)
                    if exp == -1:
                        word = _word_inverse(word)
                    word = expand(word)
                    if len(word) > max_word_len or any(gg == g for gg, _ in word):
                        continue
                    # substitute into existing witnesses; rollback on overflow
                    new_removed = {g: word}
                    ok = True
                    for h, wh in removed.items():
                        sub = []
                        for gg, ee in wh:
                            if gg == g:
                                sub.extend(word if ee == 1 else _word_inverse(word))
                            else:
                                sub.append((gg, ee))
                        if len(sub) > max_word_len:
                            ok = False
                            break
                        new_removed[h] = sub
                    if ok:
                        removed = new_removed
                        progress = True
                        break
        return removed

    best = None
    for seed in range(restarts):
        removed = attempt(seed)
        if best is None or len(removed) > len(best):
            best = removed
        if len(pg.generators) - len(best) <= 18:
            break
    removed = best
    kept = [g.gen_id for g in pg.generators if g.gen_id not in removed]
    max_resid = 0.0
    for g, word in removed.items():
        target = pg.generators[g].iso
        got = pg.word_iso(word)
        if not got.projectively_equal(target, tol=1e-8):
            raise PoincareError("witness for generator %d does not reproduce it" % g)
        resid = min(
            max(abs(u - s * v) for u, v in zip(got.matrix(), target.matrix()))
            for s in (1, -1)
        )
        max_resid = max(max_resid, resid)
    return ReductionReport(sorted(kept), removed, max_resid)


# ---------------------------------------------------------------------------
# The worked identification example and the rotation-form classification.
# ---------------------------------------------------------------------------

def _lat_c(a, b, scale=LAMBDA):
    return scale * (a + b * OMEGA)


def paper_example_isometry():
    """translation, then inversion at the intermediate hexagon, then inversion
    at the target hexagon; together with the points it must move.

    Coordinates are stated in the basis omega = e^{i pi/3}; the source hexagon
    sits at 3*lambda*omega, the intermediate at -3*lambda, the target at
    lambda*(omega - 2).
    """
    c_src = _lat_c(0, 3)
    c_mid = _lat_c(-3, 0)
    c_tgt = _lat_c(-2, 1)
    shift = c_mid - c_src
    g0 = inversion_unit(c_tgt) * inversion_unit(c_mid) * translation(shift)
    pts_src = [PointH3(_lat_c(0, 4), H_V), PointH3(_lat_c(1, 3), H_V), c_src]
    pts_tgt = [PointH3(_lat_c(-3, 1), H_V), PointH3(_lat_c(-2, 0), H_V), c_tgt]
    return g0, pts_src, pts_tgt, (c_src, c_mid, c_tgt)


def paper_example_check(region, pg, tol=1e-8):
    """The explicit composed identification must move its three marked points
    as stated, and must coincide (after aligning layouts by a symmetry of the
    hexagonal structure) with one synthesized pairing."""
    g0, pts_src, pts_tgt, _ = paper_example_isometry()
    for p, q in zip(pts_src, pts_tgt):
        img = g0(p)
        if isinstance(q, PointH3):
            if abs(img.z - q.z) > tol or abs(img.t - q.t) > tol:
                raise PairingError("composition moves %r to %r, expected %r" % (p, img, q))
        else:
            if abs(complex(img) - q) > tol:
                raise PairingError("composition moves apex to %r, expected %r" % (img, q))
    match = _align_pairing_to(region, pg, g0, pts_src, pts_tgt, tol)
    if match is None:
        raise PairingError("no synthesized pairing matches the worked example")
    return match


def _align_pairing_to(region, pg, g0, pts_src, pts_tgt, tol):
    """Search for a pairing g and a lattice symmetry s with s g s^-1 = g0.

    s ranges over maps z -> mu z + beta and z -> mu conj(z) + beta carrying the
    pairing's wall anchors onto the example's; mu must be a sixth root of
    unity for s to preserve the hexagonal structure.
    """
    p1, p2 = pts_src[0].z, pts_src[1].z
    apex_s = pts_src[2]
    for gp in pg.generators:
        if gp.kind != "downward":
            continue
        for direction in (1, -1):
            if direction == 1:
                src, tgt, iso = gp.source, gp.target, gp.iso
            else:
                src, tgt, iso = gp.target, gp.source, gp.iso.inverse()
            f, k = src
            a1 = region.vertex_c[(f, k)]
            a2 = region.vertex_c[(f, (k + 1) % 6)]
            ap = region.centers_c[f]
            for order in ((a1, a2), (a2, a1)):
                for conj in (False, True):
                    b1 = order[0].conjugate() if conj else order[0]
                    b2 = order[1].conjugate() if conj else order[1]
                    bap = ap.conjugate() if conj else ap
                    mu = (p2 - p1) / (b2 - b1)
                    if abs(abs(mu) - 1) > 1e-9:
                        continue
                    beta = p1 - mu * b1
                    if abs(mu * bap + beta - apex_s) > 1e-6:
                        continue
                    alpha = cmath.sqrt(mu)
                    sym = Isometry(alpha, beta / alpha, 0, 1 / alpha,
                                   conj=conj, normalize=False)
                    cand = sym * iso * sym.inverse()
                    if cand.projectively_equal(g0, tol):
                        return {"gen_id": gp.gen_id, "direction": direction,
                                "conjugated": conj, "mu": mu, "beta": beta}
    return None


def classify_pairing_forms(region, pg, tol=1e-8):
    """Express each downward pairing as inversions * (translation | pi-rotation).

    Writing g = inv_target o inv_c1 o E forces c1 = inv_target(g(inf)); c1 must
    be a hexagon center of the honeycomb and E a horizontal translation or a
    half turn.  Returns the per-generator form tags.
    """
    forms = {}
    for gp in pg.generators:
        if gp.kind != "downward":
            continue
        c_t = region.centers_c[gp.target[0]]
        ginf = gp.iso(INF)
        if ginf is INF:
            forms[gp.gen_id] = "other"
            continue
        c1 = inversion_unit(c_t)(ginf)
        if c1 is INF:
            forms[gp.gen_id] = "other"
            continue
        c1 = complex(c1)
        lat = _snap_lattice(c1)
        if lat is None or lat_color(lat) != 0:
            forms[gp.gen_id] = "other"
            continue
        c1 = _lat_c(*lat)
        e = inversion_unit(c1) * inversion_unit(c_t) * gp.iso
        if e.conj or abs(e.c) > tol:
            forms[gp.gen_id] = "other"
            continue
        mult = e.a * e.a  # z -> (a/d) z + ..., with ad = 1
        if abs(mult - 1) <= tol:
            forms[gp.gen_id] = "translation"
        elif abs(mult + 1) <= tol:
            forms[gp.gen_id] = "rotation"
        else:
            forms[gp.gen_id] = "other"
    return forms


def _snap_lattice(z, scale=LAMBDA, tol=1e-6):
    b = z.imag / (scale * math.sqrt(3) / 2)
    a = z.real / scale - b / 2
    la, lb = round(a), round(b)
    if abs(a - la) > tol or abs(b - lb) > tol:
        return None
    return (la, lb)
