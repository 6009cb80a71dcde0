"""Upper half-space model: points, planes, orientation-signed isometries with
Poincare extension, the characteristic tetrahedron and its reflection group,
and the Lobachevsky function.

Conventions.  An isometry is a determinant-1 complex 2x2 matrix (a, b, c, d)
identified with its negative, plus a conjugation flag: with flag set the map
acts as z -> mobius(M, conj(z)).  Points of H^3 are (z, t) with t > 0; ideal
points are complex numbers or INF.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.integrate import quad

__all__ = [
    "INF",
    "EPS",
    "PointH3",
    "Isometry",
    "PlaneH3",
    "GeometryError",
    "dist",
    "apply",
    "midpoint",
    "reflection_in_plane",
    "dihedral_angle",
    "translation",
    "rotation_pi",
    "inversion_unit",
    "three_point_map",
    "characteristic_tetrahedron",
    "coxeter_generators",
    "honeycomb_patch",
    "lobachevsky",
    "lobachevsky_series",
    "tetrahedron_volume",
    "LAMBDA",
    "OMEGA",
]

INF = "inf"
EPS = 1e-9
LAMBDA = math.sqrt(2.0 / 3.0)
OMEGA = cmath.exp(1j * math.pi / 3)


class GeometryError(RuntimeError):
    pass


@dataclass(frozen=True)
class PointH3:
    z: complex
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise GeometryError("height must be positive, got %r" % (self.t,))

    def __repr__(self):
        return "PointH3(%s, %s)" % (self.z, self.t)


def dist(p, q):
    """Hyperbolic distance in the upper half-space."""
    num = abs(p.z - q.z) ** 2 + (p.t - q.t) ** 2
    return math.acosh(1.0 + num / (2.0 * p.t * q.t))


def midpoint(p, q, tol=1e-14):
    """Hyperbolic midpoint by bisection along the geodesic parameter.

    Only needed for oracle checks, so a simple bisection on the plane spanned
    by the two points suffices: parametrize points x on the geodesic by
    d(p, x) - d(x, q) and bisect.
    """
    if abs(p.z - q.z) < tol:
        t = math.sqrt(p.t * q.t)
        return PointH3(p.z, t)
    # geodesic is a semicircle in the vertical plane through p.z, q.z
    u = (q.z - p.z) / abs(q.z - p.z)
    x1, x2 = 0.0, abs(q.z - p.z)
    # circle with center m on the line, |(x - m, t)| = r
    m = (x2 ** 2 + q.t ** 2 - p.t ** 2) / (2 * x2)
    r = math.hypot(m, p.t)
    th_p = math.atan2(p.t, 0.0 - m)
    th_q = math.atan2(q.t, x2 - m)
    lo, hi = min(th_p, th_q), max(th_p, th_q)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        pt = PointH3(p.z + u * (m + r * math.cos(mid)), r * math.sin(mid))
        if dist(p, pt) < dist(pt, q):
            if th_p < th_q:
                lo = mid
            else:
                hi = mid
        else:
            if th_p < th_q:
                hi = mid
            else:
                lo = mid
    mid = 0.5 * (lo + hi)
    return PointH3(p.z + u * (m + r * math.cos(mid)), r * math.sin(mid))


class Isometry:
    """Orientation-signed Mobius transformation with Poincare extension."""

    __slots__ = ("a", "b", "c", "d", "conj")

    def __init__(self, a, b, c, d, conj=False, normalize=True):
        if normalize:
            det = a * d - b * c
            if abs(det) < 1e-30:
                raise GeometryError("singular matrix")
            s = 1.0 / cmath.sqrt(det)
            a, b, c, d = a * s, b * s, c * s, d * s
        self.a, self.b, self.c, self.d = a, b, c, d
        self.conj = bool(conj)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @property
    def orientation(self):
        return -1 if self.conj else 1

    def matrix(self):
        return (self.a, self.b, self.c, self.d)

    def trace(self):
        return self.a + self.d

    def compose(self, other):
        """self after other: (self*other)(x) = self(other(x))."""
        oa, ob, oc, od = other.a, other.b, other.c, other.d
        if self.conj:
            oa, ob, oc, od = oa.conjugate(), ob.conjugate(), oc.conjugate(), od.conjugate()
        return Isometry(
            self.a * oa + self.b * oc,
            self.a * ob + self.b * od,
            self.c * oa + self.d * oc,
            self.c * ob + self.d * od,
            conj=self.conj ^ other.conj,
            normalize=False,
        )

    def __mul__(self, other):
        return self.compose(other)

    def inverse(self):
        a, b, c, d = self.d, -self.b, -self.c, self.a
        if self.conj:
            a, b, c, d = a.conjugate(), b.conjugate(), c.conjugate(), d.conjugate()
        return Isometry(a, b, c, d, conj=self.conj, normalize=False)

    def boundary(self, z):
        """Action on the ideal boundary C u {inf}."""
        if self.conj and z is not INF:
            z = complex(z).conjugate()
        a, b, c, d = self.a, self.b, self.c, self.d
        if z is INF:
            return INF if abs(c) < 1e-14 else a / c
        den = c * z + d
        if abs(den) < 1e-14:
            return INF
        return (a * z + b) / den

    def point(self, p):
        """Poincare extension to interior points."""
        z, t = p.z, p.t
        if self.conj:
            z = z.conjugate()
        a, b, c, d = self.a, self.b, self.c, self.d
        den = abs(c * z + d) ** 2 + abs(c) ** 2 * t * t
        znew = ((a * z + b) * (c * z + d).conjugate() + a * c.conjugate() * t * t) / den
        return PointH3(znew, t / den)

    def __call__(self, x):
        if isinstance(x, PointH3):
            return self.point(x)
        return self.boundary(x)

    def projectively_equal(self, other, tol=1e-8):
        if self.conj != other.conj:
            return False
        m1 = self.matrix()
        m2 = other.matrix()
        for sign in (1, -1):
            if all(abs(u - sign * v) <= tol for u, v in zip(m1, m2)):
                return True
        return False

    def is_identity(self, tol=1e-8):
        return self.projectively_equal(Isometry.identity(), tol)

    def __repr__(self):
        return "Isometry(%r, %r, %r, %r, conj=%r)" % (self.a, self.b, self.c, self.d, self.conj)


def apply(iso, x):
    """Module-level convenience wrapper around Isometry.__call__."""
    return iso(x)


# ---------------------------------------------------------------------------
# Planes and reflections.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneH3:
    """Vertical half-plane {Re(conj(normal) z) = offset} or hemisphere (center, radius)."""
    kind: str  # "vertical" | "sphere"
    normal: complex = 0j  # unit normal (vertical)
    offset: float = 0.0
    center: complex = 0j
    radius: float = 0.0

    @classmethod
    def vertical(cls, normal, offset):
        n = complex(normal)
        if abs(abs(n) - 1) > 1e-12:
            n = n / abs(n)
        return cls("vertical", normal=n, offset=float(offset))

    @classmethod
    def vertical_through(cls, z1, z2):
        u = complex(z2) - complex(z1)
        if abs(u) < 1e-14:
            raise GeometryError("degenerate vertical plane")
        n = 1j * u / abs(u)
        return cls("vertical", normal=n, offset=(n.conjugate() * z1).real)

    @classmethod
    def sphere(cls, center, radius):
        if radius <= 0:
            raise GeometryError("radius must be positive")
        return cls("sphere", center=complex(center), radius=float(radius))

    def side(self, z, t=0.0):
        """Signed boundary distance-like quantity used for half-space tests."""
        if self.kind == "vertical":
            return (self.normal.conjugate() * z).real - self.offset
        return abs(z - self.center) ** 2 + t * t - self.radius ** 2

    def contains_point(self, p, tol=EPS):
        if self.kind == "vertical":
            return abs((self.normal.conjugate() * p.z).real - self.offset) < tol
        return abs(abs(p.z - self.center) ** 2 + p.t ** 2 - self.radius ** 2) < tol


def reflection_in_plane(pl):
    """Orientation-reversing reflection fixing the plane pointwise."""
    if pl.kind == "vertical":
        n, d = pl.normal, pl.offset
        # z -> -n^2 conj(z) + 2 d n
        alpha = 1j * n
        beta = -2j * d
        return Isometry(alpha, beta, 0, 1.0 / alpha, conj=True, normalize=False)
    p, r = pl.center, pl.radius
    # z -> p + r^2 / conj(z - p)
    s = 1.0 / (1j * r)
    return Isometry(p * s, (r * r - abs(p) ** 2) * s, s, -p.conjugate() * s,
                    conj=True, normalize=False)


def dihedral_angle(p1, p2):
    """Angle in (0, pi/2] between two intersecting planes.

    All dihedral angles of the characteristic tetrahedron are at most pi/2, so
    the acute representative is the meaningful one throughout.
    """
    if p1.kind == "vertical" and p2.kind == "vertical":
        ratio = p1.normal / p2.normal
        th = abs(math.atan2(ratio.imag, ratio.real)) % math.pi
        th = min(th, math.pi - th)
        if th < 1e-12:
            raise GeometryError("parallel or equal vertical planes")
        return th
    if p1.kind == "sphere" and p2.kind == "sphere":
        dd = abs(p1.center - p2.center)
        cosv = (p1.radius ** 2 + p2.radius ** 2 - dd ** 2) / (2 * p1.radius * p2.radius)
        if cosv > 1 + 1e-12 or cosv < -1 - 1e-12:
            raise GeometryError("planes do not intersect")
        th = math.acos(max(-1.0, min(1.0, cosv)))
        return min(th, math.pi - th)
    sph = p1 if p1.kind == "sphere" else p2
    ver = p2 if p1.kind == "sphere" else p1
    rho = (ver.normal.conjugate() * sph.center).real - ver.offset
    cosv = rho / sph.radius
    if abs(cosv) > 1 + 1e-12:
        raise GeometryError("planes do not intersect")
    th = math.acos(max(-1.0, min(1.0, abs(cosv))))
    if th < 1e-12:
        th = math.pi / 2  # vertical plane through the sphere center
    return min(th, math.pi - th) if th > 1e-12 else th


def translation(v):
    return Isometry(1, complex(v), 0, 1)


def rotation_pi(center):
    """Half turn around the vertical geodesic above ``center``: z -> 2c - z."""
    c = complex(center)
    return Isometry(1j, -2j * c, 0, -1j, normalize=False)


def inversion_unit(center):
    """Inversion in the unit hemisphere centered at ``center`` (orientation -1)."""
    return reflection_in_plane(PlaneH3.sphere(center, 1.0))


def three_point_map(src, dst):
    """The orientation-preserving isometry sending src to dst.

    Each argument is (p1, p2, apex): two interior points at equal height on the
    unit hemisphere around the boundary point apex.  Both triples are carried
    to a canonical configuration by Mobius maps; uniqueness follows because an
    orientation-preserving isometry fixing two interior points and one ideal
    point is the identity.
    """
    f_src = _frame_to_canonical(*src)
    f_dst = _frame_to_canonical(*dst)
    return f_dst.inverse() * f_src


def _frame_to_canonical(p1, p2, apex):
    c = complex(apex)
    t_move = translation(-c)
    flip = Isometry(0, -1, 1, 0)  # z -> -1/z, apex to inf
    g = flip * t_move
    q1, q2 = g(p1), g(p2)
    if abs(q1.t - q2.t) > 1e-9:
        raise GeometryError("frame points not at equal height over the apex")
    u = q2.z - q1.z
    a = abs(u) / u  # unit multiplier sending the pair direction to the positive axis
    alpha = cmath.sqrt(a)
    aff = Isometry(alpha, -a * q1.z / alpha, 0, 1.0 / alpha, normalize=False)
    return aff * g


# ---------------------------------------------------------------------------
# The characteristic tetrahedron and its reflection group.
# ---------------------------------------------------------------------------

V0 = PointH3(-LAMBDA + 0j, 1 / math.sqrt(3))
V1 = PointH3(complex(-math.sqrt(3) / (2 * math.sqrt(2)), -1 / (2 * math.sqrt(2))), 1 / math.sqrt(2))
V2 = PointH3(0j, 1.0)


@dataclass(frozen=True)
class CharacteristicTetrahedron:
    """One fundamental tetrahedron: finite vertices v0, v1, v2 and an ideal vertex.

    Face A is opposite the ideal vertex, B opposite v0, C opposite v1 and D
    opposite v2; the dihedral angle between faces X and Y sits along the edge
    X n Y.
    """
    v0: PointH3
    v1: PointH3
    v2: PointH3
    face_a: PlaneH3
    face_b: PlaneH3
    face_c: PlaneH3
    face_d: PlaneH3

    def faces(self):
        return {"A": self.face_a, "B": self.face_b, "C": self.face_c, "D": self.face_d}

    def dihedral_angles(self):
        f = self.faces()
        pairs = [("B", "D"), ("A", "B"), ("A", "C"), ("C", "D"), ("A", "D"), ("B", "C")]
        return {p: dihedral_angle(f[p[0]], f[p[1]]) for p in pairs}


def characteristic_tetrahedron():
    face_a = PlaneH3.sphere(0j, 1.0)
    face_b = PlaneH3.vertical(cmath.exp(2j * math.pi / 3), 0.0)
    face_c = PlaneH3.vertical(1j, 0.0)
    face_d = PlaneH3.vertical_through(-LAMBDA + 0j, V1.z)
    return CharacteristicTetrahedron(V0, V1, V2, face_a, face_b, face_c, face_d)


def coxeter_generators():
    """Reflections (R_A, R_B, R_C, R_D) in the four faces."""
    tet = characteristic_tetrahedron()
    return (
        reflection_in_plane(tet.face_a),
        reflection_in_plane(tet.face_b),
        reflection_in_plane(tet.face_c),
        reflection_in_plane(tet.face_d),
    )


@dataclass
class HoneycombPatch:
    """Base hexagon data of the honeycomb: edge a0, hexagon h0 around center (0,1)."""
    a0: tuple  # (v0, R_B v0)
    h0_vertices: list  # 6 PointH3 at height 1/sqrt(3)
    center: PointH3

    @property
    def edge_length(self):
        return dist(*self.a0)


def honeycomb_patch():
    r_a, r_b, r_c, r_d = coxeter_generators()
    a0 = (V0, r_b(V0))
    verts = {(_key(V0.z), V0)}
    frontier = [V0]
    while frontier:
        p = frontier.pop()
        for g in (r_b, r_c):
            q = g(p)
            k = _key(q.z)
            if k not in {kk for kk, _ in verts}:
                verts.add((k, q))
                frontier.append(q)
    vs = [p for _, p in sorted(verts, key=lambda kv: kv[0])]
    if len(vs) != 6:
        raise GeometryError("h0 orbit has %d vertices" % len(vs))
    for p in vs:
        if abs(p.t - 1 / math.sqrt(3)) > EPS or abs(abs(p.z) - LAMBDA) > EPS:
            raise GeometryError("h0 vertex off the base hemisphere: %r" % (p,))
    return HoneycombPatch(a0, vs, V2)


def _key(z, nd=9):
    return (round(z.real, nd), round(z.imag, nd))


def hexagon_vertex_angle(patch):
    """Interior angle of h0 at v0, computed from Euclidean tangents (the model
    is conformal, so Euclidean angles between tangent vectors are hyperbolic)."""
    ordered = sorted(patch.h0_vertices, key=lambda p: cmath.phase(p.z))
    i = min(range(6), key=lambda k: abs(ordered[k].z - V0.z))
    prev_v = ordered[(i - 1) % 6]
    next_v = ordered[(i + 1) % 6]
    t1 = _edge_tangent(V0, prev_v)
    t2 = _edge_tangent(V0, next_v)
    cosv = sum(a * b for a, b in zip(t1, t2))
    return math.acos(max(-1.0, min(1.0, cosv)))


def _edge_tangent(p, q):
    """Unit tangent at p of the geodesic p -> q, as (x, y, t) in R^3."""
    dz = q.z - p.z
    if abs(dz) < 1e-14:
        return (0.0, 0.0, 1.0 if q.t > p.t else -1.0)
    u = dz / abs(dz)
    x2 = abs(dz)
    m = (x2 ** 2 + q.t ** 2 - p.t ** 2) / (2 * x2)
    r = math.hypot(m, p.t)
    # tangent of s -> (m + r cos s, r sin s) at p, oriented toward q
    th_p = math.atan2(p.t, -m)
    tang = (-r * math.sin(th_p), r * math.cos(th_p))
    th_q = math.atan2(q.t, x2 - m)
    sign = 1.0 if th_q < th_p else -1.0
    tx, tt = sign * tang[0], sign * tang[1]
    nrm = math.hypot(tx, tt)
    return (tx * u.real / nrm, tx * u.imag / nrm, tt / nrm)


# ---------------------------------------------------------------------------
# Lobachevsky function and the tetrahedron volume.
# ---------------------------------------------------------------------------

_SERIES_DELTA = 1e-3


def lobachevsky(theta):
    """L(theta) = -int_0^theta log|2 sin t| dt by quadrature.

    The endpoint log-singularity at 0 is removed by the expansion
    L(x) = x - x log(2x) + x^3/18 + x^5/900 + O(x^7) on [0, delta].
    """
    theta = float(theta)
    if theta == 0.0:
        return 0.0
    if theta < 0:
        return -lobachevsky(-theta)
    head = min(theta, _SERIES_DELTA)
    total = _lob_series_small(head)
    if theta > _SERIES_DELTA:
        val, err = quad(lambda t: -math.log(abs(2.0 * math.sin(t))), _SERIES_DELTA, theta,
                        epsabs=1e-13, epsrel=1e-13, limit=200)
        if err > 1e-12:
            raise GeometryError("quadrature error estimate %g too large" % err)
        total += val
    return total


def _lob_series_small(x):
    return x - x * math.log(2.0 * x) + x ** 3 / 18.0 + x ** 5 / 900.0


def lobachevsky_series(theta, terms=200000):
    """Independent oracle: L(theta) = 1/2 sum sin(2 n theta)/n^2.

    The oscillatory tail beyond ``terms`` is summed by Euler-Maclaurin with the
    explicit antiderivative  int_N^inf sin(2 theta t)/t^2 dt = 2 theta *
    (sin(a)/a - Ci(a)) / ... evaluated via scipy's Si/Ci.
    """
    theta = float(theta)
    if theta == 0.0:
        return 0.0
    from scipy.special import sici
    s = 0.0
    two_t = 2.0 * theta
    for n in range(terms, 0, -1):  # small terms first
        s += math.sin(two_t * n) / (n * n)
    # tail: sum_{n>N} f(n) ~ int_N^inf f + f(N+?)/2 corrections; use midpoint E-M:
    # int_N^inf sin(c t)/t^2 dt with u = c t:  c * int_{cN}^inf sin u / u^2 du
    #   = c * (sin(a)/a - Ci(a)),  a = c N.
    n = terms
    a = two_t * n
    _, ci = sici(a)
    tail_int = two_t * (math.sin(a) / a - ci)
    f_n = math.sin(two_t * n) / (n * n)
    fp_n = (two_t * math.cos(two_t * n) * n - 2 * math.sin(two_t * n)) / (n ** 3)
    tail = tail_int - 0.5 * f_n - fp_n / 12.0
    return 0.5 * (s + tail)


def tetrahedron_volume():
    """Hyperbolic volume of the characteristic tetrahedron: (5/6) L(pi/3)."""
    return (5.0 / 6.0) * lobachevsky(math.pi / 3.0)
