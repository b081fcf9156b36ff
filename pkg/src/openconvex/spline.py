"""Exact piecewise-quadratic convex spline on an open half-plane.

The function is assembled from four quadratic pieces glued C^1 along
straight seams, defined on the open half-plane x1 > -23/240.  It is convex
and 1-smooth on its domain, yet the pair x=(0,0), y=(2,0) violates the
co-coercivity inequality, so no 1-smooth convex function on the whole plane
matches its values and gradients at those two points.

All arithmetic in this module is rational (fractions.Fraction); every
verification below is exact, with zero floating-point tolerance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DomainError

Q = Fraction


def _q(v) -> Q:
    """Coerce ints, strings like '1/12' and Fractions to Fraction."""
    if isinstance(v, Q):
        return v
    if isinstance(v, str):
        return Q(v)
    return Q(v)


@dataclass(frozen=True)
class ExactPoint:
    x0: Q
    x1: Q

    @staticmethod
    def of(x0, x1) -> "ExactPoint":
        return ExactPoint(_q(x0), _q(x1))


@dataclass(frozen=True)
class HalfPlane:
    """The set {z : <normal, z> <= offset} (or < offset when strict)."""

    normal: tuple[Q, Q]
    offset: Q
    strict: bool = False

    def __post_init__(self):
        if self.normal[0] == 0 and self.normal[1] == 0:
            raise ValueError("half-plane normal must be nonzero")

    def contains(self, p: ExactPoint) -> bool:
        v = self.normal[0] * p.x0 + self.normal[1] * p.x1
        return v < self.offset if self.strict else v <= self.offset

    def on_boundary(self, p: ExactPoint) -> bool:
        return self.normal[0] * p.x0 + self.normal[1] * p.x1 == self.offset


@dataclass(frozen=True)
class QuadraticPiece:
    """q(z) = 1/2 z'Az + b'z + c with a symmetric 2x2 rational A."""

    a00: Q
    a01: Q
    a11: Q
    b0: Q
    b1: Q
    c: Q

    def value(self, p: ExactPoint) -> Q:
        return (
            self.a00 * p.x0 * p.x0 / 2
            + self.a01 * p.x0 * p.x1
            + self.a11 * p.x1 * p.x1 / 2
            + self.b0 * p.x0
            + self.b1 * p.x1
            + self.c
        )

    def gradient(self, p: ExactPoint) -> tuple[Q, Q]:
        return (
            self.a00 * p.x0 + self.a01 * p.x1 + self.b0,
            self.a01 * p.x0 + self.a11 * p.x1 + self.b1,
        )

    def trace(self) -> Q:
        return self.a00 + self.a11

    def det(self) -> Q:
        return self.a00 * self.a11 - self.a01 * self.a01

    def is_psd(self) -> bool:
        return self.trace() >= 0 and self.det() >= 0

    def eig_at_most_one(self) -> bool:
        # both eigenvalues <= 1 iff A - I is negative semidefinite
        t = self.trace() - 2
        d = (self.a00 - 1) * (self.a11 - 1) - self.a01 * self.a01
        return t <= 0 and d >= 0


def _square_expansion(base: QuadraticPiece, coef: Q, a: tuple[Q, Q], beta: Q) -> QuadraticPiece:
    """Return base + coef * (<a, z> - beta)^2 expanded to A/b/c form."""
    return QuadraticPiece(
        a00=base.a00 + 2 * coef * a[0] * a[0],
        a01=base.a01 + 2 * coef * a[0] * a[1],
        a11=base.a11 + 2 * coef * a[1] * a[1],
        b0=base.b0 - 2 * coef * beta * a[0],
        b1=base.b1 - 2 * coef * beta * a[1],
        c=base.c + coef * beta * beta,
    )


@dataclass(frozen=True)
class PiecewiseQuadratic:
    """Quadratic pieces with half-plane regions over an open domain."""

    pieces: tuple[tuple[QuadraticPiece, tuple[HalfPlane, ...]], ...]
    domain: HalfPlane
    # seams: (lower piece index, higher piece index, boundary line as HalfPlane)
    seams: tuple[tuple[int, int, HalfPlane], ...]

    def in_domain(self, p: ExactPoint) -> bool:
        return self.domain.contains(p)

    def classify_region(self, p: ExactPoint) -> int:
        """1-based index of the active piece; lowest index on seams."""
        if not self.in_domain(p):
            raise DomainError(f"point ({p.x0}, {p.x1}) outside the open domain")
        for k, (_, region) in enumerate(self.pieces):
            if all(h.contains(p) for h in region):
                return k + 1
        raise DomainError(f"point ({p.x0}, {p.x1}) claimed by no region")

    def value(self, p: ExactPoint) -> Q:
        return self.pieces[self.classify_region(p) - 1][0].value(p)

    def gradient(self, p: ExactPoint) -> tuple[Q, Q]:
        return self.pieces[self.classify_region(p) - 1][0].gradient(p)

    def value_float(self, x0: float, x1: float) -> float:
        """Float fast path; piece selection by float comparisons."""
        if x1 <= DOMAIN_BOUND_F:
            raise DomainError(f"point ({x0}, {x1}) outside the open domain")
        k = self._classify_float(x0, x1)
        q = self.pieces[k][0]
        return (
            0.5 * float(q.a00) * x0 * x0
            + float(q.a01) * x0 * x1
            + 0.5 * float(q.a11) * x1 * x1
            + float(q.b0) * x0
            + float(q.b1) * x1
            + float(q.c)
        )

    def gradient_float(self, x0: float, x1: float) -> tuple[float, float]:
        if x1 <= DOMAIN_BOUND_F:
            raise DomainError(f"point ({x0}, {x1}) outside the open domain")
        k = self._classify_float(x0, x1)
        q = self.pieces[k][0]
        return (
            float(q.a00) * x0 + float(q.a01) * x1 + float(q.b0),
            float(q.a01) * x0 + float(q.a11) * x1 + float(q.b1),
        )

    def _classify_float(self, x0: float, x1: float) -> int:
        for k, (_, region) in enumerate(self.pieces):
            ok = True
            for h in region:
                v = float(h.normal[0]) * x0 + float(h.normal[1]) * x1
                if v > float(h.offset):
                    ok = False
                    break
            if ok:
                return k
        return len(self.pieces) - 1


# --- the concrete counterexample spline -----------------------------------

_SEAM_12 = ((Q(3), Q(-1)), Q(1, 12))     # 3 x0 - x1 = 1/12
_SEAM_23 = ((Q(3), Q(-1)), Q(31, 12))    # 3 x0 - x1 = 31/12
_SEAM_34 = ((Q(1), Q(-2)), Q(49, 48))    # x0 - 2 x1 = 49/48

DOMAIN_BOUND = Q(-23, 240)
DOMAIN_BOUND_F = float(DOMAIN_BOUND)

VIOLATION_X = ExactPoint.of(0, 0)
VIOLATION_Y = ExactPoint.of(2, 0)


def build_spline(piece_offsets: dict[int, Q] | None = None) -> PiecewiseQuadratic:
    """Construct the four-piece spline.

    piece_offsets is a test hook: {1-based piece index: rational delta}
    added to the piece's constant term, used to exercise failure paths of
    the seam verification.
    """
    one = QuadraticPiece(Q(1), Q(0), Q(1), Q(0), Q(0), Q(0))
    p1 = one
    p2 = _square_expansion(one, Q(-1, 20), _SEAM_12[0], _SEAM_12[1])
    p3_base = QuadraticPiece(Q(1), Q(0), Q(1), Q(-3, 4), Q(1, 4), Q(1, 3))
    p3 = p3_base
    p4 = _square_expansion(p3_base, Q(-1, 10), _SEAM_34[0], _SEAM_34[1])

    if piece_offsets:
        fixed = []
        for k, q in enumerate((p1, p2, p3, p4), start=1):
            d = _q(piece_offsets.get(k, 0))
            fixed.append(
                QuadraticPiece(q.a00, q.a01, q.a11, q.b0, q.b1, q.c + d)
            )
        p1, p2, p3, p4 = fixed

    le = lambda n, off: HalfPlane(n, off)               # <n,z> <= off
    ge = lambda n, off: HalfPlane((-n[0], -n[1]), -off)  # <n,z> >= off

    pieces = (
        (p1, (le(*_SEAM_12),)),
        (p2, (ge(*_SEAM_12), le(*_SEAM_23))),
        (p3, (ge(*_SEAM_23), le(*_SEAM_34))),
        (p4, (ge(*_SEAM_34),)),
    )
    domain = HalfPlane((Q(0), Q(-1)), -DOMAIN_BOUND, strict=True)  # x1 > -23/240
    seams = (
        (0, 1, HalfPlane(*_SEAM_12)),
        (1, 2, HalfPlane(*_SEAM_23)),
        (2, 3, HalfPlane(*_SEAM_34)),
    )
    return PiecewiseQuadratic(pieces, domain, seams)


_SPLINE = build_spline()


def classify_region(p: ExactPoint) -> int:
    return _SPLINE.classify_region(p)


def eval_F(p: ExactPoint) -> Q:
    return _SPLINE.value(p)


def grad_F(p: ExactPoint) -> tuple[Q, Q]:
    return _SPLINE.gradient(p)


def eval_F_float(x0: float, x1: float) -> float:
    return _SPLINE.value_float(x0, x1)


def grad_F_float(x0: float, x1: float) -> tuple[float, float]:
    return _SPLINE.gradient_float(x0, x1)


def domain_distance(p: ExactPoint) -> Q:
    """Exact distance from p to the complement of the open half-plane."""
    return p.x1 - DOMAIN_BOUND


# --- verification ----------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def merge(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            detail = f"  [{c.detail}]" if c.detail else ""
            lines.append(f"{status}  {c.name}{detail}")
        lines.append(f"{'OK' if self.passed else 'FAILED'}: "
                     f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(
            {
                "passed": self.passed,
                "checks": [
                    {"name": c.name, "passed": c.passed, "detail": c.detail}
                    for c in self.checks
                ],
            },
            indent=2,
        )


def verify_c1_seams(spline: PiecewiseQuadratic | None = None) -> VerificationReport:
    """Check value and gradient agreement of adjacent pieces on each seam.

    The difference polynomial restricted to the seam line must vanish
    identically together with its gradient: with d a direction along the
    line and z0 a point on it, this reduces to dA*d = 0, dA*z0 + db = 0 and
    dq(z0) = 0, all checked exactly.
    """
    spline = spline or _SPLINE
    report = VerificationReport()
    for i, j, line in spline.seams:
        qi = spline.pieces[i][0]
        qj = spline.pieces[j][0]
        da00, da01, da11 = qj.a00 - qi.a00, qj.a01 - qi.a01, qj.a11 - qi.a11
        db0, db1 = qj.b0 - qi.b0, qj.b1 - qi.b1
        n0, n1 = line.normal
        # a point on the line and a direction along it
        if n0 != 0:
            z0 = ExactPoint(line.offset / n0, Q(0))
        else:
            z0 = ExactPoint(Q(0), line.offset / n1)
        d0, d1 = -n1, n0
        grad_dir0 = da00 * d0 + da01 * d1
        grad_dir1 = da01 * d0 + da11 * d1
        grad_z0 = (
            da00 * z0.x0 + da01 * z0.x1 + db0,
            da01 * z0.x0 + da11 * z0.x1 + db1,
        )
        dq_z0 = qj.value(z0) - qi.value(z0)
        ok = (
            grad_dir0 == 0
            and grad_dir1 == 0
            and grad_z0[0] == 0
            and grad_z0[1] == 0
            and dq_z0 == 0
        )
        report.add(
            f"seam {i + 1}|{j + 1} on <({n0},{n1}),z> = {line.offset}",
            ok,
            "value and gradient agree identically" if ok else
            f"residuals grad_dir=({grad_dir0},{grad_dir1}) grad={grad_z0} value={dq_z0}",
        )
    return report


def verify_smooth_convex_pieces(spline: PiecewiseQuadratic | None = None) -> VerificationReport:
    """Exact convexity (A PSD) and 1-smoothness (eigenvalues <= 1) per piece."""
    spline = spline or _SPLINE
    report = VerificationReport()
    for k, (q, _) in enumerate(spline.pieces, start=1):
        report.add(
            f"piece {k} convex (trace={q.trace()}, det={q.det()})",
            q.is_psd(),
        )
        report.add(
            f"piece {k} 1-smooth (eigenvalues within [0,1])",
            q.eig_at_most_one(),
        )
    return report


def cocoercivity_sides() -> tuple[Q, Q]:
    """Exact (LHS, RHS) of the co-coercivity inequality at the violating pair."""
    gx = grad_F(VIOLATION_X)
    gy = grad_F(VIOLATION_Y)
    dx0 = VIOLATION_Y.x0 - VIOLATION_X.x0
    dx1 = VIOLATION_Y.x1 - VIOLATION_X.x1
    lhs = ((gy[0] - gx[0]) ** 2 + (gy[1] - gx[1]) ** 2) / 2
    rhs = eval_F(VIOLATION_Y) - eval_F(VIOLATION_X) - (gx[0] * dx0 + gx[1] * dx1)
    return lhs, rhs


def verify_violation() -> VerificationReport:
    """Assert the strict co-coercivity violation at x=(0,0), y=(2,0)."""
    report = VerificationReport()
    lhs, rhs = cocoercivity_sides()
    report.add(
        "co-coercivity violated at (0,0),(2,0)",
        lhs > rhs,
        f"lhs = {lhs}, rhs = {rhs}, violation = {lhs - rhs}",
    )
    return report


def _grid_points(spacing: Q, x_range: tuple[Q, Q], y_range: tuple[Q, Q]) -> list[ExactPoint]:
    pts = []
    nx = int((x_range[1] - x_range[0]) / spacing)
    ny = int((y_range[1] - y_range[0]) / spacing)
    for i in range(nx + 1):
        for j in range(ny + 1):
            pts.append(ExactPoint(x_range[0] + i * spacing, y_range[0] + j * spacing))
    return pts


DEFAULT_GRID_SPACING = Q(1, 16)
DEFAULT_X_RANGE = (Q(-2), Q(3))
DEFAULT_Y_RANGE = (DOMAIN_BOUND + Q(1, 240), Q(2))


def verify_grid_properties(
    spacing: Q = DEFAULT_GRID_SPACING,
    x_range: tuple[Q, Q] = DEFAULT_X_RANGE,
    y_range: tuple[Q, Q] = DEFAULT_Y_RANGE,
    pair_stride: int = 37,
    spline: PiecewiseQuadratic | None = None,
) -> VerificationReport:
    """Sampled exact invariants on a rational lattice.

    Checks region coverage (with seam agreement where regions overlap) at
    every lattice point, and gradient monotonicity, 1-smoothness and the
    two-sided descent inequality on a deterministic subset of point pairs
    (every pair_stride-th pair to keep the quadratic pair count in check).
    """
    spline = spline or _SPLINE
    report = VerificationReport()
    pts = [p for p in _grid_points(spacing, x_range, y_range) if spline.in_domain(p)]

    coverage_ok = True
    overlap_ok = True
    for p in pts:
        claims = [
            k
            for k, (_, region) in enumerate(spline.pieces)
            if all(h.contains(p) for h in region)
        ]
        if not claims:
            coverage_ok = False
            break
        if len(claims) > 1:
            vals = {spline.pieces[k][0].value(p) for k in claims}
            grads = {spline.pieces[k][0].gradient(p) for k in claims}
            if len(vals) != 1 or len(grads) != 1:
                overlap_ok = False
                break
    report.add(f"region coverage on {len(pts)}-point lattice", coverage_ok)
    report.add("seam agreement at multiply-claimed lattice points", overlap_ok)

    data = [(p, spline.value(p), spline.gradient(p)) for p in pts]
    mono_ok = smooth_ok = descent_ok = True
    npairs = 0
    n = len(data)
    idx = 0
    for a in range(n):
        pa, fa, ga = data[a]
        for b in range(a + 1, n):
            idx += 1
            if idx % pair_stride:
                continue
            pb, fb, gb = data[b]
            npairs += 1
            d0, d1 = pb.x0 - pa.x0, pb.x1 - pa.x1
            g0, g1 = gb[0] - ga[0], gb[1] - ga[1]
            if g0 * d0 + g1 * d1 < 0:
                mono_ok = False
            if g0 * g0 + g1 * g1 > d0 * d0 + d1 * d1:
                smooth_ok = False
            lower = fb - fa - (ga[0] * d0 + ga[1] * d1)
            if lower < 0 or lower > (d0 * d0 + d1 * d1) / 2:
                descent_ok = False
        if not (mono_ok and smooth_ok and descent_ok):
            break
    report.add(f"gradient monotonicity on {npairs} lattice pairs", mono_ok)
    report.add("1-smoothness (squared norms) on lattice pairs", smooth_ok)
    report.add("two-sided descent inequality on lattice pairs", descent_ok)
    return report


def verify_all(
    spacing: Q = DEFAULT_GRID_SPACING,
    spline: PiecewiseQuadratic | None = None,
) -> VerificationReport:
    """Full exact verification: seams, piece spectra, violation, lattice."""
    report = VerificationReport()
    report.merge(verify_c1_seams(spline))
    report.merge(verify_smooth_convex_pieces(spline))
    report.merge(verify_violation())
    report.merge(verify_grid_properties(spacing=spacing, spline=spline))
    return report
