"""A diagonal rotation with a head-driven perturbation feeding deep coordinates.

The operator acts on a truncated sequence space as

    T x = R x + sum over k of (1 / m_{k-1}) <w_k, P x> e_k,

where R rotates coordinate k by the exact unit phase 1/m_k, the moduli
(m_k) form a divisibility ladder that starts at 1 on the head block and then
grows fast enough to be summable against itself, P keeps the first
fold_n + 1 coordinates, and each w_k is a coefficient functional on the head
with sup modulus exactly one.  The head size (fold parameter) controls a
sharp dichotomy: tuples of up to fold_n points admit simultaneous
approximate return times (multiples of deep moduli), while the full head
basis never returns: every power moves some head basis vector by more than
1/(K*pi).

Numerics are arranged so that exactness survives the truncation.  Moduli are
plain Python integers of arbitrary size, power phases reduce n mod m_k
before any float enters, and geometric phase sums use the folded-sine form
min(r, m-r) * sinc(pi*rho)/sinc(pi/m), which is immune to underflow for
astronomically large moduli and never exceeds the integer envelope.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .opcore import SUP, Applied, Diagonal, Vec, basis_vec, distance

TWO_PI = 2.0 * math.pi


class ConstructionError(ValueError):
    pass


class GridResolutionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# modulus ladder

# Each rule maps a level index k to the integer factor m_{k+1} / m_k.  The
# default squares the polynomial part so that the rigidity envelope
# 2*pi*sum_{k>j} m_j/m_k drops below 1e-6 already at j = 14.
GROWTH_RULES: dict[str, Callable[[int], int]] = {
    "dyadic-sq": lambda k: (1 << (k + 2)) * k * k,
    "dyadic": lambda k: (1 << (k + 2)) * k,
}


@dataclass(frozen=True)
class ModulusLadder:
    """The divisibility chain m_1 | m_2 | ... with unit head block."""

    fold_n: int
    values: tuple[int, ...]
    rule: str = "dyadic-sq"

    @property
    def levels(self) -> int:
        return len(self.values)

    def m(self, k: int) -> int:
        """1-based modulus access."""
        if not 1 <= k <= self.levels:
            raise ConstructionError(f"level {k} outside 1..{self.levels}")
        return self.values[k - 1]

    def growth(self, k: int) -> int:
        return GROWTH_RULES[self.rule](k)

    def extended_m(self, k: int) -> int:
        """m_k continued past the built levels by the growth rule."""
        if k <= self.levels:
            return self.m(k)
        m = self.values[-1]
        for j in range(self.levels, k):
            m *= self.growth(j)
        return m

    def cert_bound(self, j: int) -> Fraction:
        """Exact rational m_j * sum_{k=j+1}^{levels} 1/m_k."""
        if not 1 <= j <= self.levels - 1:
            raise ConstructionError(f"certificate level {j} outside 1..{self.levels - 1}")
        return sum((Fraction(self.m(j), self.m(k)) for k in range(j + 1, self.levels + 1)),
                   Fraction(0))

    def coupling_sum(self, j: int, include_tail: bool = True) -> Fraction:
        """Rational upper bound on the infinite sum of m_j / m_k over k > j.

        The finite part is exact; the part beyond the built levels is
        dominated through the growth rule by a geometric comparison.
        """
        total = self.cert_bound(j) if j <= self.levels - 1 else Fraction(0)
        if include_tail:
            g0 = self.growth(self.levels)
            g1 = self.growth(self.levels + 1)
            tail = Fraction(self.m(j), self.m(self.levels) * g0) * (1 + Fraction(2, g1))
            total += tail
        return total

    def tail_inverse_sum(self) -> float:
        """Upper estimate of sum_{k > levels} 1/m_{k-1}."""
        first = Fraction(1, self.m(self.levels))
        return float(first * (1 + Fraction(2, self.growth(self.levels))))


def build_modulus_ladder(fold_n: int, levels: int, rule: str = "dyadic-sq") -> ModulusLadder:
    """Unit head block of length fold_n + 1, then multiply by the growth rule."""
    if fold_n < 1:
        raise ConstructionError("fold parameter must be >= 1")
    if levels < fold_n + 3:
        raise ConstructionError("need at least fold_n + 3 levels")
    if rule not in GROWTH_RULES:
        raise ConstructionError(f"unknown growth rule {rule!r}")
    grow = GROWTH_RULES[rule]
    vals = [1] * (fold_n + 1)
    for k in range(fold_n + 1, levels):
        vals.append(vals[-1] * grow(k))
    return ModulusLadder(fold_n, tuple(vals), rule)


# ---------------------------------------------------------------------------
# functional grid

@dataclass(frozen=True)
class GridEntry:
    level: int                      # the modulus level this functional is bound to
    mesh: float                     # quantization resolution of its net
    alpha: tuple[complex, ...]      # head coefficients, sup modulus exactly 1


@dataclass(frozen=True)
class FunctionalGrid:
    """Head functionals bound one-to-one to modulus levels, finest mesh last.

    Entries come in groups of decreasing mesh.  Each group holds the
    coordinate functionals plus the polar quantizations of any registered
    target functionals at that group's resolution, so the grid is guaranteed
    dense along the directions a probe actually visits.  mesh_of reports the
    group resolution, which is the quantization radius the net guarantees.
    """

    fold_n: int
    entries: tuple[GridEntry, ...]
    p: float = 2.0

    def mesh_of(self, level: int) -> float:
        return self.entry_at(level).mesh

    def entry_at(self, level: int) -> GridEntry:
        i = level - (self.fold_n + 2)
        if not 0 <= i < len(self.entries):
            raise ConstructionError(f"no grid entry at level {level}")
        return self.entries[i]

    @property
    def finest_mesh(self) -> float:
        return min(e.mesh for e in self.entries)

    def norm_equiv_lower(self) -> float:
        return 1.0

    def norm_equiv_upper(self) -> float:
        # dual-norm comparison against the sup norm of the coefficients,
        # by Holder on fold_n + 1 head coordinates
        n1 = self.fold_n + 1
        if self.p == SUP:
            return float(n1)
        if self.p == 1.0:
            return 1.0
        q = self.p / (self.p - 1.0)
        return float(n1 ** (1.0 / q))


def quantize_head_functional(alpha: Sequence[complex], mesh: float) -> tuple[complex, ...]:
    """Round a sup-normalized coefficient vector onto the polar mesh grid.

    Moduli snap to multiples of 1/ceil(2/mesh), phases to multiples of
    2*pi/ceil(4*pi/mesh), and the dominant coordinate is pinned to modulus
    exactly one, so the result stays on the unit sup sphere and within
    mesh/2 of the input.
    """
    if mesh <= 0:
        raise ConstructionError("mesh must be positive")
    arr = [complex(a) for a in alpha]
    mods = [abs(a) for a in arr]
    top = max(mods)
    if top == 0:
        raise ConstructionError("cannot quantize the zero functional")
    dom = next(i for i, r in enumerate(mods) if r >= top - 1e-12)
    m_r = math.ceil(2.0 / mesh)
    m_th = math.ceil(4.0 * math.pi / mesh)
    step = TWO_PI / m_th
    out = []
    for i, a in enumerate(arr):
        r = min(1.0, round(mods[i] * m_r) / m_r)
        if i == dom:
            r = 1.0
        if r == 0.0:
            out.append(0j)
            continue
        theta = (round(cmath.phase(a) / step) % m_th) * step
        out.append(r * cmath.exp(1j * theta))
    return tuple(out)


def _coerce_mesh(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


DEFAULT_MESH: tuple[Fraction, ...] = tuple(
    Fraction(n, d) for n, d in [(1, 1), (1, 2), (1, 4), (1, 10), (1, 20), (1, 100), (1, 200)]
)


def build_functional_grid(fold_n: int, mesh_levels: Sequence = DEFAULT_MESH,
                          targets: Sequence[Sequence[complex]] = (),
                          p: float = 2.0) -> FunctionalGrid:
    if fold_n < 1:
        raise ConstructionError("fold parameter must be >= 1")
    meshes = [_coerce_mesh(v) for v in mesh_levels]
    if not meshes or any(m <= 0 for m in meshes):
        raise ConstructionError("mesh schedule must be positive")
    if any(b >= a for a, b in zip(meshes, meshes[1:])):
        raise ConstructionError("mesh schedule must be strictly decreasing")
    head = fold_n + 1
    for t in targets:
        if len(t) != head:
            raise ConstructionError("target functional has wrong head size")

    unit_rows = [tuple((1 + 0j) if j == i else 0j for j in range(head)) for i in range(head)]
    entries: list[GridEntry] = []
    level = fold_n + 2
    for mesh in meshes:
        mesh_f = float(mesh)
        group: list[tuple[complex, ...]] = []
        seen: set[tuple[complex, ...]] = set()
        for row in unit_rows:
            group.append(row)
            seen.add(row)
        for t in targets:
            q = quantize_head_functional(t, mesh_f)
            if q not in seen:
                group.append(q)
                seen.add(q)
        for alpha in group:
            entries.append(GridEntry(level, mesh_f, alpha))
            level += 1
    return FunctionalGrid(fold_n, tuple(entries), p)


# ---------------------------------------------------------------------------
# the operator

def _unit_phase(frac: Fraction) -> complex:
    return cmath.exp(2j * math.pi * float(frac % 1))


def _sinc_pi(t: float) -> float:
    """sin(pi t)/(pi t) extended by 1 at zero; t in [0, 1]."""
    if t <= 0.0:
        return 1.0
    x = math.pi * t
    return math.sin(x) / x


@dataclass(frozen=True, eq=False)
class PerturbedRotation:
    fold_n: int
    modulus: ModulusLadder
    grid: FunctionalGrid
    dim_cap: int
    p: float = 2.0
    functional_bound: float = 1.0
    mesh_levels: tuple[Fraction, ...] = DEFAULT_MESH
    targets: tuple[tuple[complex, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.modulus.fold_n != self.fold_n or self.grid.fold_n != self.fold_n:
            raise ConstructionError("fold parameter disagrees between parts")
        levels = self.modulus.levels
        if len(self.grid.entries) != levels - (self.fold_n + 1):
            raise ConstructionError("grid entries must pair with modulus levels one-to-one")
        if self.dim_cap < levels:
            raise ConstructionError("dim_cap must cover every built level")
        head = self.fold_n + 1
        lam = np.ones(self.dim_cap, dtype=np.complex128)
        for k in range(1, levels + 1):
            lam[k - 1] = _unit_phase(Fraction(1, self.modulus.m(k)))
        alpha = np.array([e.alpha for e in self.grid.entries], dtype=np.complex128)
        inv_prev = np.array(
            [float(Fraction(1, self.modulus.m(k - 1))) for k in range(head + 1, levels + 1)],
            dtype=np.float64,
        )
        object.__setattr__(self, "_lam", lam)
        object.__setattr__(self, "_alpha", alpha)
        object.__setattr__(self, "_inv_prev", inv_prev)

    # -- structure accessors ------------------------------------------------

    @property
    def levels(self) -> int:
        return self.modulus.levels

    @property
    def head(self) -> int:
        return self.fold_n + 1

    def rotation_part(self) -> Diagonal:
        phases = [Fraction(1, self.modulus.m(k)) for k in range(1, self.levels + 1)]
        phases += [Fraction(0)] * (self.dim_cap - self.levels)
        return Diagonal(tuple(phases), self.p)

    def descriptor(self) -> dict:
        return {
            "variant": "perturbed-rotation",
            "foldN": self.fold_n,
            "levels": self.levels,
            "growthRule": self.modulus.rule,
            "meshSchedule": [str(mq) for mq in self.mesh_levels],
            "targets": [[[c.real, c.imag] for c in t] for t in self.targets],
            "dimCap": self.dim_cap,
            "normKind": "sup" if self.p == SUP else self.p,
            "functionalBound": self.functional_bound,
        }

    # -- phase sums -----------------------------------------------------------

    def _sum_parts(self, k: int, n: int) -> Optional[tuple[int, int, float, float]]:
        """(r, folded r, sinc ratio, phase angle/pi) of the n-step phase sum."""
        m = self.modulus.m(k)
        r = n % m
        if r == 0:
            return None
        folded = min(r, m - r)
        num = _sinc_pi(float(Fraction(folded, m)))
        den = _sinc_pi(float(Fraction(1, m)))
        ratio = min(1.0, num / den)
        angle = float(Fraction(r - 1, m))
        return r, folded, ratio, angle

    def phase_sum(self, k: int, n: int) -> complex:
        """Closed form of 1 + z + ... + z^{n-1} for z the level-k unit phase.

        Exactly zero when m_k divides n; otherwise the folded-sine form
        min(r, m-r) * sinc(pi*rho)/sinc(pi/m) times the phase exp(i*pi*(r-1)/m),
        with r = n mod m_k reduced in exact integer arithmetic first.
        """
        if not self.head + 1 <= k <= self.levels:
            raise ConstructionError(f"level {k} outside {self.head + 1}..{self.levels}")
        if n < 1:
            raise ConstructionError("n must be >= 1")
        parts = self._sum_parts(k, n)
        if parts is None:
            return 0j
        _, folded, ratio, angle = parts
        if folded > 1e306:
            raise OverflowError("phase sum magnitude exceeds float range")
        return float(folded) * ratio * cmath.exp(1j * math.pi * angle)

    def _pert_coeff(self, k: int, n: int) -> complex:
        """phase_sum(k, n) / m_{k-1}, computed as a ratio so it never overflows."""
        parts = self._sum_parts(k, n)
        if parts is None:
            return 0j
        _, folded, ratio, angle = parts
        mag = float(Fraction(folded, self.modulus.m(k - 1))) * ratio
        return mag * cmath.exp(1j * math.pi * angle)

    # -- action ---------------------------------------------------------------

    def _check(self, x: Vec) -> None:
        if x.dim_cap != self.dim_cap:
            raise ConstructionError("dimension mismatch")
        if x.p != self.p:
            raise ConstructionError("norm kind mismatch")

    def _tail_loss(self, xnorm: float, n: int = 1) -> float:
        """Estimate of the perturbation the untruncated map would add past levels.

        Coefficients there are bounded by min(n, m_k/2)/m_{k-1}; six explicit
        terms plus a geometric remainder dominate the sum.
        """
        mu = self.grid.norm_equiv_upper() * self.head * self.functional_bound
        total = 0.0
        last = 0.0
        for k in range(self.levels + 1, self.levels + 7):
            m_prev = self.modulus.extended_m(k - 1)
            m_k = self.modulus.extended_m(k)
            cap = min(Fraction(n), Fraction(m_k, 2))
            last = float(cap / m_prev)
            total += last
        total += last  # remainder, dominated by one extra term
        return mu * xnorm * total

    def apply(self, x: Vec) -> Applied:
        self._check(x)
        y = x.coords * self._lam
        head = x.coords[: self.head]
        if len(self._inv_prev):
            y[self.head: self.levels] += (self._alpha @ head) * self._inv_prev
        return Applied(Vec(y, x.p), self._tail_loss(x.norm(), 1))

    def power(self, n: int, x: Vec) -> Applied:
        """T^n x in closed form; cost is independent of the size of n."""
        self._check(x)
        if n < 0:
            raise ConstructionError("exponent must be a natural number")
        if n == 0:
            return Applied(Vec(x.coords.copy(), x.p), 0.0)
        y = x.coords.copy()
        for k in range(self.head + 1, self.levels + 1):
            m = self.modulus.m(k)
            r = n % m
            if r:
                y[k - 1] *= _unit_phase(Fraction(r, m))
        head = x.coords[: self.head]
        for idx, k in enumerate(range(self.head + 1, self.levels + 1)):
            c = self._pert_coeff(k, n)
            if c:
                y[k - 1] += c * complex(self._alpha[idx] @ head)
        return Applied(Vec(y, x.p), self._tail_loss(x.norm(), n))

    def rotation_power_distance(self, n: int, x: Vec) -> float:
        """|| R^n x - x || with exact phase reduction per level."""
        self._check(x)
        y = x.coords.copy()
        for k in range(self.head + 1, self.levels + 1):
            m = self.modulus.m(k)
            r = n % m
            if r:
                y[k - 1] *= _unit_phase(Fraction(r, m))
        return Vec(y - x.coords, x.p).norm()

    def coupling_tail(self, level: int) -> float:
        """Bound coefficient for witness terms above `level` at time m_{level-1}.

        Equals norm_equiv_upper * head * K * sum_{k > level} m_{level-1}/m_{k-1},
        with the beyond-truncation part dominated by the growth rule.
        """
        m_ret = self.modulus.m(level - 1)
        s = Fraction(0)
        for k in range(level + 1, self.levels + 1):
            s += Fraction(m_ret, self.modulus.m(k - 1))
        s += Fraction(m_ret, self.modulus.m(self.levels)) * (
            1 + Fraction(2, self.modulus.growth(self.levels)))
        return self.grid.norm_equiv_upper() * self.head * self.functional_bound * float(s)

    def center_defect_floor(self) -> float:
        """The proven lower bound 1/(K*pi) on max head-basis displacement."""
        return 1.0 / (self.functional_bound * math.pi)


def build_operator(fold_n: int, mesh_levels: Sequence = DEFAULT_MESH,
                   targets: Sequence[Sequence[complex]] = (),
                   dim_cap: Optional[int] = None, p: float = 2.0,
                   rule: str = "dyadic-sq", min_levels: int = 0) -> PerturbedRotation:
    """Assemble ladder, grid and operator with consistent level bookkeeping.

    min_levels pads the grid with repeated coordinate functionals at the
    finest mesh, which deepens the modulus ladder without changing the net.
    """
    tgt = tuple(tuple(complex(c) for c in t) for t in targets)
    grid = build_functional_grid(fold_n, mesh_levels, tgt, p)
    entries = list(grid.entries)
    head = fold_n + 1
    want = max(min_levels, fold_n + 3)
    finest = entries[-1].mesh
    i = 0
    while head + 1 + len(entries) - 1 < want:
        unit = tuple((1 + 0j) if j == i % head else 0j for j in range(head))
        entries.append(GridEntry(head + 1 + len(entries), finest, unit))
        i += 1
    grid = replace(grid, entries=tuple(entries))
    levels = head + len(entries)
    ladder = build_modulus_ladder(fold_n, levels, rule)
    cap = max(dim_cap if dim_cap is not None else 0, levels)
    mesh_t = tuple(_coerce_mesh(v) for v in mesh_levels)
    return PerturbedRotation(fold_n, ladder, grid, cap, p, 1.0, mesh_t, tgt)


# ---------------------------------------------------------------------------
# probes

@dataclass(frozen=True)
class RigidityDefect:
    level: int
    defect: float
    bound: float
    bound_exact: Fraction


def rigidity_defect(op: PerturbedRotation, j: int, samples: Sequence[Vec]) -> RigidityDefect:
    """Worst rotation return error || R^{m_j} x - x || over the samples.

    The bound is 2*pi*K times the rational coupling sum over k > j; it holds
    for every unit vector, so samples are expected normalized.
    """
    if not 1 <= j <= op.levels - 1:
        raise ConstructionError(f"level {j} outside 1..{op.levels - 1}")
    n = op.modulus.m(j)
    worst = 0.0
    for x in samples:
        worst = max(worst, op.rotation_power_distance(n, x))
    exact = op.modulus.coupling_sum(j)
    bound = TWO_PI * op.functional_bound * float(exact)
    return RigidityDefect(j, worst, bound, exact)


def dominant_index(w: Sequence[complex]) -> int:
    """Least 1-based index whose coefficient attains the unit sup modulus."""
    mods = [abs(complex(c)) for c in w]
    top = max(mods) if mods else 0.0
    if top == 0.0:
        raise ConstructionError("all coefficients are zero")
    if abs(top - 1.0) > 1e-12:
        raise ConstructionError("coefficients must be sup-normalized to 1")
    for i, r in enumerate(mods):
        if r >= top - 1e-12:
            return i + 1
    raise AssertionError("unreachable")


def annihilating_functional(vectors: Sequence[Vec], fold_n: int) -> np.ndarray:
    """Head functional with sup modulus 1 vanishing on every given vector.

    Solves the fold_n x (fold_n + 1) homogeneous system on the head
    coordinates.  Deterministic tie-breaking: take the null-space projector
    column of largest norm (least index on ties), then scale so the dominant
    entry is exactly 1 real positive.
    """
    head = fold_n + 1
    if len(vectors) != fold_n:
        raise ConstructionError(f"need exactly {fold_n} vectors")
    rows = np.array([v.coords[:head] for v in vectors], dtype=np.complex128)
    proj = np.eye(head, dtype=np.complex128) - np.linalg.pinv(rows) @ rows
    norms = np.linalg.norm(proj, axis=0)
    col = int(np.argmax(norms))
    v = proj[:, col]
    mods = np.abs(v)
    top = float(np.max(mods))
    if top <= 0.0:
        raise ConstructionError("null space projector vanished")
    dom = int(np.argmax(mods >= top - 1e-12 * max(top, 1.0)))
    alpha = v / v[dom]
    alpha[dom] = 1.0  # complex division can miss by an ulp
    row_scale = max(1.0, float(np.max(np.abs(rows))) if rows.size else 1.0)
    residual = float(np.linalg.norm(rows @ alpha)) if rows.size else 0.0
    if residual > 1e-10 * row_scale * max(1.0, float(np.max(np.abs(alpha)))):
        raise ConstructionError(f"annihilator residual too large: {residual:g}")
    return alpha


@dataclass(frozen=True)
class WitnessPoint:
    level: int
    mesh: float
    grid_distance: float
    return_time: int
    distances: tuple[float, ...]

    def to_json_dict(self) -> dict:
        return {
            "level": self.level,
            "mesh": self.mesh,
            "gridDistance": self.grid_distance,
            "returnTime": str(self.return_time),
            "distances": list(self.distances),
        }


def recurrence_witness(op: PerturbedRotation, vectors: Sequence[Vec],
                       grid_tol: float) -> list[WitnessPoint]:
    """Simultaneous approximate return times for a fold_n tuple.

    Grid levels whose functional lies within max(grid_tol, mesh) of the
    tuple's annihilator are selected in increasing order; each selected level
    k contributes the return time m_{k-1} and the per-vector displacement of
    T^{m_{k-1}}.  At least one level must fall within grid_tol itself,
    otherwise the grid is too coarse for the request and that is an error.
    """
    finest = op.grid.finest_mesh
    if grid_tol < finest:
        raise GridResolutionError(
            f"grid_tol {grid_tol:g} below finest available mesh {finest:g}")
    alpha = annihilating_functional(vectors, op.fold_n)
    points: list[WitnessPoint] = []
    any_within_tol = False
    for entry in op.grid.entries:
        d = float(np.max(np.abs(np.asarray(entry.alpha) - alpha)))
        if d <= max(grid_tol, entry.mesh):
            if d <= grid_tol:
                any_within_tol = True
            t = op.modulus.m(entry.level - 1)
            dists = tuple(distance(op.power(t, x).vec, x) for x in vectors)
            points.append(WitnessPoint(entry.level, entry.mesh, d, t, dists))
    if not any_within_tol:
        raise GridResolutionError(
            f"no grid entry within {grid_tol:g} of the annihilator; "
            f"finest available mesh is {finest:g}")
    return points


@dataclass(frozen=True)
class ScanReport:
    min_defect: float
    argmin: int
    evaluated: int


def non_recurrence_scan(op: PerturbedRotation, candidates: Iterable[int]) -> ScanReport:
    """Minimize d(n) = max_i || T^n e_i - e_i || over the head basis.

    The rotation fixes the head, so d(n) is exactly the p-norm profile of the
    perturbation column; everything is evaluated in closed form per level.
    """
    head = op.head
    alpha = op._alpha
    best = math.inf
    best_n = 0
    count = 0
    for n in sorted(set(int(c) for c in candidates)):
        if n < 1:
            continue
        count += 1
        coeffs = np.array([op._pert_coeff(k, n)
                           for k in range(head + 1, op.levels + 1)], dtype=np.complex128)
        per_entry = np.abs(coeffs[:, None] * alpha)  # rows: level, cols: basis index
        if op.p == SUP:
            d = float(np.max(per_entry)) if per_entry.size else 0.0
        else:
            d = float(np.max(np.sum(per_entry ** op.p, axis=0) ** (1.0 / op.p)))
        if d < best:
            best, best_n = d, n
    if count == 0:
        raise ConstructionError("no candidates to scan")
    return ScanReport(best, best_n, count)


def lattice_candidates(modulus: ModulusLadder, max_level: int,
                       multipliers: Sequence[int] = (1, 2, 3),
                       neighbors: bool = True, head: int = 0) -> list[int]:
    """Return-time candidates built from the modulus ladder.

    Multiples c*m_j for j up to max_level, optionally the neighbors m_j +- 1,
    plus a linear scan head 1..head.  Sorted and deduplicated.
    """
    if max_level > modulus.levels:
        raise ConstructionError("max_level beyond built levels")
    out = set(range(1, head + 1))
    for j in range(1, max_level + 1):
        m = modulus.m(j)
        for c in multipliers:
            out.add(c * m)
        if neighbors:
            out.add(m + 1)
            if m > 1:
                out.add(m - 1)
    return sorted(out)
