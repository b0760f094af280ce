"""Return-time dynamics on truncated sequence space operators.

Everything here works through the closed-form `power(n, x)` of the operator,
so a distance at time n costs the same whether n is 7 or 10**40.  Return sets
land in `natset.NatSet` and can be fed straight into the density machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .natset import NatSet, density_profile, window_pair_witness
from .opcore import (BlockPermutationIsometry, Diagonal, Vec,
                     WeightedBackwardShift, basis_vec, distance)
from .perturbed_rotation import ConstructionError, PerturbedRotation


class DynamicsError(ValueError):
    pass


@dataclass(frozen=True)
class ReturnSpec:
    """Radius and horizon of one return-set computation."""

    eps: float
    horizon: int

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise DynamicsError("eps must be positive")
        if self.horizon < 0:
            raise DynamicsError("horizon must be a natural number")


def _displacement(op, n: int, x: Vec) -> float:
    return distance(op.power(n, x).vec, x)


def return_set(op, x: Vec, eps: float, horizon: int) -> NatSet:
    """{ n <= horizon : || T^n x - x || < eps }, strict inequality.

    n = 0 is always a member since the displacement there is exactly zero.
    """
    spec = ReturnSpec(eps, horizon)
    hits = [n for n in range(spec.horizon + 1) if _displacement(op, n, x) < spec.eps]
    return NatSet(tuple(hits), spec.horizon)


def subsample_return_set(op, x: Vec, eps: float, candidates: Iterable[int],
                         horizon: Optional[int] = None) -> NatSet:
    """Return-set membership evaluated only at the candidate times."""
    cand = sorted(set(int(n) for n in candidates))
    if any(n < 0 for n in cand):
        raise DynamicsError("candidate times must be natural numbers")
    if not cand:
        raise DynamicsError("no candidate times given")
    hor = max(cand) if horizon is None else horizon
    if hor < cand[-1]:
        raise DynamicsError("horizon below largest candidate")
    spec = ReturnSpec(eps, hor)
    hits = [n for n in cand if _displacement(op, n, x) < spec.eps]
    return NatSet(tuple(hits), spec.horizon)


def tuple_recurrence_probe(op, vectors: Sequence[Vec], eps: float,
                           candidates: Iterable[int]) -> Optional[int]:
    """Least candidate time moving every vector by less than eps, if any."""
    if eps <= 0:
        raise DynamicsError("eps must be positive")
    for n in sorted(set(int(c) for c in candidates)):
        if n < 1:
            continue
        if all(_displacement(op, n, x) < eps for x in vectors):
            return n
    return None


# ---------------------------------------------------------------------------
# quasi-rigidity search

@dataclass(frozen=True)
class QrWitness:
    """Increasing times n_1 < n_2 < ... matching a shrinking defect schedule."""

    times: tuple[int, ...]
    defects: tuple[float, ...]

    @property
    def found(self) -> bool:
        return True


@dataclass(frozen=True)
class QrFailure:
    """First schedule step that no candidate time can satisfy.

    best_defect is the smallest worst-sample displacement seen while
    scanning that step; when the samples span the head basis of the
    perturbed rotation, `floor` carries the proven lower bound 1/(K*pi)
    valid for every time, which certifies the failure rather than merely
    reporting an exhausted scan.
    """

    step: int
    eps: float
    best_defect: float
    best_time: int
    floor: Optional[float] = None

    @property
    def found(self) -> bool:
        return False

    @property
    def certified(self) -> bool:
        return self.floor is not None and self.floor >= self.eps


QrResult = Union[QrWitness, QrFailure]


def _covers_head_basis(op, samples: Sequence[Vec]) -> bool:
    if not isinstance(op, PerturbedRotation):
        return False
    found = [False] * op.head
    for x in samples:
        arr = x.coords
        nz = np.nonzero(arr)[0]
        if len(nz) == 1 and nz[0] < op.head and arr[nz[0]] == 1:
            found[nz[0]] = True
    return all(found)


def quasi_rigidity_search(op, samples: Sequence[Vec], eps_schedule: Sequence[float],
                          candidates: Iterable[int]) -> QrResult:
    """Greedy search for times n_1 < n_2 < ... with defect(n_k) <= eps_k.

    defect(n) is the worst displacement over the samples.  Candidates are
    consumed in increasing order; each step takes the least admissible time
    beyond the previous one.  The eps schedule must be positive and
    nonincreasing.
    """
    eps_list = [float(e) for e in eps_schedule]
    if not eps_list or any(e <= 0 for e in eps_list):
        raise DynamicsError("eps schedule must be positive")
    if any(b > a for a, b in zip(eps_list, eps_list[1:])):
        raise DynamicsError("eps schedule must be nonincreasing")
    if not samples:
        raise DynamicsError("need at least one sample vector")
    cand = [n for n in sorted(set(int(c) for c in candidates)) if n >= 1]
    if not cand:
        raise DynamicsError("no candidate times given")

    floor = None
    if _covers_head_basis(op, samples):
        floor = op.center_defect_floor()

    times: list[int] = []
    defects: list[float] = []
    prev = 0
    for step, eps in enumerate(eps_list, start=1):
        chosen = None
        best_d = math.inf
        best_n = 0
        for n in cand:
            if n <= prev:
                continue
            d = max(_displacement(op, n, x) for x in samples)
            if d < best_d:
                best_d, best_n = d, n
            if d <= eps:
                chosen = (n, d)
                break
        if chosen is None:
            return QrFailure(step, eps, best_d, best_n, floor)
        times.append(chosen[0])
        defects.append(chosen[1])
        prev = chosen[0]
    return QrWitness(tuple(times), tuple(defects))


# ---------------------------------------------------------------------------
# period classification from density

@dataclass(frozen=True)
class PeriodClassification:
    """Gap structure forced on a return set by a density threshold.

    When the upper Banach density (measured at the report's window) exceeds
    delta, some window of length floor(1/delta) + 1 holds two returns, so
    the set contains a gap of at most floor(1/delta); the least such
    witnessed gap is reported as `period`.  A gap of exactly one pins the
    orbit point to within twice the return radius of a fixed vector.
    """

    delta: float
    bound: int
    dense: bool
    period: Optional[int]
    witness: Optional[tuple[int, int]]
    fixed_point: bool

    def to_json_dict(self) -> dict:
        return {
            "delta": self.delta,
            "bound": self.bound,
            "dense": self.dense,
            "period": self.period,
            "witness": list(self.witness) if self.witness else None,
            "fixedPoint": self.fixed_point,
        }


def classify_period_by_density(a: NatSet, window: int, delta: float) -> PeriodClassification:
    if not 0 < delta <= 1:
        raise DynamicsError("delta must lie in (0, 1]")
    report = density_profile(a, window)
    bound = math.floor(1.0 / delta)
    dense = report.upper_banach > Fraction(str(delta))
    period = None
    witness = None
    if dense:
        start = window_pair_witness(a, bound + 1)
        if start is not None:
            inside = [e for e in a.elements if start < e <= start + bound + 1]
            lo, hi = inside[0], inside[1]
            witness = (lo, hi)
            period = hi - lo
    return PeriodClassification(delta, bound, dense, period, witness,
                                report.contains_consecutive_pair)


def detect_period(a: NatSet) -> Optional[int]:
    """Common difference when the set is a full arithmetic progression."""
    e = a.elements
    if len(e) < 2:
        return None
    d = e[1] - e[0]
    if any(y - x != d for x, y in zip(e, e[1:])):
        return None
    return d


# ---------------------------------------------------------------------------
# commutant return inclusion

def operator_norm_bound(op) -> float:
    """Conservative norm bound for the stock operators."""
    if isinstance(op, PerturbedRotation):
        inv = sum((Fraction(1, op.modulus.m(k - 1))
                   for k in range(op.head + 1, op.levels + 1)), Fraction(0))
        mu = op.grid.norm_equiv_upper() * op.head * op.functional_bound
        return 1.0 + mu * (float(inv) + op.modulus.tail_inverse_sum())
    if isinstance(op, Diagonal):
        mods = [1.0 if isinstance(e, Fraction) else abs(complex(e)) for e in op.entries]
        return max(mods) if mods else 0.0
    if isinstance(op, WeightedBackwardShift):
        return abs(op.weight)
    if isinstance(op, BlockPermutationIsometry):
        return 1.0
    raise DynamicsError(f"no norm bound rule for {type(op).__name__}")


def polynomial_apply(op, coeffs: Sequence[complex], x: Vec) -> tuple[Vec, float]:
    """(sum_j c_j T^j) x via closed-form powers; returns the truncation loss too."""
    if not coeffs:
        raise DynamicsError("empty polynomial")
    acc = np.zeros_like(x.coords)
    loss = 0.0
    for j, c in enumerate(coeffs):
        cj = complex(c)
        if cj == 0:
            continue
        applied = op.power(j, x)
        acc = acc + cj * applied.vec.coords
        loss += abs(cj) * applied.loss
    return Vec(acc, x.p), loss


@dataclass(frozen=True)
class InclusionReport:
    holds: bool
    first_violation: Optional[int]
    checked: int
    scale: float
    return_count: int
    sx_loss: float

    def __bool__(self) -> bool:
        return self.holds

    def to_json_dict(self) -> dict:
        return {
            "holds": self.holds,
            "firstViolation": self.first_violation,
            "checked": self.checked,
            "scale": self.scale,
            "returnCount": self.return_count,
            "sxLoss": self.sx_loss,
        }


def commutant_return_inclusion(op, coeffs: Sequence[complex], x: Vec,
                               eps: float, horizon: int) -> InclusionReport:
    """Check N(x, eps/L) is contained in N(Sx, eps) for S = sum_j c_j T^j.

    S commutes with T, so T^n S x - S x = S (T^n x - x) and the inclusion
    holds whenever L dominates the norm of S.  L is built from the
    conservative operator norm bound; the check scans every n up to the
    horizon and reports the first violation if the arithmetic ever
    disagrees with the algebra.
    """
    spec = ReturnSpec(eps, horizon)
    base = operator_norm_bound(op)
    scale = sum(abs(complex(c)) * base ** j for j, c in enumerate(coeffs))
    if scale <= 0:
        raise DynamicsError("polynomial norm bound vanished")
    sx, loss = polynomial_apply(op, coeffs, x)
    tight = spec.eps / scale
    first = None
    count = 0
    for n in range(spec.horizon + 1):
        if _displacement(op, n, x) < tight:
            count += 1
            if not _displacement(op, n, sx) < spec.eps:
                first = n
                break
    return InclusionReport(first is None, first, spec.horizon + 1, scale, count, loss)
