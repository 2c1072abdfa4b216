"""Sub-probability measures on the real line.

Two kinds of measure live here.  *Concrete* measures are finite lists of
Dirac atoms plus weighted density components on bounded supports; their
masses are exact on atoms and quadrature-accurate on densities.
*Queryable* measures (primitive pushforwards, ``let``-integrals,
weighted sums, fixpoint chains) answer ``mass(U)`` and ``integrate(g)``
on demand and memoize mass queries per interval set.

Exactness strategy for pushforwards: all-atom argument lists collapse to
exact atom products at construction; otherwise the innermost integration
dimension is resolved through the primitive's preimage (an interval-set
computation) whenever the primitive provides one, so indicator
integrands never reach the quadrature for those primitives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .intervals import FULL_LINE, IntervalSet
from .primitives import Primitive
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate_adaptive


class DimensionLimit(Exception):
    """More than three pushforward arguments carry continuous mass."""


@dataclass(frozen=True)
class Atom:
    location: float
    weight: float

    def __post_init__(self):
        if not math.isfinite(self.location):
            raise ValueError("atom location must be finite")
        if self.weight < 0:
            raise ValueError("atom weight must be nonnegative")


@dataclass(frozen=True)
class DensityPart:
    """weight * (density restricted to a bounded support)."""

    support: IntervalSet
    density: Callable[[float], float]
    weight: float

    def __post_init__(self):
        if not self.support.bounded():
            raise ValueError("density support must be bounded (truncate first)")
        if self.weight < 0:
            raise ValueError("density weight must be nonnegative")


# Initial uniform subdivision for mass integrands.  Mass queries on
# queryable measures integrate indicator-shaped functions whose support
# can dodge the five Simpson probes of a single panel; pre-splitting the
# density supports bounds the miss window to features narrower than
# about 1/(4 * refine) of a support piece.  Constant panels collapse in
# one probe, so the overhead on flat regions is small.
MASS_REFINE = 32


class Measure:
    """Common query interface; concrete subclasses below."""

    cfg: QuadratureConfig

    def mass(self, u: IntervalSet) -> float:
        raise NotImplementedError

    def integrate(self, g: Callable[[float], float], refine: int = 0) -> float:
        raise NotImplementedError

    def total_mass(self) -> float:
        return self.mass(FULL_LINE)

    @property
    def has_continuous(self) -> bool:
        raise NotImplementedError


class ConcreteMeasure(Measure):
    __slots__ = ("atoms", "densities", "cfg")

    def __init__(self, atoms=(), densities=(), cfg: QuadratureConfig = DEFAULT_QUADRATURE):
        self.atoms = tuple(atoms)
        self.densities = tuple(densities)
        self.cfg = cfg

    @property
    def has_continuous(self) -> bool:
        return bool(self.densities)

    def mass(self, u: IntervalSet) -> float:
        total = 0.0
        for atom in self.atoms:
            if u.contains(atom.location):
                total += atom.weight
        for part in self.densities:
            if part.weight == 0.0:
                continue
            clipped = part.support.intersect(u)
            for piece in clipped.pieces:
                if piece.is_point:
                    continue
                total += part.weight * integrate_adaptive(
                    part.density, piece.lo, piece.hi, cfg=self.cfg
                )
        return total

    def integrate(self, g, refine: int = 0) -> float:
        total = 0.0
        for atom in self.atoms:
            if atom.weight != 0.0:
                total += atom.weight * g(atom.location)
        for part in self.densities:
            if part.weight == 0.0:
                continue
            fn = part.density
            for piece in part.support.pieces:
                if piece.is_point:
                    continue
                knots = ()
                if refine > 1:
                    width = piece.hi - piece.lo
                    knots = tuple(
                        piece.lo + width * k / refine for k in range(1, refine)
                    )
                total += part.weight * integrate_adaptive(
                    lambda r: g(r) * fn(r), piece.lo, piece.hi, cfg=self.cfg,
                    knots=knots,
                )
        return total

    def __repr__(self):
        return f"ConcreteMeasure(atoms={self.atoms!r}, densities={len(self.densities)})"


ZERO = ConcreteMeasure()


def dirac(location: float, weight: float = 1.0,
          cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> ConcreteMeasure:
    return ConcreteMeasure((Atom(location, weight),), (), cfg)


def lebesgue_unit(cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> ConcreteMeasure:
    """The uniform distribution on [0,1] (density identically 1)."""
    return ConcreteMeasure((), (DensityPart(IntervalSet.closed(0.0, 1.0), lambda r: 1.0, 1.0),), cfg)


def uniform(lo: float, hi: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> ConcreteMeasure:
    if not lo < hi:
        raise ValueError("uniform needs lo < hi")
    height = 1.0 / (hi - lo)
    return ConcreteMeasure(
        (), (DensityPart(IntervalSet.closed(lo, hi), lambda r: height, 1.0),), cfg
    )


def density_measure(support: IntervalSet, fn, weight: float = 1.0,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> ConcreteMeasure:
    """Weighted density; unbounded supports are truncated at cfg.truncation."""
    if not support.bounded():
        lo, hi = cfg.truncation
        support = support.intersect(IntervalSet.closed(lo, hi))
    return ConcreteMeasure((), (DensityPart(support, fn, weight),), cfg)


class _Memoized(Measure):
    __slots__ = ("_mass_cache",)

    def __init__(self):
        self._mass_cache: dict = {}

    def mass(self, u: IntervalSet) -> float:
        key = u.key()
        got = self._mass_cache.get(key)
        if got is None:
            got = self._compute_mass(u)
            self._mass_cache[key] = got
        return got

    def _compute_mass(self, u: IntervalSet) -> float:
        raise NotImplementedError

    @property
    def has_continuous(self) -> bool:
        return True


class _PreimageUnsupported(Exception):
    pass


class PushforwardMeasure(_Memoized):
    """Image of a product of argument measures under a primitive."""

    __slots__ = ("prim", "args", "cfg")

    def __init__(self, prim: Primitive, args, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
        super().__init__()
        self.prim = prim
        self.args = tuple(args)
        self.cfg = cfg
        if len(self.args) != prim.arity:
            raise ValueError(f"{prim.name} expects {prim.arity} arguments")
        continuous = sum(1 for a in self.args if a.has_continuous)
        if continuous > 3:
            raise DimensionLimit(
                f"pushforward of {prim.name} has {continuous} continuous dimensions"
            )

    def _compute_mass(self, u: IntervalSet) -> float:
        inner = None
        if self.prim.preimage is not None:
            for j in range(len(self.args) - 1, -1, -1):
                if self.args[j].has_continuous:
                    inner = j
                    break
        if inner is None:
            return self.integrate(lambda y: 1.0 if u.contains(y) else 0.0,
                                  refine=MASS_REFINE)
        try:
            return self._mass_via_preimage(u, inner)
        except _PreimageUnsupported:
            return self.integrate(lambda y: 1.0 if u.contains(y) else 0.0,
                                  refine=MASS_REFINE)

    def _mass_via_preimage(self, u: IntervalSet, inner: int) -> float:
        outer = [i for i in range(len(self.args)) if i != inner]
        fixed: list = [None] * len(self.args)

        def rec(k: int) -> float:
            if k == len(outer):
                pre = self.prim.preimage(inner, fixed, u)
                if pre is None:
                    raise _PreimageUnsupported
                return self.args[inner].mass(pre)
            i = outer[k]

            def with_value(v: float) -> float:
                fixed[i] = v
                try:
                    return rec(k + 1)
                finally:
                    fixed[i] = None

            return self.args[i].integrate(with_value)

        return rec(0)

    def integrate(self, g, refine: int = 0) -> float:
        n = len(self.args)
        values: list = [None] * n
        fn = self.prim.fn

        def rec(i: int) -> float:
            if i == n:
                return g(fn(*values))

            def with_value(v: float) -> float:
                values[i] = v
                try:
                    return rec(i + 1)
                finally:
                    values[i] = None

            return self.args[i].integrate(with_value, refine)

        return rec(0)

    def __repr__(self):
        return f"PushforwardMeasure({self.prim.name}, {len(self.args)} args)"


class IntegralMeasure(_Memoized):
    """U |-> integral of body(r).mass(U) against the bound measure.

    Body measures are cached per quadrature node r, so repeated mass
    queries with different interval sets reuse the same tower.
    """

    __slots__ = ("bound", "body", "cfg", "_body_cache")

    def __init__(self, bound: Measure, body: Callable[[float], Measure],
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE):
        super().__init__()
        self.bound = bound
        self.body = body
        self.cfg = cfg
        self._body_cache: dict[float, Measure] = {}

    def _body_at(self, r: float) -> Measure:
        m = self._body_cache.get(r)
        if m is None:
            m = self.body(r)
            self._body_cache[r] = m
        return m

    def _compute_mass(self, u: IntervalSet) -> float:
        return self.bound.integrate(lambda r: self._body_at(r).mass(u),
                                    refine=MASS_REFINE)

    def integrate(self, g, refine: int = 0) -> float:
        return self.bound.integrate(
            lambda r: self._body_at(r).integrate(g, refine), refine
        )

    def __repr__(self):
        return f"IntegralMeasure(bound={self.bound!r})"


class WeightedSumMeasure(_Memoized):
    __slots__ = ("coeffs", "measures", "cfg")

    def __init__(self, coeffs, measures, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
        super().__init__()
        self.coeffs = tuple(coeffs)
        self.measures = tuple(measures)
        self.cfg = cfg

    def _compute_mass(self, u: IntervalSet) -> float:
        return sum(c * m.mass(u) for c, m in zip(self.coeffs, self.measures))

    def integrate(self, g, refine: int = 0) -> float:
        return sum(c * m.integrate(g, refine) for c, m in zip(self.coeffs, self.measures))


class FixpointChainMeasure(Measure):
    """Final iterate of a Kleene chain.

    Queries walk the whole chain front to back, priming each iterate's
    memo cache, so the recursion depth per query stays constant in the
    chain length.
    """

    __slots__ = ("chain", "cfg")

    def __init__(self, chain, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
        if not chain:
            raise ValueError("fixpoint chain must be nonempty")
        self.chain = tuple(chain)
        self.cfg = cfg

    @property
    def has_continuous(self) -> bool:
        return True

    def mass(self, u: IntervalSet) -> float:
        value = 0.0
        for m in self.chain:
            value = m.mass(u)
        return value

    def integrate(self, g, refine: int = 0) -> float:
        return self.chain[-1].integrate(g, refine)


def mix(coeffs, measures, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> Measure:
    """Weighted sum of measures; concrete inputs merge into one concrete measure."""
    coeffs = [float(c) for c in coeffs]
    measures = list(measures)
    if len(coeffs) != len(measures):
        raise ValueError("mix needs matching coefficient and measure lists")
    if any(c < 0 for c in coeffs):
        raise ValueError("mix coefficients must be nonnegative")
    live = [(c, m) for c, m in zip(coeffs, measures) if c != 0.0]
    if not live:
        return ConcreteMeasure((), (), cfg)
    if all(isinstance(m, ConcreteMeasure) for _, m in live):
        merged: dict[float, float] = {}
        densities = []
        for c, m in live:
            for atom in m.atoms:
                merged[atom.location] = merged.get(atom.location, 0.0) + c * atom.weight
            for part in m.densities:
                densities.append(DensityPart(part.support, part.density, c * part.weight))
        atoms = tuple(Atom(loc, w) for loc, w in sorted(merged.items()))
        return ConcreteMeasure(atoms, tuple(densities), cfg)
    return WeightedSumMeasure([c for c, _ in live], [m for _, m in live], cfg)


_ATOM_COLLAPSE_LIMIT = 100_000


def pushforward(prim: Primitive, args, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> Measure:
    """Image measure of prim applied to independent argument measures."""
    args = tuple(args)
    if len(args) != prim.arity:
        raise ValueError(f"{prim.name} expects {prim.arity} arguments, got {len(args)}")
    if all(isinstance(a, ConcreteMeasure) and not a.densities for a in args):
        combos = 1
        for a in args:
            combos *= max(len(a.atoms), 1)
        if combos <= _ATOM_COLLAPSE_LIMIT:
            out: dict[float, float] = {}

            def walk(i: int, values: list, weight: float):
                if weight == 0.0:
                    return
                if i == len(args):
                    y = prim.fn(*values)
                    out[y] = out.get(y, 0.0) + weight
                    return
                for atom in args[i].atoms:
                    walk(i + 1, values + [atom.location], weight * atom.weight)

            walk(0, [], 1.0)
            atoms = tuple(Atom(loc, w) for loc, w in sorted(out.items()) if w != 0.0)
            return ConcreteMeasure(atoms, (), cfg)
    return PushforwardMeasure(prim, args, cfg)
