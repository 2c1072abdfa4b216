"""Compositional measure semantics.

Ground-type meanings are measures; arrow-type meanings are host
closures mapping semantic values to semantic values.  The only
observables are ground masses, so function values are never compared.

``fix`` is Kleene iteration from the zero value.  Convergence is judged
on the probe sets of the FixConfig: iteration stops when no probe mass
moved by more than ``mass_tol``.  At arrow types the fixpoint re-runs
that iteration for every spine of arguments reaching ground type.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intervals import FULL_LINE, IntervalSet
from .measure import (
    ConcreteMeasure,
    FixpointChainMeasure,
    IntegralMeasure,
    Measure,
    dirac,
    lebesgue_unit,
    mix,
    pushforward,
)
from .primitives import DEFAULT_TABLE, PrimitiveTable
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from .terms import (
    REAL,
    Abs,
    App,
    Fix,
    Ifz,
    Let,
    MacroCall,
    Numeral,
    Prim,
    Term,
    Type,
    Var,
    _SampleTerm,
)

_ZERO_SET = IntervalSet.point(0.0)
_NONZERO_SET = _ZERO_SET.complement()

_DEFAULT_PROBES = (
    FULL_LINE,
    IntervalSet.closed(0.0, 1.0),
    IntervalSet.point(0.0),
    IntervalSet.point(1.0),
)


@dataclass(frozen=True)
class FixConfig:
    mass_tol: float = 1e-6
    max_iters: int = 10_000
    probe_sets: tuple[IntervalSet, ...] = _DEFAULT_PROBES

    def __post_init__(self):
        if self.mass_tol <= 0:
            raise ValueError("mass_tol must be positive")
        object.__setattr__(self, "probe_sets", tuple(self.probe_sets))


DEFAULT_FIX = FixConfig()


class NonConvergent(Exception):
    def __init__(self, iters: int, last_masses: dict):
        super().__init__(f"fixpoint did not settle within {iters} iterations")
        self.iters = iters
        self.last_masses = last_masses


# -- semantic values --------------------------------------------------------


@dataclass(frozen=True)
class SemMeasure:
    measure: Measure


@dataclass(frozen=True)
class SemFunction:
    fn: object  # SemValue -> SemValue
    domain: Type
    codomain: Type

    def apply(self, arg):
        return self.fn(arg)


SemValue = SemMeasure | SemFunction


def zero_value(ty: Type) -> SemValue:
    if ty == REAL:
        return SemMeasure(ConcreteMeasure())
    return SemFunction(lambda _arg: zero_value(ty.codomain), ty.domain, ty.codomain)


class Env:
    """Immutable variable environment."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: dict | None = None):
        self._bindings = dict(bindings) if bindings else {}

    def lookup(self, name: str) -> SemValue:
        try:
            return self._bindings[name]
        except KeyError:
            raise KeyError(f"unbound variable {name!r} in environment") from None

    def extend(self, name: str, value: SemValue) -> "Env":
        child = Env()
        child._bindings = {**self._bindings, name: value}
        return child

    def names(self):
        return frozenset(self._bindings)


EMPTY_ENV = Env()


# -- the interpretation -----------------------------------------------------


def interpret(
    t: Term,
    env: Env = EMPTY_ENV,
    *,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
    fix: FixConfig = DEFAULT_FIX,
    table: PrimitiveTable = DEFAULT_TABLE,
) -> SemValue:
    match t:
        case Var(name):
            return env.lookup(name)
        case Numeral(value):
            return SemMeasure(dirac(value, cfg=quad))
        case _SampleTerm():
            return SemMeasure(lebesgue_unit(cfg=quad))
        case Abs(name, annot, body):
            def closure(arg, _name=name, _body=body, _env=env):
                return interpret(_body, _env.extend(_name, arg), quad=quad, fix=fix, table=table)

            codomain = None  # unknown without a typing pass; not observable
            return SemFunction(closure, annot, codomain)
        case App(fun, arg):
            fun_value = interpret(fun, env, quad=quad, fix=fix, table=table)
            if not isinstance(fun_value, SemFunction):
                raise TypeError("application of a ground-type value")
            arg_value = interpret(arg, env, quad=quad, fix=fix, table=table)
            return fun_value.apply(arg_value)
        case Prim(op, args):
            arg_measures = [
                _ground(interpret(a, env, quad=quad, fix=fix, table=table)) for a in args
            ]
            return SemMeasure(pushforward(table.lookup(op), arg_measures, cfg=quad))
        case Ifz(scrutinee, then, otherwise):
            scrut = _ground(interpret(scrutinee, env, quad=quad, fix=fix, table=table))
            p_zero = scrut.mass(_ZERO_SET)
            p_nonzero = scrut.mass(_NONZERO_SET)
            branches = []
            coeffs = []
            if p_zero != 0.0:
                branches.append(_ground(interpret(then, env, quad=quad, fix=fix, table=table)))
                coeffs.append(p_zero)
            if p_nonzero != 0.0:
                branches.append(
                    _ground(interpret(otherwise, env, quad=quad, fix=fix, table=table))
                )
                coeffs.append(p_nonzero)
            return SemMeasure(mix(coeffs, branches, cfg=quad))
        case Let(name, bound, body):
            bound_measure = _ground(interpret(bound, env, quad=quad, fix=fix, table=table))
            compiled = _compile_deterministic(body, {name: 0, "#depth": 1}, env, table)

            if compiled is not None:
                def body_at(r: float) -> Measure:
                    return dirac(compiled((r,)), cfg=quad)
            else:
                def body_at(r: float, _name=name, _body=body, _env=env) -> Measure:
                    inner = _env.extend(_name, SemMeasure(dirac(r, cfg=quad)))
                    return _ground(interpret(_body, inner, quad=quad, fix=fix, table=table))

            return SemMeasure(let_bind(bound_measure, body_at, cfg=quad))
        case Fix(body):
            fun = interpret(body, env, quad=quad, fix=fix, table=table)
            if not isinstance(fun, SemFunction):
                raise TypeError("fix needs a function value")
            return fixpoint(fun, fix, quad=quad)
        case MacroCall():
            raise ValueError("interpret on unexpanded macro; expand sugar first")
    raise TypeError(f"not a term: {t!r}")


def _ground(v: SemValue) -> Measure:
    if not isinstance(v, SemMeasure):
        raise TypeError("expected a ground-type value")
    return v.measure


def _unit_atom(m: Measure) -> float | None:
    if isinstance(m, ConcreteMeasure) and not m.densities and len(m.atoms) == 1:
        atom = m.atoms[0]
        if atom.weight == 1.0:
            return atom.location
    return None


def _compile_deterministic(t: Term, scope: dict[str, int], env: Env,
                           table: PrimitiveTable):
    """Compile a deterministic ground tree to a closure on positional floats.

    Quadrature evaluates `let` bodies at huge numbers of sample points;
    bodies that are plain primitive/ifz/let trees over Dirac-valued
    variables compile once into nested closures, so each point costs a
    float evaluation instead of a measure construction.  Returns None
    when any probabilistic or higher-order construct shows up, and the
    caller falls back to the full interpreter.
    """
    match t:
        case Numeral(value):
            return lambda _a: value
        case Var(name):
            if name in scope:
                index = scope[name]
                return lambda a: a[index]
            try:
                v = env.lookup(name)
            except KeyError:
                return None
            if not isinstance(v, SemMeasure):
                return None
            location = _unit_atom(v.measure)
            if location is None:
                return None
            return lambda _a: location
        case Prim(op, args):
            compiled = [_compile_deterministic(a, scope, env, table) for a in args]
            if any(c is None for c in compiled):
                return None
            fn = table.lookup(op).fn
            if len(compiled) == 1:
                g0 = compiled[0]
                return lambda a: fn(g0(a))
            if len(compiled) == 2:
                g0, g1 = compiled
                return lambda a: fn(g0(a), g1(a))
            return lambda a: fn(*[g(a) for g in compiled])
        case Ifz(scrutinee, then, otherwise):
            gs = _compile_deterministic(scrutinee, scope, env, table)
            gt = _compile_deterministic(then, scope, env, table)
            ge = _compile_deterministic(otherwise, scope, env, table)
            if gs is None or gt is None or ge is None:
                return None
            return lambda a: gt(a) if gs(a) == 0.0 else ge(a)
        case Let(name, bound, body):
            gb = _compile_deterministic(bound, scope, env, table)
            if gb is None:
                return None
            depth = scope["#depth"]
            inner_scope = {**scope, name: depth, "#depth": depth + 1}
            gbody = _compile_deterministic(body, inner_scope, env, table)
            if gbody is None:
                return None
            return lambda a: gbody(a + (gb(a),))
    return None


def let_bind(bound: Measure, body, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> Measure:
    """The ground let: U |-> integral of body(r)(U) against `bound`.

    An atom-only bound collapses to an exact weighted sum of body
    measures; anything else stays a lazily-queried integral.
    """
    if isinstance(bound, ConcreteMeasure) and not bound.densities:
        coeffs = [atom.weight for atom in bound.atoms]
        measures = [body(atom.location) for atom in bound.atoms]
        return mix(coeffs, measures, cfg=cfg)
    return IntegralMeasure(bound, body, cfg=cfg)


# -- Kleene fixpoints ---------------------------------------------------------


def _probe_masses(m: Measure, probes) -> dict:
    return {u.key(): m.mass(u) for u in probes}


def _iterate_ground(make_measure, cfg: FixConfig, quad: QuadratureConfig) -> Measure:
    """Iterate k -> make_measure(k) until probe masses settle.

    make_measure(k) must be the ground meaning of the k-th Kleene
    iterate; iterates are walked in order so each one's memo cache is
    primed before the next one integrates over it.
    """
    chain = [make_measure(0)]
    masses = _probe_masses(chain[0], cfg.probe_sets)
    for _ in range(cfg.max_iters):
        nxt = make_measure(len(chain))
        chain.append(nxt)
        new_masses = _probe_masses(nxt, cfg.probe_sets)
        moved = max(
            abs(new_masses[k] - masses[k]) for k in new_masses
        ) if new_masses else 0.0
        masses = new_masses
        if moved < cfg.mass_tol:
            return FixpointChainMeasure(chain, cfg=quad)
    raise NonConvergent(cfg.max_iters, masses)


def fixpoint(f: SemFunction, cfg: FixConfig = DEFAULT_FIX,
             quad: QuadratureConfig = DEFAULT_QUADRATURE) -> SemValue:
    """sup of f^n(0) from the zero value of f's domain type.

    At ground type the chain of iterates is materialized once; at
    arrow types the value is lazily unrolled and the iteration re-runs
    for each spine of arguments that reaches ground type.
    """
    ty = f.domain

    def value_at(ty: Type, spine: tuple) -> SemValue:
        if ty == REAL:
            iterates: list[SemValue] = [zero_value(f.domain)]

            def make_measure(k: int) -> Measure:
                while len(iterates) <= k:
                    iterates.append(f.apply(iterates[-1]))
                v = iterates[k]
                for arg in spine:
                    v = v.apply(arg)
                return _ground(v)

            return SemMeasure(_iterate_ground(make_measure, cfg, quad))
        return SemFunction(
            lambda arg: value_at(ty.codomain, spine + (arg,)), ty.domain, ty.codomain
        )

    return value_at(ty, ())
