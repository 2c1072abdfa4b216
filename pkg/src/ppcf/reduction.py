"""Call-by-name stochastic reduction and the Monte-Carlo mass estimator.

A term decomposes into an evaluation context (a stack of frames) and a
unique redex, or is a normal form.  Frames restrict where reduction may
happen: head of an application, the scrutinee of ``ifz``, the bound
position of ``let``, and the leftmost non-numeral primitive argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .intervals import IntervalSet
from .primitives import DEFAULT_TABLE, PrimitiveTable
from .rng import RngStream
from .terms import (
    Abs,
    App,
    Fix,
    Ifz,
    Let,
    Numeral,
    Prim,
    Term,
    _SampleTerm,
    substitute,
)


class InvariantViolation(Exception):
    pass


# -- evaluation context frames ---------------------------------------------


@dataclass(frozen=True)
class AppFrame:
    arg: Term


@dataclass(frozen=True)
class IfzFrame:
    then: Term
    otherwise: Term


@dataclass(frozen=True)
class LetFrame:
    name: str
    body: Term


@dataclass(frozen=True)
class PrimFrame:
    op: str
    done: tuple[Term, ...]  # numerals to the left of the hole
    pending: tuple[Term, ...]  # untouched arguments to the right


Frame = AppFrame | IfzFrame | LetFrame | PrimFrame


def plug(frames: tuple[Frame, ...], t: Term) -> Term:
    """Rebuild the term with t in the hole."""
    for frame in reversed(frames):
        match frame:
            case AppFrame(arg):
                t = App(t, arg)
            case IfzFrame(then, otherwise):
                t = Ifz(t, then, otherwise)
            case LetFrame(name, body):
                t = Let(name, t, body)
            case PrimFrame(op, done, pending):
                t = Prim(op, done + (t,) + pending)
    return t


@dataclass(frozen=True)
class NormalForm:
    term: Term


@dataclass(frozen=True)
class Split:
    context: tuple[Frame, ...]
    redex: Term


Decomposition = NormalForm | Split


def _is_redex(t: Term) -> bool:
    match t:
        case App(Abs(), _) | Fix() | _SampleTerm():
            return True
        case Ifz(Numeral(), _, _):
            return True
        case Let(_, Numeral(), _):
            return True
        case Prim(_, args):
            return all(isinstance(a, Numeral) for a in args)
    return False


def decompose(t: Term) -> Decomposition:
    """Unique context/redex split, or NormalForm when nothing fires."""
    frames: list[Frame] = []
    current = t
    while True:
        match current:
            case _ if _is_redex(current):
                return Split(tuple(frames), current)
            case App(fun, arg):
                frames.append(AppFrame(arg))
                current = fun
            case Ifz(scrutinee, then, otherwise):
                frames.append(IfzFrame(then, otherwise))
                current = scrutinee
            case Let(name, bound, body):
                frames.append(LetFrame(name, body))
                current = bound
            case Prim(op, args):
                for i, a in enumerate(args):
                    if not isinstance(a, Numeral):
                        frames.append(PrimFrame(op, args[:i], args[i + 1:]))
                        current = a
                        break
                else:  # pragma: no cover - all-numeral Prim is a redex above
                    return NormalForm(t)
            case _:
                # numeral, abstraction, or free variable under the hole:
                # nothing fires anywhere the context grammar allows
                return NormalForm(t)


def contract(redex: Term, rng: RngStream, table: PrimitiveTable = DEFAULT_TABLE) -> Term:
    """Fire the reduction rule for a redex; only `sample` touches the rng."""
    match redex:
        case App(Abs(name, _, body), arg):
            return substitute(body, name, arg)
        case Prim(op, args):
            values = [a.value for a in args]
            return Numeral(table.lookup(op).fn(*values))
        case Ifz(Numeral(value), then, otherwise):
            return then if value == 0.0 else otherwise
        case Let(name, Numeral() as numeral, body):
            return substitute(body, name, numeral)
        case Fix(body):
            return App(body, redex)
        case _SampleTerm():
            return Numeral(rng.uniform())
    raise InvariantViolation(f"not a redex: {redex!r}")


def step(t: Term, rng: RngStream, table: PrimitiveTable = DEFAULT_TABLE) -> Term:
    match decompose(t):
        case NormalForm():
            raise InvariantViolation("step called on a normal form")
        case Split(context, redex):
            return plug(context, contract(redex, rng, table))


# -- whole-program runs ------------------------------------------------------


@dataclass(frozen=True)
class Value:
    value: float
    steps: int


@dataclass(frozen=True)
class StuckNormal:
    term: Term
    steps: int


@dataclass(frozen=True)
class Exhausted:
    steps: int


Outcome = Value | StuckNormal | Exhausted


def run(t: Term, budget: int, rng: RngStream, table: PrimitiveTable = DEFAULT_TABLE) -> Outcome:
    """Iterate the reduction at most `budget` steps from a closed ground term."""
    current = t
    for steps in range(budget + 1):
        match decompose(current):
            case NormalForm(term):
                if isinstance(term, Numeral):
                    return Value(term.value, steps)
                return StuckNormal(term, steps)
            case Split(context, redex):
                if steps == budget:
                    return Exhausted(budget)
                current = plug(context, contract(redex, rng, table))
    return Exhausted(budget)  # pragma: no cover


def collect_outcomes(t: Term, runs: int, budget: int, seed: int,
                     table: PrimitiveTable = DEFAULT_TABLE) -> list[Outcome]:
    """Independent reproducible runs; run i owns stream offset i * 2**40."""
    return [run(t, budget, RngStream.for_run(seed, i), table) for i in range(runs)]


def dkw_bound(runs: int, confidence: float) -> float:
    """Dvoretzky-Kiefer-Wolfowitz epsilon at miss probability `confidence`."""
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    return math.sqrt(math.log(2.0 / confidence) / (2.0 * runs))


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    dkw: float
    runs: int
    exhausted: int


def estimate_mass(t: Term, u: IntervalSet, runs: int, budget: int, seed: int,
                  confidence: float = 0.01,
                  table: PrimitiveTable = DEFAULT_TABLE) -> Estimate:
    """Fraction of runs landing in u, with its DKW confidence radius."""
    if runs < 1:
        raise ValueError("estimate_mass needs runs >= 1")
    outcomes = collect_outcomes(t, runs, budget, seed, table)
    hits = sum(1 for o in outcomes if isinstance(o, Value) and u.contains(o.value))
    exhausted = sum(1 for o in outcomes if isinstance(o, Exhausted))
    return Estimate(hits / runs, dkw_bound(runs, confidence), runs, exhausted)
