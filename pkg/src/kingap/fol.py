"""First-order formulas over the real field ``<R, +, *, 0, 1>``.

Formulas are written as s-expressions::

    (exists v13 (and (= (+ v5 (* v13 v1)) (+ v1 (* v13 v9))) ...))

The evaluator is exact but only decides existential quantifiers of two
shapes, checked after ``exists`` is pushed through ``or``:

* linear: the bound variable has degree <= 1 in every equation of the
  conjunction.  Every equation with a nonzero coefficient pins the witness;
  each such candidate is substituted and checked.  When all coefficients
  vanish, the remaining nested conjuncts must reduce to linear sign
  constraints (``exists y (alpha*y*y + beta(x) = 0)``) and their
  feasibility is decided on the line.
* square: the bound variable occurs only as ``x*x`` and each equation is
  affine in ``x*x``; a witness exists iff the forced value of ``x*x`` is
  nonnegative.

Anything else raises :class:`UnsupportedQuantifierPattern`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence, Union

from .linalg import Point4
from .scalar import ONE, ZERO, Scalar, sign, to_scalar
from .verdict import Verdict

__all__ = [
    "Var",
    "Zero",
    "One",
    "Sum",
    "Prod",
    "Eq",
    "And",
    "Or",
    "Not",
    "Exists",
    "Term",
    "Formula",
    "FormulaError",
    "FormulaSyntaxError",
    "UnknownToken",
    "UnsupportedQuantifierPattern",
    "MissingAssignment",
    "parse",
    "to_text",
    "free_vars",
    "compile_formula",
    "evaluate",
    "flatten",
    "builtin",
    "BUILTINS",
    "rename",
    "distribute_exists",
    "grid_tuples",
    "oracle_agree",
]


# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Prod:
    left: "Term"
    right: "Term"


Term = Union[Var, Zero, One, Sum, Prod]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class Exists:
    var: int
    body: "Formula"


Formula = Union[Eq, And, Or, Not, Exists]


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class UnknownToken(FormulaSyntaxError):
    pass


class UnsupportedQuantifierPattern(FormulaError):
    def __init__(self, subformula, reason: str = ""):
        text = to_text(subformula)
        super().__init__(f"unsupported quantifier pattern{': ' + reason if reason else ''}: {text}")
        self.subformula = subformula


class MissingAssignment(FormulaError):
    pass


# -- printing -----------------------------------------------------------------


def to_text(node) -> str:
    if isinstance(node, Var):
        return f"v{node.index}"
    if isinstance(node, Zero):
        return "0"
    if isinstance(node, One):
        return "1"
    if isinstance(node, Sum):
        return f"(+ {to_text(node.left)} {to_text(node.right)})"
    if isinstance(node, Prod):
        return f"(* {to_text(node.left)} {to_text(node.right)})"
    if isinstance(node, Eq):
        return f"(= {to_text(node.left)} {to_text(node.right)})"
    if isinstance(node, And):
        return "(" + " ".join(["and", *map(to_text, node.args)]) + ")"
    if isinstance(node, Or):
        return "(" + " ".join(["or", *map(to_text, node.args)]) + ")"
    if isinstance(node, Not):
        return f"(not {to_text(node.arg)})"
    if isinstance(node, Exists):
        return f"(exists v{node.var} {to_text(node.body)})"
    raise TypeError(f"not a formula node: {node!r}")


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s+|\(|\)|[^\s()]+")
_VAR = re.compile(r"^v(\d+)$")
_KEYWORDS = {"exists", "and", "or", "not", "=", "+", "*", "0", "1"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            tok = m.group()
            if not tok.isspace():
                self.tokens.append((tok, self._offset(pos)))
            pos = m.end()
        self.end_offset = self._offset(len(text))
        self.i = 0

    def _offset(self, pos: int) -> int:
        return len(self.text[:pos].encode("utf-8"))

    def peek(self) -> tuple[str, int]:
        if self.i >= len(self.tokens):
            raise FormulaSyntaxError("unexpected end of input", self.end_offset)
        return self.tokens[self.i]

    def next(self) -> tuple[str, int]:
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, want: str) -> None:
        tok, off = self.next()
        if tok != want:
            self._bad(tok, off, f"expected {want!r}")

    def _bad(self, tok: str, off: int, message: str):
        if tok not in _KEYWORDS and tok not in "()" and not _VAR.match(tok):
            raise UnknownToken(f"unknown token {tok!r}", off)
        raise FormulaSyntaxError(f"{message}, found {tok!r}", off)

    def var(self) -> int:
        tok, off = self.next()
        m = _VAR.match(tok)
        if not m:
            self._bad(tok, off, "expected a variable")
        index = int(m.group(1))
        if index < 1 or m.group(1).startswith("0"):
            raise FormulaSyntaxError(f"bad variable {tok!r}", off)
        return index

    def formula(self) -> Formula:
        self.expect("(")
        head, off = self.next()
        if head == "exists":
            v = self.var()
            body = self.formula()
            self.expect(")")
            return Exists(v, body)
        if head in ("and", "or"):
            args = []
            while self.peek()[0] != ")":
                args.append(self.formula())
            self.next()
            return (And if head == "and" else Or)(tuple(args))
        if head == "not":
            arg = self.formula()
            self.expect(")")
            return Not(arg)
        if head == "=":
            left = self.term()
            right = self.term()
            self.expect(")")
            return Eq(left, right)
        self._bad(head, off, "expected a formula operator")

    def term(self) -> Term:
        tok, off = self.next()
        if tok == "(":
            head, hoff = self.next()
            if head not in ("+", "*"):
                self._bad(head, hoff, "expected '+' or '*'")
            left = self.term()
            right = self.term()
            self.expect(")")
            return (Sum if head == "+" else Prod)(left, right)
        if tok == "0":
            return Zero()
        if tok == "1":
            return One()
        if _VAR.match(tok):
            self.i -= 1
            return Var(self.var())
        self._bad(tok, off, "expected a term")


def parse(text: str) -> Formula:
    p = _Parser(text)
    phi = p.formula()
    if p.i != len(p.tokens):
        tok, off = p.tokens[p.i]
        raise FormulaSyntaxError(f"trailing input {tok!r}", off)
    return phi


# -- structure ----------------------------------------------------------------


def term_vars(t) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    if isinstance(t, (Sum, Prod)):
        return term_vars(t.left) | term_vars(t.right)
    return set()


def free_vars(phi) -> frozenset[int]:
    if isinstance(phi, Eq):
        return frozenset(term_vars(phi.left) | term_vars(phi.right))
    if isinstance(phi, (And, Or)):
        out = set()
        for a in phi.args:
            out |= free_vars(a)
        return frozenset(out)
    if isinstance(phi, Not):
        return free_vars(phi.arg)
    if isinstance(phi, Exists):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def rename(node, mapping: Mapping[int, int]):
    """Rename variables (free and bound) through ``mapping``."""
    if isinstance(node, Var):
        return Var(mapping.get(node.index, node.index))
    if isinstance(node, (Zero, One)):
        return node
    if isinstance(node, (Sum, Prod, Eq)):
        return type(node)(rename(node.left, mapping), rename(node.right, mapping))
    if isinstance(node, (And, Or)):
        return type(node)(tuple(rename(a, mapping) for a in node.args))
    if isinstance(node, Not):
        return Not(rename(node.arg, mapping))
    if isinstance(node, Exists):
        return Exists(mapping.get(node.var, node.var), rename(node.body, mapping))
    raise TypeError(f"not a formula node: {node!r}")


def distribute_exists(phi):
    """Rewrite ``exists x (A or B)`` as ``(exists x A) or (exists x B)`` throughout."""
    if isinstance(phi, Eq):
        return phi
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(distribute_exists(a) for a in phi.args))
    if isinstance(phi, Not):
        return Not(distribute_exists(phi.arg))
    if isinstance(phi, Exists):
        body = distribute_exists(phi.body)
        if isinstance(body, Or):
            return Or(tuple(distribute_exists(Exists(phi.var, d)) for d in body.args))
        return Exists(phi.var, body)
    raise TypeError(f"not a formula: {phi!r}")


def _conjuncts(phi) -> list:
    if isinstance(phi, And):
        out = []
        for a in phi.args:
            out.extend(_conjuncts(a))
        return out
    return [phi]


# -- polynomial view of terms -------------------------------------------------

# A polynomial in one variable maps degree -> list of (sign, term) summands
# whose terms are free of that variable.


def _mul_terms(a, b):
    if isinstance(a, One):
        return b
    if isinstance(b, One):
        return a
    return Prod(a, b)


def _expand(t, x: int) -> dict[int, list]:
    if isinstance(t, Var):
        return {1: [(1, One())]} if t.index == x else {0: [(1, t)]}
    if isinstance(t, Zero):
        return {}
    if isinstance(t, One):
        return {0: [(1, t)]}
    if isinstance(t, Sum):
        out = {d: list(s) for d, s in _expand(t.left, x).items()}
        for d, s in _expand(t.right, x).items():
            out.setdefault(d, []).extend(s)
        return out
    if isinstance(t, Prod):
        left, right = _expand(t.left, x), _expand(t.right, x)
        out: dict[int, list] = {}
        for i, sa in left.items():
            for j, sb in right.items():
                bucket = out.setdefault(i + j, [])
                for ka, ta in sa:
                    for kb, tb in sb:
                        bucket.append((ka * kb, _mul_terms(ta, tb)))
        return out
    raise TypeError(f"not a term: {t!r}")


def _difference(eq: Eq, x: int) -> dict[int, list]:
    out = {d: list(s) for d, s in _expand(eq.left, x).items()}
    for d, s in _expand(eq.right, x).items():
        out.setdefault(d, []).extend((-k, t) for k, t in s)
    return {d: s for d, s in out.items() if s}


def _square_to_var(t, x: int, fresh: int):
    """Replace every ``x*x`` by ``Var(fresh)``."""
    if isinstance(t, Prod):
        if t.left == Var(x) and t.right == Var(x):
            return Var(fresh)
        return Prod(_square_to_var(t.left, x, fresh), _square_to_var(t.right, x, fresh))
    if isinstance(t, Sum):
        return Sum(_square_to_var(t.left, x, fresh), _square_to_var(t.right, x, fresh))
    return t


def _square_eq(eq: Eq, x: int, fresh: int) -> Optional[Eq]:
    out = Eq(_square_to_var(eq.left, x, fresh), _square_to_var(eq.right, x, fresh))
    if x in term_vars(out.left) | term_vars(out.right):
        return None
    return out


# -- code generation for terms ------------------------------------------------

_GLOBALS = {"ONE": ONE, "ZERO": ZERO}


def _code(t) -> str:
    if isinstance(t, Var):
        return f"e[{t.index}]"
    if isinstance(t, Zero):
        return "ZERO"
    if isinstance(t, One):
        return "ONE"
    if isinstance(t, Sum):
        return f"({_code(t.left)} + {_code(t.right)})"
    if isinstance(t, Prod):
        return f"({_code(t.left)} * {_code(t.right)})"
    raise TypeError(f"not a term: {t!r}")


def _summand_code(summands: Sequence) -> str:
    if not summands:
        return "ZERO"
    parts = []
    for k, t in summands:
        code = _code(t)
        if not parts:
            parts.append(code if k > 0 else f"-{code}")
        else:
            parts.append(f"+ {code}" if k > 0 else f"- {code}")
    return " ".join(parts)


def _lambda(code: str) -> Callable:
    return eval(f"lambda e: {code}", _GLOBALS)


# -- compilation --------------------------------------------------------------

Compiled = Callable[[dict], bool]


def _compile(phi) -> Compiled:
    if isinstance(phi, Eq):
        return _lambda(f"{_code(phi.left)} == {_code(phi.right)}")
    if isinstance(phi, And):
        fns = [_compile(a) for a in phi.args]

        def run_and(e):
            for f in fns:
                if not f(e):
                    return False
            return True

        return run_and
    if isinstance(phi, Or):
        fns = [_compile(a) for a in phi.args]

        def run_or(e):
            for f in fns:
                if f(e):
                    return True
            return False

        return run_or
    if isinstance(phi, Not):
        f = _compile(phi.arg)
        return lambda e: not f(e)
    if isinstance(phi, Exists):
        return _compile_exists(phi.var, phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def _compile_exists(x: int, body) -> Compiled:
    if isinstance(body, Or):
        return _compile(Or(tuple(Exists(x, d) for d in body.args)))
    whole = Exists(x, body)
    if x not in free_vars(body):
        return _compile(body)
    parts = _conjuncts(body)
    free = [_compile(c) for c in parts if x not in free_vars(c)]
    bound = [c for c in parts if x in free_vars(c)]
    eqs = [c for c in bound if isinstance(c, Eq)]
    nested = [c for c in bound if not isinstance(c, Eq)]

    diffs = [_difference(eq, x) for eq in eqs]
    degree = max((max(d, default=0) for d in diffs), default=0)
    if degree <= 1:
        return _linear_exists(x, free, diffs, nested)
    if nested:
        raise UnsupportedQuantifierPattern(whole, "nonlinear witness alongside nested subformulas")
    fresh = -x
    squared = [_square_eq(eq, x, fresh) for eq in eqs]
    if any(s is None for s in squared):
        raise UnsupportedQuantifierPattern(whole, f"v{x} occurs outside v{x}*v{x}")
    sq_diffs = [_difference(eq, fresh) for eq in squared]
    if max((max(d, default=0) for d in sq_diffs), default=0) > 1:
        raise UnsupportedQuantifierPattern(whole, f"v{x}*v{x} occurs nonlinearly")
    return _square_exists(free, sq_diffs)


def _coefficients(diffs) -> list[tuple[Callable, Callable]]:
    return [(_lambda(_summand_code(d.get(0, []))), _lambda(_summand_code(d.get(1, [])))) for d in diffs]


def _linear_exists(x, free, diffs, nested) -> Compiled:
    coefs = _coefficients(diffs)
    nested_fns = [_compile(n) for n in nested]
    constraint_fns = [_sign_constraint(n, x) for n in nested]

    def run(e):
        for f in free:
            if not f(e):
                return False
        values = [(f0(e), f1(e)) for f0, f1 in coefs]
        candidates = []
        for c0, c1 in values:
            if c1:
                cand = -c0 / c1
                if cand not in candidates:
                    candidates.append(cand)
        if candidates:
            for cand in candidates:
                if any(c0 + c1 * cand for c0, c1 in values):
                    continue
                e2 = dict(e)
                e2[x] = cand
                if all(f(e2) for f in nested_fns):
                    return True
            return False
        # no equation pins the witness
        if any(c0 for c0, _ in values):
            return False
        if not nested:
            return True
        constraints = []
        for node, cf in zip(nested, constraint_fns):
            if cf is None:
                raise UnsupportedQuantifierPattern(
                    node, f"cannot reduce to a constraint on unpinned v{x}"
                )
            constraints.append(cf(e))
        return _feasible(constraints)

    return run


def _square_exists(free, sq_diffs) -> Compiled:
    coefs = _coefficients(sq_diffs)

    def run(e):
        for f in free:
            if not f(e):
                return False
        values = [(f0(e), f1(e)) for f0, f1 in coefs]
        candidates = [-c0 / c1 for c0, c1 in values if c1]
        if not candidates:
            return not any(c0 for c0, _ in values)
        for y in candidates:
            if sign(y) < 0:
                continue
            if not any(c0 + c1 * y for c0, c1 in values):
                return True
        return False

    return run


def _sign_constraint(node, x: int) -> Optional[Callable]:
    """For ``exists y (alpha*y*y + beta = 0)`` with ``alpha`` free of ``x`` and
    ``beta`` affine in ``x``, a function returning the equivalent constraint
    on ``x`` as ``(kind, k1, k0)`` meaning ``k1*x + k0 >= 0`` or ``== 0``.
    """
    if not isinstance(node, Exists):
        return None
    parts = _conjuncts(node.body)
    if len(parts) != 1 or not isinstance(parts[0], Eq):
        return None
    y = node.var
    squared = _square_eq(parts[0], y, -y)
    if squared is None:
        return None
    diff = _difference(squared, -y)
    if max(diff, default=0) > 1:
        return None
    alpha_parts = diff.get(1, [])
    beta_parts = diff.get(0, [])
    for _, t in alpha_parts:
        if x in term_vars(t):
            return None
    beta0, beta1 = [], []
    for k, t in beta_parts:
        ex = _expand(t, x)
        if max(ex, default=0) > 1:
            return None
        beta0.extend((k * k2, t2) for k2, t2 in ex.get(0, []))
        beta1.extend((k * k2, t2) for k2, t2 in ex.get(1, []))
    f_alpha = _lambda(_summand_code(alpha_parts))
    f_b0 = _lambda(_summand_code(beta0))
    f_b1 = _lambda(_summand_code(beta1))

    def constraint(e):
        a = f_alpha(e)
        b0, b1 = f_b0(e), f_b1(e)
        if a:
            s = sign(a)
            # y*y = -beta/alpha must be nonnegative
            return ("ge", -s * b1, -s * b0)
        return ("eq", b1, b0)

    return constraint


def _feasible(constraints) -> bool:
    """Decide ``exists x`` for affine constraints on the line."""
    pinned = None
    for kind, k1, k0 in constraints:
        if kind != "eq":
            continue
        if k1:
            v = -k0 / k1
            if pinned is not None and v != pinned:
                return False
            pinned = v
        elif k0:
            return False
    if pinned is not None:
        return all(k1 * pinned + k0 >= 0 for kind, k1, k0 in constraints if kind == "ge")
    lo = hi = None
    for kind, k1, k0 in constraints:
        if kind != "ge":
            continue
        if k1:
            bound = -k0 / k1
            if sign(k1) > 0:
                lo = bound if lo is None or bound > lo else lo
            else:
                hi = bound if hi is None or bound < hi else hi
        elif sign(k0) < 0:
            return False
    return lo is None or hi is None or lo <= hi


_CACHE: dict[int, tuple] = {}


def compile_formula(phi) -> Compiled:
    """Compile ``phi`` into a predicate on valuations (dicts index -> Scalar).

    Raises :class:`UnsupportedQuantifierPattern` for quantifiers outside the
    supported shapes that can be detected up front.
    """
    hit = _CACHE.get(id(phi))
    if hit is not None and hit[0] is phi:
        return hit[1]
    fn = _compile(phi)
    if len(_CACHE) > 512:
        _CACHE.clear()
    _CACHE[id(phi)] = (phi, fn)
    return fn


Valuation = Mapping[int, Scalar]


def evaluate(phi, val: Valuation) -> bool:
    missing = free_vars(phi) - set(val)
    if missing:
        names = ", ".join(f"v{i}" for i in sorted(missing))
        raise MissingAssignment(f"no value for {names}")
    fn = compile_formula(phi)
    return bool(fn({k: to_scalar(v) for k, v in val.items()}))


def flatten(*points) -> dict[int, Scalar]:
    """``v[4(k-1)+j]`` is component ``j`` of point ``k`` (all 1-based)."""
    if len(points) == 1 and points and isinstance(points[0], (list, tuple)) and not isinstance(points[0], Point4):
        points = tuple(points[0])
    out = {}
    for k, p in enumerate(points):
        for j in range(4):
            out[4 * k + j + 1] = p[j]
    return out


# -- built-in formulas --------------------------------------------------------


def _v(i: int) -> Var:
    return Var(i)


def _sum(terms: Sequence[Term]) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = Sum(out, t)
    return out


def _collinear_equations(i: int, witness: int) -> Eq:
    # q_i = p_i + a (r_i - p_i), with the subtraction moved across
    return Eq(
        Sum(_v(4 + i), Prod(_v(witness), _v(i))),
        Sum(_v(i), Prod(_v(witness), _v(8 + i))),
    )


def _phi_col() -> Formula:
    return Or(
        (
            Exists(13, And(tuple(_collinear_equations(i, 13) for i in range(1, 5)))),
            And(tuple(Eq(_v(8 + i), _v(i)) for i in range(1, 5))),
        )
    )


def _phi_lambda() -> Formula:
    # (p1-q1)^2 = sum_{i=2..4} (pi-qi)^2 expanded, cross terms moved across
    sq = lambda i: Prod(_v(i), _v(i))
    cross = lambda i: Prod(_v(i), _v(4 + i))
    left = [sq(1), sq(5)] + [Sum(cross(i), cross(i)) for i in (2, 3, 4)]
    right = [t for i in (2, 3, 4) for t in (sq(i), sq(4 + i))] + [Sum(cross(1), cross(1))]
    return Eq(_sum(left), _sum(right))


def _phi_simul() -> Formula:
    return Eq(_v(1), _v(5))


def _phi_bw() -> Formula:
    # collinearity with witness a=v13 plus a = b*b and 1 = a + c*c
    unit_interval = (
        Exists(14, Eq(_v(13), Prod(_v(14), _v(14)))),
        Exists(15, Eq(One(), Sum(_v(13), Prod(_v(15), _v(15))))),
    )
    return Exists(
        13, And(tuple(_collinear_equations(i, 13) for i in range(1, 5)) + unit_interval)
    )


BUILTINS = {
    "phi_col": _phi_col(),
    "phi_lambda": _phi_lambda(),
    "phi_simul": _phi_simul(),
    "phi_bw": _phi_bw(),
}


def builtin(name: str) -> Formula:
    try:
        return BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown built-in formula {name!r}") from None


# -- oracle cross-checks ------------------------------------------------------


def grid_tuples(values: Iterable, arity: int) -> Iterator[tuple[Point4, ...]]:
    """Every tuple of ``arity`` points with all coordinates from ``values``."""
    vals = [to_scalar(v) for v in values]
    pts = [Point4(*c) for c in itertools.product(vals, repeat=4)]
    return itertools.product(pts, repeat=arity)


def oracle_agree(phi, R, tuples, n: Optional[int] = None) -> Verdict:
    """Compare ``phi`` on flattened tuples against the direct evaluator of ``R``.

    ``tuples`` is a :class:`~kingap.relations.TupleSampler` (then ``n``
    draws are made) or any iterable of point tuples (then at most ``n`` are
    used, all of them when ``n`` is None).
    """
    span = max(free_vars(phi), default=0)
    if span > 4 * R.arity:
        raise FormulaError(f"formula mentions v{span}, beyond a {R.arity}-ary relation")
    fn = compile_formula(phi)
    if hasattr(tuples, "draw"):
        if n is None:
            raise ValueError("n is required with a sampler")
        sampler = tuples
        source = (sampler.draw(R.name, R.arity) for _ in range(n))
    else:
        source = tuples if n is None else itertools.islice(tuples, n)
    direct = R.evaluator
    verdict = Verdict()
    for tup in source:
        e = {}
        k = 1
        for p in tup:
            e[k], e[k + 1], e[k + 2], e[k + 3] = p
            k += 4
        got = fn(e)
        want = direct(*tup)
        verdict.checks_run += 1
        if got != want:
            verdict.fail(
                "oracle_agree",
                {"formula": to_text(phi), "relation": R.name, "tuple": [str(p) for p in tup]},
                want,
                got,
            )
    return verdict
