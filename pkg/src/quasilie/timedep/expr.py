"""Expression language for coefficient functions of time.

Grammar (EBNF)::

    expr     = term , { ("+" | "-") , term } ;
    term     = unary , { ("*" | "/") , unary } ;
    unary    = ("-" | "+") , unary | power ;
    power    = primary , [ "^" , exponent ] ;
    exponent = primary , [ "^" , exponent ] ;          (* right associative *)
    primary  = number | name | name , "(" , args , ")" | "(" , expr , ")" ;
    args     = expr , { "," , expr } ;

A negative literal exponent needs parentheses: ``t^(-3)``, never ``t^-3``.
Names are ``t``, parameters, state variables, builtin functions
(exp, log, sin, cos, tan, sqrt, abs, hyp2f1) or declared references to other
scalar functions of time such as ``A(t)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from ..errors import (
    DomainError,
    ExpressionSyntaxError,
    NotExact,
    UnknownFunction,
    UnknownVariable,
)

BUILTINS = {
    "exp": 1,
    "log": 1,
    "sin": 1,
    "cos": 1,
    "tan": 1,
    "sqrt": 1,
    "abs": 1,
    "hyp2f1": 4,
}


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


class Node:
    __slots__ = ()

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True, eq=False)
class Num(Node):
    value: object  # Fraction (exact literal) or float


@dataclass(frozen=True, eq=False)
class Var(Node):
    name: str


@dataclass(frozen=True, eq=False)
class Param(Node):
    name: str
    value: object


@dataclass(frozen=True, eq=False)
class Neg(Node):
    operand: Node


@dataclass(frozen=True, eq=False)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True, eq=False)
class Call(Node):
    name: str
    args: tuple


@dataclass(frozen=True, eq=False)
class Ref(Node):
    """Reference ``name(arg)`` to a scalar function of time; ``func`` once bound."""

    name: str
    arg: Node
    func: object = field(default=None)


# ---------------------------------------------------------------------------
# tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(src: str):
    pos = 0
    tokens = []
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            bad = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExpressionSyntaxError(f"unexpected character {src[bad]!r}", bad, src)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, refs: frozenset):
        self.src = src
        self.refs = refs
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value:
            found = "end of input" if kind == "end" else repr(text)
            raise ExpressionSyntaxError(f"expected {value!r}, found {found}", pos, self.src)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected token {text!r}", pos, self.src)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.exponent())
        return base

    def exponent(self):
        kind, text, pos = self.peek()
        if kind == "op" and text in ("-", "+"):
            raise ExpressionSyntaxError(
                "signed exponent must be parenthesised, e.g. t^(-3)", pos, self.src
            )
        base = self.primary()
        if self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.exponent())
        return base

    def primary(self):
        kind, text, pos = self.take()
        if kind == "num":
            return Num(Fraction(text))
        if kind == "name":
            if self.peek()[1] == "(":
                self.take()
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if text in self.refs:
                    if len(args) != 1:
                        raise ExpressionSyntaxError(
                            f"reference {text} takes exactly one argument", pos, self.src
                        )
                    return Ref(text, args[0])
                if text in BUILTINS:
                    if len(args) != BUILTINS[text]:
                        raise ExpressionSyntaxError(
                            f"{text} takes {BUILTINS[text]} argument(s), got {len(args)}", pos, self.src
                        )
                    return Call(text, tuple(args))
                raise UnknownFunction(f"unknown function {text!r} at position {pos}")
            return Var(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ExpressionSyntaxError(f"unexpected {found}", pos, self.src)


def parse_time_expression(src: str, refs: Sequence[str] = ()) -> Node:
    """Parse ``src``; names in ``refs`` are accepted as one-argument references."""
    if not isinstance(src, str):
        raise TypeError("expression source must be a string")
    return _Parser(src, frozenset(refs)).parse()


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    if isinstance(node, Num) and _num_is_compound(node.value):
        return 0
    return _PREC["atom"]


def _num_is_compound(value) -> bool:
    if isinstance(value, Fraction):
        return value < 0 or (value.denominator != 1 and _decimal(value) is None)
    return value < 0


def _decimal(q: Fraction) -> str | None:
    """Exact decimal spelling when the denominator is 2^a 5^b."""
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return None
    places = max(twos, fives)
    digits = str(abs(q.numerator) * 10**places // q.denominator).rjust(places + 1, "0")
    text = digits[:-places] + "." + digits[-places:]
    return ("-" if q < 0 else "") + text


def _fmt_num(value) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return _decimal(value) or f"{value.numerator}/{value.denominator}"
    if not math.isfinite(value):
        raise ValueError(f"cannot print non-finite literal {value!r}")
    return repr(float(value))


def to_string(node: Node) -> str:
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, (Var, Param)):
        return node.name
    if isinstance(node, Neg):
        inner = to_string(node.operand)
        if _prec(node.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        left, right = to_string(node.left), to_string(node.right)
        p = _PREC[node.op]
        if node.op == "^":
            if _prec(node.left) < _PREC["atom"]:
                left = f"({left})"
            if not (_prec(node.right) == _PREC["atom"] or (isinstance(node.right, BinOp) and node.right.op == "^")):
                right = f"({right})"
            return f"{left}^{right}"
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
        sep = f" {node.op} " if node.op in "+-" else node.op
        return f"{left}{sep}{right}"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_string(a) for a in node.args)})"
    if isinstance(node, Ref):
        return f"{node.name}({to_string(node.arg)})"
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# traversal helpers
# ---------------------------------------------------------------------------


def children(node: Node) -> tuple:
    if isinstance(node, Neg):
        return (node.operand,)
    if isinstance(node, BinOp):
        return (node.left, node.right)
    if isinstance(node, Call):
        return node.args
    if isinstance(node, Ref):
        return (node.arg,)
    return ()


def walk(node: Node):
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(children(n))


def free_variables(node: Node) -> set:
    return {n.name for n in walk(node) if isinstance(n, Var)}


def parameters_of(node: Node) -> dict:
    return {n.name: n.value for n in walk(node) if isinstance(n, Param)}


def references_of(node: Node) -> dict:
    return {n.name: n.func for n in walk(node) if isinstance(n, Ref)}


def depends_on(node: Node, var: str) -> bool:
    for n in walk(node):
        if isinstance(n, Var) and n.name == var:
            return True
    return False


def map_tree(node: Node, fn: Callable[[Node], Node | None]) -> Node:
    """Rebuild bottom-up; ``fn`` may return a replacement or None to keep."""
    if isinstance(node, Neg):
        node = Neg(map_tree(node.operand, fn))
    elif isinstance(node, BinOp):
        node = BinOp(node.op, map_tree(node.left, fn), map_tree(node.right, fn))
    elif isinstance(node, Call):
        node = Call(node.name, tuple(map_tree(a, fn) for a in node.args))
    elif isinstance(node, Ref):
        node = Ref(node.name, map_tree(node.arg, fn), node.func)
    out = fn(node)
    return node if out is None else out


def bind(node: Node, params: Mapping[str, object] | None = None,
         refs: Mapping[str, object] | None = None) -> Node:
    """Attach parameter values and reference targets to a parsed tree."""
    params = params or {}
    refs = refs or {}

    def fn(n):
        if isinstance(n, Var) and n.name in params:
            return Param(n.name, params[n.name])
        if isinstance(n, Ref) and n.func is None:
            if n.name not in refs:
                raise UnknownFunction(f"reference {n.name!r} is not bound")
            return Ref(n.name, n.arg, refs[n.name])
        return None

    return map_tree(node, fn)


def substitute(node: Node, var: str, replacement: Node) -> Node:
    return map_tree(node, lambda n: replacement if isinstance(n, Var) and n.name == var else None)


# ---------------------------------------------------------------------------
# simplifying constructors
# ---------------------------------------------------------------------------


def num(value) -> Num:
    if isinstance(value, int):
        value = Fraction(value)
    return Num(value)


def _const(node):
    return node.value if isinstance(node, Num) else None


def _is(node, value) -> bool:
    c = _const(node)
    return c is not None and c == value


def add(a: Node, b: Node) -> Node:
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None:
        return Num(ca + cb)
    if isinstance(b, Neg):
        return BinOp("-", a, b.operand)
    return BinOp("+", a, b)


def sub(a: Node, b: Node) -> Node:
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None:
        return Num(ca - cb)
    return BinOp("-", a, b)


def neg(a: Node) -> Node:
    c = _const(a)
    if c is not None:
        return Num(-c)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def mul(a: Node, b: Node) -> Node:
    if _is(a, 0) or _is(b, 0):
        return num(0)
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if _is(a, -1):
        return neg(b)
    if _is(b, -1):
        return neg(a)
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None:
        return Num(ca * cb)
    return BinOp("*", a, b)


def div(a: Node, b: Node) -> Node:
    if _is(b, 1):
        return a
    if _is(a, 0) and not _is(b, 0):
        return num(0)
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None and cb != 0:
        return Num(ca / cb if isinstance(ca, Fraction) and isinstance(cb, Fraction) else ca / cb)
    return BinOp("/", a, b)


def power(a: Node, b: Node) -> Node:
    if _is(b, 1):
        return a
    if _is(b, 0) or _is(a, 1):
        return num(1)
    return BinOp("^", a, b)


def call(name: str, *args: Node) -> Node:
    if name == "exp" and _is(args[0], 0):
        return num(1)
    if name == "log" and _is(args[0], 1):
        return num(0)
    return Call(name, tuple(args))


# ---------------------------------------------------------------------------
# symbolic differentiation
# ---------------------------------------------------------------------------


def diff(node: Node, var: str, ref_derivative: Callable[[Ref], Node] | None = None) -> Node:
    """d(node)/d(var).  References are differentiated through ``ref_derivative``,
    which receives a bound Ref and returns the node for its derivative at the
    same argument (only meaningful when ``var`` is time)."""

    def d(n):
        return diff(n, var, ref_derivative)

    if isinstance(node, (Num, Param)):
        return num(0)
    if isinstance(node, Var):
        return num(1 if node.name == var else 0)
    if isinstance(node, Neg):
        return neg(d(node.operand))
    if isinstance(node, BinOp):
        u, w = node.left, node.right
        if node.op == "+":
            return add(d(u), d(w))
        if node.op == "-":
            return sub(d(u), d(w))
        if node.op == "*":
            return add(mul(d(u), w), mul(u, d(w)))
        if node.op == "/":
            return div(sub(mul(d(u), w), mul(u, d(w))), power(w, num(2)))
        if node.op == "^":
            if not depends_on(w, var):
                return mul(mul(w, power(u, sub(w, num(1)))), d(u))
            return mul(node, add(mul(d(w), call("log", u)), div(mul(w, d(u)), u)))
    if isinstance(node, Call):
        if node.name == "hyp2f1":
            a, b, c, z = node.args
            if any(depends_on(p, var) for p in (a, b, c)):
                raise NotImplementedError("hyp2f1 parameters must not depend on the variable")
            dz = d(z)
            if _is(dz, 0):
                return num(0)
            shifted = call("hyp2f1", add(a, num(1)), add(b, num(1)), add(c, num(1)), z)
            return mul(mul(div(mul(a, b), c), shifted), dz)
        (u,) = node.args
        du = d(u)
        if _is(du, 0):
            return num(0)
        if node.name == "exp":
            return mul(node, du)
        if node.name == "log":
            return div(du, u)
        if node.name == "sin":
            return mul(call("cos", u), du)
        if node.name == "cos":
            return neg(mul(call("sin", u), du))
        if node.name == "tan":
            return mul(add(num(1), power(node, num(2))), du)
        if node.name == "sqrt":
            return div(du, mul(num(2), node))
        if node.name == "abs":
            return mul(div(u, node), du)
    if isinstance(node, Ref):
        du = d(node.arg)
        if _is(du, 0):
            return num(0)
        if ref_derivative is None:
            raise UnknownFunction(f"no derivative available for reference {node.name}")
        return mul(ref_derivative(node), du)
    raise TypeError(f"cannot differentiate {node!r}")


# ---------------------------------------------------------------------------
# floating-point evaluation (closure compilation)
# ---------------------------------------------------------------------------


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        raise DomainError(f"exp overflow at {x!r}") from None


def _log(x):
    if x <= 0:
        raise DomainError(f"log of non-positive value {x!r}")
    return math.log(x)


def _sqrt(x):
    if x < 0:
        raise DomainError(f"sqrt of negative value {x!r}")
    return math.sqrt(x)


def _pow(a, b):
    try:
        r = a**b
    except ZeroDivisionError:
        raise DomainError(f"0 raised to negative power {b!r}") from None
    except OverflowError:
        raise DomainError(f"overflow in {a!r}^{b!r}") from None
    if isinstance(r, complex):
        raise DomainError(f"negative base {a!r} with non-integer exponent {b!r}")
    return r


def _div(a, b):
    if b == 0:
        raise DomainError("division by zero")
    return a / b


def _tan(x):
    return math.tan(x)


def _hyp2f1(a, b, c, z):
    from ..catalog.hypergeom import gauss_2f1

    return gauss_2f1(a, b, c, z)


_FUNCS = {
    "exp": _exp,
    "log": _log,
    "sin": math.sin,
    "cos": math.cos,
    "tan": _tan,
    "sqrt": _sqrt,
    "abs": abs,
    "hyp2f1": _hyp2f1,
}


def compile_expr(node: Node, variables: Sequence[str]) -> Callable[[Sequence[float]], float]:
    """Build ``f(values) -> float`` with values ordered as ``variables``.

    Unbound names raise UnknownVariable at compile time; unbound references
    raise UnknownFunction.
    """
    index = {name: i for i, name in enumerate(variables)}

    def build(n):
        if isinstance(n, Num):
            v = float(n.value)
            return lambda vals: v
        if isinstance(n, Param):
            v = float(n.value)
            return lambda vals: v
        if isinstance(n, Var):
            if n.name not in index:
                raise UnknownVariable(f"unbound name {n.name!r}")
            i = index[n.name]
            return lambda vals: vals[i]
        if isinstance(n, Neg):
            f = build(n.operand)
            return lambda vals: -f(vals)
        if isinstance(n, BinOp):
            f, g = build(n.left), build(n.right)
            if n.op == "+":
                return lambda vals: f(vals) + g(vals)
            if n.op == "-":
                return lambda vals: f(vals) - g(vals)
            if n.op == "*":
                return lambda vals: f(vals) * g(vals)
            if n.op == "/":
                return lambda vals: _div(f(vals), g(vals))
            if isinstance(n.right, Num) and isinstance(n.right.value, Fraction) and n.right.value.denominator == 1:
                k = int(n.right.value)
                return lambda vals: _pow(f(vals), k)
            return lambda vals: _pow(f(vals), g(vals))
        if isinstance(n, Call):
            fn = _FUNCS[n.name]
            args = [build(a) for a in n.args]
            if len(args) == 1:
                (a0,) = args
                return lambda vals: fn(a0(vals))
            return lambda vals: fn(*[a(vals) for a in args])
        if isinstance(n, Ref):
            if n.func is None:
                raise UnknownFunction(f"reference {n.name!r} is not bound")
            target = n.func
            a = build(n.arg)
            return lambda vals: target(a(vals))
        raise TypeError(f"cannot compile {n!r}")

    return build(node)


# ---------------------------------------------------------------------------
# exact evaluation
# ---------------------------------------------------------------------------


def _exact_sqrt(q: Fraction) -> Fraction:
    if q < 0:
        raise DomainError("sqrt of negative value")
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    raise NotExact(f"sqrt({q}) is irrational")


def _exact_pow(a: Fraction, b: Fraction) -> Fraction:
    if b.denominator == 1:
        if a == 0 and b < 0:
            raise DomainError("0 raised to a negative power")
        return a ** int(b)
    if b.denominator == 2:
        return _exact_pow(_exact_sqrt(a), Fraction(b.numerator))
    if a == 1:
        return Fraction(1)
    raise NotExact(f"{a}^{b} is not known to be rational")


def eval_exact(node: Node, env: Mapping[str, object]) -> Fraction:
    """Evaluate with Fractions; raise NotExact as soon as a value may be irrational."""

    def ev(n):
        if isinstance(n, Num):
            if isinstance(n.value, Fraction):
                return n.value
            raise NotExact(f"float literal {n.value!r}")
        if isinstance(n, Param):
            if isinstance(n.value, (int, Fraction)):
                return Fraction(n.value)
            raise NotExact(f"parameter {n.name} is a float")
        if isinstance(n, Var):
            if n.name not in env:
                raise UnknownVariable(f"unbound name {n.name!r}")
            v = env[n.name]
            if isinstance(v, float):
                raise NotExact(f"{n.name} is a float")
            return Fraction(v)
        if isinstance(n, Neg):
            return -ev(n.operand)
        if isinstance(n, BinOp):
            a, b = ev(n.left), ev(n.right)
            if n.op == "+":
                return a + b
            if n.op == "-":
                return a - b
            if n.op == "*":
                return a * b
            if n.op == "/":
                if b == 0:
                    raise DomainError("division by zero")
                return a / b
            return _exact_pow(a, b)
        if isinstance(n, Call):
            if n.name == "hyp2f1":
                if ev(n.args[3]) == 0:
                    return Fraction(1)
                raise NotExact("hyp2f1 away from z=0")
            x = ev(n.args[0])
            if n.name == "exp" and x == 0:
                return Fraction(1)
            if n.name == "log" and x == 1:
                return Fraction(0)
            if n.name in ("sin", "tan") and x == 0:
                return Fraction(0)
            if n.name == "cos" and x == 0:
                return Fraction(1)
            if n.name == "sqrt":
                return _exact_sqrt(x)
            if n.name == "abs":
                return abs(x)
            raise NotExact(f"{n.name}({x}) is not known to be rational")
        if isinstance(n, Ref):
            if n.func is None:
                raise UnknownFunction(f"reference {n.name!r} is not bound")
            exact = getattr(n.func, "eval_exact", None)
            if exact is None:
                raise NotExact(f"reference {n.name} has no exact evaluation")
            return exact(ev(n.arg))
        raise TypeError(f"cannot evaluate {n!r}")

    return ev(node)


# ---------------------------------------------------------------------------
# conversion to exact rational functions (for field components)
# ---------------------------------------------------------------------------


def rational_function_from_source(src: str, variables: Sequence[str], params: Mapping[str, object]):
    """Parse a state-space expression into an exact RationalFunction.

    Only + - * / and integer powers are allowed; parameters must be rational.
    """
    from ..algebra import RationalFunction, as_fraction

    variables = tuple(variables)
    tree = parse_time_expression(src)

    def conv(n):
        if isinstance(n, Num):
            if not isinstance(n.value, Fraction):
                raise NotExact("float literal in a field component")
            return RationalFunction.constant(n.value, variables)
        if isinstance(n, Var):
            if n.name in variables:
                return RationalFunction.variable(n.name, variables)
            if n.name in params:
                return RationalFunction.constant(as_fraction(params[n.name]), variables)
            raise UnknownVariable(f"unbound name {n.name!r} in field component {src!r}")
        if isinstance(n, Neg):
            return -conv(n.operand)
        if isinstance(n, BinOp):
            if n.op == "^":
                k = eval_exact(bind(n.right, params), {})
                if k.denominator != 1:
                    raise NotExact(f"non-integer power in field component {src!r}")
                return conv(n.left) ** int(k)
            a, b = conv(n.left), conv(n.right)
            return {"+": a.__add__, "-": a.__sub__, "*": a.__mul__, "/": a.__truediv__}[n.op](b)
        raise NotExact(f"field components must be rational functions; got {to_string(n)!r}")

    return conv(tree)


def rational_function_to_source(f) -> str:
    """Inverse of :func:`rational_function_from_source` (exact coefficients)."""

    def poly(p):
        if p.is_zero():
            return "0"
        parts = []
        for e, c in sorted(p.terms.items(), reverse=True):
            coeff = str(c.numerator) if c.denominator == 1 else f"({c.numerator}/{c.denominator})"
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(p.variables, e) if k
            )
            if not mono:
                parts.append(coeff if c >= 0 else f"({coeff})")
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{coeff if c >= 0 else '(' + coeff + ')'}*{mono}")
        return " + ".join(parts)

    if f.den.is_constant():
        return poly(f.num)
    return f"({poly(f.num)})/({poly(f.den)})"
