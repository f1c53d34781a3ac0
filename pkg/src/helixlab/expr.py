"""Arithmetic expression language for fields, metrics, curves, and profiles.

Grammar (see docs/grammar.md for the full table)::

    expr   := term  (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

Variables are x, y, z, s, t; functions are sin, cos, tan, exp, log, sqrt,
abs, atan2; named constants pi and e. Additional constants can be bound at
parse time and are folded into the tree.

Expressions compile to a flat SSA tape (``Program``) evaluated by the active
kernel backend; ``eval_dual`` returns exact forward-mode first partials.
"""

from dataclasses import dataclass, field

import numpy as np

from .dual import DualNumber
from .errors import DomainError, ExprSyntaxError, UnknownIdentifier

VARIABLES = ("x", "y", "z", "s", "t")
FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "atan2")
NAMED_CONSTANTS = {"pi": np.pi, "e": np.e}

# opcode table; _core.pyx and _pure.py must agree with these numbers
OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_POW = 6
OP_POWI = 7
OP_NEG = 8
OP_SIN = 9
OP_COS = 10
OP_TAN = 11
OP_EXP = 12
OP_LOG = 13
OP_SQRT = 14
OP_ABS = 15
OP_ATAN2 = 16

_FUNC_OPS = {
    "sin": OP_SIN,
    "cos": OP_COS,
    "tan": OP_TAN,
    "exp": OP_EXP,
    "log": OP_LOG,
    "sqrt": OP_SQRT,
    "abs": OP_ABS,
    "atan2": OP_ATAN2,
}

# evaluation status codes shared by both kernel backends
STATUS_OK = 0
STATUS_DIV_ZERO = 1
STATUS_LOG_DOMAIN = 2
STATUS_SQRT_DOMAIN = 3
STATUS_POW_DOMAIN = 4
STATUS_ATAN2_ORIGIN = 5
STATUS_NON_FINITE = 6

STATUS_MESSAGES = {
    STATUS_DIV_ZERO: "division by zero",
    STATUS_LOG_DOMAIN: "log of a non-positive value",
    STATUS_SQRT_DOMAIN: "sqrt of a negative value",
    STATUS_POW_DOMAIN: "invalid power (negative base with non-integer exponent, "
    "or zero base with negative exponent)",
    STATUS_ATAN2_ORIGIN: "atan2 at the origin",
    STATUS_NON_FINITE: "non-finite value",
}


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Node:
    span: tuple


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    child: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str  # one of + - * / ^
    left: Node
    right: Node


@dataclass(frozen=True)
class Call(Node):
    func: str
    args: tuple


class Expr:
    """A parsed expression: AST plus source text and cached programs."""

    def __init__(self, root, source):
        self.root = root
        self.source = source
        self._programs = {}

    def __repr__(self):
        return f"Expr({self.source!r})"

    def to_source(self):
        return _print_node(self.root)

    @property
    def free_variables(self):
        out = set()
        _collect_vars(self.root, out)
        return out

    def program(self, var_names):
        """Compile (with caching) against an ordered variable slot list."""
        key = tuple(var_names)
        prog = self._programs.get(key)
        if prog is None:
            prog = compile_program(self, key)
            self._programs[key] = prog
        return prog


def _collect_vars(node, out):
    if isinstance(node, Var):
        out.add(node.name)
    elif isinstance(node, Neg):
        _collect_vars(node.child, out)
    elif isinstance(node, BinOp):
        _collect_vars(node.left, out)
        _collect_vars(node.right, out)
    elif isinstance(node, Call):
        for a in node.args:
            _collect_vars(a, out)


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _print_node(node, parent_prec=0):
    if isinstance(node, Num):
        if node.value < 0:
            text = repr(node.value)
            return f"({text})" if parent_prec > 0 else text
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = _print_node(node.child, _PRECEDENCE["neg"])
        text = f"-{inner}"
        return f"({text})" if parent_prec > _PRECEDENCE["neg"] else text
    if isinstance(node, BinOp):
        prec = _PRECEDENCE[node.op]
        # ^ is right-associative; the others left-associative
        lp = prec if node.op != "^" else prec + 1
        rp = prec + 1 if node.op != "^" else prec
        text = f"{_print_node(node.left, lp)} {node.op} {_print_node(node.right, rp)}"
        return f"({text})" if parent_prec > prec or (
            parent_prec == prec and node.op in "+-*/"
        ) else text
    if isinstance(node, Call):
        args = ", ".join(_print_node(a) for a in node.args)
        return f"{node.func}({args})"
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Lexer / parser

_TOK_NUM = "number"
_TOK_IDENT = "identifier"
_TOK_OP = "operator"
_TOK_LPAREN = "("
_TOK_RPAREN = ")"
_TOK_COMMA = ","
_TOK_EOF = "end of input"


def _tokenize(source):
    tokens = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n and (source[j].isdigit() or source[j] == "."):
                j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            try:
                value = float(text)
            except ValueError:
                raise ExprSyntaxError(f"bad number literal '{text}'", i) from None
            tokens.append((_TOK_NUM, value, i, j))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append((_TOK_IDENT, source[i:j], i, j))
            i = j
            continue
        if c in "+-*/^":
            tokens.append((_TOK_OP, c, i, i + 1))
            i += 1
            continue
        if c == "(":
            tokens.append((_TOK_LPAREN, c, i, i + 1))
            i += 1
            continue
        if c == ")":
            tokens.append((_TOK_RPAREN, c, i, i + 1))
            i += 1
            continue
        if c == ",":
            tokens.append((_TOK_COMMA, c, i, i + 1))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character '{c}'", i)
    tokens.append((_TOK_EOF, None, n, n))
    return tokens


class _Parser:
    def __init__(self, source, constants):
        self.source = source
        self.tokens = _tokenize(source)
        self.pos = 0
        self.constants = constants

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, what):
        tok = self.peek()
        if tok[0] != kind:
            raise ExprSyntaxError(
                f"unexpected {tok[0]}" + (f" '{tok[1]}'" if tok[1] is not None else ""),
                tok[2],
                expected=what,
            )
        return self.advance()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != _TOK_EOF:
            raise ExprSyntaxError(
                f"unexpected {tok[0]} '{tok[1]}'", tok[2], expected="end of input"
            )
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == _TOK_OP and self.peek()[1] in "+-":
            op = self.advance()[1]
            right = self.term()
            node = BinOp((node.span[0], right.span[1]), op, node, right)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == _TOK_OP and self.peek()[1] in "*/":
            op = self.advance()[1]
            right = self.unary()
            node = BinOp((node.span[0], right.span[1]), op, node, right)
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == _TOK_OP and tok[1] == "-":
            self.advance()
            child = self.unary()
            return Neg((tok[2], child.span[1]), child)
        if tok[0] == _TOK_OP:
            raise ExprSyntaxError(
                f"unexpected operator '{tok[1]}'", tok[2], expected="a value"
            )
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == _TOK_OP and tok[1] == "^":
            self.advance()
            expo = self.unary()  # right-associative, allows 2^-3
            return BinOp((base.span[0], expo.span[1]), "^", base, expo)
        return base

    def atom(self):
        tok = self.peek()
        if tok[0] == _TOK_NUM:
            self.advance()
            return Num((tok[2], tok[3]), tok[1])
        if tok[0] == _TOK_IDENT:
            self.advance()
            name = tok[1]
            if self.peek()[0] == _TOK_LPAREN:
                if name not in FUNCTIONS:
                    raise UnknownIdentifier(name, tok[2])
                self.advance()
                args = [self.expr()]
                while self.peek()[0] == _TOK_COMMA:
                    self.advance()
                    args.append(self.expr())
                close = self.expect(_TOK_RPAREN, "')'")
                nargs = 2 if name == "atan2" else 1
                if len(args) != nargs:
                    raise ExprSyntaxError(
                        f"{name} takes {nargs} argument(s), got {len(args)}", tok[2]
                    )
                return Call((tok[2], close[3]), name, tuple(args))
            if name in VARIABLES:
                return Var((tok[2], tok[3]), name)
            if name in self.constants:
                return Num((tok[2], tok[3]), float(self.constants[name]))
            if name in NAMED_CONSTANTS:
                return Num((tok[2], tok[3]), NAMED_CONSTANTS[name])
            raise UnknownIdentifier(name, tok[2])
        if tok[0] == _TOK_LPAREN:
            self.advance()
            node = self.expr()
            self.expect(_TOK_RPAREN, "')'")
            return node
        raise ExprSyntaxError(
            f"unexpected {tok[0]}" + (f" '{tok[1]}'" if tok[1] is not None else ""),
            tok[2],
            expected="a value",
        )


def parse(source, constants=None):
    """Parse source text into an Expr.

    ``constants`` maps extra identifier names to numeric values; they are
    folded into the tree at parse time.
    """
    parser = _Parser(source, dict(constants or {}))
    return Expr(parser.parse(), source)


# ---------------------------------------------------------------------------
# Tape compilation


@dataclass
class Program:
    """Flat SSA tape over float64 registers, one register per instruction."""

    ops: np.ndarray  # int32 (n,)
    arg1: np.ndarray  # int32 (n,): register/const/var index
    arg2: np.ndarray  # int32 (n,): register index, integer exponent, or -1
    consts: np.ndarray  # float64 const pool
    spans: list  # per-instruction source span
    var_names: tuple
    source: str

    @property
    def n_instructions(self):
        return len(self.ops)

    @property
    def is_constant(self):
        return not np.any(self.ops == OP_VAR)

    def subexpr(self, instr):
        lo, hi = self.spans[instr]
        return self.source[lo:hi]


class _Emitter:
    def __init__(self, var_names, source):
        self.ops = []
        self.arg1 = []
        self.arg2 = []
        self.consts = []
        self.spans = []
        self.var_names = tuple(var_names)
        self.source = source
        self._const_ids = {}

    def emit(self, op, a, b, span):
        self.ops.append(op)
        self.arg1.append(a)
        self.arg2.append(b)
        self.spans.append(span)
        return len(self.ops) - 1

    def const(self, value, span):
        key = np.float64(value).tobytes()
        idx = self._const_ids.get(key)
        if idx is None:
            idx = len(self.consts)
            self.consts.append(float(value))
            self._const_ids[key] = idx
        return self.emit(OP_CONST, idx, -1, span)


_FOLDABLE_UNARY = {
    OP_NEG: lambda v: -v,
    OP_SIN: np.sin,
    OP_COS: np.cos,
    OP_TAN: np.tan,
    OP_EXP: np.exp,
    OP_ABS: np.abs,
}


def _fold_unary(op, value, span, source):
    # constant folding mirrors runtime domain rules
    if op == OP_LOG:
        if value <= 0:
            raise DomainError(STATUS_MESSAGES[STATUS_LOG_DOMAIN],
                              subexpr=source[span[0]:span[1]], offset=span[0])
        return float(np.log(value))
    if op == OP_SQRT:
        if value < 0:
            raise DomainError(STATUS_MESSAGES[STATUS_SQRT_DOMAIN],
                              subexpr=source[span[0]:span[1]], offset=span[0])
        return float(np.sqrt(value))
    return float(_FOLDABLE_UNARY[op](value))


def _compile_node(node, em):
    """Return ('c', value) for constant subtrees or ('r', register index)."""
    if isinstance(node, Num):
        return ("c", float(node.value))
    if isinstance(node, Var):
        try:
            slot = em.var_names.index(node.name)
        except ValueError:
            raise UnknownIdentifier(node.name, node.span[0]) from None
        return ("r", em.emit(OP_VAR, slot, -1, node.span))
    if isinstance(node, Neg):
        kind, val = _compile_node(node.child, em)
        if kind == "c":
            return ("c", -val)
        return ("r", em.emit(OP_NEG, val, -1, node.span))
    if isinstance(node, BinOp):
        lk, lv = _compile_node(node.left, em)
        rk, rv = _compile_node(node.right, em)
        if lk == "c" and rk == "c":
            return ("c", _fold_binary(node, lv, rv, em.source))
        # integer-constant exponents get the specialized opcode
        if node.op == "^" and rk == "c" and float(rv).is_integer() and abs(rv) < 2**30:
            if lk == "c":  # unreachable (handled above) but keep the shape clear
                lv = em.const(lv, node.left.span)
            return ("r", em.emit(OP_POWI, lv, int(rv), node.span))
        if lk == "c":
            lv = em.const(lv, node.left.span)
        if rk == "c":
            rv = em.const(rv, node.right.span)
        opcode = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV, "^": OP_POW}[
            node.op
        ]
        return ("r", em.emit(opcode, lv, rv, node.span))
    if isinstance(node, Call):
        if node.func == "atan2":
            yk, yv = _compile_node(node.args[0], em)
            xk, xv = _compile_node(node.args[1], em)
            if yk == "c" and xk == "c":
                if yv == 0.0 and xv == 0.0:
                    raise DomainError(
                        STATUS_MESSAGES[STATUS_ATAN2_ORIGIN],
                        subexpr=em.source[node.span[0]:node.span[1]],
                        offset=node.span[0],
                    )
                return ("c", float(np.arctan2(yv, xv)))
            if yk == "c":
                yv = em.const(yv, node.args[0].span)
            if xk == "c":
                xv = em.const(xv, node.args[1].span)
            return ("r", em.emit(OP_ATAN2, yv, xv, node.span))
        kind, val = _compile_node(node.args[0], em)
        opcode = _FUNC_OPS[node.func]
        if kind == "c":
            return ("c", _fold_unary(opcode, val, node.span, em.source))
        return ("r", em.emit(opcode, val, -1, node.span))
    raise TypeError(f"unknown node {node!r}")


def _fold_binary(node, lv, rv, source):
    sub = source[node.span[0]:node.span[1]]
    off = node.span[0]
    if node.op == "+":
        return lv + rv
    if node.op == "-":
        return lv - rv
    if node.op == "*":
        return lv * rv
    if node.op == "/":
        if rv == 0.0:
            raise DomainError(STATUS_MESSAGES[STATUS_DIV_ZERO], subexpr=sub, offset=off)
        return lv / rv
    # '^'
    if lv < 0.0 and not float(rv).is_integer():
        raise DomainError(STATUS_MESSAGES[STATUS_POW_DOMAIN], subexpr=sub, offset=off)
    if lv == 0.0 and rv < 0.0:
        raise DomainError(STATUS_MESSAGES[STATUS_POW_DOMAIN], subexpr=sub, offset=off)
    return float(np.power(lv, rv))


def compile_program(expr, var_names):
    """Lower an Expr to a Program with variable slots ordered as given."""
    for name in expr.free_variables:
        if name not in var_names:
            raise UnknownIdentifier(name, 0)
    em = _Emitter(var_names, expr.source)
    kind, val = _compile_node(expr.root, em)
    if kind == "c":
        em.const(val, expr.root.span)
    return Program(
        ops=np.asarray(em.ops, dtype=np.int32),
        arg1=np.asarray(em.arg1, dtype=np.int32),
        arg2=np.asarray(em.arg2, dtype=np.int32),
        consts=np.asarray(em.consts, dtype=np.float64),
        spans=em.spans,
        var_names=tuple(var_names),
        source=expr.source,
    )


# ---------------------------------------------------------------------------
# Evaluation front ends (dispatch through the active backend)


def raise_status(program, status, instr, point):
    """Convert a kernel status tuple into a DomainError."""
    if status == STATUS_OK:
        return
    if 0 <= instr < program.n_instructions:
        sub = program.subexpr(instr)
        off = program.spans[instr][0]
    else:
        sub, off = program.source, 0
    raise DomainError(
        STATUS_MESSAGES.get(status, f"evaluation error {status}"),
        subexpr=sub,
        offset=off,
        bad_index=point if point >= 0 else None,
    )


def eval_values(program, points):
    """Evaluate a program at points (npts, nvars) -> (npts,)."""
    from . import backend

    return backend.eval_values(program, points)


def eval_grad(program, points, seeds):
    """Values plus 3-slot first derivatives; seeds is (nvars, 3)."""
    from . import backend

    return backend.eval_grad(program, points, seeds)


def eval_jet2(program, points, seed):
    """Values plus first and second derivatives along one direction."""
    from . import backend

    return backend.eval_jet2(program, points, seed)


def evaluate(expr, **bindings):
    """Evaluate an Expr at a single point given by keyword bindings."""
    names = tuple(sorted(expr.free_variables))
    prog = expr.program(names)
    pt = np.array([[float(bindings[n]) for n in names]], dtype=float)
    return float(eval_values(prog, pt)[0])


def eval_dual(expr, bindings, active):
    """Evaluate with exact first partials w.r.t. the active variables.

    Returns a DualNumber whose partial slots follow the order of ``active``
    (at most three names).
    """
    active = tuple(active)
    if len(active) > 3:
        raise ValueError("at most three active variables")
    names = tuple(sorted(set(expr.free_variables) | set(active)))
    prog = expr.program(names)
    pt = np.array([[float(bindings[n]) for n in names]], dtype=float)
    seeds = np.zeros((len(names), 3))
    for k, a in enumerate(active):
        seeds[names.index(a), k] = 1.0
    vals, grads = eval_grad(prog, pt, seeds)
    partials = np.zeros(3)
    partials[: len(active)] = grads[0, : len(active)]
    return DualNumber(float(vals[0]), partials)
