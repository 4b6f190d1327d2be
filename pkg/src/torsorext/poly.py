"""Sparse multivariate polynomials over k[pi, ...].

The discrete valuation ring R = k[pi]_(pi) is never represented directly:
every ring in the library is a polynomial ring over the coefficient field in
which the uniformizer is an ordinary (always smallest) variable.  Inverted
determinants are adjoined variables with explicit relations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import chain
from typing import Iterable, Mapping

from .errors import (
    ExponentOverflow,
    PolySyntaxError,
    RegistryMismatch,
    UnknownVariable,
    ZeroPolynomial,
)
from .scalars import FieldDescriptor, Scalar

MAX_EXPONENT = 2**16

# descending precedence of roles in the default variable order
ROLE_PRIORITY = {
    "aux": 0,
    "torsor": 1,
    "det_torsor": 2,
    "det_group": 3,
    "group": 4,
    "base": 5,
    "uniformizer": 6,
}

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Role:
    """What a variable stands for.

    ``i, j`` index matrix entries (1-based); ``copy`` distinguishes the
    blocks of a tensor ring (``""`` for the plain ring).
    """

    kind: str
    i: int = 0
    j: int = 0
    copy: str = ""

    def __post_init__(self):
        if self.kind not in ROLE_PRIORITY:
            raise ValueError(f"unknown role {self.kind!r}")


UNIFORMIZER = Role("uniformizer")


class VariableRegistry:
    """An ordered set of named variables over a coefficient field.

    Variables are kept sorted by role priority (stable with respect to the
    order given), so the uniformizer is always the last and smallest variable.
    """

    def __init__(self, field: FieldDescriptor, variables: Iterable[tuple[str, Role]]):
        variables = list(variables)
        order = sorted(range(len(variables)), key=lambda k: (ROLE_PRIORITY[variables[k][1].kind], k))
        variables = [variables[k] for k in order]
        names = [n for n, _ in variables]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for n in names:
            if not NAME_RE.match(n):
                raise ValueError(f"invalid variable name {n!r}")
        unis = [n for n, r in variables if r.kind == "uniformizer"]
        if len(unis) != 1:
            raise ValueError("a registry needs exactly one uniformizer")
        self.field = field
        self.names = tuple(names)
        self.roles = tuple(r for _, r in variables)
        self.index = {n: k for k, n in enumerate(self.names)}
        self.pi = self.index[unis[0]]
        self.nvars = len(self.names)
        self._check_blocks()
        self._key = (field, self.names, self.roles)
        self._hash = hash(self._key)

    def _check_blocks(self):
        blocks = {}
        for r in self.roles:
            if r.kind in ("group", "torsor"):
                blocks.setdefault((r.kind, r.copy), set()).add((r.i, r.j))
        for (kind, copy), entries in blocks.items():
            d = max(max(i, j) for i, j in entries)
            if entries != {(i, j) for i in range(1, d + 1) for j in range(1, d + 1)}:
                raise ValueError(f"incomplete {kind} block {copy!r}")

    @classmethod
    def simple(cls, field: FieldDescriptor, names: Iterable[str], uniformizer: str = "pi",
               kind: str = "base") -> "VariableRegistry":
        names = [n for n in names if n != uniformizer]
        return cls(field, [(n, Role(kind)) for n in names] + [(uniformizer, UNIFORMIZER)])

    def __eq__(self, other):
        return isinstance(other, VariableRegistry) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"VariableRegistry({self.field}, {list(self.names)})"

    def __contains__(self, name):
        return name in self.index

    @property
    def uniformizer(self) -> str:
        return self.names[self.pi]

    def indices(self, kind: str, copy: str | None = None) -> list[int]:
        return [k for k, r in enumerate(self.roles)
                if r.kind == kind and (copy is None or r.copy == copy)]

    def names_of(self, kind: str, copy: str | None = None) -> list[str]:
        return [self.names[k] for k in self.indices(kind, copy)]

    def matrix_names(self, kind: str, copy: str = "") -> list[list[str]]:
        """d x d grid of the names of a group/torsor entry block."""
        cells = {(r.i, r.j): self.names[k] for k, r in enumerate(self.roles)
                 if r.kind == kind and r.copy == copy}
        if not cells:
            raise KeyError(f"no {kind} block {copy!r}")
        d = max(i for i, _ in cells)
        return [[cells[i, j] for j in range(1, d + 1)] for i in range(1, d + 1)]

    def role_of(self, name: str) -> Role:
        return self.roles[self.index[name]]

    def extended(self, variables: Iterable[tuple[str, Role]]) -> "VariableRegistry":
        return VariableRegistry(self.field, chain(zip(self.names, self.roles), variables))

    def without(self, names: Iterable[str]) -> "VariableRegistry":
        drop = set(names)
        return VariableRegistry(self.field, [(n, r) for n, r in zip(self.names, self.roles) if n not in drop])

    def var(self, name: str) -> "MultiPoly":
        if name not in self.index:
            raise UnknownVariable(name)
        e = [0] * self.nvars
        e[self.index[name]] = 1
        return MultiPoly(self, {tuple(e): self.field.one()})

    def gens(self) -> list["MultiPoly"]:
        return [self.var(n) for n in self.names]

    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    def const(self, c) -> "MultiPoly":
        c = self.field.coerce(c)
        return MultiPoly(self, {(0,) * self.nvars: c} if c else {})

    def pi_power(self, m: int) -> "MultiPoly":
        e = [0] * self.nvars
        e[self.pi] = m
        return MultiPoly(self, {tuple(e): self.field.one()})

    def parse(self, text: str) -> "MultiPoly":
        return poly_parse(text, self)


def grevlex_key(m):
    """Sort key: ascending key means descending grevlex monomial."""
    return (-sum(m), m[::-1])


class MultiPoly:
    """Immutable sparse polynomial: a dict {exponent tuple: raw coefficient}."""

    __slots__ = ("registry", "coeffs", "_hash")

    def __init__(self, registry: VariableRegistry, coeffs: Mapping | None = None, *, _trusted=False):
        self.registry = registry
        if _trusted:
            self.coeffs = coeffs
        else:
            F = registry.field
            out = {}
            for m, c in (coeffs or {}).items():
                m = tuple(m)
                if len(m) != registry.nvars:
                    raise ValueError("monomial length does not match registry")
                c = F.coerce(c)
                if c:
                    out[m] = c
            self.coeffs = out
        self._hash = None

    # -- basic protocol

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.registry == other.registry and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, Scalar)):
            return self == self.registry.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.registry, frozenset(self.coeffs.items())))
        return self._hash

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        return poly_print(self)

    @property
    def field(self):
        return self.registry.field

    def is_zero(self):
        return not self.coeffs

    def terms(self):
        """(monomial, coefficient) pairs in descending grevlex order."""
        return sorted(self.coeffs.items(), key=lambda mc: grevlex_key(mc[0]))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.coeffs), default=-1)

    def degree_in(self, indices) -> int:
        return max((sum(m[k] for k in indices) for m in self.coeffs), default=-1)

    def variables(self) -> set[str]:
        used = set()
        for m in self.coeffs:
            used.update(self.registry.names[k] for k, e in enumerate(m) if e)
        return used

    def constant_term(self):
        return self.coeffs.get((0,) * self.registry.nvars, self.field.zero())

    # -- arithmetic

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.registry != self.registry:
                raise RegistryMismatch(f"{self.registry} vs {other.registry}")
            return other
        if isinstance(other, (int, Fraction, Scalar)):
            return self.registry.const(other)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._lift(other)
        F = self.field
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            v = F.norm(out.get(m, 0) + c)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return MultiPoly(self.registry, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return MultiPoly(self.registry, {m: F.norm(-c) for m, c in self.coeffs.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(self.field.coerce(other))
        other = self._lift(other)
        F = self.field
        out = {}
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        for m1, c1 in b.items():
            for m2, c2 in a.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                v = out.get(m, 0) + c1 * c2
                out[m] = v
        res = {}
        for m, v in out.items():
            v = F.norm(v)
            if v:
                if max(m, default=0) > MAX_EXPONENT:
                    raise ExponentOverflow(f"exponent above {MAX_EXPONENT}")
                res[m] = v
        return MultiPoly(self.registry, res, _trusted=True)

    __rmul__ = __mul__

    def scale(self, c) -> "MultiPoly":
        F = self.field
        if not c:
            return MultiPoly(self.registry, {}, _trusted=True)
        return MultiPoly(self.registry, {m: F.norm(v * c) for m, v in self.coeffs.items()}, _trusted=True)

    def mul_monomial(self, mono, c=None) -> "MultiPoly":
        F = self.field
        out = {}
        for m, v in self.coeffs.items():
            nm = tuple(x + y for x, y in zip(m, mono))
            out[nm] = v if c is None else F.norm(v * c)
        return MultiPoly(self.registry, out, _trusted=True)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        if n * max(max(m, default=0) for m in self.coeffs or [()]) > MAX_EXPONENT:
            raise ExponentOverflow(f"exponent above {MAX_EXPONENT}")
        result = self.registry.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def monic(self) -> "MultiPoly":
        if not self.coeffs:
            return self
        lc = self.terms()[0][1]
        return self.scale(self.field.inv(lc))

    def embed(self, target: VariableRegistry, rename: Mapping[str, str] | None = None) -> "MultiPoly":
        """Move into another registry by variable name (optionally renamed)."""
        rename = rename or {}
        if target.field != self.field:
            raise RegistryMismatch("field differs")
        pos = []
        for k, n in enumerate(self.registry.names):
            tn = rename.get(n, n)
            pos.append(target.index.get(tn))
        out = {}
        for m, c in self.coeffs.items():
            e = [0] * target.nvars
            for k, x in enumerate(m):
                if x:
                    if pos[k] is None:
                        raise UnknownVariable(f"{self.registry.names[k]} not in target registry")
                    e[pos[k]] += x
            out[tuple(e)] = c
        return MultiPoly(target, out, _trusted=True)


@dataclass(frozen=True)
class RingMap:
    """k-algebra map sending each source variable to a target polynomial.

    Source variables missing from ``images`` go to the same-named target
    variable; the uniformizer must be fixed (all maps are R-algebra maps).
    """

    source: VariableRegistry
    target: VariableRegistry
    images: tuple

    @classmethod
    def build(cls, source, target, images: Mapping[str, "MultiPoly | str"] | None = None) -> "RingMap":
        images = dict(images or {})
        out = []
        for n in source.names:
            img = images.pop(n, None)
            if img is None:
                if n not in target.index:
                    raise UnknownVariable(f"no image for {n}")
                img = target.var(n)
            elif isinstance(img, str):
                img = poly_parse(img, target)
            elif isinstance(img, MultiPoly) and img.registry != target:
                raise RegistryMismatch(f"image of {n} not in target ring")
            out.append(img)
        if images:
            raise UnknownVariable(f"{sorted(images)} not in source registry")
        return cls(source, target, tuple(out))

    def image(self, name: str) -> MultiPoly:
        return self.images[self.source.index[name]]

    def __call__(self, f: MultiPoly) -> MultiPoly:
        return apply_map(f, self)

    def compose(self, first: "RingMap") -> "RingMap":
        """``self ∘ first``: apply ``first`` then ``self``."""
        if first.target != self.source:
            raise RegistryMismatch("maps do not compose")
        return RingMap(first.source, self.target, tuple(apply_map(g, self) for g in first.images))

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            img == self.target.var(n) for n, img in zip(self.source.names, self.images))

    def describe(self) -> str:
        parts = [f"{n} -> {img}" for n, img in zip(self.source.names, self.images)
                 if not (n in self.target.index and img == self.target.var(n))]
        return ", ".join(parts) if parts else "identity"


def identity_map(registry: VariableRegistry) -> RingMap:
    return RingMap.build(registry, registry)


# ---------------------------------------------------------------- operations

def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    if a.registry != b.registry:
        raise RegistryMismatch(f"{a.registry} vs {b.registry}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def apply_map(f: MultiPoly, m: RingMap) -> MultiPoly:
    if f.registry != m.source:
        raise RegistryMismatch("polynomial is not in the map's source ring")
    target = m.target
    F = target.field
    powers: dict[tuple[int, int], MultiPoly] = {}

    def power(k, e):
        key = (k, e)
        if key not in powers:
            powers[key] = m.images[k] ** e
        return powers[key]

    acc: dict = {}
    for mono, c in f.coeffs.items():
        term = None
        for k, e in enumerate(mono):
            if e:
                p = power(k, e)
                term = p if term is None else term * p
                if not term:
                    break
        if term is None:
            term = target.const(1)
        for tm, tc in term.coeffs.items():
            acc[tm] = acc.get(tm, 0) + tc * c
    out = {}
    for tm, v in acc.items():
        v = F.norm(v)
        if v:
            out[tm] = v
    return MultiPoly(target, out, _trusted=True)


def specialize(f: MultiPoly, indices) -> MultiPoly:
    """Set the variables at ``indices`` to zero."""
    idx = list(indices)
    return MultiPoly(f.registry, {m: c for m, c in f.coeffs.items() if not any(m[k] for k in idx)},
                     _trusted=True)


def specialize_origin(f: MultiPoly) -> MultiPoly:
    return specialize(f, f.registry.indices("base"))


def reduce_mod_t(f: MultiPoly) -> MultiPoly:
    return specialize(f, [f.registry.pi])


def t_content(f: MultiPoly) -> int:
    if not f.coeffs:
        raise ZeroPolynomial("content of the zero polynomial")
    k = f.registry.pi
    return min(m[k] for m in f.coeffs)


def primitivize(f: MultiPoly) -> tuple[MultiPoly, int]:
    c = t_content(f)
    if c == 0:
        return f, 0
    return divide_by_pi(f, c), c


def divide_by_pi(f: MultiPoly, c: int) -> MultiPoly:
    k = f.registry.pi
    out = {}
    for m, v in f.coeffs.items():
        if m[k] < c:
            raise ValueError(f"pi^{c} does not divide the polynomial")
        m = list(m)
        m[k] -= c
        out[tuple(m)] = v
    return MultiPoly(f.registry, out, _trusted=True)


def scale_variables(f: MultiPoly, names, e: int) -> MultiPoly:
    """Substitute v -> pi^e * v for each named variable (e may be negative).

    For negative ``e`` the result is multiplied by the smallest power of pi
    making it a polynomial, then made primitive.
    """
    reg = f.registry
    idx = [reg.index[n] for n in names]
    k = reg.pi
    out = {}
    for m, c in f.coeffs.items():
        m = list(m)
        m[k] += e * sum(m[j] for j in idx)
        out[tuple(m)] = c
    if e < 0 and out:
        low = min(m[k] for m in out)
        if low < 0:
            out = {m[:k] + (m[k] - low,) + m[k + 1:]: c for m, c in out.items()}
    return MultiPoly(reg, out, _trusted=True)


def determinant(matrix: list[list[MultiPoly]]) -> MultiPoly:
    """Leibniz/Laplace expansion; fine for the d <= 4 used here."""
    d = len(matrix)
    if d == 1:
        return matrix[0][0]
    total = None
    for j in range(d):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * determinant(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def adjugate(matrix: list[list[MultiPoly]]) -> list[list[MultiPoly]]:
    """adj(M)[i][j] = (-1)^(i+j) * minor(j, i); integer coefficients."""
    d = len(matrix)
    reg = matrix[0][0].registry
    if d == 1:
        return [[reg.const(1)]]
    adj = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            minor = [row[:i] + row[i + 1:] for k, row in enumerate(matrix) if k != j]
            c = determinant(minor)
            adj[i][j] = -c if (i + j) % 2 else c
    return adj


def matmul(a, b):
    d = len(a)
    n = len(b[0])
    return [[sum((a[i][r] * b[r][j] for r in range(1, len(b))), a[i][0] * b[0][j])
             for j in range(n)] for i in range(d)]


# ---------------------------------------------------------------- printing

def _format_monomial(reg: VariableRegistry, m) -> str:
    # uniformizer printed first: pi*x^2 rather than x^2*pi
    parts = []
    for k in [reg.pi] + [k for k in range(reg.nvars) if k != reg.pi]:
        e = m[k]
        if e == 1:
            parts.append(reg.names[k])
        elif e:
            parts.append(f"{reg.names[k]}^{e}")
    return "*".join(parts)


def poly_print(f: MultiPoly) -> str:
    if not f.coeffs:
        return "0"
    F = f.field
    out = []
    for idx, (m, c) in enumerate(f.terms()):
        neg, mag = F.signed(c)
        mono = _format_monomial(f.registry, m)
        mag_s = F.format(mag)
        if mono:
            body = mono if mag_s == "1" else f"{mag_s}*{mono}"
        else:
            body = mag_s
        if idx == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


class _Parser:
    """expr := ['+'|'-'] term (('+'|'-') term)*;  term := factor ('*' factor)*;
    factor := coeff | var ['^' nat] | '(' expr ')' ['^' nat];  coeff := int ['/' int]
    """

    def __init__(self, text: str, reg: VariableRegistry):
        self.text = text
        self.reg = reg
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            mt = _TOKEN_RE.match(text, pos)
            if not mt or mt.end() == pos:
                raise PolySyntaxError(f"unexpected character {text[pos]!r}", text, pos)
            kind = mt.lastgroup
            self.tokens.append((kind, mt.group(kind), mt.start(kind)))
            pos = mt.end()
        self.tokens.append(("end", "", len(text)))
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def take(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise PolySyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", self.text, pos)

    def parse(self) -> MultiPoly:
        if self.peek()[0] == "end":
            raise PolySyntaxError("empty expression", self.text, 0)
        f = self.expression()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolySyntaxError(f"unexpected {val!r}", self.text, pos)
        return f

    def expression(self):
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def natural(self):
        kind, val, pos = self.take()
        if kind != "num":
            raise PolySyntaxError("expected a natural exponent", self.text, pos)
        e = int(val)
        if e > MAX_EXPONENT:
            raise ExponentOverflow(f"exponent {e} above {MAX_EXPONENT}")
        return e

    def factor(self):
        kind, val, pos = self.take()
        if kind == "num":
            n = int(val)
            if self.peek()[1] == "/" and self.peek()[0] == "op":
                _, _, spos = self.take()
                if self.reg.field.is_prime_field:
                    raise PolySyntaxError("fractions are only allowed over Q", self.text, spos)
                dkind, dval, dpos = self.take()
                if dkind != "num":
                    raise PolySyntaxError("expected a denominator", self.text, dpos)
                if int(dval) == 0:
                    raise PolySyntaxError("zero denominator", self.text, dpos)
                return self.reg.const(Fraction(n, int(dval)))
            return self.reg.const(n)
        if kind == "name":
            if val not in self.reg.index:
                raise UnknownVariable(f"unknown variable {val!r} at position {pos}")
            v = self.reg.var(val)
            if self.peek()[1] == "^":
                self.take()
                return v ** self.natural()
            return v
        if val == "(":
            inner = self.expression()
            self.expect(")")
            if self.peek()[1] == "^":
                self.take()
                return inner ** self.natural()
            return inner
        raise PolySyntaxError(f"unexpected {val or 'end of input'!r}", self.text, pos)


def poly_parse(text: str, registry: VariableRegistry) -> MultiPoly:
    return _Parser(text, registry).parse()
