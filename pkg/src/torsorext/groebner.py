"""Buchberger-based ideal engine over k[pi, ...].

Plain Buchberger with the coprime and chain criteria; reduced bases are cached
per (ideal, order).  Saturation by the uniformizer uses the Rabinowitsch
construction I + (1 - w*pi) followed by elimination of w.
"""

from __future__ import annotations

import heapq
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import RegistryMismatch, ResourceLimit
from .poly import MultiPoly, RingMap, Role, VariableRegistry, grevlex_key, primitivize


@dataclass
class ResourceCaps:
    max_basis: int = 5000
    max_degree: int = 200


DEFAULT_CAPS = ResourceCaps()

SAT_VAR = "w_sat"


@dataclass(frozen=True)
class MonomialOrder:
    """grevlex, lex, or a block order eliminating ``eliminated`` (indices).

    Within every order, variables earlier in the registry are larger.
    """

    kind: str = "grevlex"
    eliminated: tuple = ()
    nvars: int = 0

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown order {self.kind!r}")
        if self.kind == "block":
            elim = tuple(sorted(self.eliminated))
            rest = tuple(k for k in range(self.nvars) if k not in set(elim))
            object.__setattr__(self, "eliminated", elim)
            object.__setattr__(self, "_rest", rest)

    @classmethod
    def block(cls, registry: VariableRegistry, names: Iterable[str]) -> "MonomialOrder":
        return cls("block", tuple(registry.index[n] for n in names), registry.nvars)

    def key(self):
        if self.kind == "grevlex":
            return grevlex_key
        if self.kind == "lex":
            return lex_key
        elim, rest = self.eliminated, self._rest

        def block_key(m):
            a = tuple(m[k] for k in elim)
            b = tuple(m[k] for k in rest)
            return (-sum(a), a[::-1], -sum(b), b[::-1])

        return block_key


def lex_key(m):
    return tuple(-x for x in m)


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


# ---------------------------------------------------------------- core engine
#
# Inside the engine a polynomial is (lm, dict) with the dict monic at lm.

def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a, b):
    return not any(x and y for x, y in zip(a, b))


class _Basis:
    def __init__(self, F, key):
        self.F = F
        self.key = key
        self.polys = []  # list of (lm, dict)
        self.masks = []

    @staticmethod
    def mask(m):
        bits = 0
        for k, e in enumerate(m):
            if e:
                bits |= 1 << k
        return bits

    def reduce(self, f: dict) -> dict:
        """Full normal form of ``f`` against the current polynomials."""
        F, key = self.F, self.key
        norm = F.norm
        p = dict(f)
        heap = [(key(m), m) for m in p]
        heapq.heapify(heap)
        r = {}
        while heap:
            _, m = heapq.heappop(heap)
            c = p.pop(m, None)
            if c is None:
                continue
            found = None
            mmask = self.mask(m)
            for (lm, g), gm in zip(self.polys, self.masks):
                if gm & ~mmask:
                    continue
                if _divides(lm, m):
                    found = (lm, g)
                    break
            if found is None:
                r[m] = c
                continue
            lm, g = found
            q = tuple(x - y for x, y in zip(m, lm))
            for gm_, gc in g.items():
                if gm_ == lm:
                    continue
                nm = tuple(x + y for x, y in zip(gm_, q))
                v = p.get(nm)
                if v is None:
                    v = norm(-c * gc)
                    if v:
                        p[nm] = v
                        heapq.heappush(heap, (key(nm), nm))
                else:
                    v = norm(v - c * gc)
                    if v:
                        p[nm] = v
                    else:
                        del p[nm]
        return r

    def make_monic(self, f: dict):
        lm = min(f, key=self.key)
        inv = self.F.inv(f[lm])
        norm = self.F.norm
        return lm, {m: norm(c * inv) for m, c in f.items()}

    def add(self, lm, g):
        self.polys.append((lm, g))
        self.masks.append(self.mask(lm))


def _spoly(F, a, b):
    lma, fa = a
    lmb, fb = b
    lcm = _lcm(lma, lmb)
    qa = tuple(x - y for x, y in zip(lcm, lma))
    qb = tuple(x - y for x, y in zip(lcm, lmb))
    out = {}
    for m, c in fa.items():
        out[tuple(x + y for x, y in zip(m, qa))] = c
    norm = F.norm
    for m, c in fb.items():
        nm = tuple(x + y for x, y in zip(m, qb))
        v = norm(out.get(nm, 0) - c)
        if v:
            out[nm] = v
        else:
            out.pop(nm, None)
    return out


def _buchberger(F, key, gens: list, caps: ResourceCaps):
    basis = _Basis(F, key)
    pending = set()
    heap = []

    def push_pairs(new_idx):
        for i in range(new_idx):
            lcm = _lcm(basis.polys[i][0], basis.polys[new_idx][0])
            pending.add((i, new_idx))
            # normal strategy: smallest lcm degree first
            heapq.heappush(heap, (sum(lcm), i, new_idx))

    def insert(f):
        if not f:
            return
        lm, g = basis.make_monic(f)
        if sum(lm) > caps.max_degree or max((sum(m) for m in g), default=0) > caps.max_degree:
            raise ResourceLimit(f"polynomial degree exceeds cap {caps.max_degree}")
        basis.add(lm, g)
        if len(basis.polys) > caps.max_basis:
            raise ResourceLimit(f"basis size exceeds cap {caps.max_basis}")
        push_pairs(len(basis.polys) - 1)

    for f in gens:
        insert(basis.reduce(f))

    while heap:
        _, i, j = heapq.heappop(heap)
        if (i, j) not in pending:
            continue
        pending.discard((i, j))
        lmi, lmj = basis.polys[i][0], basis.polys[j][0]
        if _coprime(lmi, lmj):
            continue
        lcm = _lcm(lmi, lmj)
        if _chain_skip(basis, pending, i, j, lcm):
            continue
        s = _spoly(F, basis.polys[i], basis.polys[j])
        insert(basis.reduce(s))

    return _reduce_basis(F, key, basis.polys)


def _chain_skip(basis, pending, i, j, lcm):
    for k, (lmk, _) in enumerate(basis.polys):
        if k in (i, j):
            continue
        if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
            continue
        if _divides(lmk, lcm):
            return True
    return False


def _reduce_basis(F, key, polys):
    # minimal basis: drop elements whose leading monomial is divisible by another's
    polys = sorted(polys, key=lambda lg: key(lg[0]), reverse=True)  # smallest lm first
    keep = []
    for lm, g in polys:
        if any(_divides(klm, lm) for klm, _ in keep):
            continue
        keep.append((lm, g))
    out = []
    for idx in range(len(keep)):
        b = _Basis(F, key)
        for k, (lm, g) in enumerate(keep):
            if k != idx:
                b.add(lm, g)
        lm, g = keep[idx]
        tail = {m: c for m, c in g.items() if m != lm}
        red = b.reduce(tail)
        red[lm] = g[lm]
        out.append((lm, red))
    out.sort(key=lambda lg: key(lg[0]))
    return out


# ---------------------------------------------------------------- presentations

class IdealPresentation:
    """Generators in a registry plus lazily computed, cached Gröbner data.

    Cached data is computed once under a lock, so a presentation may be shared
    between threads.
    """

    def __init__(self, registry: VariableRegistry, generators: Iterable[MultiPoly] = ()):
        gens = []
        for g in generators:
            if g.registry != registry:
                raise RegistryMismatch("generator lives in a different registry")
            if g:
                gens.append(g)
        self.registry = registry
        self.generators = tuple(gens)
        self._gb = {}
        self._sat = None
        self._lock = threading.RLock()

    @classmethod
    def parse(cls, registry, texts: Sequence[str]) -> "IdealPresentation":
        return cls(registry, [registry.parse(t) for t in texts])

    def __repr__(self):
        return f"IdealPresentation({[str(g) for g in self.generators]})"

    def plus(self, extra: Iterable[MultiPoly]) -> "IdealPresentation":
        return IdealPresentation(self.registry, list(self.generators) + list(extra))

    def basis(self, order: MonomialOrder = GREVLEX, caps: ResourceCaps | None = None) -> list[MultiPoly]:
        return [MultiPoly(self.registry, g, _trusted=True) for _, g in self._engine_basis(order, caps)]

    def _engine_basis(self, order, caps=None):
        with self._lock:
            hit = self._gb.get(order)
            if hit is None:
                F = self.registry.field
                hit = _buchberger(F, order.key(), [dict(g.coeffs) for g in self.generators],
                                  caps or DEFAULT_CAPS)
                self._gb[order] = hit
            return hit

    def _set_basis(self, order, polys):
        with self._lock:
            self._gb[order] = polys

    def is_unit(self) -> bool:
        gb = self._engine_basis(GREVLEX)
        return any(not any(lm) for lm, _ in gb)


def _check_registry(f, I):
    if f.registry != I.registry:
        raise RegistryMismatch("polynomial and ideal live in different registries")


def groebner_basis(I: IdealPresentation, order: MonomialOrder = GREVLEX,
                   caps: ResourceCaps | None = None) -> list[MultiPoly]:
    return I.basis(order, caps)


def normal_form(f: MultiPoly, I: IdealPresentation, order: MonomialOrder = GREVLEX) -> MultiPoly:
    _check_registry(f, I)
    gb = I._engine_basis(order)
    b = _Basis(I.registry.field, order.key())
    for lm, g in gb:
        b.add(lm, g)
    return MultiPoly(I.registry, b.reduce(f.coeffs), _trusted=True)


def ideal_membership(f: MultiPoly, I: IdealPresentation, level: str = "strict") -> bool:
    if level == "generic":
        I = saturate_by_t(I)
    elif level != "strict":
        raise ValueError(f"unknown level {level!r}")
    if not f:
        return True
    return not normal_form(f, I)


def eliminate(I: IdealPresentation, names: Iterable[str]) -> IdealPresentation:
    """I ∩ k[remaining variables], presented in the registry without ``names``."""
    names = list(names)
    reg = I.registry
    if reg.uniformizer in names:
        raise ValueError("the uniformizer cannot be eliminated")
    order = MonomialOrder.block(reg, names)
    idx = [reg.index[n] for n in names]
    gb = I._engine_basis(order)
    keep = [(lm, g) for lm, g in gb if not any(lm[k] for k in idx)]
    sub = reg.without(names)
    pos = [k for k in range(reg.nvars) if k not in set(idx)]
    polys = []
    for lm, g in keep:
        polys.append({tuple(m[k] for k in pos): c for m, c in g.items()})
    out = IdealPresentation(sub, [MultiPoly(sub, g, _trusted=True) for g in polys])
    # the eliminant-free part of a block-order basis is a reduced grevlex basis
    out._set_basis(GREVLEX, [(tuple(lm[k] for k in pos), g) for (lm, _), g in zip(keep, polys)])
    return out


def saturate_by_t(I: IdealPresentation) -> IdealPresentation:
    """(I : pi^inf) via I + (1 - w*pi) and elimination of w."""
    with I._lock:
        if I._sat is not None:
            return I._sat
        reg = I.registry
        name = SAT_VAR
        while name in reg.index:
            name += "_"
        ext = reg.extended([(name, Role("aux"))])
        gens = [g.embed(ext) for g in I.generators]
        w = ext.var(name)
        gens.append(ext.const(1) - w * ext.pi_power(1))
        sat = eliminate(IdealPresentation(ext, gens), [name])
        if sat.registry != reg:
            sat = IdealPresentation(reg, [g.embed(reg) for g in sat.generators])
        sat._sat = sat
        I._sat = sat
        return sat


def ideal_equal(I: IdealPresentation, J: IdealPresentation, level: str = "strict") -> bool:
    if I.registry != J.registry:
        raise RegistryMismatch("ideals live in different registries")
    return (all(ideal_membership(g, J, level) for g in I.generators)
            and all(ideal_membership(g, I, level) for g in J.generators))


def ring_map_kernel(m: RingMap, I_target: IdealPresentation) -> IdealPresentation:
    """Kernel of source-ring -> target-ring / I_target via the graph ideal."""
    src, tgt = m.source, m.target
    if I_target.registry != tgt:
        raise RegistryMismatch("target ideal not in the map's target ring")
    if m.images[src.pi] != tgt.pi_power(1):
        raise ValueError("ring maps must fix the uniformizer")
    taken = set(src.names)
    rename = {}
    for n in tgt.names:
        if n == tgt.uniformizer:
            continue
        new = n
        while new in taken:
            new = new + "_tg"
        rename[n] = new
        taken.add(new)
    if tgt.uniformizer != src.uniformizer:
        rename[tgt.uniformizer] = src.uniformizer
    graph_vars = [(rename[n], Role("aux")) for n in tgt.names if n != tgt.uniformizer]
    combined = src.extended(graph_vars)
    gens = [g.embed(combined, rename) for g in I_target.generators]
    for k, n in enumerate(src.names):
        if k == src.pi:
            continue
        gens.append(combined.var(n) - m.images[k].embed(combined, rename))
    elim = eliminate(IdealPresentation(combined, gens), [v for v, _ in graph_vars])
    if elim.registry != src:
        return IdealPresentation(src, [g.embed(src) for g in elim.generators])
    return elim


def cut_torsion(registry: VariableRegistry, relations: Sequence[MultiPoly],
                fixed: Sequence[MultiPoly] = ()) -> list[MultiPoly]:
    """Relations generating (ideal(relations + fixed) : pi^inf) together with ``fixed``.

    Each relation is made primitive first; saturation generators not already
    in the ideal are appended in basis order.
    """
    rels = []
    for f in relations:
        if f:
            g, _ = primitivize(f)
            if g not in rels:
                rels.append(g)
    current = IdealPresentation(registry, rels + list(fixed))
    sat = saturate_by_t(current)
    for g in sat.generators:
        if not ideal_membership(g, current):
            rels.append(g)
            current = IdealPresentation(registry, rels + list(fixed))
    return rels
