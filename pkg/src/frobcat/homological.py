"""Projective covers, injective envelopes, (co)syzygies, Ext^1, stable hom
spaces, and the factors-through-add subspace primitive.

All operations are pure functions over immutable values; hom-space and
envelope results are memoized per algebra keyed by module content, with
single-writer insertion under the GIL.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError, InternalCheckError
from .exact_linalg import Field, Matrix, RowSpan
from .algebra_repr import (
    Algebra,
    Module,
    Morphism,
    ShortExactSequence,
    cokernel,
    direct_sum,
    dual_module,
    hom_basis,
    is_epi,
    is_mono,
    kernel,
    path_matrix,
    zero_module,
)

MOD_INJECTIVES = "modulo-injectives"
MOD_PROJECTIVES = "modulo-projectives"


# -- radical, top, covers -----------------------------------------------------


def radical_span(x: Module) -> dict:
    """Per vertex, a RowSpan of rad(x) = sum of images of incoming arrows."""
    alg = x.algebra
    spans = {}
    for v in alg.vertices:
        span = RowSpan(alg.field, x.dims[v])
        for a in alg.arrows:
            if a.target != v:
                continue
            m = x.action[a.name]
            for j in range(m.cols):
                span.add(m.data[:, j].copy())
        spans[v] = span
    return spans


def top_dims(x: Module) -> dict:
    spans = radical_span(x)
    return {v: x.dims[v] - spans[v].rank for v in x.algebra.vertices}


def projective_cover(x: Module) -> Tuple[Module, Morphism]:
    """Minimal projective cover P -> x; P = ⊕ P_v per top generator.

    Generators are deterministic: standard vectors completing the radical at
    each vertex, in vertex order. Each P_v copy maps its path basis element b
    to (action of b on x) applied to the generator.
    """
    alg = x.algebra
    field = alg.field
    spans = radical_span(x)
    generators: List[Tuple[str, np.ndarray]] = []
    for v in alg.vertices:
        span = spans[v]
        for i in range(x.dims[v]):
            e = np.empty(x.dims[v], dtype=field.dtype)
            e[...] = field.zero()
            e[i] = field.one()
            if span.add(e):
                generators.append((v, e))
    parts = [alg.projective(v) for v, _ in generators]
    if not parts:
        p = zero_module(alg)
        return p, Morphism(p, x, {}, check=False)
    total, injections, projections = direct_sum(parts)
    vi = {v: i for i, v in enumerate(alg.vertices)}
    comps = {w: Matrix.zeros(field, x.dims[w], total.dims[w]) for w in alg.vertices}
    col_offset = {w: 0 for w in alg.vertices}
    for (v, gen), part in zip(generators, parts):
        src = vi[v]
        for e in alg._elts:
            if e.source != src:
                continue
            w = alg.vertices[e.target]
            if e.length == 0:
                col = Matrix.column(field, list(gen))
            else:
                col = path_matrix(x, e.path) @ Matrix.column(field, list(gen))
            # position of e within P_v's basis at w
            local = [pe.idx for pe in alg._elts if pe.source == src and pe.target == e.target]
            k = local.index(e.idx)
            comps[w].data[:, col_offset[w] + k] = col.data[:, 0]
        for w in alg.vertices:
            col_offset[w] += part.dims[w]
    cover = Morphism(total, x, comps, check=False)
    if not cover.intertwines():
        raise InternalCheckError("projective cover does not intertwine")
    if not is_epi(cover):
        raise InternalCheckError("projective cover is not epi")
    return total, cover


def dual_morphism(f: Morphism) -> Morphism:
    src = dual_module(f.target)
    tgt = dual_module(f.source)
    comps = {v: f.comps[v].transpose() for v in f.source.algebra.vertices}
    return Morphism(src, tgt, comps, check=False)


def _undual_module(m: Module, algebra: Algebra) -> Module:
    """Reinterpret a module over opposite(opposite) as a module over algebra."""
    action = {a.name: m.action[a.name] for a in algebra.arrows}
    return Module(algebra, dict(m.dims), action, check=False)


def injective_envelope(x: Module) -> Tuple[Module, Morphism]:
    """Minimal injective envelope x -> I via opposite-algebra duality."""
    alg = x.algebra
    dx = dual_module(x)
    p, cover = projective_cover(dx)
    i_dual = dual_module(p)
    env = _undual_module(i_dual, alg)
    comps = {v: cover.comps[v].transpose() for v in alg.vertices}
    mono = Morphism(x, env, comps, check=False)
    if not mono.intertwines():
        raise InternalCheckError("injective envelope does not intertwine")
    if not is_mono(mono):
        raise InternalCheckError("injective envelope is not mono")
    return env, mono


def syzygy(x: Module) -> Tuple[Module, ShortExactSequence]:
    """Kernel of the projective cover, with its witness sequence."""
    p, cover = projective_cover(x)
    k, inc = kernel(cover)
    return k, ShortExactSequence(inc, cover)


def cosyzygy(x: Module) -> Tuple[Module, ShortExactSequence]:
    """Cokernel of the injective envelope, with its witness sequence."""
    i, mono = injective_envelope(x)
    c, proj = cokernel(mono)
    return c, ShortExactSequence(mono, proj)


# -- Ext^1 ---------------------------------------------------------------------


def _precompose_rank(inc: Morphism, y: Module) -> Tuple[int, int]:
    """rank of Hom(P0, y) -> Hom(Omega x, y) and dim Hom(Omega x, y)."""
    alg = y.algebra
    hp = hom_basis(inc.target, y)
    homega = hom_basis(inc.source, y)
    width = sum(y.dims[v] * inc.source.dims[v] for v in alg.vertices)
    span = RowSpan(alg.field, width)
    for h in hp:
        span.add((h @ inc).vec())
    return span.rank, len(homega)


def ext1_dim(x: Module, y: Module) -> int:
    """dim Ext^1(x, y) from the chosen projective presentation of x."""
    omega, ses = syzygy(x)
    rank, total = _precompose_rank(ses.i, y)
    return total - rank


def ext1_dim_via_copresentation(x: Module, y: Module) -> int:
    """Independent cross-check: dim coker(Hom(x, I0) -> Hom(x, cosyzygy y))."""
    mho, ses = cosyzygy(y)
    hi = hom_basis(x, ses.middle)
    hm = hom_basis(x, mho)
    alg = x.algebra
    width = sum(mho.dims[v] * x.dims[v] for v in alg.vertices)
    span = RowSpan(alg.field, width)
    for h in hi:
        span.add((ses.p @ h).vec())
    return len(hm) - span.rank


# -- quotient coordinates ---------------------------------------------------------


class QuotientSpace:
    """Coordinates on ambient/sub with RREF-canonical coset forms."""

    def __init__(self, field: Field, width: int, sub_vectors: Sequence[np.ndarray]):
        self.field = field
        self.width = width
        self.sub = RowSpan(field, width)
        for v in sub_vectors:
            self.sub.add(v)
        self.rep_indices: List[int] = []
        self.rep_canonicals: List[np.ndarray] = []
        self._repspan = RowSpan(field, width)

    def offer_representative(self, index: int, vector: np.ndarray) -> bool:
        c = self.sub.reduce(vector)
        if self._repspan.add(c):
            self.rep_indices.append(index)
            self.rep_canonicals.append(c)
            return True
        return False

    @property
    def dim(self) -> int:
        return len(self.rep_indices)

    def canonical(self, vector: np.ndarray) -> np.ndarray:
        return self.sub.reduce(vector)

    def coords(self, vector: np.ndarray) -> np.ndarray:
        """Coordinates of the coset of vector in the representative basis."""
        c = self.canonical(vector)
        if not self.rep_canonicals:
            if np.any(c != 0):
                raise InternalCheckError("vector has nonzero class in a zero quotient")
            return np.empty(0, dtype=self.field.dtype)
        mat = Matrix(self.field, np.vstack(self.rep_canonicals).T)
        rhs = Matrix(self.field, c.reshape(-1, 1))
        sol = mat.solve_cols(rhs)
        if sol is None:
            raise InternalCheckError("coset does not lie in the representative span")
        return sol.data[:, 0]


# -- add-subspaces and stable hom ---------------------------------------------------


@dataclass
class AddSubspace:
    """span{ b∘a : a in Hom(x,z), b in Hom(z,y) } with factorization witnesses."""

    x: Module
    z: Module
    y: Module
    basis: List[Morphism]
    _span: RowSpan
    _pairs: List[Tuple[Morphism, Morphism]]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, f: Morphism) -> bool:
        return self._span.contains(f.vec())

    def factorize(self, f: Morphism) -> Tuple[Morphism, Morphism]:
        """Explicit x -> z^n -> y recomposing to f, for f in the span."""
        if not self._pairs:
            if f.is_zero():
                z0 = zero_module(self.x.algebra)
                return Morphism.zero(self.x, z0), Morphism.zero(z0, self.y)
            raise InputError("morphism does not factor through add(z)")
        cols = Matrix(self.x.algebra.field, np.vstack([
            ((b @ a).vec()) for a, b in self._pairs
        ]).T)
        sol = cols.solve_cols(Matrix(self.x.algebra.field, f.vec().reshape(-1, 1)))
        if sol is None:
            raise InputError("morphism does not factor through add(z)")
        chosen = [(k, sol.data[k, 0]) for k in range(len(self._pairs)) if sol.data[k, 0] != 0]
        if not chosen:
            z0 = zero_module(self.x.algebra)
            return Morphism.zero(self.x, z0), Morphism.zero(z0, self.y)
        parts = [self.z] * len(chosen)
        total, injections, projections = direct_sum(parts)
        into = Morphism.zero(self.x, total)
        outof = Morphism.zero(total, self.y)
        for slot, (k, coeff) in enumerate(chosen):
            a, b = self._pairs[k]
            into = into + (injections[slot] @ a)
            outof = outof + (b.scale(coeff) @ projections[slot])
        return into, outof


def factors_through_add(x: Module, z: Module, y: Module) -> AddSubspace:
    """Subspace of Hom(x,y) of morphisms factoring through a finite power of z.

    A morphism lies in the span of the pairwise composites iff it factors
    through z^n for some finite n, so the linear test is exact.
    """
    alg = x.algebra
    width = sum(y.dims[v] * x.dims[v] for v in alg.vertices)
    span = RowSpan(alg.field, width)
    pairs: List[Tuple[Morphism, Morphism]] = []
    basis: List[Morphism] = []
    if not z.is_zero():
        into = hom_basis(x, z)
        outof = hom_basis(z, y)
        for a in into:
            for b in outof:
                pairs.append((a, b))
                span.add((b @ a).vec())
    for row in span.rows:
        basis.append(Morphism.from_vec(x, y, row.copy()))
    return AddSubspace(x, z, y, basis, span, pairs)


def in_add(x: Module, z: Module) -> bool:
    """True iff x is a direct summand of a finite power of z."""
    if x.is_zero():
        return True
    sub = factors_through_add(x, z, x)
    return sub.contains(Morphism.identity(x))


@dataclass
class StableHomSpace:
    """Hom(x, y) modulo the subspace factoring through injectives/projectives."""

    x: Module
    y: Module
    kind: str
    ambient: List[Morphism]
    quotient: QuotientSpace
    quotient_by: List[Morphism]

    @property
    def dim(self) -> int:
        return self.quotient.dim

    def rep_morphisms(self) -> List[Morphism]:
        return [self.ambient[i] for i in self.quotient.rep_indices]

    def canonical(self, f: Morphism) -> np.ndarray:
        return self.quotient.canonical(f.vec())

    def coords(self, f: Morphism) -> np.ndarray:
        return self.quotient.coords(f.vec())

    def is_stably_zero(self, f: Morphism) -> bool:
        return not np.any(self.canonical(f) != 0)


def _inj_sum(alg: Algebra) -> Module:
    key = "inj-sum"
    if key not in alg._module_cache:
        alg._module_cache[key] = direct_sum(alg.injectives())[0]
    return alg._module_cache[key]


def _proj_sum(alg: Algebra) -> Module:
    key = "proj-sum"
    if key not in alg._module_cache:
        alg._module_cache[key] = direct_sum(alg.projectives())[0]
    return alg._module_cache[key]


def stable_hom(x: Module, y: Module, kind: str = MOD_INJECTIVES) -> StableHomSpace:
    if kind not in (MOD_INJECTIVES, MOD_PROJECTIVES):
        raise InputError(f"unknown stable-hom kind {kind!r}")
    alg = x.algebra
    z = _inj_sum(alg) if kind == MOD_INJECTIVES else _proj_sum(alg)
    sub = factors_through_add(x, z, y)
    ambient = hom_basis(x, y)
    width = sum(y.dims[v] * x.dims[v] for v in alg.vertices)
    q = QuotientSpace(alg.field, width, [m.vec() for m in sub.basis])
    for i, h in enumerate(ambient):
        q.offer_representative(i, h.vec())
    return StableHomSpace(x, y, kind, ambient, q, sub.basis)


# -- Frobenius-side predicates --------------------------------------------------------


def is_self_injective(alg: Algebra) -> bool:
    """True iff projectives and injectives generate the same additive class."""
    inj = _inj_sum(alg)
    proj = _proj_sum(alg)
    return all(in_add(p, inj) for p in alg.projectives()) and all(
        in_add(i, proj) for i in alg.injectives()
    )


def ses_split(ses: ShortExactSequence) -> Optional[Morphism]:
    """A section s of the deflation (p @ s = id) when one exists."""
    p = ses.p
    candidates = hom_basis(p.target, p.source)
    if not candidates:
        return Morphism.identity(p.target) if p.target.is_zero() else None
    alg = p.source.algebra
    target_vec = Morphism.identity(p.target).vec()
    cols = Matrix(alg.field, np.vstack([(p @ s).vec() for s in candidates]).T)
    sol = cols.solve_cols(Matrix(alg.field, target_vec.reshape(-1, 1)))
    if sol is None:
        return None
    section = Morphism.zero(p.target, p.source)
    for k, s in enumerate(candidates):
        if sol.data[k, 0] != 0:
            section = section + s.scale(sol.data[k, 0])
    return section


# -- linear lifting helpers ------------------------------------------------------------


def solve_postcompose(left: Morphism, rhs: Morphism) -> Optional[Morphism]:
    """Some s with left @ s = rhs, searched inside Hom(rhs.source, left.source)."""
    candidates = hom_basis(rhs.source, left.source)
    alg = left.source.algebra
    width = rhs.vec().size
    if not candidates:
        return (
            Morphism.zero(rhs.source, left.source)
            if not np.any(rhs.vec() != 0)
            else None
        )
    cols = Matrix(alg.field, np.vstack([(left @ s).vec() for s in candidates]).T)
    sol = cols.solve_cols(Matrix(alg.field, rhs.vec().reshape(-1, 1)))
    if sol is None:
        return None
    out = Morphism.zero(rhs.source, left.source)
    for k, s in enumerate(candidates):
        if sol.data[k, 0] != 0:
            out = out + s.scale(sol.data[k, 0])
    return out


def solve_precompose(right: Morphism, rhs: Morphism) -> Optional[Morphism]:
    """Some s with s @ right = rhs, searched inside Hom(right.target, rhs.target)."""
    candidates = hom_basis(right.target, rhs.target)
    alg = right.source.algebra
    if not candidates:
        return (
            Morphism.zero(right.target, rhs.target)
            if not np.any(rhs.vec() != 0)
            else None
        )
    cols = Matrix(alg.field, np.vstack([(s @ right).vec() for s in candidates]).T)
    sol = cols.solve_cols(Matrix(alg.field, rhs.vec().reshape(-1, 1)))
    if sol is None:
        return None
    out = Morphism.zero(right.target, rhs.target)
    for k, s in enumerate(candidates):
        if sol.data[k, 0] != 0:
            out = out + s.scale(sol.data[k, 0])
    return out
