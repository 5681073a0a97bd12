"""The homotopical layer over a rigid subcategory of a module category.

A :class:`RigidContext` fixes the additive generator of the rigid class,
validates the standing hypotheses, and caches the derived structures: the
cosyzygy generator, the class generator U whose add-closure is the homotopy
ideal, cofibrant replacements, and quotient coordinates.

Weak equivalences are the morphisms inverted by the stable-hom functor at
the generator; fibrations are detected by surjectivity of Hom(U, -), an
exact finite reduction of the defining lifting property.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import HypothesisError, InputError, InternalCheckError
from .exact_linalg import Matrix, RowSpan
from .algebra_repr import (
    Algebra,
    Module,
    Morphism,
    ShortExactSequence,
    cokernel,
    cokernel_factor,
    direct_sum,
    hom_basis,
    is_epi,
    is_iso,
    is_mono,
    kernel,
    pullback,
    pushout,
    zero_module,
)
from .homological import (
    MOD_INJECTIVES,
    cosyzygy,
    ext1_dim,
    factors_through_add,
    in_add,
    injective_envelope,
    is_self_injective,
    solve_postcompose,
    stable_hom,
)

EXACT = "exact"
FROBENIUS = "frobenius"


@dataclass
class Replacement:
    """A cofibrant replacement phi: A -> X with its presentation witness."""

    x: Module
    a: Module
    phi: Morphism
    witness: ShortExactSequence


@dataclass
class Factorization:
    f: Morphism
    mid: Module
    left: Morphism
    right: Morphism
    flavor: str


class RigidContext:
    """An algebra together with the additive generator of a rigid subcategory.

    components are the named direct summands of the generator; approximations
    are assembled from sums of components, after a deterministic greedy drop
    of hom-basis maps that already factor through the kept ones.
    """

    def __init__(self, alg: Algebra, components: Sequence[Module], mode: str,
                 minimize_approximations: bool = True, debug_checks: bool = False):
        self.alg = alg
        self.components = list(components)
        self.mode = mode
        self.minimize = minimize_approximations
        self.debug = debug_checks
        self.M_gen, self._component_injections, _ = direct_sum(self.components)
        self.injectives = alg.injectives()
        self.projectives = alg.projectives()
        mho, ses = cosyzygy(self.M_gen)
        self.mho_M_gen = mho
        self.mho_ses = ses
        self.U_components = [self.mho_M_gen] + list(self.injectives)
        self.U, _, _ = direct_sum(self.U_components)
        self._caches: Dict[str, dict] = {
            "replacement": {},
            "cofibrant": {},
            "stable": {},
            "approx": {},
            "mho_approx": {},
        }

    # -- caching helpers -----------------------------------------------------

    def stable_from_generator(self, x: Module):
        cache = self._caches["stable"]
        got = cache.get(x.key)
        if got is None:
            got = stable_hom(self.M_gen, x, MOD_INJECTIVES)
            cache[x.key] = got
        return got

    def __repr__(self):
        return (
            f"RigidContext(mode={self.mode}, M_gen dims {self.M_gen.dims_tuple()}, "
            f"U dims {self.U.dims_tuple()})"
        )


def build_context(alg: Algebra, m_gen, mode: str,
                  minimize_approximations: bool = True,
                  debug_checks: bool = False) -> RigidContext:
    """Validate every hypothesis and assemble the cached structures.

    Rejections carry the full list of violated hypotheses: rigidity of the
    generator, injectives (and in exact mode projectives) lying in its
    add-closure, and self-injectivity of the algebra in frobenius mode.
    """
    if mode not in (EXACT, FROBENIUS):
        raise InputError(f"unknown mode {mode!r}")
    components = [m_gen] if isinstance(m_gen, Module) else list(m_gen)
    if not components:
        raise InputError("M_gen needs at least one component")
    ctx = RigidContext(alg, components, mode, minimize_approximations, debug_checks)
    violations = []
    if ext1_dim(ctx.M_gen, ctx.M_gen) != 0:
        violations.append("M_gen is not rigid: Ext^1(M_gen, M_gen) != 0")
    for v, inj in zip(alg.vertices, ctx.injectives):
        if not in_add(inj, ctx.M_gen):
            violations.append(f"injective at vertex {v} is not in add(M_gen)")
    if mode == EXACT:
        for v, proj in zip(alg.vertices, ctx.projectives):
            if not in_add(proj, ctx.M_gen):
                violations.append(f"projective at vertex {v} is not in add(M_gen)")
    else:
        if not is_self_injective(alg):
            violations.append("frobenius mode requires a self-injective algebra")
    if violations:
        raise HypothesisError(violations)
    return ctx


# -- approximations ------------------------------------------------------------


def _greedy_generators(ctx: RigidContext, components: Sequence[Module], x: Module,
                       minimize: bool) -> List[Tuple[int, Morphism]]:
    """Hom-basis maps component -> x kept as right approximation generators.

    A map is dropped when it already lies in kept ∘ End(C); the drop order is
    fixed (component order, then hom-basis order) so results are reproducible.
    """
    total, _, projections = direct_sum(list(components))
    kept: List[Tuple[int, Morphism]] = []
    if minimize:
        endo = hom_basis(total, total)
        width = sum(x.dims[v] * total.dims[v] for v in ctx.alg.vertices)
        span = RowSpan(ctx.alg.field, width)
        for ci, comp in enumerate(components):
            for h in hom_basis(comp, x):
                hfull = h @ projections[ci]
                if span.contains(hfull.vec()):
                    continue
                kept.append((ci, h))
                for e in endo:
                    span.add((hfull @ e).vec())
    else:
        for ci, comp in enumerate(components):
            for h in hom_basis(comp, x):
                kept.append((ci, h))
    return kept


def _evaluation_map(ctx: RigidContext, components: Sequence[Module], x: Module,
                    minimize: bool) -> Morphism:
    kept = _greedy_generators(ctx, components, x, minimize)
    parts = [components[ci] for ci, _ in kept]
    if not parts:
        return Morphism.zero(zero_module(ctx.alg), x)
    total, _, projections = direct_sum(parts)
    out = Morphism.zero(total, x)
    for (ci, h), proj in zip(kept, projections):
        out = out + (h @ proj)
    return out


def _check_approximation(ctx: RigidContext, components: Sequence[Module], x: Module,
                         ev: Morphism) -> None:
    total, _, projections = direct_sum(list(components))
    for ci, comp in enumerate(components):
        for h in hom_basis(comp, x):
            if solve_postcompose(ev, h) is None:
                raise InternalCheckError("evaluation map is not an approximation")


def right_M_approximation(ctx: RigidContext, x: Module) -> Morphism:
    """A right add(M_gen)-approximation of x, epi since projectives lie in M."""
    cache = ctx._caches["approx"]
    got = cache.get(x.key)
    if got is None:
        got = _evaluation_map(ctx, ctx.components, x, ctx.minimize)
        if ctx.debug:
            _check_approximation(ctx, ctx.components, x, got)
        if not is_epi(got):
            raise InternalCheckError("M-approximation is not epi")
        cache[x.key] = got
    if got.target is not x:
        got = Morphism(got.source, x, got.comps, check=False)
    return got


def mho_approximation(ctx: RigidContext, x: Module) -> Morphism:
    """A right approximation of x by the cosyzygy class generator U."""
    cache = ctx._caches["mho_approx"]
    got = cache.get(x.key)
    if got is None:
        got = _evaluation_map(ctx, ctx.U_components, x, ctx.minimize)
        if ctx.debug:
            _check_approximation(ctx, ctx.U_components, x, got)
        cache[x.key] = got
    if got.target is not x:
        got = Morphism(got.source, x, got.comps, check=False)
    return got


# -- cofibrant replacement --------------------------------------------------------


def cofibrant_replacement(ctx: RigidContext, x: Module) -> Replacement:
    """The pushout replacement: approximate, take the kernel, approximate it,
    push the kernel's envelope out along the composed map.

    phi: A -> x is verified to be a trivial fibration (and epi) before return.
    """
    cache = ctx._caches["replacement"]
    got = cache.get(x.key)
    if got is not None:
        if got.x is not x:
            phi = Morphism(got.a, x, got.phi.comps, check=False)
            got = Replacement(x, got.a, phi, got.witness)
        return got
    a_map = right_M_approximation(ctx, x)  # a: M0 -> x, epi
    m0 = a_map.source
    k0, inc_k0 = kernel(a_map)
    alpha = right_M_approximation(ctx, k0)  # M1 -> K0
    m1 = alpha.source
    b_alpha = inc_k0 @ alpha  # M1 -> M0
    i_m1, iota = injective_envelope(m1)
    big, inj_big, _ = direct_sum([i_m1, m0])
    u = (inj_big[0] @ iota) - (inj_big[1] @ b_alpha)
    a_obj, q = cokernel(u)
    # phi: A -> x induced by (0, a) on I ⊕ M0, which kills the image of M1
    w = a_map @ _projection_of(big, [i_m1, m0], 1)
    phi = cokernel_factor(q, w)
    witness = ShortExactSequence(u, q).validate()
    if not is_epi(phi):
        raise InternalCheckError("replacement map is not epi")
    if not is_fibration(ctx, phi):
        raise InternalCheckError("replacement map is not a fibration")
    if not is_weak_equivalence(ctx, phi):
        raise InternalCheckError("replacement map is not a weak equivalence")
    rep = Replacement(x, a_obj, phi, witness)
    cache[x.key] = rep
    return rep


def _projection_of(total: Module, parts: Sequence[Module], index: int) -> Morphism:
    _, _, projections = direct_sum(list(parts))
    pr = projections[index]
    return Morphism(total, pr.target, pr.comps, check=False)


# -- the two predicate classes ------------------------------------------------------


def is_weak_equivalence(ctx: RigidContext, f: Morphism) -> bool:
    """True iff postcomposition is bijective on stable hom from the generator.

    Evaluation at the additive generator reflects isomorphisms of modules
    over the stable endomorphism algebra, so this linear test is exactly
    invertibility of the image of f under the stable-hom functor.
    """
    sx = ctx.stable_from_generator(f.source)
    sy = ctx.stable_from_generator(f.target)
    if sx.dim != sy.dim:
        return False
    if sx.dim == 0:
        return True
    cols = []
    for h in sx.rep_morphisms():
        cols.append(sy.canonical(f @ h))
    mat = Matrix(ctx.alg.field, np.vstack(cols).T)
    return mat.rank() == sy.dim


def _post_map_surjective(ctx: RigidContext, probe: Module, f: Morphism) -> bool:
    """Surjectivity of Hom(probe, source) -> Hom(probe, target)."""
    hy = hom_basis(probe, f.target)
    if not hy:
        return True
    hx = hom_basis(probe, f.source)
    width = hy[0].vec().size
    span = RowSpan(ctx.alg.field, width)
    for h in hx:
        span.add((f @ h).vec())
    return all(span.contains(h.vec()) for h in hy)


def is_fibration(ctx: RigidContext, f: Morphism) -> bool:
    """Right lifting against every 0 -> (cosyzygy-class object), reduced to one
    exact condition: Hom(U, -) maps surjectively along f."""
    return _post_map_surjective(ctx, ctx.U, f)


def is_trivial_fibration(ctx: RigidContext, f: Morphism) -> bool:
    return is_fibration(ctx, f) and is_weak_equivalence(ctx, f)


def cone_of(ctx: RigidContext, f: Morphism) -> Tuple[Module, Morphism, Morphism]:
    """Pushout of the injective envelope of the source along f.

    Returns (Z, g: target -> Z, u: I_X -> Z); g is a cone of f.
    """
    i_x, iota = injective_envelope(f.source)
    z, u, g = pushout(iota, f)
    return z, g, u


def fibration_via_cone(ctx: RigidContext, f: Morphism) -> bool:
    """Frobenius-mode cross-check: a deflation whose cone kills the cosyzygy
    class up to injectives."""
    if ctx.mode != FROBENIUS:
        raise InputError("fibration_via_cone requires frobenius mode")
    if not is_epi(f):
        return False
    z, g, _ = cone_of(ctx, f)
    inj = _inj_sum_of(ctx)
    sub = factors_through_add(ctx.U, inj, z)
    return all(sub.contains(g @ b) for b in hom_basis(ctx.U, f.target))


def _inj_sum_of(ctx: RigidContext) -> Module:
    key = "inj-sum"
    if key not in ctx.alg._module_cache:
        ctx.alg._module_cache[key] = direct_sum(ctx.alg.injectives())[0]
    return ctx.alg._module_cache[key]


def lift(ctx: RigidContext, g: Morphism, f: Morphism) -> Morphism:
    """beta with f @ beta = g, for f a trivial fibration and cofibrant domain.

    Precondition violations raise InputError; unsolvability under valid
    preconditions is an internal failure, not a user error.
    """
    if g.target.key != f.target.key:
        raise InputError("lift needs matching targets")
    if not is_trivial_fibration(ctx, f):
        raise InputError("lift requires a trivial fibration")
    c = g.source
    if not (in_add(c, ctx.M_gen) or is_cofibrant(ctx, c)):
        raise InputError("lift requires a cofibrant domain or one in add(M_gen)")
    beta = solve_postcompose(f, g)
    if beta is None:
        raise InternalCheckError("lift is unsolvable despite valid preconditions")
    return beta


# -- cofibrancy ---------------------------------------------------------------------


def is_cofibrant(ctx: RigidContext, x: Module) -> bool:
    """Section-solving against the replacement: x is cofibrant iff the
    replacement map splits, iff x admits a two-step presentation in M."""
    cache = ctx._caches["cofibrant"]
    got = cache.get(x.key)
    if got is None:
        rep = cofibrant_replacement(ctx, x)
        got = solve_postcompose(rep.phi, Morphism.identity(x)) is not None
        cache[x.key] = got
    return got


def in_pr_M(ctx: RigidContext, x: Module) -> bool:
    return is_cofibrant(ctx, x)


def in_mho_M(ctx: RigidContext, x: Module) -> bool:
    """Membership in the cosyzygy class, by add-closure of the generator U."""
    return in_add(x, ctx.U)


def presentation_of_cofibrant(ctx: RigidContext, x: Module) -> ShortExactSequence:
    """A sequence 0 -> M1 -> M0 -> x -> 0 with both ends in add(M_gen).

    The kernel of any epi approximation of a cofibrant object lands back in
    add(M_gen) (the two presentations are interleaved by sections), which is
    verified here rather than assumed.
    """
    a_map = right_M_approximation(ctx, x)
    k0, inc = kernel(a_map)
    if not in_add(k0, ctx.M_gen):
        raise InputError("object admits no two-step presentation in add(M_gen)")
    return ShortExactSequence(inc, a_map)


# -- factorizations -------------------------------------------------------------------


def factorize1(ctx: RigidContext, f: Morphism) -> Factorization:
    """weq-then-fib: route through the source plus a U-approximation of the
    target; the left map is the canonical injection."""
    x, y = f.source, f.target
    alpha = mho_approximation(ctx, y)
    mid, injections, projections = direct_sum([x, alpha.source])
    left = injections[0]
    right = (f @ projections[0]) + (alpha @ projections[1])
    if (right @ left) != f:
        raise InternalCheckError("factorization does not recompose")
    if not is_fibration(ctx, right):
        raise InternalCheckError("right factor is not a fibration")
    if not is_weak_equivalence(ctx, left):
        raise InternalCheckError("left factor is not a weak equivalence")
    return Factorization(f, mid, left, right, "weq-then-fib")


def factorize2(ctx: RigidContext, f: Morphism) -> Factorization:
    """cof-then-trivfib for cofibrant domains in frobenius mode.

    Routes through (replacement of the target) ⊕ (cosyzygy of the domain's
    presentation kernel); the left map is mono with cofibrant cokernel, the
    right map a trivial fibration.
    """
    if ctx.mode != FROBENIUS:
        raise InputError("factorize2 requires frobenius mode")
    x, y = f.source, f.target
    if not is_cofibrant(ctx, x):
        raise InputError("factorize2 requires a cofibrant domain")
    pres = presentation_of_cofibrant(ctx, x)
    m0 = pres.middle
    i0, iota0 = injective_envelope(m0)
    d, eps, _ = pushout(pres.p, iota0)  # d = cosyzygy of the presentation kernel
    rep = cofibrant_replacement(ctx, y)
    r = lift(ctx, f, rep.phi)
    mid, injections, projections = direct_sum([rep.a, d])
    left = (injections[0] @ r) + (injections[1] @ eps)
    right = rep.phi @ projections[0]
    if (right @ left) != f:
        raise InternalCheckError("factorization does not recompose")
    if not is_mono(left):
        raise InternalCheckError("left factor is not mono")
    if not is_trivial_fibration(ctx, right):
        raise InternalCheckError("right factor is not a trivial fibration")
    cok, _ = cokernel(left)
    if not is_cofibrant(ctx, cok):
        raise InternalCheckError("cokernel of the left factor is not cofibrant")
    return Factorization(f, mid, left, right, "cof-then-trivfib")


def path_object(ctx: RigidContext, y: Module) -> Tuple[Morphism, Morphism]:
    """Factorization of the diagonal y -> y ⊕ y through y ⊕ U', with the
    first map a verified weak equivalence."""
    yy, injections, _ = direct_sum([y, y])
    diag = injections[0] + injections[1]
    fac = factorize1(ctx, diag)
    return fac.left, fac.right


def are_homotopic(ctx: RigidContext, f: Morphism, g: Morphism) -> bool:
    """On cofibrant domains: the difference factors through the cosyzygy class.

    General domains are refused; replace the domain first.
    """
    if f.source.key != g.source.key or f.target.key != g.target.key:
        raise InputError("morphisms must be parallel")
    if not is_cofibrant(ctx, f.source):
        raise InputError(
            "homotopy is only decided on cofibrant domains; "
            "apply cofibrant_replacement to the domain first"
        )
    sub = factors_through_add(f.source, ctx.U, f.target)
    return sub.contains(f - g)
