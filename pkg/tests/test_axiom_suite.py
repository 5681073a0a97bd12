import pytest

from frobcat.errors import InputError
from frobcat.algebra_repr import Morphism, direct_sum, hom_basis
from frobcat.rigid_model import build_context
from frobcat.axiom_suite import (
    CheckRun,
    PredicateSet,
    default_objects,
    random_morphism,
    registered_checks,
    rlp_holds,
    run_all,
    run_check,
    weq_via_cones,
)

ALL_CHECKS = [
    "two_out_of_three",
    "retract_stability",
    "pullback_fibration",
    "factorization1",
    "factorization2",
    "lifting_I_eq_JW",
    "sq_J_in_W",
    "weq_cone_characterization",
    "fib_cone_characterization",
    "copr_eq_pr",
    "mho_rigid",
    "pr_extension_closure",
    "homotopy_G_agreement",
    "wic_deflation",
]


def _objects(pa2):
    alg, mods = pa2
    return sorted(mods.items())


def test_registry_is_complete():
    assert registered_checks() == ALL_CHECKS


def test_random_morphism_deterministic(pa2_ctx, pa2):
    alg, mods = pa2
    f = random_morphism(pa2_ctx, mods["P1"], mods["P2"], 99)
    g = random_morphism(pa2_ctx, mods["P1"], mods["P2"], 99)
    assert f == g
    assert random_morphism(pa2_ctx, mods["S1"], mods["S2"], 1).is_zero()  # empty hom
    h = random_morphism(pa2_ctx, mods["P1"], mods["P2"], 7)
    basis = hom_basis(mods["P1"], mods["P2"])
    assert len(basis) == 1  # any draw is a scalar multiple of the unique map
    scalars = [c for c in range(5) if basis[0].scale(c) == h]
    assert len(scalars) == 1


@pytest.mark.parametrize("name", ALL_CHECKS)
def test_each_check_passes(pa2_ctx, pa2, name):
    run = run_check(pa2_ctx, name, 42, 15, _objects(pa2))
    assert run.passed, run.to_text()


def test_run_determinism(pa2_ctx, pa2):
    a = run_check(pa2_ctx, "two_out_of_three", 7, 25, _objects(pa2))
    b = run_check(pa2_ctx, "two_out_of_three", 7, 25, _objects(pa2))
    assert a.to_text() == b.to_text()


def test_run_all_skips_by_mode(pa2):
    alg, mods = pa2
    ctx = build_context(alg, [mods["P1"], mods["P2"], mods["S1"]], "exact")
    report = run_all(ctx, 42, 5, _objects(pa2))
    assert set(report.skipped) == {"factorization2", "fib_cone_characterization"}
    assert report.passed


def test_unknown_check_and_mode_mismatch(pa2_ctx, pa2):
    alg, mods = pa2
    with pytest.raises(InputError, match="unknown check"):
        run_check(pa2_ctx, "nonsense", 1, 1)
    ctx = build_context(alg, [mods["P1"], mods["P2"], mods["S1"]], "exact")
    with pytest.raises(InputError, match="mode"):
        run_check(ctx, "factorization2", 1, 1)


def test_rlp_exactness(pa2_ctx, pa2):
    alg, mods = pa2
    from frobcat.algebra_repr import zero_module
    z = zero_module(alg)
    ident = Morphism.identity(mods["S1"])
    assert rlp_holds(pa2_ctx, Morphism.zero(z, mods["S1"]), ident)
    # 0 -> S1 against 0 -> S1: lifting id_{S1} is impossible through the zero map
    assert not rlp_holds(
        pa2_ctx, Morphism.zero(z, mods["S1"]), Morphism.zero(z, mods["S1"])
    )


def test_weq_via_cones_matches(pa2_ctx, pa2):
    from frobcat.rigid_model import is_weak_equivalence
    from frobcat.algebra_repr import zero_module
    alg, mods = pa2
    z = zero_module(alg)
    cases = [
        Morphism.identity(mods["S1"]),
        Morphism.zero(z, mods["S2"]),
        Morphism.zero(z, mods["S1"]),
        Morphism.zero(mods["S1"], z),
        hom_basis(mods["P2"], mods["S2"])[0],
    ]
    for f in cases:
        assert weq_via_cones(pa2_ctx, f) == is_weak_equivalence(pa2_ctx, f)


# -- falsifiability: corrupting a predicate must surface violations --------------


def _corruptions():
    never = lambda ctx, f: False
    odd_source = lambda ctx, f: f.source.total_dim % 2 == 1
    odd_object = lambda ctx, x: x.total_dim % 2 == 1
    from frobcat.algebra_repr import is_mono as _mono
    return {
        "two_out_of_three": PredicateSet(weq=lambda ctx, f: _mono(f)),
        "retract_stability": PredicateSet(weq=odd_source, fib=odd_source),
        "pullback_fibration": PredicateSet(fib=never, trivfib=never),
        "factorization1": PredicateSet(weq=never),
        "factorization2": PredicateSet(trivfib=never),
        "lifting_I_eq_JW": PredicateSet(trivfib=never),
        "sq_J_in_W": PredicateSet(weq=never),
        "weq_cone_characterization": PredicateSet(weq=never),
        "fib_cone_characterization": PredicateSet(fib=never),
        "copr_eq_pr": PredicateSet(cofibrant=never),
        "pr_extension_closure": PredicateSet(cofibrant=odd_object),
        "homotopy_G_agreement": PredicateSet(homotopic=lambda ctx, f, g: False),
        "wic_deflation": PredicateSet(epi=lambda ctx, f: _mono(f)),
    }


@pytest.mark.parametrize("name", [c for c in ALL_CHECKS if c != "mho_rigid"])
def test_checks_are_falsifiable(pa2_ctx, pa2, name):
    corrupted = _corruptions()[name]
    run = run_check(pa2_ctx, name, 42, 40, _objects(pa2), predicates=corrupted)
    assert not run.passed, f"{name} did not notice a corrupted predicate"


def test_mho_rigid_is_falsifiable(pa2_ctx, pa2):
    # corrupt the context itself: a generator mixing S1 with its cosyzygy is
    # not rigid, so the check must flag it
    import copy
    alg, mods = pa2
    broken = copy.copy(pa2_ctx)
    broken.U, _, _ = direct_sum([mods["S1"], mods["S2"]])
    run = run_check(broken, "mho_rigid", 42, 1, _objects(pa2))
    assert not run.passed


def test_default_objects(pa2_ctx):
    names = [n for n, _ in default_objects(pa2_ctx)]
    assert names == ["S1", "S2", "P1", "P2"]  # injectives deduplicate away


def test_fraction_witness_search(pa2_ctx, pa2):
    from frobcat.localization import fractions_equal
    from frobcat.rigid_model import cofibrant_replacement, is_weak_equivalence
    from frobcat.axiom_suite import search_fraction_witness

    alg, mods = pa2
    s1 = mods["S1"]
    ident = Morphism.identity(s1)
    u = cofibrant_replacement(pa2_ctx, s1).phi
    left, right = (ident, ident), (ident @ u, ident @ u)
    assert fractions_equal(pa2_ctx, left, right)
    witness = search_fraction_witness(pa2_ctx, left, right, seed=3)
    assert witness is not None
    _, sp, tp = witness
    assert is_weak_equivalence(pa2_ctx, sp) and is_weak_equivalence(pa2_ctx, tp)
    assert (left[1] @ sp) == (right[1] @ tp)
    assert (left[0] @ sp) == (right[0] @ tp)
    # unequal fractions admit no witness
    zero = Morphism.zero(s1, s1)
    assert not fractions_equal(pa2_ctx, (ident, ident), (zero, ident))
    assert search_fraction_witness(
        pa2_ctx, (ident, ident), (zero, ident), seed=3
    ) is None


def test_witness_implies_equality(pa2_ctx, pa2):
    # soundness direction: any found witness certifies canonical equality
    from frobcat.localization import fractions_equal
    from frobcat.axiom_suite import search_fraction_witness
    import random as _random

    alg, mods = pa2
    rng = _random.Random(11)
    objs = list(mods.values())
    found = 0
    for k in range(12):
        src = rng.choice(objs)
        tgt = rng.choice(objs)
        s = Morphism.identity(src)
        f = random_morphism(pa2_ctx, src, tgt, seed=300 + k)
        g = random_morphism(pa2_ctx, src, tgt, seed=600 + k)
        witness = search_fraction_witness(pa2_ctx, (f, s), (g, s), seed=k)
        if witness is not None:
            found += 1
            assert fractions_equal(pa2_ctx, (f, s), (g, s))
    assert found > 0


def test_battery_on_larger_algebra(pa3):
    # a non-degenerate generator on the A3 fixture keeps every check green
    alg, mods = pa3
    ctx = build_context(
        alg, [mods["P1"], mods["P2"], mods["P3"], mods["S2"]], "frobenius"
    )
    objs = sorted(mods.items()) + [("N", mods["S2"])]
    report = run_all(ctx, 7, 4, objs)
    assert report.passed, report.to_text()
