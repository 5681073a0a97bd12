import pytest

from frobcat.exact_linalg import prime_field, rational_field
from frobcat.algebra_repr import Algebra, preprojective
from frobcat.rigid_model import build_context


@pytest.fixture(scope="session")
def pa2():
    """Preprojective algebra of A2 over F_5 with its named indecomposables."""
    alg = preprojective(2, prime_field(5))
    mods = {
        "S1": alg.simple("1"),
        "S2": alg.simple("2"),
        "P1": alg.projective("1"),
        "P2": alg.projective("2"),
    }
    return alg, mods


@pytest.fixture(scope="session")
def pa2_ctx(pa2):
    alg, mods = pa2
    return build_context(alg, [mods["P1"], mods["P2"], mods["S1"]], "frobenius")


@pytest.fixture(scope="session")
def pa2_deg_ctx(pa2):
    alg, mods = pa2
    return build_context(alg, [mods["P1"], mods["P2"]], "frobenius")


@pytest.fixture(scope="session")
def semi_ctx():
    alg = Algebra(prime_field(5), ["1"], [], [])
    return build_context(alg, [alg.simple("1")], "frobenius")


@pytest.fixture(scope="session")
def pa3():
    alg = preprojective(3, prime_field(2))
    mods = {}
    for v in alg.vertices:
        mods[f"S{v}"] = alg.simple(v)
        mods[f"P{v}"] = alg.projective(v)
    return alg, mods


@pytest.fixture(scope="session")
def pa3_ctx(pa3):
    alg, mods = pa3
    return build_context(alg, [mods["P1"], mods["P2"], mods["P3"]], "frobenius")


@pytest.fixture(scope="session")
def ka2():
    """The hereditary path algebra of A2 (no relations), not self-injective."""
    return Algebra(rational_field(), ["1", "2"], [("a", "1", "2")])
