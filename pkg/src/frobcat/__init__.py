"""frobcat: homotopical structures on categories of quiver representations.

Exact-arithmetic tooling for rigid subcategories of module categories:
weak equivalences, fibrations, cofibrant replacements, factorizations, the
homotopy relation, homotopy-category hom-sets, and an axiom harness that
exercises the (pre)model-structure properties on concrete algebras.
"""

__version__ = "0.1.0"
