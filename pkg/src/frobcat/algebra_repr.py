"""Path algebras with admissible relations and their finite-dimensional
representations.

Conventions, fixed once and used everywhere:

* left modules, seen as quiver representations: a vector space per vertex,
  a matrix per arrow;
* column vectors: an arrow a: i -> j acts by a dims(j) x dims(i) matrix;
* paths are written source-to-target (first arrow first) and act by matrix
  products applied right-to-left, so for w = [a1, a2] the acting matrix is
  X_{a2} @ X_{a1}.

The opposite convention is obtained by transposing all matrices.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError, InternalCheckError
from .exact_linalg import Field, Matrix, RowSpan, prime_field, rational_field

DEFAULT_PATH_CAP = 64
DEFAULT_DIM_CAP = 4096


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class _PathElt:
    """A chosen path representative in the quotient-algebra basis."""

    idx: int
    source: int
    target: int
    length: int
    path: Tuple[int, ...]  # arrow indices, application order


@dataclass(frozen=True)
class _Relation:
    terms: Tuple[Tuple[object, Tuple[int, ...]], ...]  # (coeff, path)
    source: int
    target: int
    max_len: int


class Algebra:
    """A finite-dimensional path algebra with admissible relations.

    The constructor computes an ordered basis of the quotient algebra (path
    representatives, sorted by length then lexicographic arrow order) along
    with arrow multiplication tables. Construction fails on non-admissible
    relations and on quotients whose path enumeration exceeds the caps.
    """

    def __init__(
        self,
        field: Field,
        vertices: Sequence[str],
        arrows: Sequence,
        relations: Sequence = (),
        length_cap: int = DEFAULT_PATH_CAP,
        dim_cap: int = DEFAULT_DIM_CAP,
    ):
        self.field = field
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertex names")
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        self.arrows: List[Arrow] = []
        for a in arrows:
            if isinstance(a, Arrow):
                arrow = a
            elif isinstance(a, dict):
                arrow = Arrow(a["name"], a["from"], a["to"])
            else:
                arrow = Arrow(*a)
            if arrow.source not in self._vindex or arrow.target not in self._vindex:
                raise InputError(f"arrow {arrow.name!r} references unknown vertex")
            self.arrows.append(arrow)
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names) or set(names) & set(self.vertices):
            raise InputError("duplicate arrow names")
        self._aindex = {a.name: i for i, a in enumerate(self.arrows)}
        self.length_cap = length_cap
        self.dim_cap = dim_cap
        self.relations = [self._parse_relation(r, k) for k, r in enumerate(relations)]
        self._build_basis()
        self._check_admissible()
        self._opposite: Optional["Algebra"] = None
        self._hom_cache: Dict[tuple, list] = {}
        self._module_cache: Dict[str, "Module"] = {}
        self._check_regular_modules()

    # -- construction ------------------------------------------------------

    def _parse_relation(self, rel, k: int) -> _Relation:
        terms = []
        src = tgt = None
        for term in rel:
            if isinstance(term, dict):
                coeff, path_names = term["coeff"], term["path"]
            else:
                coeff, path_names = term
            if isinstance(coeff, str):
                coeff = self.field.parse(coeff)
            else:
                coeff = self.field.coerce(coeff)
            path = tuple(self._aindex[n] for n in path_names)
            if len(path) < 2:
                raise InputError(f"relation {k}: path shorter than 2 is not admissible")
            for a, b in zip(path, path[1:]):
                if self.arrows[a].target != self.arrows[b].source:
                    raise InputError(f"relation {k}: path is not composable")
            s = self._vindex[self.arrows[path[0]].source]
            t = self._vindex[self.arrows[path[-1]].target]
            if src is None:
                src, tgt = s, t
            elif (s, t) != (src, tgt):
                raise InputError(f"relation {k}: terms mix source/target vertices")
            if coeff != 0:
                terms.append((coeff, path))
        if not terms:
            raise InputError(f"relation {k} is identically zero")
        return _Relation(tuple(terms), src, tgt, max(len(p) for _, p in terms))

    def _build_basis(self) -> None:
        field = self.field
        elts: List[_PathElt] = []
        by_len: Dict[int, List[int]] = {0: []}
        for vi in range(len(self.vertices)):
            e = _PathElt(len(elts), vi, vi, 0, ())
            elts.append(e)
            by_len[0].append(e.idx)
        mult: Dict[Tuple[int, int], Dict[int, object]] = {}
        frontier = list(by_len[0])
        length = 0
        while frontier:
            length += 1
            if length > self.length_cap:
                raise InputError(
                    f"path length cap {self.length_cap} exceeded; "
                    "quotient may be infinite-dimensional"
                )
            # candidate paths of this length, grouped by (source, target)
            cands: List[Tuple[int, int]] = []  # (arrow index, base elt id)
            for b in frontier:
                bt = elts[b].target
                for ai, arrow in enumerate(self.arrows):
                    if self._vindex[arrow.source] == bt:
                        cands.append((ai, b))
            cands.sort(key=lambda ab: elts[ab[1]].path + (ab[0],))
            groups: Dict[Tuple[int, int], List[int]] = {}
            for j, (ai, b) in enumerate(cands):
                key = (elts[b].source, self._vindex[self.arrows[ai].target])
                groups.setdefault(key, []).append(j)
            cand_pos = {ab: j for j, ab in enumerate(cands)}

            cons: Dict[Tuple[int, int], List[dict]] = {}
            for rel in self.relations:
                want = length - rel.max_len
                if want < 0:
                    continue
                for b in by_len.get(want, []):
                    if elts[b].target != rel.source:
                        continue
                    vec = self._apply_relation(rel, b, length, elts, mult, cand_pos)
                    key = (elts[b].source, rel.target)
                    cons.setdefault(key, []).append(vec)

            new_ids: Dict[int, int] = {}  # candidate position -> new elt id
            expansions: Dict[int, dict] = {}  # candidate position -> {col: coeff}
            for key, members in groups.items():
                vecs = cons.get(key, [])
                elt_cols = sorted({c for v in vecs for c in v if isinstance(c, int)})
                col_keys = [("c", j) for j in members] + [("e", i) for i in elt_cols]
                col_of = {ck: n for n, ck in enumerate(col_keys)}
                span = RowSpan(field, len(col_keys))
                for v in vecs:
                    arr = np.empty(len(col_keys), dtype=field.dtype)
                    arr[...] = field.zero()
                    for c, cf in v.items():
                        ck = ("e", c) if isinstance(c, int) else c
                        arr[col_of[ck]] = cf
                    span.add(arr)
                dead = set()
                for row, p in zip(span.rows, span.pivots):
                    ck = col_keys[p]
                    if ck[0] != "c":
                        raise InputError(
                            "relations rewrite shorter basis paths; this relation "
                            "pattern is outside naive path reduction"
                        )
                    dead.add(ck[1])
                    exp: Dict[object, object] = {}
                    for n in range(p + 1, len(col_keys)):
                        if row[n] != 0:
                            kk = col_keys[n]
                            coeff = field.neg(row[n])
                            exp[kk[1] if kk[0] == "e" else ("c", kk[1])] = coeff
                    expansions[ck[1]] = exp
                for j in members:
                    if j not in dead:
                        ai, b = cands[j]
                        e = _PathElt(
                            len(elts),
                            elts[b].source,
                            self._vindex[self.arrows[ai].target],
                            length,
                            elts[b].path + (ai,),
                        )
                        elts.append(e)
                        new_ids[j] = e.idx

            for j, (ai, b) in enumerate(cands):
                if j in new_ids:
                    mult[(ai, b)] = {new_ids[j]: field.one()}
                else:
                    resolved: Dict[int, object] = {}
                    for col, cf in expansions[j].items():
                        if isinstance(col, tuple):  # surviving candidate
                            resolved[new_ids[col[1]]] = cf
                        else:
                            resolved[col] = cf
                    mult[(ai, b)] = resolved

            frontier = [new_ids[j] for j in sorted(new_ids)]
            by_len[length] = frontier
            if len(elts) > self.dim_cap:
                raise InputError(
                    f"dimension cap {self.dim_cap} exceeded; "
                    "quotient may be infinite-dimensional"
                )
        self._elts = elts
        self._by_len = by_len
        self._mult = mult

    def _apply_relation(self, rel, base: int, length: int, elts, mult, cand_pos) -> dict:
        """Expand rel * (basis element) over basis ids and candidate markers."""
        field = self.field
        out: Dict[object, object] = {}
        for coeff, path in rel.terms:
            cur: Dict[int, object] = {base: coeff}
            for ai in path:
                nxt: Dict[object, object] = {}
                for eid, cf in cur.items():
                    if elts[eid].length + 1 == length:
                        j = cand_pos[(ai, eid)]
                        key = ("c", j)
                        nxt[key] = nxt.get(key, field.zero()) + cf
                    else:
                        for tid, tcf in mult[(ai, eid)].items():
                            nxt[tid] = nxt.get(tid, field.zero()) + cf * tcf
                cur_mixed = {k: field.coerce(v) for k, v in nxt.items() if field.coerce(v) != 0}
                # candidate markers appear only after the final arrow
                cur = {k: v for k, v in cur_mixed.items() if isinstance(k, int)}
                tail = {k: v for k, v in cur_mixed.items() if not isinstance(k, int)}
                if tail:
                    for k, v in tail.items():
                        out[k] = field.coerce(out.get(k, field.zero()) + v)
            for k, v in cur.items():
                out[k] = field.coerce(out.get(k, field.zero()) + v)
        return {k: v for k, v in out.items() if v != 0}

    def _check_admissible(self) -> None:
        """The arrow ideal of the quotient must be nilpotent."""
        dim = len(self._elts)
        radical = [e.idx for e in self._elts if e.length >= 1]
        if not radical:
            return
        field = self.field
        span = RowSpan(field, dim)
        vecs = []
        for idx in radical:
            v = np.empty(dim, dtype=field.dtype)
            v[...] = field.zero()
            v[idx] = field.one()
            vecs.append(v)
            span.add(v)
        for _ in range(dim + 1):
            if not vecs:
                return
            nxt_span = RowSpan(field, dim)
            nxt_vecs = []
            for ai in range(len(self.arrows)):
                for v in vecs:
                    w = np.empty(dim, dtype=field.dtype)
                    w[...] = field.zero()
                    hit = False
                    for eid in range(dim):
                        if v[eid] == 0:
                            continue
                        entry = self._mult.get((ai, eid))
                        if entry is None:
                            continue
                        hit = True
                        for tid, cf in entry.items():
                            w[tid] = field.coerce(w[tid] + v[eid] * cf)
                    if hit and nxt_span.add(w):
                        nxt_vecs.append(nxt_span.rows[-1])
            if nxt_span.rank == 0:
                return
            vecs, span = nxt_span.rows, nxt_span
        raise InputError("relations do not generate an admissible ideal (radical not nilpotent)")

    def _check_regular_modules(self) -> None:
        """Completeness guard: the regular modules built from the computed
        multiplication tables must satisfy every relation.

        When this holds, the constructed algebra is a quotient of the true
        quotient algebra of at least its dimension, hence equal to it; a
        failure means the relation system needs rewriting beyond naive path
        reduction and is rejected."""
        for v in self.vertices:
            bad = relation_violations(self.projective(v))
            if bad:
                raise InputError(
                    "relation closure incomplete on the regular module at "
                    f"vertex {v!r} ({'; '.join(bad)}); this relation pattern "
                    "is outside naive path reduction"
                )

    # -- basic queries -------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self._elts)

    @property
    def path_basis(self) -> List[Tuple[str, Tuple[str, ...]]]:
        """Ordered basis as (source vertex, arrow-name path) pairs."""
        return [
            (self.vertices[e.source], tuple(self.arrows[a].name for a in e.path))
            for e in self._elts
        ]

    def vertex_index(self, v: str) -> int:
        return self._vindex[v]

    def arrow_index(self, name: str) -> int:
        return self._aindex[name]

    def signature(self) -> tuple:
        return (
            self.field.kind,
            self.field.characteristic,
            tuple(self.vertices),
            tuple((a.name, a.source, a.target) for a in self.arrows),
            tuple(
                tuple((self.field.format(c), p) for c, p in r.terms) for r in self.relations
            ),
        )

    def opposite(self) -> "Algebra":
        """The opposite algebra (arrows and relation paths reversed)."""
        if self._opposite is None:
            op = Algebra(
                self.field,
                self.vertices,
                [(a.name, a.target, a.source) for a in self.arrows],
                [
                    [(self.field.format(c), tuple(reversed([self.arrows[i].name for i in p])))
                     for c, p in r.terms]
                    for r in self.relations
                ],
                length_cap=self.length_cap,
                dim_cap=self.dim_cap,
            )
            op._opposite = self
            self._opposite = op
        return self._opposite

    # -- distinguished modules -------------------------------------------------

    def simple(self, v: str) -> "Module":
        key = f"S:{v}"
        if key not in self._module_cache:
            dims = {w: (1 if w == v else 0) for w in self.vertices}
            self._module_cache[key] = Module(self, dims, {}, check=False)
        return self._module_cache[key]

    def projective(self, v: str) -> "Module":
        """The indecomposable projective at v: path representatives out of v."""
        key = f"P:{v}"
        if key not in self._module_cache:
            vi = self._vindex[v]
            grp = {w: [e.idx for e in self._elts if e.source == vi and e.target == w]
                   for w in range(len(self.vertices))}
            pos = {eid: k for w in grp for k, eid in enumerate(grp[w])}
            dims = {self.vertices[w]: len(grp[w]) for w in grp}
            action = {}
            for ai, arrow in enumerate(self.arrows):
                si, ti = self._vindex[arrow.source], self._vindex[arrow.target]
                m = Matrix.zeros(self.field, len(grp[ti]), len(grp[si]))
                for col, eid in enumerate(grp[si]):
                    for tid, cf in self._mult[(ai, eid)].items():
                        m.data[pos[tid], col] = cf
                action[arrow.name] = m
            self._module_cache[key] = Module(self, dims, action, check=False)
        return self._module_cache[key]

    def injective(self, v: str) -> "Module":
        """The indecomposable injective at v, dual of the opposite projective."""
        key = f"I:{v}"
        if key not in self._module_cache:
            self._module_cache[key] = dual_module(self.opposite().projective(v))
        return self._module_cache[key]

    def simples(self) -> List["Module"]:
        return [self.simple(v) for v in self.vertices]

    def projectives(self) -> List["Module"]:
        return [self.projective(v) for v in self.vertices]

    def injectives(self) -> List["Module"]:
        return [self.injective(v) for v in self.vertices]

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "field": (
                {"kind": "prime", "p": self.field.characteristic}
                if self.field.kind == "prime"
                else {"kind": "rational"}
            ),
            "vertices": list(self.vertices),
            "arrows": [{"name": a.name, "from": a.source, "to": a.target} for a in self.arrows],
            "relations": [
                [
                    {"coeff": self.field.format(c), "path": [self.arrows[i].name for i in p]}
                    for c, p in r.terms
                ]
                for r in self.relations
            ],
        }

    def __repr__(self):
        return f"Algebra({len(self.vertices)} vertices, {len(self.arrows)} arrows, dim {self.dim})"


def algebra_from_dict(d: Mapping, **caps) -> Algebra:
    fd = d["field"]
    if fd["kind"] == "prime":
        field = prime_field(int(fd["p"]))
    elif fd["kind"] == "rational":
        field = rational_field()
    else:
        raise InputError(f"unknown field kind {fd['kind']!r}")
    return Algebra(field, d["vertices"], d["arrows"], d.get("relations", []), **caps)


def load_algebra(text: str, **caps) -> Algebra:
    """Parse an algebra file (JSON text per the documented schema)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"algebra file is not valid JSON: {e}") from e
    return algebra_from_dict(data, **caps)


def preprojective(n: int, field: Field, **caps) -> Algebra:
    """The preprojective algebra of the linearly oriented A_n quiver.

    The double quiver carries arrows a_i: i -> i+1 and a_i*: i+1 -> i; the
    defining sum of commutators is emitted as one relation per vertex.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    vertices = [str(i) for i in range(1, n + 1)]
    arrows = []
    for i in range(1, n):
        arrows.append((f"a{i}", str(i), str(i + 1)))
        arrows.append((f"a{i}*", str(i + 1), str(i)))
    relations = []
    one, minus = field.format(field.one()), field.format(field.neg(field.one()))
    for v in range(1, n + 1):
        terms = []
        if v < n:
            terms.append({"coeff": one, "path": [f"a{v}", f"a{v}*"]})
        if v > 1:
            terms.append({"coeff": minus, "path": [f"a{v-1}*", f"a{v-1}"]})
        if terms:
            relations.append(terms)
    return Algebra(field, vertices, arrows, relations, **caps)


class Module:
    """A finite-dimensional representation: dims per vertex, matrix per arrow."""

    __slots__ = ("algebra", "dims", "action", "_key")

    def __init__(self, algebra: Algebra, dims: Mapping[str, int], action: Mapping[str, Matrix],
                 check: bool = True):
        self.algebra = algebra
        self.dims = {}
        for v in algebra.vertices:
            d = int(dims.get(v, 0))
            if d < 0:
                raise InputError(f"negative dimension at vertex {v!r}")
            self.dims[v] = d
        self.action = {}
        for a in algebra.arrows:
            m = action.get(a.name)
            if m is None:
                m = Matrix.zeros(algebra.field, self.dims[a.target], self.dims[a.source])
            if (m.rows, m.cols) != (self.dims[a.target], self.dims[a.source]):
                raise InputError(
                    f"arrow {a.name!r} matrix is {m.rows}x{m.cols}, "
                    f"expected {self.dims[a.target]}x{self.dims[a.source]}"
                )
            self.action[a.name] = m
        self._key = None
        if check:
            bad = relation_violations(self)
            if bad:
                raise InputError("module violates relations: " + "; ".join(bad))

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return self.total_dim == 0

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                tuple(self.dims[v] for v in self.algebra.vertices),
                tuple(self.action[a.name].signature() for a in self.algebra.arrows),
            )
        return self._key

    def dims_tuple(self) -> Tuple[int, ...]:
        return tuple(self.dims[v] for v in self.algebra.vertices)

    def to_dict(self) -> dict:
        return {
            "dims": dict(self.dims),
            "action": {a.name: self.action[a.name].format_entries() for a in self.algebra.arrows},
        }

    @staticmethod
    def from_dict(algebra: Algebra, d: Mapping) -> "Module":
        dims = {v: int(n) for v, n in d["dims"].items()}
        action = {}
        for a in algebra.arrows:
            entries = d.get("action", {}).get(a.name)
            if entries is not None:
                action[a.name] = Matrix.from_entries(
                    algebra.field,
                    dims.get(a.target, 0),
                    dims.get(a.source, 0),
                    [algebra.field.parse(s) if isinstance(s, str) else s for s in entries],
                )
        return Module(algebra, dims, action)

    def __repr__(self):
        return f"Module(dims={self.dims_tuple()})"


def zero_module(algebra: Algebra) -> Module:
    return Module(algebra, {}, {}, check=False)


def path_matrix(module: Module, path: Sequence[int]) -> Matrix:
    """The matrix by which a path (arrow indices, application order) acts."""
    alg = module.algebra
    if not path:
        raise InputError("path_matrix needs a nonempty path")
    m = module.action[alg.arrows[path[0]].name]
    for ai in path[1:]:
        m = module.action[alg.arrows[ai].name] @ m
    return m


def relation_violations(module: Module) -> List[str]:
    alg = module.algebra
    bad = []
    for k, rel in enumerate(alg.relations):
        src_v = alg.vertices[rel.source]
        tgt_v = alg.vertices[rel.target]
        total = Matrix.zeros(alg.field, module.dims[tgt_v], module.dims[src_v])
        for coeff, path in rel.terms:
            total = total + path_matrix(module, path).scale(coeff)
        if not total.is_zero():
            bad.append(f"relation {k} at vertex {src_v}")
    return bad


def validate_module(algebra: Algebra, module: Module) -> Module:
    if module.algebra is not algebra:
        raise InputError("module belongs to a different algebra instance")
    bad = relation_violations(module)
    if bad:
        raise InputError("module violates relations: " + "; ".join(bad))
    return module


def dual_module(m: Module) -> Module:
    """Vector-space dual, a module over the opposite algebra."""
    op = m.algebra.opposite()
    action = {a.name: m.action[a.name].transpose() for a in m.algebra.arrows}
    return Module(op, dict(m.dims), action, check=False)


class Morphism:
    """A vertex-indexed family of matrices intertwining two representations."""

    __slots__ = ("source", "target", "comps")

    def __init__(self, source: Module, target: Module, comps: Mapping[str, Matrix],
                 check: bool = True):
        if source.algebra is not target.algebra:
            raise InputError("source and target live over different algebras")
        self.source = source
        self.target = target
        alg = source.algebra
        self.comps = {}
        for v in alg.vertices:
            c = comps.get(v)
            if c is None:
                c = Matrix.zeros(alg.field, target.dims[v], source.dims[v])
            if (c.rows, c.cols) != (target.dims[v], source.dims[v]):
                raise InputError(
                    f"component at {v!r} is {c.rows}x{c.cols}, "
                    f"expected {target.dims[v]}x{source.dims[v]}"
                )
            self.comps[v] = c
        if check and not self.intertwines():
            raise InputError("components do not intertwine the arrow actions")

    def intertwines(self) -> bool:
        for a in self.source.algebra.arrows:
            lhs = self.comps[a.target] @ self.source.action[a.name]
            rhs = self.target.action[a.name] @ self.comps[a.source]
            if lhs != rhs:
                return False
        return True

    @staticmethod
    def identity(x: Module) -> "Morphism":
        field = x.algebra.field
        return Morphism(x, x, {v: Matrix.identity(field, x.dims[v]) for v in x.algebra.vertices},
                        check=False)

    @staticmethod
    def zero(source: Module, target: Module) -> "Morphism":
        return Morphism(source, target, {}, check=False)

    def __matmul__(self, other: "Morphism") -> "Morphism":
        """Composition self after other."""
        if other.target.key != self.source.key:
            raise InputError("morphisms are not composable")
        comps = {v: self.comps[v] @ other.comps[v] for v in self.source.algebra.vertices}
        return Morphism(other.source, self.target, comps, check=False)

    def __add__(self, other: "Morphism") -> "Morphism":
        comps = {v: self.comps[v] + other.comps[v] for v in self.source.algebra.vertices}
        return Morphism(self.source, self.target, comps, check=False)

    def __sub__(self, other: "Morphism") -> "Morphism":
        comps = {v: self.comps[v] - other.comps[v] for v in self.source.algebra.vertices}
        return Morphism(self.source, self.target, comps, check=False)

    def __neg__(self) -> "Morphism":
        return Morphism(self.source, self.target,
                        {v: -self.comps[v] for v in self.source.algebra.vertices}, check=False)

    def scale(self, c) -> "Morphism":
        return Morphism(self.source, self.target,
                        {v: self.comps[v].scale(c) for v in self.source.algebra.vertices},
                        check=False)

    def is_zero(self) -> bool:
        return all(self.comps[v].is_zero() for v in self.source.algebra.vertices)

    def __eq__(self, other):
        return (
            isinstance(other, Morphism)
            and self.source.key == other.source.key
            and self.target.key == other.target.key
            and all(self.comps[v] == other.comps[v] for v in self.source.algebra.vertices)
        )

    def vec(self) -> np.ndarray:
        """Row-major flattening of all components, in vertex order."""
        field = self.source.algebra.field
        parts = [self.comps[v].data.reshape(-1) for v in self.source.algebra.vertices]
        if not parts:
            return np.empty(0, dtype=field.dtype)
        return np.concatenate(parts)

    @staticmethod
    def hom_dim_layout(source: Module, target: Module) -> List[Tuple[str, int, int, int]]:
        """(vertex, offset, target rows, source cols) blocks of the hom space."""
        out = []
        off = 0
        for v in source.algebra.vertices:
            r, c = target.dims[v], source.dims[v]
            out.append((v, off, r, c))
            off += r * c
        return out

    @staticmethod
    def from_vec(source: Module, target: Module, v: np.ndarray, check: bool = False) -> "Morphism":
        field = source.algebra.field
        comps = {}
        for vertex, off, r, c in Morphism.hom_dim_layout(source, target):
            block = v[off : off + r * c]
            arr = np.empty((r, c), dtype=field.dtype)
            arr.reshape(-1)[...] = block
            comps[vertex] = Matrix(field, field.reduce(arr))
        return Morphism(source, target, comps, check=check)

    def to_dict(self, source_name: str, target_name: str) -> dict:
        return {
            "source": source_name,
            "target": target_name,
            "comps": {v: self.comps[v].format_entries() for v in self.source.algebra.vertices},
        }

    @staticmethod
    def from_dict(d: Mapping, source: Module, target: Module) -> "Morphism":
        alg = source.algebra
        comps = {}
        for v in alg.vertices:
            entries = d.get("comps", {}).get(v)
            if entries is not None:
                comps[v] = Matrix.from_entries(
                    alg.field, target.dims[v], source.dims[v],
                    [alg.field.parse(s) if isinstance(s, str) else s for s in entries],
                )
        return Morphism(source, target, comps)

    def __repr__(self):
        return f"Morphism({self.source.dims_tuple()} -> {self.target.dims_tuple()})"


# -- hom spaces ----------------------------------------------------------------


def _kron(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return field.reduce(np.kron(a, b))


def hom_basis(x: Module, y: Module) -> List[Morphism]:
    """Deterministic basis of Hom(x, y), solving the intertwiner equations.

    Cached per algebra by module content, so structurally equal modules share
    one computation.
    """
    alg = x.algebra
    cache_key = (x.key, y.key)
    cached = alg._hom_cache.get(cache_key)
    if cached is None:
        field = alg.field
        layout = Morphism.hom_dim_layout(x, y)
        offsets = {v: (off, r, c) for v, off, r, c in layout}
        n = sum(r * c for _, _, r, c in layout)
        rows = []
        for a in alg.arrows:
            i, j = a.source, a.target
            ri = offsets[i]
            rj = offsets[j]
            neqs = y.dims[j] * x.dims[i]
            if neqs == 0:
                continue
            block = Matrix.zeros(field, neqs, n)
            if rj[1] * rj[2]:
                # C_j X_a  ~  (I ⊗ X_a^T) vec(C_j), row-major vec
                eye = Matrix.identity(field, y.dims[j]).data
                block.data[:, rj[0] : rj[0] + rj[1] * rj[2]] = _kron(
                    field, eye, x.action[a.name].data.T
                )
            if ri[1] * ri[2]:
                # Y_a C_i  ~  (Y_a ⊗ I) vec(C_i)
                eye = Matrix.identity(field, x.dims[i]).data
                block.data[:, ri[0] : ri[0] + ri[1] * ri[2]] = field.reduce(
                    block.data[:, ri[0] : ri[0] + ri[1] * ri[2]]
                    - _kron(field, y.action[a.name].data, eye)
                )
            rows.append(block)
        if rows:
            system = Matrix.vstack(rows)
        else:
            system = Matrix.zeros(field, 0, n)
        ker = system.kernel()
        cached = [ker.data[:, k].copy() for k in range(ker.cols)]
        alg._hom_cache[cache_key] = cached
    return [Morphism.from_vec(x, y, v) for v in cached]


def hom_dim(x: Module, y: Module) -> int:
    return len(hom_basis(x, y))


# -- kernels, cokernels, sums ----------------------------------------------------


def kernel(f: Morphism) -> Tuple[Module, Morphism]:
    """Vertexwise kernel with induced arrow action and its inclusion."""
    alg = f.source.algebra
    field = alg.field
    bases = {v: f.comps[v].kernel() for v in alg.vertices}
    dims = {v: bases[v].cols for v in alg.vertices}
    action = {}
    for a in alg.arrows:
        img = f.source.action[a.name] @ bases[a.source]
        sol = bases[a.target].solve_cols(img)
        if sol is None:
            raise InternalCheckError("kernel is not arrow-stable")
        action[a.name] = sol
    k = Module(alg, dims, action, check=False)
    inc = Morphism(k, f.source, dict(bases), check=False)
    return k, inc


def cokernel(f: Morphism) -> Tuple[Module, Morphism]:
    """Vertexwise cokernel with induced arrow action and its projection."""
    alg = f.source.algebra
    field = alg.field
    quots = {}
    dims = {}
    for v in alg.vertices:
        fv = f.comps[v]
        dy = fv.rows
        _, pivots, _ = fv.rref()
        # image basis: pivot columns of the original matrix
        img = fv.data[:, pivots] if pivots else np.empty((dy, 0), dtype=field.dtype)
        span = RowSpan(field, dy)
        for j in range(img.shape[1]):
            span.add(img[:, j].copy())
        complement = []
        for i in range(dy):
            e = np.empty(dy, dtype=field.dtype)
            e[...] = field.zero()
            e[i] = field.one()
            if span.add(e):
                complement.append(i)
        sel = Matrix.zeros(field, dy, len(complement))
        for k, i in enumerate(complement):
            sel.data[i, k] = field.one()
        t = Matrix(field, np.hstack([img, sel.data]))
        tinv = t.inverse()
        if tinv is None:
            raise InternalCheckError("cokernel complement is not a basis")
        q = Matrix(field, tinv.data[img.shape[1] :, :].copy())
        quots[v] = (q, sel)
        dims[v] = len(complement)
    action = {}
    for a in alg.arrows:
        qw, _ = quots[a.target]
        _, sv = quots[a.source]
        action[a.name] = qw @ f.target.action[a.name] @ sv
    c = Module(alg, dims, action, check=False)
    proj = Morphism(f.target, c, {v: quots[v][0] for v in alg.vertices}, check=False)
    return c, proj


def kernel_factor(inc: Morphism, g: Morphism) -> Morphism:
    """The unique h with inc @ h = g, for g killed by the cokernel side."""
    alg = inc.source.algebra
    comps = {}
    for v in alg.vertices:
        sol = inc.comps[v].solve_cols(g.comps[v])
        if sol is None:
            raise InputError("morphism does not factor through the kernel")
        comps[v] = sol
    return Morphism(g.source, inc.source, comps, check=False)


def cokernel_factor(proj: Morphism, g: Morphism) -> Morphism:
    """The unique h with h @ proj = g, for g vanishing on the image."""
    alg = proj.source.algebra
    comps = {}
    for v in alg.vertices:
        sol = proj.comps[v].transpose().solve_cols(g.comps[v].transpose())
        if sol is None:
            raise InputError("morphism does not factor through the cokernel")
        comps[v] = sol.transpose()
    return Morphism(proj.target, g.target, comps, check=False)


def direct_sum(parts: Sequence[Module],
               algebra: Optional[Algebra] = None) -> Tuple[Module, List[Morphism], List[Morphism]]:
    """Block-diagonal sum with canonical injections and projections.

    An empty list yields the zero module, for which the algebra is required.
    """
    if not parts:
        if algebra is None:
            raise InputError("direct_sum of an empty list needs the algebra argument")
        return zero_module(algebra), [], []
    alg = parts[0].algebra
    field = alg.field
    dims = {v: sum(p.dims[v] for p in parts) for v in alg.vertices}
    action = {
        a.name: Matrix.block_diag(field, [p.action[a.name] for p in parts])
        for a in alg.arrows
    }
    total = Module(alg, dims, action, check=False)
    injections, projections = [], []
    for k, part in enumerate(parts):
        inj, proj = {}, {}
        for v in alg.vertices:
            before = sum(p.dims[v] for p in parts[:k])
            m = Matrix.zeros(field, dims[v], part.dims[v])
            one = field.one()
            for i in range(part.dims[v]):
                m.data[before + i, i] = one
            inj[v] = m
            proj[v] = m.transpose()
        injections.append(Morphism(part, total, inj, check=False))
        projections.append(Morphism(total, part, proj, check=False))
    return total, injections, projections


def sum_morphism_into(target: Module, pieces: Sequence[Morphism]) -> Morphism:
    """(f_1 ... f_k): ⊕ sources -> target, stacking components side by side."""
    sources = [f.source for f in pieces]
    total, _, projections = direct_sum(sources) if sources else (None, None, None)
    if not pieces:
        raise InputError("need at least one piece")
    out = pieces[0] @ projections[0]
    for f, pr in zip(pieces[1:], projections[1:]):
        out = out + (f @ pr)
    return out


def pushout(f: Morphism, g: Morphism) -> Tuple[Module, Morphism, Morphism]:
    """Pushout of f: A -> B along g: A -> C.

    Returns (D, B -> D, C -> D), computed as the cokernel of (f, -g): A -> B ⊕ C.
    """
    if f.source.key != g.source.key:
        raise InputError("pushout needs a common source")
    total, injections, _ = direct_sum([f.target, g.target])
    u = (injections[0] @ f) - (injections[1] @ g)
    d, proj = cokernel(u)
    return d, proj @ injections[0], proj @ injections[1]


def pullback(f: Morphism, g: Morphism) -> Tuple[Module, Morphism, Morphism]:
    """Pullback of f: B -> A along g: C -> A.

    Returns (E, E -> B, E -> C), computed as the kernel of (f, -g): B ⊕ C -> A.
    """
    if f.target.key != g.target.key:
        raise InputError("pullback needs a common target")
    total, _, projections = direct_sum([f.source, g.source])
    u = (f @ projections[0]) - (g @ projections[1])
    e, inc = kernel(u)
    return e, projections[0] @ inc, projections[1] @ inc


def is_mono(f: Morphism) -> bool:
    return all(f.comps[v].rank() == f.source.dims[v] for v in f.source.algebra.vertices)


def is_epi(f: Morphism) -> bool:
    return all(f.comps[v].rank() == f.target.dims[v] for v in f.source.algebra.vertices)


def is_iso(f: Morphism) -> bool:
    return is_mono(f) and is_epi(f) and all(
        f.source.dims[v] == f.target.dims[v] for v in f.source.algebra.vertices
    )


def invert(f: Morphism) -> Morphism:
    if not is_iso(f):
        raise InputError("morphism is not invertible")
    comps = {v: f.comps[v].inverse() for v in f.source.algebra.vertices}
    return Morphism(f.target, f.source, comps, check=False)


# -- short exact sequences -------------------------------------------------------


@dataclass(frozen=True)
class ShortExactSequence:
    """A composable pair (inflation, deflation) with exactness witnesses."""

    i: Morphism
    p: Morphism

    def validate(self) -> "ShortExactSequence":
        if self.i.target.key != self.p.source.key:
            raise InputError("inflation and deflation are not composable")
        if not is_mono(self.i):
            raise InputError("first map is not an inflation (not mono)")
        if not is_epi(self.p):
            raise InputError("second map is not a deflation (not epi)")
        if not (self.p @ self.i).is_zero():
            raise InputError("composite p @ i is nonzero")
        for v in self.i.source.algebra.vertices:
            if self.i.comps[v].rank() + self.p.comps[v].rank() != self.i.target.dims[v]:
                raise InputError(f"sequence not exact at vertex {v!r}")
        return self

    @property
    def sub(self) -> Module:
        return self.i.source

    @property
    def middle(self) -> Module:
        return self.i.target

    @property
    def quotient(self) -> Module:
        return self.p.target


# -- submodule enumeration ---------------------------------------------------------


def _subspaces(field: Field, dim: int):
    """All subspaces of F_p^dim as column-basis matrices, RREF-enumerated."""
    p = field.characteristic
    for r in range(dim + 1):
        for pivots in itertools.combinations(range(dim), r):
            free_slots = [
                (i, j)
                for i in range(r)
                for j in range(pivots[i] + 1, dim)
                if j not in pivots
            ]
            for values in itertools.product(range(p), repeat=len(free_slots)):
                rows = Matrix.zeros(field, r, dim)
                for i in range(r):
                    rows.data[i, pivots[i]] = field.one()
                for (i, j), val in zip(free_slots, values):
                    rows.data[i, j] = val
                yield rows.transpose()


def enumerate_submodules(x: Module, max_total_dim: int = 6) -> List[Tuple[Module, Morphism]]:
    """All arrow-stable families of vertex subspaces, exact and finite.

    Restricted to prime fields and small total dimension: the only intended
    consumer is fixture discovery for rigid-candidate searches.
    """
    alg = x.algebra
    field = alg.field
    if field.kind != "prime":
        raise InputError("submodule enumeration requires a prime field")
    if x.total_dim > max_total_dim:
        raise InputError(
            f"total dimension {x.total_dim} exceeds the enumeration cap {max_total_dim}"
        )
    per_vertex = {v: list(_subspaces(field, x.dims[v])) for v in alg.vertices}
    results = []
    for combo in itertools.product(*(per_vertex[v] for v in alg.vertices)):
        family = dict(zip(alg.vertices, combo))
        stable = True
        for a in alg.arrows:
            img = x.action[a.name] @ family[a.source]
            if family[a.target].solve_cols(img) is None:
                stable = False
                break
        if not stable:
            continue
        dims = {v: family[v].cols for v in alg.vertices}
        action = {}
        for a in alg.arrows:
            action[a.name] = family[a.target].solve_cols(x.action[a.name] @ family[a.source])
        sub = Module(alg, dims, action, check=False)
        inc = Morphism(sub, x, family, check=False)
        results.append((sub, inc))
    return results
