"""Nilpotent Lie algebras over Gaussian rationals: bracket tables, filtrations, adapted bases.

Conventions: basis indices are 0-based internally and 1-based in JSON files.
A bracket table stores [e_i, e_j] for i < j only; antisymmetry is implicit and
missing pairs are zero.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources

from gmpy2 import mpq

from .errors import NotNilpotentError, StructuralError
from .linalg import (
    Vec,
    echelon,
    in_span,
    rank,
    solve_combination,
    vec_add,
    vec_is_zero,
    vec_scale,
    zero_vec,
)
from .scalars import ONE, ZERO, Scalar, parse_scalar, scalar_str


class LieAlgebra:
    """A finite dimensional algebra given by its bracket table on a basis."""

    def __init__(self, dim: int, brackets: dict[tuple[int, int], Vec], name: str | None = None):
        if dim < 1:
            raise StructuralError("dim must be >= 1")
        self.dim = dim
        self.name = name
        table: dict[tuple[int, int], Vec] = {}
        for (i, j), vec in brackets.items():
            if not (0 <= i < j < dim):
                raise StructuralError(f"bracket pair ({i}, {j}) out of range for dim {dim}")
            if len(vec) != dim:
                raise StructuralError(f"bracket ({i}, {j}) has {len(vec)} coefficients, expected {dim}")
            vec = tuple(c if isinstance(c, Scalar) else Scalar(c) for c in vec)
            if any(vec):
                table[(i, j)] = vec
        self.brackets = table
        # flat view used by the evaluators: (i, j, ((k, c), ...))
        self.pairs = tuple(
            (i, j, tuple((k, c) for k, c in enumerate(vec) if c))
            for (i, j), vec in sorted(table.items())
        )
        self.is_real = all(c.is_real for _, _, terms in self.pairs for _, c in terms)

    def bracket_of_basis(self, i: int, j: int) -> Vec:
        if i == j:
            return zero_vec(self.dim)
        if i < j:
            vec = self.brackets.get((i, j))
            return vec if vec is not None else zero_vec(self.dim)
        vec = self.brackets.get((j, i))
        return vec_scale(-ONE, vec) if vec is not None else zero_vec(self.dim)

    def __repr__(self):
        label = self.name or f"dim{self.dim}"
        return f"LieAlgebra({label}, {len(self.brackets)} brackets)"


def bracket(L: LieAlgebra, x: Vec, y: Vec) -> Vec:
    """[x, y] in basis coordinates, exact."""
    acc = [ZERO] * L.dim
    for i, j, terms in L.pairs:
        d = x[i] * y[j] - x[j] * y[i]
        if d:
            for k, c in terms:
                acc[k] = acc[k] + c * d
    return tuple(acc)


@dataclass
class ValidationReport:
    dim: int
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"dim": self.dim, "ok": self.ok, "violations": self.violations}


def validate(L: LieAlgebra) -> ValidationReport:
    """Check the Jacobi identity on every basis triple and nilpotency of the table."""
    report = ValidationReport(dim=L.dim)
    basis = [tuple(ONE if t == s else ZERO for t in range(L.dim)) for s in range(L.dim)]
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            for k in range(j + 1, L.dim):
                acc = bracket(L, basis[i], bracket(L, basis[j], basis[k]))
                acc = vec_add(acc, bracket(L, basis[j], bracket(L, basis[k], basis[i])))
                acc = vec_add(acc, bracket(L, basis[k], bracket(L, basis[i], basis[j])))
                if not vec_is_zero(acc):
                    report.violations.append(
                        {
                            "kind": "jacobi",
                            "triple": [i + 1, j + 1, k + 1],
                            "detail": "[" + ", ".join(scalar_str(c) for c in acc) + "]",
                        }
                    )
    if not report.violations:
        try:
            lower_central_series(L)
        except NotNilpotentError as exc:
            report.violations.append(
                {
                    "kind": "not_nilpotent",
                    "triple": list(exc.witness) if exc.witness else [],
                    "detail": str(exc),
                }
            )
    return report


class Filtration:
    """A decreasing chain of subspaces g_1 > g_2 > ... > g_k, each an echelon basis."""

    def __init__(self, L: LieAlgebra, layers: list[list[Vec]]):
        self.algebra = L
        self.layers = tuple(tuple(layer) for layer in layers)
        self.dims = tuple(len(layer) for layer in self.layers)

    @property
    def depth(self) -> int:
        """Nilpotency class: the last index with a nonzero subspace."""
        return len(self.layers)

    def subspace(self, j: int) -> tuple[Vec, ...]:
        """Echelon basis of g_j; empty beyond the depth."""
        if j < 1:
            raise StructuralError("filtration indices start at 1")
        if j > len(self.layers):
            return ()
        return self.layers[j - 1]

    def member_weight(self, v: Vec) -> int:
        """max{j : v in g_j}, with 0 for vectors outside g_1 and depth+... for 0."""
        if vec_is_zero(v):
            return self.depth + 1
        w = 0
        for j in range(1, self.depth + 1):
            if in_span(list(self.subspace(j)), v):
                w = j
            else:
                break
        return w

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "class": self.depth}


def lower_central_series(L: LieAlgebra) -> Filtration:
    """g_1 = g, g_{i+1} = [g, g_i]; raises NotNilpotentError if it never reaches zero."""
    basis = [tuple(ONE if t == s else ZERO for t in range(L.dim)) for s in range(L.dim)]
    layers: list[list[Vec]] = [echelon(basis)]
    while True:
        current = layers[-1]
        generated = [bracket(L, b, v) for b in basis for v in current]
        nxt = echelon(generated)
        if not nxt:
            return Filtration(L, layers)
        if len(nxt) >= len(current):
            witness = None
            for a, b in ((a, b) for a in range(L.dim) for b in range(L.dim)):
                img = bracket(L, basis[a], basis[b])
                if not vec_is_zero(img) and in_span(nxt, img):
                    witness = (a + 1, b + 1)
                    break
            raise NotNilpotentError(
                f"lower central series stabilizes at dimension {len(nxt)}",
                witness=witness,
            )
        layers.append(nxt)


def check_filtration(F: Filtration) -> None:
    """Raise StructuralError unless F is a positive filtration of its algebra."""
    L = F.algebra
    if not F.layers or len(F.layers[0]) != L.dim:
        raise StructuralError("filtration must start with the whole algebra")
    for j in range(1, F.depth):
        upper = list(F.subspace(j))
        for row in F.subspace(j + 1):
            if not in_span(upper, row):
                raise StructuralError(f"filtration is not decreasing at level {j + 1}")
    for i in range(1, F.depth + 1):
        for j in range(i, F.depth + 1):
            target = list(F.subspace(i + j))
            for u in F.subspace(i):
                for v in F.subspace(j):
                    w = bracket(L, u, v)
                    if vec_is_zero(w):
                        continue
                    if i + j > F.depth or not in_span(target, w):
                        raise StructuralError(
                            f"bracket of levels ({i}, {j}) leaves level {i + j}"
                        )


def _identity_rows(m: int) -> list[Vec]:
    return [tuple(ONE if t == s else ZERO for t in range(m)) for s in range(m)]


def _invert(rows: list[Vec]):
    """Inverse of the square matrix with the given rows, exact."""
    m = len(rows)
    aug = [list(rows[i]) + list(_identity_rows(m)[i]) for i in range(m)]
    r = 0
    for c in range(m):
        pivot = next((i for i in range(r, m) if aug[i][c]), None)
        if pivot is None:
            raise StructuralError("singular change of basis")
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = ONE / aug[r][c]
        aug[r] = [inv * a for a in aug[r]]
        for i in range(m):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        r += 1
    return [tuple(row[m:]) for row in aug]


class FBasis:
    """An adapted basis: weights are nondecreasing and g_j is spanned by the
    basis vectors of weight >= j. All downstream modules work in these
    coordinates."""

    def __init__(self, L: LieAlgebra, F: Filtration, vectors: list[Vec], weights: list[int]):
        self.algebra = L
        self.filtration = F
        self.vectors = tuple(vectors)
        self.weights = tuple(weights)
        self.dim = L.dim
        self.depth = F.depth
        unit = _identity_rows(L.dim)
        self.is_standard = list(self.vectors) == unit
        if self.is_standard:
            self._inv = None
        else:
            self._inv = _invert(list(self.vectors))
        pairs = []
        for a in range(L.dim):
            for b in range(a + 1, L.dim):
                vec = self.to_adapted(bracket(L, self.vectors[a], self.vectors[b]))
                terms = tuple((k, c) for k, c in enumerate(vec) if c)
                if terms:
                    pairs.append((a, b, terms))
        self.pairs = tuple(pairs)
        self.is_real = all(c.is_real for _, _, terms in self.pairs for _, c in terms)
        # rational view of the structure constants, used by the fast paths
        self.pairs_q = (
            tuple(
                (i, j, tuple((k, c.re) for k, c in terms))
                for i, j, terms in self.pairs
            )
            if self.is_real
            else None
        )
        # weight-graded index bookkeeping
        self.indices_by_weight: dict[int, tuple[int, ...]] = {}
        for i, w in enumerate(self.weights):
            self.indices_by_weight[w] = self.indices_by_weight.get(w, ()) + (i,)

    def to_adapted(self, v: Vec) -> Vec:
        """Coordinates of an original-basis vector in the adapted basis."""
        if self.is_standard:
            return tuple(v)
        out = []
        for col in range(self.dim):
            out.append(sum((v[r] * self._inv[r][col] for r in range(self.dim)), ZERO))
        return tuple(out)

    def from_adapted(self, coords: Vec) -> Vec:
        if self.is_standard:
            return tuple(coords)
        acc = zero_vec(self.dim)
        for c, vec in zip(coords, self.vectors):
            if c:
                acc = vec_add(acc, vec_scale(c, vec))
        return acc

    def basis_coords(self, i: int) -> Vec:
        return tuple(ONE if t == i else ZERO for t in range(self.dim))

    def bracket_adapted(self, x: Vec, y: Vec) -> Vec:
        """[x, y] for adapted-coordinate vectors."""
        acc = [ZERO] * self.dim
        for i, j, terms in self.pairs:
            d = x[i] * y[j] - x[j] * y[i]
            if d:
                for k, c in terms:
                    acc[k] = acc[k] + c * d
        return tuple(acc)

    def weight_one_indices(self) -> tuple[int, ...]:
        return self.indices_by_weight.get(1, ())

    def to_json(self) -> dict:
        return {
            "weights": list(self.weights),
            "vectors": [[scalar_str(c) for c in vec] for vec in self.vectors],
        }


def f_basis(L: LieAlgebra, F: Filtration | None = None) -> FBasis:
    """Build an adapted basis for a filtration (default: the lower central series).

    Completion walks from the deepest layer up, keeping each echelon row that
    adds rank; within a layer rows enter in pivot order (lowest index first).
    """
    if F is None:
        F = lower_central_series(L)
    else:
        check_filtration(F)
    chosen: list[tuple[int, Vec]] = []
    span: list[Vec] = []
    for j in range(F.depth, 0, -1):
        for row in F.subspace(j):
            if not in_span(span, row):
                chosen.append((j, row))
                span = echelon(span + [row])
    if len(chosen) != L.dim:
        raise StructuralError("filtration does not exhaust the algebra")

    def lead(vec: Vec) -> int:
        return next(i for i, c in enumerate(vec) if c)

    chosen.sort(key=lambda t: (t[0], lead(t[1])))
    weights = [w for w, _ in chosen]
    vectors = [v for _, v in chosen]
    return FBasis(L, F, vectors, weights)


MultiIndex = tuple[int, ...]


def weight_of(fb: FBasis, alpha: MultiIndex) -> int:
    """Weighted degree sum(w_i * alpha_i) of a multi-index."""
    if len(alpha) != fb.dim:
        raise StructuralError(f"multi-index length {len(alpha)} != dim {fb.dim}")
    if any(a < 0 for a in alpha):
        raise StructuralError("multi-index entries must be nonnegative")
    return sum(w * a for w, a in zip(fb.weights, alpha))


class LayerDecomposition:
    """Splitting of the algebra into the spans v_s of adapted basis vectors of
    weight exactly s, so that v_s + g_{s+1} = g_s."""

    def __init__(self, fb: FBasis):
        self.fb = fb
        self.layers = {
            s: tuple(fb.vectors[i] for i in idxs)
            for s, idxs in fb.indices_by_weight.items()
        }

    def indices(self, s: int) -> tuple[int, ...]:
        return self.fb.indices_by_weight.get(s, ())

    def project(self, coords: Vec, s: int) -> Vec:
        """Component of an adapted-coordinate vector in layer s."""
        idxs = set(self.indices(s))
        return tuple(c if i in idxs else ZERO for i, c in enumerate(coords))

    def to_json(self) -> dict:
        return {str(s): len(idxs) for s, idxs in sorted(self.fb.indices_by_weight.items())}


def layer_decomposition(fb: FBasis) -> LayerDecomposition:
    return LayerDecomposition(fb)


# -- serialization and bundled tables ------------------------------------


def algebra_from_json(doc: dict, name: str | None = None) -> LieAlgebra:
    if not isinstance(doc, dict) or "dim" not in doc:
        raise StructuralError("algebra JSON must be an object with a 'dim' field")
    dim = doc["dim"]
    if not isinstance(dim, int):
        raise StructuralError("'dim' must be an integer")
    brackets: dict[tuple[int, int], Vec] = {}
    for entry in doc.get("brackets", []):
        try:
            i, j = int(entry["i"]), int(entry["j"])
        except (KeyError, TypeError, ValueError) as exc:
            raise StructuralError(f"bad bracket entry {entry!r}") from exc
        if not (1 <= i < j <= dim):
            raise StructuralError(f"bracket indices ({i}, {j}) out of range (1-based, i < j)")
        coeffs = entry.get("coeffs", {})
        vec = [ZERO] * dim
        for key, val in coeffs.items():
            k = int(key)
            if not (1 <= k <= dim):
                raise StructuralError(f"coefficient index {k} out of range")
            vec[k - 1] = parse_scalar(val)
        key = (i - 1, j - 1)
        if key in brackets:
            raise StructuralError(f"duplicate bracket entry for ({i}, {j})")
        brackets[key] = tuple(vec)
    return LieAlgebra(dim, brackets, name=name)


def algebra_to_json(L: LieAlgebra) -> dict:
    entries = []
    for (i, j), vec in sorted(L.brackets.items()):
        coeffs = {str(k + 1): scalar_str(c) for k, c in enumerate(vec) if c}
        entries.append({"i": i + 1, "j": j + 1, "coeffs": coeffs})
    return {"dim": L.dim, "brackets": entries}


def heisenberg() -> LieAlgebra:
    return LieAlgebra(3, {(0, 1): (ZERO, ZERO, ONE)}, name="heisenberg3")


def abelian(m: int) -> LieAlgebra:
    if m < 1:
        raise StructuralError("abelian dimension must be >= 1")
    return LieAlgebra(m, {}, name=f"abelian_{m}")


def _bundled_names() -> list[str]:
    root = resources.files("nilalg.data")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def load_algebra(source) -> LieAlgebra:
    """Load an algebra from a dict, a JSON file path, or a bundled table name.

    Bundled names: heisenberg3, favre7, abelian_<m> (synthesized for any m).
    An existing file path wins over a bundled name.
    """
    if isinstance(source, dict):
        return algebra_from_json(source)
    if isinstance(source, LieAlgebra):
        return source
    if not isinstance(source, str):
        raise StructuralError(f"cannot load an algebra from {type(source).__name__}")
    if os.path.exists(source):
        with open(source, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise StructuralError(f"invalid JSON in {source}: {exc}") from exc
        stem = os.path.splitext(os.path.basename(source))[0]
        return algebra_from_json(doc, name=stem)
    stem = source[:-5] if source.endswith(".json") else source
    root = resources.files("nilalg.data")
    candidate = root / f"{stem}.json"
    if candidate.is_file():
        doc = json.loads(candidate.read_text(encoding="utf-8"))
        return algebra_from_json(doc, name=stem)
    if stem.startswith("abelian_"):
        try:
            m = int(stem.split("_", 1)[1])
        except ValueError as exc:
            raise StructuralError(f"bad abelian table name {source!r}") from exc
        return abelian(m)
    raise StructuralError(
        f"no such algebra {source!r}; bundled tables: {', '.join(_bundled_names())} "
        "and abelian_<m>"
    )
