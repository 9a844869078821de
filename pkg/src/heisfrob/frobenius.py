"""Exact arithmetic for finite-dimensional symmetric Frobenius algebras.

An algebra is given by an ordered basis, structure constants and a trace
vector.  All coordinates are :class:`fractions.Fraction`.  Direct sums record
a color partition of the basis so that the idempotents ``e_i`` and the
per-component bases ``B_i`` are available to the diagram engine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

Coords = tuple[Fraction, ...]


class FrobeniusError(ValueError):
    """Base class for algebra construction and arithmetic errors."""


class NotAssociative(FrobeniusError):
    pass


class NotUnital(FrobeniusError):
    pass


class TraceNotSymmetric(FrobeniusError):
    pass


class TraceDegenerate(FrobeniusError):
    pass


class CrossComponentProductNonzero(FrobeniusError):
    pass


class AlgebraMismatch(FrobeniusError):
    pass


class AlgebraFormatError(FrobeniusError):
    pass


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


# ---------------------------------------------------------------------------
# fraction-free linear algebra


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    out = []
    for row in rows:
        den = 1
        for v in row:
            den = den * v.denominator // _gcd(den, v.denominator)
        out.append([int(v * den) for v in row])
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def bareiss_inverse(matrix: Sequence[Sequence[Fraction]]) -> list[list[Fraction]] | None:
    """Invert a square rational matrix by Bareiss elimination.

    Rows are first cleared of denominators; the elimination then runs over the
    integers and the inverse is read off at the end.  Returns ``None`` for a
    singular matrix.
    """
    n = len(matrix)
    if n == 0:
        return []
    # scaling row i of A by s_i turns A^{-1} into A^{-1} diag(s)^{-1}
    scales = []
    aug = []
    for i, row in enumerate(matrix):
        den = 1
        for v in row:
            den = den * v.denominator // _gcd(den, v.denominator)
        scales.append(den)
        aug.append([int(v * den) for v in row] + [1 if j == i else 0 for j in range(n)])
    prev = 1
    for k in range(n):
        pivot = next((r for r in range(k, n) if aug[r][k] != 0), None)
        if pivot is None:
            return None
        if pivot != k:
            aug[k], aug[pivot] = aug[pivot], aug[k]
        pk = aug[k][k]
        for i in range(k + 1, n):
            aik = aug[i][k]
            row_i, row_k = aug[i], aug[k]
            for j in range(k + 1, 2 * n):
                row_i[j] = (pk * row_i[j] - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pk
    # back substitution over the rationals on the triangular integer system
    inv = [[Fraction(0)] * n for _ in range(n)]
    for col in range(n):
        x = [Fraction(0)] * n
        for i in range(n - 1, -1, -1):
            acc = Fraction(aug[i][n + col])
            for j in range(i + 1, n):
                acc -= aug[i][j] * x[j]
            x[i] = acc / aug[i][i]
        for i in range(n):
            inv[i][col] = x[i]
    # undo the row scaling: (S A)^{-1} = A^{-1} S^{-1}  =>  A^{-1} = (SA)^{-1} S
    return [[inv[i][j] * scales[j] for j in range(n)] for i in range(n)]


def solve_linear(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Return one solution of an (over-determined) linear system, or None."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    aug = [list(map(Fraction, rows[i])) + [Fraction(rhs[i])] for i in range(m)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][n]
    return x


# ---------------------------------------------------------------------------
# algebras and elements


@dataclass(frozen=True, eq=False)
class FrobeniusAlgebra:
    """A validated symmetric Frobenius algebra with an ordered basis.

    Use :func:`build_algebra` or :func:`direct_sum` rather than the
    constructor; they check every axiom before returning.
    """

    basis: tuple[str, ...]
    structure: tuple[tuple[Coords, ...], ...]
    trace_vector: Coords
    unit_coords: Coords
    components: tuple[int, ...] | None = None
    name: str = "F"
    _dual: tuple[Coords, ...] = field(default=(), repr=False)

    # -- basic data ---------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n_colors(self) -> int:
        return max(self.components) if self.components else 1

    @property
    def partitioned(self) -> bool:
        return self.components is not None

    def index(self, label: str) -> int:
        try:
            return self.basis.index(label)
        except ValueError:
            raise KeyError(f"unknown basis label {label!r} in {self.name}") from None

    def color_of(self, b: int) -> int | None:
        return self.components[b] if self.components else None

    def component_basis(self, color: int | None) -> tuple[int, ...]:
        """Indices of ``B_i`` (all of ``B`` for ``color=None``)."""
        if color is None:
            return tuple(range(self.dim))
        if not self.components:
            raise KeyError("algebra has no partition")
        if not 1 <= color <= self.n_colors:
            raise KeyError(f"color {color} out of range 1..{self.n_colors}")
        return tuple(i for i, c in enumerate(self.components) if c == color)

    # -- elements -----------------------------------------------------------
    def element(self, coords: Iterable) -> "AlgebraElement":
        c = tuple(as_fraction(v) for v in coords)
        if len(c) != self.dim:
            raise ValueError("coordinate vector has wrong length")
        return AlgebraElement(self, c)

    def basis_element(self, i: int) -> "AlgebraElement":
        return AlgebraElement(self, tuple(Fraction(int(j == i)) for j in range(self.dim)))

    @property
    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, self.unit_coords)

    @property
    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, (Fraction(0),) * self.dim)

    def idempotent(self, color: int) -> "AlgebraElement":
        """``e_i = 1_{F_i}``: the unit of component ``color``."""
        idx = set(self.component_basis(color))
        return AlgebraElement(
            self, tuple(v if i in idx else Fraction(0) for i, v in enumerate(self.unit_coords))
        )

    def named(self, name: str) -> "AlgebraElement":
        """Resolve a token name: a basis label, ``1``, or ``e<i>``."""
        if name in self.basis:
            return self.basis_element(self.basis.index(name))
        if name == "1":
            return self.one
        m = re.fullmatch(r"e(\d+)", name)
        if m and self.components:
            return self.idempotent(int(m.group(1)))
        raise KeyError(f"unknown token {name!r} for algebra {self.name}")

    def token_names(self) -> list[str]:
        names = list(self.basis)
        if "1" not in names:
            names.append("1")
        if self.components:
            names += [f"e{i}" for i in range(1, self.n_colors + 1) if f"e{i}" not in names]
        return names

    # -- arithmetic on coordinates -----------------------------------------
    def mul_coords(self, a: Coords, b: Coords) -> Coords:
        out = [Fraction(0)] * self.dim
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = self.structure[i]
            for j, bj in enumerate(b):
                if not bj:
                    continue
                c = ai * bj
                for k, v in enumerate(row[j]):
                    if v:
                        out[k] += c * v
        return tuple(out)

    def trace_coords(self, a: Coords) -> Fraction:
        return sum((x * t for x, t in zip(a, self.trace_vector)), Fraction(0))

    @cached_property
    def gram(self) -> tuple[Coords, ...]:
        return tuple(
            tuple(self.trace_coords(self.structure[a][b]) for b in range(self.dim))
            for a in range(self.dim)
        )

    def dual_coords(self, b: int) -> Coords:
        """Coordinates of the left dual basis element ``b̌``."""
        return self._dual[b]

    def basis_product(self, a: int, b: int) -> Coords:
        return self.structure[a][b]

    def project(self, f: "AlgebraElement", color: int) -> "AlgebraElement":
        """The component ``f e_i`` of ``f`` in ``F_i``."""
        idx = set(self.component_basis(color))
        return AlgebraElement(self, tuple(v if i in idx else Fraction(0) for i, v in enumerate(f.coords)))

    def __repr__(self) -> str:
        return f"FrobeniusAlgebra({self.name}, basis={list(self.basis)})"


@dataclass(frozen=True)
class AlgebraElement:
    algebra: FrobeniusAlgebra
    coords: Coords

    def _check(self, other: "AlgebraElement") -> None:
        if other.algebra is not self.algebra:
            raise AlgebraMismatch(f"elements of {self.algebra.name} and {other.algebra.name}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        s = as_fraction(other)
        return AlgebraElement(self.algebra, tuple(s * a for a in self.coords))

    def __rmul__(self, other):
        s = as_fraction(other)
        return AlgebraElement(self.algebra, tuple(s * a for a in self.coords))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraElement)
            and other.algebra is self.algebra
            and other.coords == self.coords
        )

    def __hash__(self) -> int:
        return hash((id(self.algebra), self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def trace(self) -> Fraction:
        return self.algebra.trace_coords(self.coords)

    def support(self) -> list[tuple[int, Fraction]]:
        return [(i, c) for i, c in enumerate(self.coords) if c]

    def __repr__(self) -> str:
        out = ""
        for i, c in self.support():
            label = self.algebra.basis[i]
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = label if mag == 1 else f"{mag}*{label}"
            out += (f"{'-' if sign == '-' else ''}{body}" if not out else f" {sign} {body}")
        return out or "0"


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Bilinear product of two elements of the same algebra."""
    if a.algebra is not b.algebra:
        raise AlgebraMismatch(f"cannot multiply elements of {a.algebra.name} and {b.algebra.name}")
    return AlgebraElement(a.algebra, a.algebra.mul_coords(a.coords, b.coords))


def trace(a: AlgebraElement) -> Fraction:
    return a.trace()


def dual_basis(F: FrobeniusAlgebra) -> list[AlgebraElement]:
    """The left dual basis ``b̌`` with ``tr(ǎ b) = δ_{a,b}``."""
    return [AlgebraElement(F, F.dual_coords(b)) for b in range(F.dim)]


# ---------------------------------------------------------------------------
# construction and validation


def _coords_from_entry(entry, basis: Sequence[str]) -> Coords:
    if isinstance(entry, Mapping):
        out = [Fraction(0)] * len(basis)
        for label, coef in entry.items():
            out[list(basis).index(label)] += as_fraction(coef)
        return tuple(out)
    vals = tuple(as_fraction(v) for v in entry)
    if len(vals) != len(basis):
        raise ValueError("structure constant vector has wrong length")
    return vals


def build_algebra(
    basis: Sequence[str],
    mult_table: Mapping[tuple[str, str], object],
    trace_vector: Mapping[str, object] | Sequence,
    partition: Mapping[str, int] | Sequence[int] | None = None,
    *,
    name: str = "F",
) -> FrobeniusAlgebra:
    """Validate the axioms and return the algebra.

    ``mult_table`` maps pairs of basis labels to the product, given either as a
    coordinate sequence or as ``{label: coefficient}``.  ``partition`` assigns a
    color ``1..n`` to every basis label.
    """
    basis = tuple(basis)
    n = len(basis)
    if n == 0 or len(set(basis)) != n:
        raise ValueError("basis must be a nonempty list of distinct labels")
    structure = []
    for a in basis:
        row = []
        for b in basis:
            if (a, b) not in mult_table:
                raise ValueError(f"product {a}*{b} missing from table")
            row.append(_coords_from_entry(mult_table[(a, b)], basis))
        structure.append(tuple(row))
    structure = tuple(structure)
    if isinstance(trace_vector, Mapping):
        tv = tuple(as_fraction(trace_vector.get(b, 0)) for b in basis)
    else:
        tv = tuple(as_fraction(v) for v in trace_vector)
    if len(tv) != n:
        raise ValueError("trace vector has wrong length")
    comps = None
    if partition is not None:
        if isinstance(partition, Mapping):
            comps = tuple(int(partition[b]) for b in basis)
        else:
            comps = tuple(int(c) for c in partition)
        if len(comps) != n or min(comps) < 1 or set(comps) != set(range(1, max(comps) + 1)):
            raise ValueError("partition must assign colors 1..n to every basis element")

    probe = FrobeniusAlgebra(basis, structure, tv, (Fraction(0),) * n, comps, name)
    e = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]

    for i in range(n):
        for j in range(n):
            for k in range(n):
                left = probe.mul_coords(structure[i][j], e[k])
                right = probe.mul_coords(e[i], structure[j][k])
                if left != right:
                    raise NotAssociative(
                        f"associativity fails: ({basis[i]}*{basis[j]})*{basis[k]} != "
                        f"{basis[i]}*({basis[j]}*{basis[k]})"
                    )

    # left unit u: sum_i u_i b_i b_j = b_j for all j
    rows, rhs = [], []
    for j in range(n):
        for k in range(n):
            rows.append([structure[i][j][k] for i in range(n)])
            rhs.append(e[j][k])
    u = solve_linear(rows, rhs)
    if u is None:
        raise NotUnital(f"no left unit exists (fails already on basis element {basis[0]})")
    unit = tuple(u)
    for j in range(n):
        if probe.mul_coords(e[j], unit) != e[j]:
            raise NotUnital(f"unit is not a right unit: {basis[j]}*1 != {basis[j]}")

    for i in range(n):
        for j in range(n):
            if probe.trace_coords(structure[i][j]) != probe.trace_coords(structure[j][i]):
                raise TraceNotSymmetric(
                    f"tr({basis[i]}*{basis[j]}) != tr({basis[j]}*{basis[i]})"
                )

    if comps is not None:
        for i in range(n):
            for j in range(n):
                if comps[i] != comps[j] and any(structure[i][j]):
                    raise CrossComponentProductNonzero(
                        f"{basis[i]} (color {comps[i]}) * {basis[j]} (color {comps[j]}) != 0"
                    )
        for i in range(n):
            for j in range(n):
                for k, v in enumerate(structure[i][j]):
                    if v and comps[k] != comps[i]:
                        raise CrossComponentProductNonzero(
                            f"{basis[i]}*{basis[j]} leaves component {comps[i]}"
                        )

    gram = [[probe.trace_coords(structure[a][b]) for b in range(n)] for a in range(n)]
    inv = bareiss_inverse(gram)
    if inv is None:
        raise TraceDegenerate(f"Gram matrix {[[str(v) for v in r] for r in gram]} is singular")
    # check^a = sum_c D[a][c] b_c with D G = I
    dual = tuple(tuple(inv[a][c] for c in range(n)) for a in range(n))
    return FrobeniusAlgebra(basis, structure, tv, unit, comps, name, dual)


def direct_sum(components: Sequence[FrobeniusAlgebra], *, name: str | None = None) -> FrobeniusAlgebra:
    """Block direct sum ``F_1 ⊕ ... ⊕ F_n`` with the color partition recorded.

    Basis labels of component ``i`` get the suffix ``_i`` when ``n > 1``.
    """
    if not components:
        raise ValueError("direct_sum needs at least one component")
    multi = len(components) > 1
    labels, colors, offsets = [], [], []
    for ci, comp in enumerate(components, start=1):
        offsets.append(len(labels))
        for lab in comp.basis:
            labels.append(f"{lab}_{ci}" if multi else lab)
            colors.append(ci)
    n = len(labels)
    table = {}
    for ci, comp in enumerate(components):
        off = offsets[ci]
        for i in range(comp.dim):
            for j in range(comp.dim):
                vec = [Fraction(0)] * n
                for k, v in enumerate(comp.structure[i][j]):
                    vec[off + k] = v
                table[(labels[off + i], labels[off + j])] = vec
    for a in range(n):
        for b in range(n):
            table.setdefault((labels[a], labels[b]), [0] * n)
    trace = [Fraction(0)] * n
    for ci, comp in enumerate(components):
        for i, v in enumerate(comp.trace_vector):
            trace[offsets[ci] + i] = v
    nm = name or "+".join(c.name for c in components)
    return build_algebra(labels, table, trace, colors, name=nm)


def component_algebra(F: FrobeniusAlgebra, color: int) -> FrobeniusAlgebra:
    """The block ``F_i`` of a partitioned algebra, with unit ``e_i``.

    Its basis index ``j`` corresponds to ``F.component_basis(color)[j]``.
    """
    idx = F.component_basis(color)
    if not F.partitioned or not idx:
        raise ValueError(f"{F.name} has no component {color}")
    labels = [F.basis[i] for i in idx]
    table = {}
    for a, i in enumerate(idx):
        for b, j in enumerate(idx):
            prod = F.basis_product(i, j)
            table[(labels[a], labels[b])] = [prod[q] for q in idx]
    trace = [F.trace_vector[i] for i in idx]
    return build_algebra(labels, table, trace, name=f"{F.name}[{color}]")


# ---------------------------------------------------------------------------
# the test fleet


def ground_field() -> FrobeniusAlgebra:
    """``𝕜`` with basis ``{1}`` and ``tr(1) = 1``."""
    return build_algebra(["1"], {("1", "1"): [1]}, [1], name="k")


def dual_numbers() -> FrobeniusAlgebra:
    """``𝕜[x]/(x²)`` with ``tr(1) = 0`` and ``tr(x) = 1``."""
    table = {
        ("1", "1"): {"1": 1},
        ("1", "x"): {"x": 1},
        ("x", "1"): {"x": 1},
        ("x", "x"): {},
    }
    return build_algebra(["1", "x"], table, {"1": 0, "x": 1}, name="k[x]/x2")


def fleet() -> dict[str, FrobeniusAlgebra]:
    """The five algebras every acceptance check runs over."""
    k, dn = ground_field(), dual_numbers()
    return {
        "k": direct_sum([k], name="k"),
        "k+k": direct_sum([k, k], name="k+k"),
        "k[x]/x2": direct_sum([dn], name="k[x]/x2"),
        "k[x]/x2+k": direct_sum([dn, k], name="k[x]/x2+k"),
        "k+k+k": direct_sum([k, k, k], name="k+k+k"),
    }


# ---------------------------------------------------------------------------
# text format

_PROD = re.compile(r"^\s*([\w']+)\s*\*\s*([\w']+)\s*=\s*(.+)$")
_TR = re.compile(r"^\s*tr\(\s*([\w']+)\s*\)\s*=\s*(.+)$")
_COMP = re.compile(r"^\s*component\(\s*([\w']+)\s*\)\s*=\s*(\d+)\s*$")
_TERM = re.compile(r"^\s*(?:([+-]?\s*[\d/]+)\s*\*\s*)?([\w']+)\s*$")


def _parse_linear(text: str, basis: Sequence[str], where: str) -> dict[str, Fraction]:
    text = text.strip()
    if text == "0":
        return {}
    out: dict[str, Fraction] = {}
    for sign, chunk in re.findall(r"([+-]?)\s*([^+-]+)", text):
        m = _TERM.match(chunk)
        if not m:
            raise AlgebraFormatError(f"{where}: cannot read term {chunk!r}")
        coef = Fraction(m.group(1).replace(" ", "")) if m.group(1) else Fraction(1)
        label = m.group(2)
        if label not in basis:
            if re.fullmatch(r"[\d/]+", label) and m.group(1) is None:
                raise AlgebraFormatError(f"{where}: scalar term {label!r} needs a basis symbol")
            raise AlgebraFormatError(f"{where}: unknown basis symbol {label!r}")
        if sign == "-":
            coef = -coef
        out[label] = out.get(label, Fraction(0)) + coef
    return out


def parse_algebra(text: str, *, name: str = "F") -> FrobeniusAlgebra:
    """Read the plain-text algebra format.

    Lines::

        basis: 1, x
        x*x = 0
        1*x = x
        tr(x) = 1
        component(x) = 1

    Products that are not listed are zero; ``#`` starts a comment.
    """
    basis: list[str] | None = None
    prods: dict[tuple[str, str], dict[str, Fraction]] = {}
    traces: dict[str, Fraction] = {}
    comps: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        if line.startswith("basis"):
            _, _, rest = line.partition(":")
            basis = [b.strip() for b in rest.split(",") if b.strip()]
            continue
        if line.startswith("name"):
            _, _, rest = line.partition(":")
            name = rest.strip() or name
            continue
        if basis is None:
            raise AlgebraFormatError(f"{where}: 'basis:' must come first")
        if m := _TR.match(line):
            if m.group(1) not in basis:
                raise AlgebraFormatError(f"{where}: unknown basis symbol {m.group(1)!r}")
            traces[m.group(1)] = Fraction(m.group(2).strip())
        elif m := _COMP.match(line):
            if m.group(1) not in basis:
                raise AlgebraFormatError(f"{where}: unknown basis symbol {m.group(1)!r}")
            comps[m.group(1)] = int(m.group(2))
        elif m := _PROD.match(line):
            a, b = m.group(1), m.group(2)
            for s in (a, b):
                if s not in basis:
                    raise AlgebraFormatError(f"{where}: unknown basis symbol {s!r}")
            prods[(a, b)] = _parse_linear(m.group(3), basis, where)
        else:
            raise AlgebraFormatError(f"{where}: cannot parse {line!r}")
    if basis is None:
        raise AlgebraFormatError("no 'basis:' line")
    table = {(a, b): prods.get((a, b), {}) for a in basis for b in basis}
    partition = None
    if comps:
        missing = [b for b in basis if b not in comps]
        if missing:
            raise AlgebraFormatError(f"component() missing for {missing}")
        partition = comps
    return build_algebra(basis, table, traces, partition, name=name)


def format_algebra(F: FrobeniusAlgebra) -> str:
    """Inverse of :func:`parse_algebra` (nonzero products only)."""
    lines = [f"name: {F.name}", "basis: " + ", ".join(F.basis)]
    for i, a in enumerate(F.basis):
        for j, b in enumerate(F.basis):
            el = AlgebraElement(F, F.structure[i][j])
            if not el.is_zero():
                lines.append(f"{a}*{b} = {el!r}")
    for i, a in enumerate(F.basis):
        lines.append(f"tr({a}) = {F.trace_vector[i]}")
    if F.components:
        for i, a in enumerate(F.basis):
            lines.append(f"component({a}) = {F.components[i]}")
    return "\n".join(lines) + "\n"
