"""The 23 noncompact Coxeter simplices of hyperbolic 3-space with ideal vertices.

Coordinates, face forms, volumes and the reference values used for
verification live in ``data/catalog.json`` as exact expression strings.  The
loader evaluates them, orients and normalizes every face form, and validates
each simplex before handing it out.
"""

from __future__ import annotations

import functools
import json
import math
import unicodedata
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import _expr
from .errors import ParseError, UnknownSymbol, ValidationError
from .lorentz import (Kind, Plane, Point, classify, gram_of_simplex,
                      lorentz_inner)
from .tolerances import EPS_GRAM, EPS_RES
from .volume import VolumeExpression, VolumeKind

CLASSES = ("[3,3,6]", "[3,4,4]", "[5,3,6]")


@dataclass(frozen=True)
class Reference:
    """Published values an entry is checked against."""

    density: float
    density_symbol: str | None = None
    max_s: Mapping[int, float] = field(default_factory=dict)
    H: Mapping[int, np.ndarray] = field(default_factory=dict)
    max_piece: Mapping[int, float] = field(default_factory=dict)
    configurations: tuple = ()


@dataclass(frozen=True, eq=False)
class CoxeterSimplex:
    key: str
    witt: str
    aliases: tuple
    commensurability_class: str
    schlafli: str
    diagram: tuple
    vertices: tuple
    faces: tuple
    ideal_vertices: tuple
    volume: VolumeExpression
    reference: Reference
    fig1_ideal: int
    listed_ideal: tuple | None = None
    corrections: tuple = ()
    derived_coordinates: bool = False

    @property
    def n_ideal(self) -> int:
        return len(self.ideal_vertices)

    @property
    def gram(self):
        return gram_of_simplex(self.faces)

    def diagram_matrix(self) -> np.ndarray:
        """Coxeter exponents m_ij (angle pi/m_ij); 2 where no edge is drawn."""
        m = np.full((4, 4), 2.0)
        np.fill_diagonal(m, 1.0)
        for i, j, label in self.diagram:
            m[i, j] = m[j, i] = label
        return m

    def edges_of(self, i: int) -> tuple:
        """The three vertices joined to vertex ``i``."""
        return tuple(self.vertices[j] for j in range(4) if j != i)

    def __repr__(self):
        return f"CoxeterSimplex({self.key}, {self.schlafli}, ideal={self.ideal_vertices})"


@dataclass(frozen=True)
class CommensurabilityEdge:
    parent: str
    child: str
    index: int
    ratio: float | None = None
    residual: float | None = None

    @property
    def ok(self) -> bool | None:
        if self.residual is None:
            return None
        return self.residual <= 1e-6


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    detail: str = ""
    severity: str = "error"


@dataclass(frozen=True)
class ValidationReport:
    entry: str
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.severity == "error")

    @property
    def warnings(self) -> tuple:
        return tuple(c for c in self.checks if c.severity == "warning" and not c.passed)

    def failures(self) -> tuple:
        return tuple(c for c in self.checks if c.severity == "error" and not c.passed)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


# -- validation -------------------------------------------------------------

def validate_simplex(s: CoxeterSimplex) -> ValidationReport:
    """Check every structural invariant of a catalog entry.

    Residuals are reported for each check; failures are collected rather
    than raised.
    """
    checks = []
    verts = [v.coords / np.linalg.norm(v.coords) for v in s.vertices]
    faces = [f.coeffs for f in s.faces]

    worst, detail = 0.0, ""
    for i, v in enumerate(verts):
        q = abs(lorentz_inner(v, v)) if i in s.ideal_vertices else 0.0
        kind = classify(v)
        expected = Kind.IDEAL if i in s.ideal_vertices else Kind.PROPER
        if kind is not expected:
            worst, detail = max(worst, 1.0), f"A{i} is {kind.value}"
        worst = max(worst, q)
    checks.append(Check("ideal_flags", not detail, worst, detail))

    inc = max(abs(float(faces[i] @ verts[j]))
              for i in range(4) for j in range(4) if i != j)
    checks.append(Check("incidence", inc <= EPS_RES, inc))

    inner = min(float(faces[i] @ verts[i]) for i in range(4))
    checks.append(Check("orientation", inner > EPS_RES, inner))

    norm = max(abs(lorentz_inner(f, f) - 1.0) for f in faces)
    checks.append(Check("face_norm", norm <= EPS_RES, norm))

    g = s.gram.entries
    m = s.diagram_matrix()
    gram_res = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            gram_res = max(gram_res, abs(g[i, j] + math.cos(math.pi / m[i, j])))
    checks.append(Check("gram_angles", gram_res <= EPS_GRAM, gram_res))

    w = np.linalg.eigvalsh(g)
    sig_ok = int(np.sum(w > 1e-9)) == 3 and int(np.sum(w < -1e-9)) == 1
    checks.append(Check("gram_signature", sig_ok, float(np.min(np.abs(w))),
                        f"eigenvalues {np.round(w, 6).tolist()}"))

    vol = s.volume.evaluate()
    checks.append(Check("volume_positive", vol > 0, vol))

    mismatch = s.n_ideal != s.fig1_ideal
    checks.append(Check(
        "lattice_ideal_count", not mismatch, float(abs(s.n_ideal - s.fig1_ideal)),
        f"geometry has {s.n_ideal} ideal vertices, lattice figure lists {s.fig1_ideal}"
        if mismatch else "", severity="warning"))
    return ValidationReport(s.key, tuple(checks))


# -- parsing ----------------------------------------------------------------

def _num(text, where: str) -> float:
    try:
        return _expr.evaluate(text)
    except _expr.ExpressionError as exc:
        raise ParseError(str(exc), where) from exc


def _vec4(row, where: str) -> np.ndarray:
    if not isinstance(row, list) or len(row) != 4:
        raise ParseError("expected a list of four expressions", where)
    return np.array([_num(x, f"{where}[{k}]") for k, x in enumerate(row)])


def _req(obj: dict, name: str, where: str):
    if name not in obj:
        raise ParseError(f"missing field {name!r}", where)
    return obj[name]


def _index_map(raw, where: str) -> dict:
    return {int(k): _num(v, f"{where}.{k}") for k, v in (raw or {}).items()}


def _parse_volume(raw, where: str) -> VolumeExpression:
    kind = _req(raw, "kind", where)
    try:
        if kind == "lobachevsky":
            return VolumeExpression(VolumeKind.LOBACHEVSKY,
                                    Fraction(_req(raw, "coefficient", where)),
                                    Fraction(_req(raw, "angle", where)))
        if kind == "catalan":
            return VolumeExpression(VolumeKind.CATALAN,
                                    Fraction(_req(raw, "coefficient", where)))
        if kind == "numeric":
            value = float(_req(raw, "value", where))
            return VolumeExpression(VolumeKind.NUMERIC, value=value,
                                    printed_value=value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(str(exc), where) from exc
    raise ParseError(f"unknown volume kind {kind!r}", where)


def _parse_reference(raw, where: str) -> Reference:
    configs = []
    for k, c in enumerate(raw.get("configurations", [])):
        w = f"{where}.configurations[{k}]"
        configs.append({
            "anchor": int(_req(c, "anchor", w)),
            "s": _index_map(c.get("s"), w + ".s"),
            "pieces": _index_map(c.get("pieces"), w + ".pieces"),
            "ratios": {int(i): Fraction(r) for i, r in c.get("ratios", {}).items()},
            "ratios_printed": {int(i): float(Fraction(str(r)))
                               for i, r in c.get("ratios_printed", {}).items()},
        })
    return Reference(
        density=float(_req(raw, "density", where)),
        density_symbol=raw.get("density_symbol"),
        max_s=_index_map(raw.get("max_s"), where + ".max_s"),
        H={int(i): _vec4(p, f"{where}.H.{i}") for i, p in raw.get("H", {}).items()},
        max_piece=_index_map(raw.get("max_piece"), where + ".max_piece"),
        configurations=tuple(configs),
    )


def _parse_entry(raw: dict, where: str) -> CoxeterSimplex:
    key = _req(raw, "key", where)
    verts_raw = _req(raw, "vertices", where)
    faces_raw = _req(raw, "faces", where)
    if len(verts_raw) != 4 or len(faces_raw) != 4:
        raise ParseError("a simplex needs four vertices and four faces", where)
    flags = _req(raw, "ideal", where)
    if len(flags) != 4:
        raise ParseError("ideal flags must have four entries", where + ".ideal")
    verts = [Point(_vec4(r, f"{where}.vertices[{i}]")).affine()
             for i, r in enumerate(verts_raw)]
    faces = []
    for i, r in enumerate(faces_raw):
        u = _vec4(r, f"{where}.faces[{i}]")
        # point every form into the simplex, then scale to unit norm
        if float(u @ verts[i].coords) < 0:
            u = -u
        n = lorentz_inner(u, u)
        if n <= 0:
            raise ParseError("face form is not spacelike", f"{where}.faces[{i}]")
        faces.append(Plane(u / math.sqrt(n)))
    diagram = []
    for k, e in enumerate(_req(raw, "diagram", where)):
        try:
            i, j, label = e
            diagram.append((int(i), int(j), int(label)))
        except (TypeError, ValueError) as exc:
            raise ParseError("diagram edges are [i, j, label]",
                             f"{where}.diagram[{k}]") from exc
    listed = raw.get("listed_ideal")
    return CoxeterSimplex(
        key=key,
        witt=raw.get("witt", key),
        aliases=tuple(raw.get("aliases", ())),
        commensurability_class=_req(raw, "class", where),
        schlafli=_req(raw, "schlafli", where),
        diagram=tuple(diagram),
        vertices=tuple(verts),
        faces=tuple(faces),
        ideal_vertices=tuple(i for i in range(4) if flags[i]),
        volume=_parse_volume(_req(raw, "volume", where), where + ".volume"),
        reference=_parse_reference(_req(raw, "reference", where), where + ".reference"),
        fig1_ideal=int(raw.get("fig1_ideal", sum(bool(f) for f in flags))),
        listed_ideal=tuple(listed) if listed is not None else None,
        corrections=tuple(raw.get("corrections", ())),
        derived_coordinates=bool(raw.get("derived_coordinates", False)),
    )


def _fold(text: str) -> str:
    """Lookup key: drop combining marks, subscripts and case."""
    t = unicodedata.normalize("NFKD", text)
    t = "".join(ch for ch in t if not unicodedata.combining(ch))
    return t.replace(" ", "").lower()


class Catalog(Sequence):
    """Immutable, ordered collection of catalog entries with symbol lookup."""

    def __init__(self, entries: Sequence[CoxeterSimplex], lattice: Sequence,
                 densities: Mapping | None = None, raw: dict | None = None):
        self._entries = tuple(entries)
        self.lattice = tuple(lattice)
        self.densities = dict(densities or {})
        self._raw = raw
        self._index = {}
        for e in self._entries:
            for name in (e.key, e.witt, *e.aliases):
                self._index.setdefault(_fold(name), e)

    def __len__(self):
        return len(self._entries)

    def __getitem__(self, item):
        if isinstance(item, str):
            return self.get(item)
        return self._entries[item]

    def __iter__(self) -> Iterator[CoxeterSimplex]:
        return iter(self._entries)

    def keys(self) -> list:
        return [e.key for e in self._entries]

    def get(self, symbol: str) -> CoxeterSimplex:
        try:
            return self._index[_fold(symbol)]
        except KeyError:
            raise UnknownSymbol(f"unknown Witt symbol {symbol!r}") from None

    def to_json(self) -> str:
        """The source document, suitable for writing back to disk."""
        return json.dumps(self._raw, indent=1, ensure_ascii=False)


def parse_catalog(doc: dict, validate: bool = True) -> Catalog:
    if not isinstance(doc, dict) or "entries" not in doc:
        raise ParseError("catalog document needs an 'entries' list", "$")
    entries = [_parse_entry(raw, f"entries[{k}]")
               for k, raw in enumerate(doc["entries"])]
    if validate:
        for e in entries:
            report = validate_simplex(e)
            if not report.ok:
                bad = report.failures()[0]
                raise ValidationError(
                    f"{e.key}: check {bad.name!r} failed (residual {bad.residual:.3g})",
                    entry=e.key, check=bad.name)
    keys = {e.key for e in entries}
    lattice = []
    for k, raw in enumerate(doc.get("lattice", [])):
        where = f"lattice[{k}]"
        p, c = _req(raw, "parent", where), _req(raw, "child", where)
        if p not in keys or c not in keys:
            raise ParseError(f"unknown entry in edge {p}->{c}", where)
        lattice.append(CommensurabilityEdge(p, c, int(_req(raw, "index", where))))
    return Catalog(entries, lattice, doc.get("densities"), raw=doc)


def load_catalog(source: str | Path | None = None, validate: bool = True) -> Catalog:
    """Load the embedded catalog, or a JSON file with the same schema."""
    if source is None:
        return _default_catalog() if validate else parse_catalog(_embedded_doc(), False)
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(exc), str(source)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{source}:{exc.lineno}:{exc.colno}") from exc
    return parse_catalog(doc, validate)


def _embedded_doc() -> dict:
    text = resources.files("horopack").joinpath("data/catalog.json").read_text(
        encoding="utf-8")
    return json.loads(text)


@functools.lru_cache(maxsize=1)
def _default_catalog() -> Catalog:
    return parse_catalog(_embedded_doc())


def get_simplex(symbol, catalog: Catalog | None = None) -> CoxeterSimplex:
    if isinstance(symbol, CoxeterSimplex):
        return symbol
    return (catalog or load_catalog()).get(symbol)


def subgroup_lattice(catalog: Catalog | None = None) -> tuple:
    """Stored subgroup edges with the volume ratio check filled in.

    ``ratio`` is vol(child) / vol(parent) and ``residual`` its distance from
    the index; both stay ``None`` unless both volumes are closed forms.
    """
    cat = catalog or load_catalog()
    out = []
    for e in cat.lattice:
        p, c = cat.get(e.parent), cat.get(e.child)
        if p.volume.is_exact and c.volume.is_exact:
            r = c.volume.evaluate() / p.volume.evaluate()
            out.append(CommensurabilityEdge(e.parent, e.child, e.index, r,
                                            abs(r - e.index)))
        else:
            out.append(e)
    return tuple(out)
