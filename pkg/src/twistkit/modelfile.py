"""Plain-text model files: parsing and canonical printing.

A file has up to four sections, each a header line followed by bindings::

    [MODEL]
    name = halfline_t3
    coframe = b0, b1, b2, b3
    coordinates = x0
    nonzero = x0
    dx0 = -b0
    db1 = 0
    [STRUCTURE]
    complex I = [X[b1], -X[b0], X[b3], -X[b2]]
    metric g = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    hypercomplex H = [I, J, K]
    form Theta = b0^b2 + i*b0^b3
    [TWIST]
    xi = [X[b1], X[b2], X[b3]]
    F = [b0^b1, b0^b2, b0^b3]
    a = [[-x0, 0, 0], [0, -x0, 0], [0, 0, -x0]]
    orbit = [0, 3]
    [CHECKS]
    validate_twist_data
    hkt_twist_condition(g, H)

A complex structure is either the list of images ``J X_i`` of the frame
fields or a square matrix with ``J X_i = sum_k m[k][i] X_k``.  Bindings may
span several lines while brackets are open; ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import matrix as mx
from .exterior import CoframeModel, Form, ModelError, VectorField
from .hermitian import AlmostComplexStructure, HermitianMetric, NotComplexError
from .parsing import ExprParser, ParseError, format_form, format_matrix, format_scalar, format_vector, tokenize
from .quaternionic import HypercomplexTriple, QuaternionError
from .scalar import Scalar, UnknownVariableError
from .twist import TwistData

__all__ = [
    "CheckCall",
    "Structures",
    "ModelFile",
    "parse_model_file",
    "format_model_file",
    "SECTIONS",
]

SECTIONS = ("MODEL", "STRUCTURE", "TWIST", "CHECKS")


@dataclass(frozen=True)
class CheckCall:
    """A named check with positional structure arguments."""

    name: str
    args: tuple[str, ...] = ()

    def __str__(self):
        return f"{self.name}({', '.join(self.args)})" if self.args else self.name


@dataclass
class Structures:
    """Named side data: complex structures, metrics, triples and forms."""

    complex: dict[str, AlmostComplexStructure] = field(default_factory=dict)
    metrics: dict[str, HermitianMetric] = field(default_factory=dict)
    hypercomplex: dict[str, tuple[str, str, str]] = field(default_factory=dict)
    forms: dict[str, Form] = field(default_factory=dict)

    def triple(self, name: str) -> HypercomplexTriple:
        i, j, k = self.hypercomplex[name]
        return HypercomplexTriple(self.complex[i], self.complex[j], self.complex[k])

    def names(self) -> set[str]:
        return set(self.complex) | set(self.metrics) | set(self.hypercomplex) | set(self.forms)

    def __eq__(self, other):
        if not isinstance(other, Structures):
            return NotImplemented
        return (
            self.complex == other.complex
            and self.metrics == other.metrics
            and self.hypercomplex == other.hypercomplex
            and self.forms == other.forms
        )


@dataclass
class ModelFile:
    model: CoframeModel
    structures: Structures = field(default_factory=Structures)
    twist: TwistData | None = None
    orbit: tuple[int, int] | None = None
    checks: list[CheckCall] = field(default_factory=list)
    name: str | None = None

    def __eq__(self, other):
        if not isinstance(other, ModelFile):
            return NotImplemented
        return (
            self.name == other.name
            and self.model == other.model
            and self.structures == other.structures
            and self.twist == other.twist
            and self.orbit == other.orbit
            and self.checks == other.checks
        )


# -- reading ------------------------------------------------------------------

@dataclass
class _Binding:
    section: str
    lhs: str
    rhs: str
    line: int
    col: int  # column of the first rhs character
    lhs_col: int


def _strip_comment(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


def _depth(text: str) -> int:
    return text.count("[") + text.count("(") - text.count("]") - text.count(")")


def _split(text: str):
    """Yield section headers, bindings and check lines with positions."""
    lines = text.splitlines()
    section = None
    k = 0
    while k < len(lines):
        raw = _strip_comment(lines[k])
        lineno = k + 1
        k += 1
        if not raw.strip():
            continue
        stripped = raw.strip()
        col0 = len(raw) - len(raw.lstrip()) + 1
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("malformed section header", lineno, col0, ["']'"])
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise ParseError(f"unknown section {name!r}", lineno, col0, [f"[{s}]" for s in SECTIONS])
            yield ("section", name, lineno, col0)
            section = name
            continue
        if section is None:
            raise ParseError("binding outside of a section", lineno, col0, ["section header"])
        # gather continuation lines while brackets are open
        body = raw
        while _depth(body) > 0 and k < len(lines):
            body += "\n" + _strip_comment(lines[k])
            k += 1
        if section == "CHECKS":
            yield ("check", body, lineno, 1)
            continue
        eq = body.find("=")
        if eq < 0:
            raise ParseError("expected a binding 'name = value'", lineno, col0 + len(stripped), ["'='"])
        lhs = body[:eq].strip()
        rhs = body[eq + 1:]
        yield ("bind", _Binding(section, lhs, rhs, lineno, eq + 2, col0), lineno, col0)


def _parse_expr(rhs: str, b: _Binding, ns, frame=None):
    tokens = tokenize(rhs, b.line, b.col)
    return ExprParser(tokens, ns, frame=frame).parse_all()


def _name_list(b: _Binding) -> list[str]:
    tokens = tokenize(b.rhs, b.line, b.col)
    names = []
    expect_name = True
    for t in tokens:
        if t.kind == "END":
            break
        if expect_name:
            if t.kind != "IDENT":
                raise ParseError(f"unexpected {t.text!r}", t.line, t.col, ["identifier"])
            if t.text in ("i", "X"):
                raise ParseError(f"{t.text!r} is reserved", t.line, t.col)
            if t.text in names:
                raise ParseError(f"duplicate name {t.text!r}", t.line, t.col)
            names.append(t.text)
        elif not (t.kind == "OP" and t.text == ","):
            raise ParseError(f"unexpected {t.text!r}", t.line, t.col, ["','"])
        expect_name = not expect_name
    if names and expect_name:
        last = tokens[-1]
        raise ParseError("trailing comma", last.line, last.col, ["identifier"])
    return names


def _err(b: _Binding, message: str, expected=()):
    return ParseError(message, b.line, b.lhs_col, expected)


def _parse_check(body: str, line: int, col: int) -> CheckCall:
    tokens = tokenize(body, line, col)
    t = tokens[0]
    if t.kind != "IDENT":
        raise ParseError(f"unexpected {t.text!r}", t.line, t.col, ["check name"])
    name = t.text
    pos = 1
    args = []
    if tokens[pos].kind == "OP" and tokens[pos].text == "(":
        pos += 1
        if not (tokens[pos].kind == "OP" and tokens[pos].text == ")"):
            while True:
                a = tokens[pos]
                if a.kind not in ("IDENT", "NUM"):
                    raise ParseError(f"unexpected {a.text or 'end of input'!r}", a.line, a.col, ["argument"])
                args.append(a.text)
                pos += 1
                if tokens[pos].kind == "OP" and tokens[pos].text == ",":
                    pos += 1
                    continue
                break
        if not (tokens[pos].kind == "OP" and tokens[pos].text == ")"):
            a = tokens[pos]
            raise ParseError(f"unexpected {a.text or 'end of input'!r}", a.line, a.col, ["','", "')'"])
        pos += 1
    if tokens[pos].kind != "END":
        a = tokens[pos]
        raise ParseError(f"unexpected {a.text!r}", a.line, a.col, ["end of line"])
    return CheckCall(name, tuple(args))


def parse_model_file(text) -> ModelFile:
    """Parse model-file text (str or UTF-8 bytes); raises ParseError with a position."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc.reason}", 1, exc.start + 1) from None
    items = list(_split(text))
    seen_sections = [it[1] for it in items if it[0] == "section"]
    for s in set(seen_sections):
        if seen_sections.count(s) > 1:
            line = [it[2] for it in items if it[0] == "section" and it[1] == s][1]
            raise ParseError(f"duplicate section [{s}]", line, 1)
    if "MODEL" not in seen_sections:
        raise ParseError("missing [MODEL] section", 1, 1, ["[MODEL]"])

    by_section: dict[str, list] = {s: [] for s in SECTIONS}
    current = None
    for it in items:
        if it[0] == "section":
            current = it[1]
        else:
            by_section[current].append(it)

    model, name = _read_model(by_section["MODEL"])
    structures = _read_structures(by_section["STRUCTURE"], model)
    twist, orbit = _read_twist(by_section["TWIST"], model)
    checks = [_parse_check(body, line, col) for _, body, line, col in by_section["CHECKS"]]
    return ModelFile(model, structures, twist, orbit, checks, name)


def _read_model(items) -> tuple[CoframeModel, str | None]:
    fields: dict[str, _Binding] = {}
    diffs: list[_Binding] = []
    for _, b, _, _ in items:
        if b.lhs in ("name", "coframe", "coordinates", "nonzero"):
            if b.lhs in fields:
                raise _err(b, f"duplicate binding {b.lhs!r}")
            fields[b.lhs] = b
        elif b.lhs.startswith("d") and len(b.lhs) > 1:
            diffs.append(b)
        else:
            raise _err(b, f"unknown binding {b.lhs!r} in [MODEL]",
                       ["name", "coframe", "coordinates", "nonzero", "d<symbol>"])
    if "coframe" not in fields:
        raise ParseError("[MODEL] needs a coframe binding", items[0][2] if items else 1, 1, ["coframe"])
    name = None
    if "name" in fields:
        names = _name_list(fields["name"])
        if len(names) != 1:
            raise _err(fields["name"], "name must be a single identifier")
        name = names[0]
    coframe = _name_list(fields["coframe"])
    coords = _name_list(fields["coordinates"]) if "coordinates" in fields else []
    clash = set(coframe) & set(coords)
    if clash:
        raise _err(fields.get("coordinates", fields["coframe"]), f"names used twice: {sorted(clash)}")
    stub = CoframeModel(coframe, None, coords, {x: Form.zero(1) for x in coords})
    ns = stub.namespace()
    frame = stub.frame_index()
    structure: dict[str, Form] = {}
    dxs: dict[str, Form] = {}
    for b in diffs:
        target = b.lhs[1:]
        value = _parse_expr(b.rhs, b, ns, frame)
        form = _as_form(value, b)
        if target in frame:
            if target in structure:
                raise _err(b, f"duplicate structure equation for {target!r}")
            if not form.is_zero() and form.degree != 2:
                raise _err(b, f"d{target} must be a 2-form, got degree {form.degree}")
            structure[target] = form if not form.is_zero() else Form.zero(2)
        elif target in coords:
            if target in dxs:
                raise _err(b, f"duplicate differential for {target!r}")
            if form.degree != 1 or form.is_zero():
                raise _err(b, f"d{target} must be a nonzero 1-form in the coframe")
            dxs[target] = form
        else:
            raise _err(b, f"unknown symbol {target!r} in {b.lhs!r}", ["d<coframe symbol>", "d<coordinate>"])
    missing = [x for x in coords if x not in dxs]
    if missing:
        raise ParseError(f"coordinate differentials missing for {missing}", fields["coordinates"].line, 1)
    nonzero = []
    if "nonzero" in fields:
        b = fields["nonzero"]
        if b.rhs.strip():
            # comma-separated scalars, read as a list literal
            wrapped = _Binding(b.section, b.lhs, "[" + b.rhs + "]", b.line, b.col - 1, b.lhs_col)
            vals = _parse_expr(wrapped.rhs, wrapped, {x: Scalar.var(x) for x in coords})
            for v in vals:
                if not isinstance(v, Scalar):
                    raise _err(b, "nonzero entries must be scalars")
                nonzero.append(v)
    try:
        model = CoframeModel(coframe, structure, coords, dxs, nonzero)
    except (ModelError, UnknownVariableError) as exc:
        raise ParseError(str(exc), items[0][2] if items else 1, 1) from None
    return model, name


def _as_form(value, b: _Binding) -> Form:
    if isinstance(value, Scalar):
        if value.is_zero():
            return Form.zero(0)
        return Form.function(value)
    if isinstance(value, Form):
        return value
    raise _err(b, "expected a form")


def _read_structures(items, model: CoframeModel) -> Structures:
    st = Structures()
    ns = model.namespace()
    frame = model.frame_index()
    used = set(ns) | {"i", "X"}
    for _, b, _, _ in items:
        parts = b.lhs.split()
        if len(parts) != 2:
            raise _err(b, f"expected '<kind> <name> = ...', got {b.lhs!r}", ["complex", "metric", "hypercomplex", "form"])
        kind, name = parts
        if not name.isidentifier():
            raise _err(b, f"invalid name {name!r}")
        if name in used or name in st.names():
            raise _err(b, f"name {name!r} is already in use")
        if kind == "complex":
            value = _parse_expr(b.rhs, b, ns, frame)
            try:
                st.complex[name] = _complex_from_value(value, model, name, b)
            except NotComplexError as exc:
                raise _err(b, str(exc)) from None
        elif kind == "metric":
            value = _parse_expr(b.rhs, b, ns, frame)
            m = _matrix_from_value(value, b, model.dim)
            try:
                st.metrics[name] = HermitianMetric(m, name)
            except ValueError as exc:
                raise _err(b, str(exc)) from None
        elif kind == "hypercomplex":
            names = _bracket_names(b)
            if len(names) != 3:
                raise _err(b, "hypercomplex needs three complex structures [I, J, K]")
            for n in names:
                if n not in st.complex:
                    raise _err(b, f"unknown complex structure {n!r}")
            try:
                HypercomplexTriple(*(st.complex[n] for n in names))
            except QuaternionError as exc:
                raise _err(b, str(exc)) from None
            st.hypercomplex[name] = tuple(names)
        elif kind == "form":
            value = _parse_expr(b.rhs, b, ns, frame)
            st.forms[name] = _as_form(value, b)
        else:
            raise _err(b, f"unknown structure kind {kind!r}", ["complex", "metric", "hypercomplex", "form"])
    return st


def _bracket_names(b: _Binding) -> list[str]:
    inner = b.rhs.strip()
    if not (inner.startswith("[") and inner.endswith("]")):
        raise _err(b, "expected a bracketed list of names")
    return _name_list(_Binding(b.section, b.lhs, inner[1:-1], b.line, b.col + b.rhs.find("[") + 1, b.lhs_col))


def _matrix_from_value(value, b: _Binding, n: int | None = None):
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise _err(b, "expected a matrix literal [[...], ...]")
    rows = []
    for r in value:
        if not all(isinstance(x, Scalar) for x in r):
            raise _err(b, "matrix entries must be scalar expressions")
        rows.append(r)
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise _err(b, "matrix rows have different lengths")
    if n is not None and (len(rows) != n or any(len(r) != n for r in rows)):
        raise _err(b, f"matrix must be {n}x{n}")
    return rows


def _complex_from_value(value, model: CoframeModel, name: str, b: _Binding) -> AlmostComplexStructure:
    if isinstance(value, list) and value and all(isinstance(v, VectorField) for v in value):
        if len(value) != model.dim:
            raise _err(b, f"need {model.dim} frame images, got {len(value)}")
        return AlmostComplexStructure.from_images(value, name)
    return AlmostComplexStructure(_matrix_from_value(value, b, model.dim), name)


def _read_twist(items, model: CoframeModel):
    if not items:
        return None, None
    fields: dict[str, _Binding] = {}
    for _, b, _, _ in items:
        if b.lhs not in ("xi", "F", "a", "orbit"):
            raise _err(b, f"unknown binding {b.lhs!r} in [TWIST]", ["xi", "F", "a", "orbit"])
        if b.lhs in fields:
            raise _err(b, f"duplicate binding {b.lhs!r}")
        fields[b.lhs] = b
    for key in ("xi", "F", "a"):
        if key not in fields:
            raise ParseError(f"[TWIST] needs a binding for {key!r}", items[0][2], 1, [key])
    ns = model.namespace()
    frame = model.frame_index()
    xi = _parse_expr(fields["xi"].rhs, fields["xi"], ns, frame)
    if isinstance(xi, list):
        xi = [VectorField() if isinstance(v, Scalar) and v.is_zero() else v for v in xi]
    if not isinstance(xi, list) or not all(isinstance(v, VectorField) for v in xi):
        raise _err(fields["xi"], "xi must be a list of vector fields")
    F = _parse_expr(fields["F"].rhs, fields["F"], ns, frame)
    if not isinstance(F, list):
        raise _err(fields["F"], "F must be a list of 2-forms")
    forms = []
    for f in F:
        f = _as_form(f, fields["F"])
        if not f.is_zero() and f.degree != 2:
            raise _err(fields["F"], f"F entries must be 2-forms, got degree {f.degree}")
        forms.append(f if not f.is_zero() else Form.zero(2))
    a = _matrix_from_value(_parse_expr(fields["a"].rhs, fields["a"], ns, frame), fields["a"])
    if len(a) != len(forms) or any(len(r) != len(xi) for r in a) or len(xi) != len(forms):
        raise _err(fields["a"], f"a must be square of size {len(xi)} (one row per F, one column per xi)")
    orbit = None
    if "orbit" in fields:
        ob = _parse_expr(fields["orbit"].rhs, fields["orbit"], {})
        if (not isinstance(ob, list) or len(ob) != 2
                or not all(isinstance(v, Scalar) and v.is_constant() and v.constant_value().is_real()
                           and v.constant_value().re.denominator == 1 for v in ob)):
            raise _err(fields["orbit"], "orbit must be [s, r] with integers")
        orbit = tuple(int(v.constant_value().re) for v in ob)
    return TwistData(xi, forms, a), orbit


# -- writing ------------------------------------------------------------------

def format_model_file(mf: ModelFile) -> str:
    """Canonical text; ``parse_model_file`` inverts it."""
    M = mf.model
    names = M.coframe
    out = ["[MODEL]"]
    if mf.name:
        out.append(f"name = {mf.name}")
    out.append(f"coframe = {', '.join(M.coframe)}")
    if M.coordinates:
        out.append(f"coordinates = {', '.join(M.coordinates)}")
    if M.nonzero:
        out.append(f"nonzero = {', '.join(format_scalar(s) for s in M.nonzero)}")
    for x, dx in zip(M.coordinates, M.coordinate_differentials):
        out.append(f"d{x} = {format_form(dx, names)}")
    for n, de in zip(M.coframe, M.structure):
        out.append(f"d{n} = {format_form(de, names)}")
    st = mf.structures
    if st.names():
        out.append("[STRUCTURE]")
        for name, J in st.complex.items():
            images = [J(VectorField.frame(k)) for k in range(M.dim)]
            out.append(f"complex {name} = [{', '.join(format_vector(v, names) for v in images)}]")
        for name, g in st.metrics.items():
            out.append(f"metric {name} = {format_matrix(g.matrix)}")
        for name, trip in st.hypercomplex.items():
            out.append(f"hypercomplex {name} = [{', '.join(trip)}]")
        for name, f in st.forms.items():
            out.append(f"form {name} = {format_form(f, names)}")
    if mf.twist is not None:
        T = mf.twist
        out.append("[TWIST]")
        out.append(f"xi = [{', '.join(format_vector(v, names) for v in T.xi)}]")
        out.append(f"F = [{', '.join(format_form(f, names) for f in T.F)}]")
        out.append(f"a = {format_matrix(T.a)}")
        if mf.orbit is not None:
            out.append(f"orbit = [{mf.orbit[0]}, {mf.orbit[1]}]")
    out.append("[CHECKS]")
    for c in mf.checks:
        out.append(str(c))
    return "\n".join(out) + "\n"
