"""Line-oriented text format for models, roles and embeddings.

A model file is a sequence of sections.  A section starts with a bracketed
header and runs until the next header.  ``#`` starts a comment anywhere on a
line; blank lines are ignored.  Sections may appear in any order, each header
at most once.

Grammar (one line per entry unless noted)::

    [model]
    mode = unique            # or uniform; optional, mechanism models only

    [nodes]                  # NAME  observed|latent  v1,v2,...
    A observed 0,1
    L latent 0,1

    [edges]                  # U -> V
    L -> X

    [law A]                  # exogenous law, one line per value
    0 = 1/2
    1 = 1/2

    [mechanism X]            # first line fixes the parent order
    parents = B, L
    0,0 = 0                  # parent values (in that order) = output
    0,1 = 1
    1,0 = 1
    1,1 = 0

    [roles]
    settings = A, B, C
    outcomes = X, Y, Z
    common_cause = L         # optional

    [embedding]
    backend = minkowski
    at A -2 0                # spatial coordinates then time, rationals allowed
    at X -2 1

    [embedding]              # poset variant
    backend = poset
    element p
    element q
    less p q                 # p strictly below q
    at A p

    [distribution]           # table-backed model instead of laws/mechanisms
    scope = A, X
    0 0 = 1/4                # values in scope order = probability
    ...

    [interventional A=0]     # optional interventional table, one per do-assignment set
    scope = X
    0 = 1/2
    1 = 1/2

Numbers are exact rationals written ``p/q`` (or integers, or decimal
strings).  Alphabet values are integers when they parse as such, otherwise
bare string tokens.  A file either defines laws + mechanisms (mechanism
model) or a [distribution] section (table model), never both.  Every
diagnostic raises ModelFileError naming the line and section.
"""

from __future__ import annotations

from typing import NamedTuple

from .dist import Distribution, parse_number, render_number
from .errors import ArgumentError, ModelFileError
from .geometry import Embedding, MinkowskiEvent, PartialOrder
from .graphs import CausalGraph
from .models import CausalModel, ExogenousLaw, Mechanism
from .signalling import BellRoles

_SECTION_KINDS = ("model", "nodes", "edges", "law", "mechanism",
                  "roles", "embedding", "distribution", "interventional")
_FORBIDDEN_IN_TOKENS = set(" \t,=#[]")


class ParsedModel(NamedTuple):
    model: CausalModel
    roles: BellRoles | None
    embedding: Embedding | None


class _Line(NamedTuple):
    number: int
    text: str


def _fail(message: str, *, line: int | None = None, section: str | None = None):
    where = []
    if section:
        where.append(f"section [{section}]")
    if line is not None:
        where.append(f"line {line}")
    prefix = ", ".join(where)
    raise ModelFileError(f"{prefix}: {message}" if prefix else message)


def _parse_value(token: str):
    try:
        return int(token)
    except ValueError:
        return token


def _number(token: str, line: int, section: str):
    try:
        return parse_number(token)
    except ArgumentError as exc:
        _fail(str(exc), line=line, section=section)


def _check_token(token: str, what: str):
    if not token or any(c in _FORBIDDEN_IN_TOKENS for c in token) or "->" in token:
        raise ModelFileError(f"{what} {token!r} is not a plain token")
    return token


def _split_sections(text: str) -> dict[tuple[str, str], list[_Line]]:
    sections: dict[tuple[str, str], list[_Line]] = {}
    current: list[_Line] | None = None
    current_name = ""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                _fail("unterminated section header", line=number)
            header = line[1:-1].strip()
            parts = header.split(None, 1)
            kind = parts[0] if parts else ""
            arg = parts[1].strip() if len(parts) > 1 else ""
            if kind not in _SECTION_KINDS:
                _fail(f"unknown section kind {kind!r}", line=number)
            if kind in ("law", "mechanism") and not arg:
                _fail(f"[{kind}] header needs a node name", line=number)
            if kind in ("model", "nodes", "edges", "roles", "embedding", "distribution") and arg:
                _fail(f"[{kind}] header takes no argument", line=number)
            key = (kind, arg)
            if key in sections:
                _fail(f"duplicate section [{header}]", line=number)
            sections[key] = []
            current = sections[key]
            current_name = header
        else:
            if current is None:
                _fail("content before the first section header", line=number)
            current.append(_Line(number, line))
    del current_name
    return sections


def _key_value(line: _Line, section: str) -> tuple[str, str]:
    if "=" not in line.text:
        _fail("expected 'key = value'", line=line.number, section=section)
    key, value = line.text.split("=", 1)
    return key.strip(), value.strip()


def _name_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _parse_nodes(lines: list[_Line]):
    nodes: dict[str, tuple[bool, tuple]] = {}
    for line in lines:
        parts = line.text.split(None, 2)
        if len(parts) != 3:
            _fail("expected 'NAME observed|latent v1,v2,...'",
                  line=line.number, section="nodes")
        name, vis, alpha_text = parts
        _check_token(name, "node name")
        if vis not in ("observed", "latent"):
            _fail(f"visibility must be observed or latent, got {vis!r}",
                  line=line.number, section="nodes")
        if name in nodes:
            _fail(f"node {name} declared twice", line=line.number, section="nodes")
        alphabet = tuple(_parse_value(t) for t in _name_list(alpha_text))
        if not alphabet:
            _fail(f"node {name} has an empty alphabet", line=line.number, section="nodes")
        nodes[name] = (vis == "observed", alphabet)
    if not nodes:
        _fail("at least one node is required", section="nodes")
    return nodes


def _parse_edges(lines: list[_Line], nodes) -> list[tuple[str, str]]:
    edges = []
    for line in lines:
        if "->" not in line.text:
            _fail("expected 'U -> V'", line=line.number, section="edges")
        left, right = line.text.split("->", 1)
        u, v = left.strip(), right.strip()
        for name in (u, v):
            if name not in nodes:
                _fail(f"edge mentions undeclared node {name!r}",
                      line=line.number, section="edges")
        edges.append((u, v))
    return edges


def _parse_law(node: str, lines: list[_Line], nodes) -> ExogenousLaw:
    section = f"law {node}"
    if node not in nodes:
        _fail(f"law for undeclared node {node!r}", section=section)
    probs = {}
    for line in lines:
        key, value = _key_value(line, section)
        v = _parse_value(key)
        if v in probs:
            _fail(f"value {key} listed twice", line=line.number, section=section)
        probs[v] = _number(value, line.number, section)
    try:
        return ExogenousLaw(node, probs)
    except ArgumentError as exc:
        _fail(str(exc), section=section)


def _parse_mechanism(node: str, lines: list[_Line], nodes) -> Mechanism:
    section = f"mechanism {node}"
    if node not in nodes:
        _fail(f"mechanism for undeclared node {node!r}", section=section)
    if not lines:
        _fail("mechanism needs a parents line and rows", section=section)
    key, value = _key_value(lines[0], section)
    if key != "parents":
        _fail("first line must be 'parents = ...'", line=lines[0].number, section=section)
    parents = _name_list(value)
    for p in parents:
        if p not in nodes:
            _fail(f"parent {p!r} is not a declared node",
                  line=lines[0].number, section=section)
    if not parents:
        _fail("a mechanism needs at least one parent (use a law otherwise)",
              line=lines[0].number, section=section)
    table = {}
    for line in lines[1:]:
        key, value = _key_value(line, section)
        row = tuple(_parse_value(t) for t in _name_list(key))
        if len(row) != len(parents):
            _fail(f"row {key!r} has {len(row)} values for {len(parents)} parents",
                  line=line.number, section=section)
        if row in table:
            _fail(f"row {key!r} listed twice", line=line.number, section=section)
        table[row] = _parse_value(value)
    try:
        return Mechanism(node, parents, table)
    except ArgumentError as exc:
        _fail(str(exc), section=section)


def _parse_table(lines: list[_Line], section: str, alphabets, allowed_scope):
    """Shared reader for [distribution] / [interventional ...] rows."""
    if not lines:
        _fail("table section is empty", section=section)
    key, value = _key_value(lines[0], section)
    if key != "scope":
        _fail("first line must be 'scope = ...'", line=lines[0].number, section=section)
    scope = _name_list(value)
    if sorted(scope) != sorted(allowed_scope):
        _fail(f"scope must cover exactly {sorted(allowed_scope)}, got {scope}",
              line=lines[0].number, section=section)
    sorted_scope = tuple(sorted(scope))
    probs = {}
    for line in lines[1:]:
        key, value = _key_value(line, section)
        values = [_parse_value(t) for t in key.split()]
        if len(values) != len(scope):
            _fail(f"row {key!r} has {len(values)} values for scope of {len(scope)}",
                  line=line.number, section=section)
        assignment = dict(zip(scope, values))
        for var, v in assignment.items():
            if v not in alphabets[var]:
                _fail(f"value {v!r} outside the alphabet of {var}",
                      line=line.number, section=section)
        table_key = tuple(assignment[v] for v in sorted_scope)
        if table_key in probs:
            _fail(f"row {key!r} listed twice", line=line.number, section=section)
        probs[table_key] = _number(value, line.number, section)
    try:
        return Distribution({v: alphabets[v] for v in scope}, probs)
    except ArgumentError as exc:
        _fail(str(exc), section=section)


def _parse_do_header(arg: str, nodes, observed) -> dict[str, object]:
    assignment = {}
    for part in arg.split():
        if "=" not in part:
            _fail(f"expected NAME=value pairs in the header, got {part!r}",
                  section=f"interventional {arg}")
        name, value = part.split("=", 1)
        if name not in nodes:
            _fail(f"undeclared node {name!r}", section=f"interventional {arg}")
        if name not in observed:
            _fail(f"cannot intervene on latent node {name}", section=f"interventional {arg}")
        v = _parse_value(value)
        if v not in nodes[name][1]:
            _fail(f"value {value!r} outside the alphabet of {name}",
                  section=f"interventional {arg}")
        if name in assignment:
            _fail(f"node {name} pinned twice", section=f"interventional {arg}")
        assignment[name] = v
    if not assignment:
        _fail("interventional header needs at least one NAME=value pair",
              section=f"interventional {arg}")
    return assignment


def _parse_roles(lines: list[_Line], nodes) -> BellRoles:
    fields: dict[str, list[str]] = {}
    for line in lines:
        key, value = _key_value(line, "roles")
        if key not in ("settings", "outcomes", "common_cause"):
            _fail(f"unknown roles key {key!r}", line=line.number, section="roles")
        if key in fields:
            _fail(f"{key} given twice", line=line.number, section="roles")
        names = _name_list(value)
        for name in names:
            if name not in nodes:
                _fail(f"{key} mentions undeclared node {name!r}",
                      line=line.number, section="roles")
        fields[key] = names
    for required in ("settings", "outcomes"):
        if required not in fields:
            _fail(f"roles section needs a {required} line", section="roles")
    common = fields.get("common_cause")
    if common is not None and len(common) != 1:
        _fail("common_cause takes exactly one node", section="roles")
    try:
        return BellRoles(tuple(fields["settings"]), tuple(fields["outcomes"]),
                         common[0] if common else None)
    except ArgumentError as exc:
        _fail(str(exc), section="roles")


def _parse_embedding(lines: list[_Line], nodes) -> Embedding:
    section = "embedding"
    backend = None
    elements: list[str] = []
    less: list[tuple[str, str]] = []
    locations: dict[str, object] = {}
    loc_lines: list[_Line] = []
    for line in lines:
        parts = line.text.split()
        head = parts[0]
        if head == "backend":
            key, value = _key_value(line, section)
            if backend is not None:
                _fail("backend given twice", line=line.number, section=section)
            if value not in ("minkowski", "poset"):
                _fail(f"backend must be minkowski or poset, got {value!r}",
                      line=line.number, section=section)
            backend = value
        elif head == "element":
            if len(parts) != 2:
                _fail("expected 'element NAME'", line=line.number, section=section)
            elements.append(_check_token(parts[1], "poset element"))
        elif head == "less":
            if len(parts) != 3:
                _fail("expected 'less LOWER UPPER'", line=line.number, section=section)
            less.append((parts[1], parts[2]))
        elif head == "at":
            loc_lines.append(line)
        else:
            _fail(f"unknown embedding directive {head!r}", line=line.number, section=section)
    if backend is None:
        _fail("embedding needs a 'backend = ...' line", section=section)
    for line in loc_lines:
        parts = line.text.split()
        if len(parts) < 3:
            _fail("expected 'at NODE location...'", line=line.number, section=section)
        name = parts[1]
        if name not in nodes:
            _fail(f"location for undeclared node {name!r}", line=line.number, section=section)
        if name in locations:
            _fail(f"node {name} located twice", line=line.number, section=section)
        if backend == "minkowski":
            if len(parts) < 4:
                _fail("a Minkowski event needs spatial coordinates and a time",
                      line=line.number, section=section)
            coords = [_number(t, line.number, section) for t in parts[2:]]
            locations[name] = MinkowskiEvent(coords[:-1], coords[-1])
        else:
            if len(parts) != 3:
                _fail("expected 'at NODE element'", line=line.number, section=section)
            if parts[2] not in elements:
                _fail(f"unknown poset element {parts[2]!r}", line=line.number, section=section)
            locations[name] = parts[2]
    try:
        if backend == "minkowski":
            if elements or less:
                _fail("element/less lines belong to the poset backend", section=section)
            return Embedding.minkowski(locations)
        return Embedding.poset(PartialOrder(elements, less), locations)
    except ArgumentError as exc:
        _fail(str(exc), section=section)


def parse_model_text(text: str) -> ParsedModel:
    sections = _split_sections(text)
    if ("nodes", "") not in sections:
        _fail("a model file needs a [nodes] section")
    nodes = _parse_nodes(sections.pop(("nodes", "")))
    observed = tuple(n for n, (obs, _) in nodes.items() if obs)
    alphabets = {n: alpha for n, (_, alpha) in nodes.items()}
    edges = _parse_edges(sections.pop(("edges", ""), []), nodes)

    mode = "unique"
    for line in sections.pop(("model", ""), []):
        key, value = _key_value(line, "model")
        if key != "mode":
            _fail(f"unknown model key {key!r}", line=line.number, section="model")
        if value not in ("unique", "uniform"):
            _fail(f"mode must be unique or uniform, got {value!r}",
                  line=line.number, section="model")
        mode = value

    laws = {}
    mechanisms = {}
    table = None
    interventional: dict[frozenset, dict[tuple, Distribution]] = {}
    for (kind, arg) in list(sections):
        if kind == "law":
            laws[arg] = _parse_law(arg, sections.pop((kind, arg)), nodes)
        elif kind == "mechanism":
            mechanisms[arg] = _parse_mechanism(arg, sections.pop((kind, arg)), nodes)

    if ("distribution", "") in sections:
        if laws or mechanisms:
            _fail("a file defines either laws/mechanisms or a [distribution], not both",
                  section="distribution")
        table = _parse_table(sections.pop(("distribution", "")), "distribution",
                             alphabets, observed)
        for (kind, arg) in list(sections):
            if kind != "interventional":
                continue
            assignment = _parse_do_header(arg, nodes, observed)
            targets = frozenset(assignment)
            rest = sorted(set(observed) - targets)
            dist = _parse_table(sections.pop((kind, arg)), f"interventional {arg}",
                                alphabets, rest)
            per_value = interventional.setdefault(targets, {})
            key = tuple(assignment[n] for n in sorted(targets))
            if key in per_value:
                _fail("duplicate interventional table for the same assignment",
                      section=f"interventional {arg}")
            per_value[key] = dist
    else:
        for (kind, arg) in sections:
            if kind == "interventional":
                _fail("interventional tables require a [distribution] section",
                      section=f"interventional {arg}")

    roles = None
    if ("roles", "") in sections:
        roles = _parse_roles(sections.pop(("roles", "")), nodes)
    embedding = None
    if ("embedding", "") in sections:
        embedding = _parse_embedding(sections.pop(("embedding", "")), nodes)

    leftover = [k for k in sections if k[0] not in ("law", "mechanism")]
    if leftover:
        kind, arg = leftover[0]
        _fail("section is not allowed here", section=f"{kind} {arg}".strip())

    graph = CausalGraph(tuple(nodes), edges, observed=observed)
    try:
        if table is not None:
            model = CausalModel(graph, alphabets, observed_table=table,
                                interventional=interventional, mode=mode)
        else:
            model = CausalModel(graph, alphabets, mechanisms=mechanisms,
                                laws=laws, mode=mode)
    except ArgumentError as exc:
        raise ModelFileError(f"model assembly: {exc}") from exc
    if roles is not None:
        try:
            roles.validate_on(model)
        except ArgumentError as exc:
            _fail(str(exc), section="roles")
    return ParsedModel(model, roles, embedding)


def parse_model_file(path) -> ParsedModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model_text(fh.read())


# -- rendering --------------------------------------------------------------

def _render_value(v) -> str:
    text = str(v)
    _check_token(text, "alphabet value")
    return text


def _render_table_lines(dist: Distribution) -> list[str]:
    lines = [f"scope = {', '.join(dist.scope)}"]
    for key, p in sorted(dist.items(), key=lambda kv: repr(kv[0])):
        lines.append(f"{' '.join(_render_value(v) for v in key)} = {render_number(p)}")
    return lines


def render_model_file(model: CausalModel, *, roles: BellRoles | None = None,
                      embedding: Embedding | None = None) -> str:
    """Inverse of parse_model_text, up to comments and ordering."""
    out: list[str] = []
    if model.kind == "mechanism" and model.mode != "unique":
        out += ["[model]", f"mode = {model.mode}", ""]
    out.append("[nodes]")
    observed = set(model.graph.observed)
    for n in model.graph.nodes:
        vis = "observed" if n in observed else "latent"
        alpha = ",".join(_render_value(v) for v in model.alphabets[n])
        out.append(f"{n} {vis} {alpha}")
    out.append("")
    edges = sorted(model.graph.edges)
    if edges:
        out.append("[edges]")
        out += [f"{u} -> {v}" for u, v in edges]
        out.append("")
    if model.kind == "mechanism":
        for n in model.graph.nodes:
            if n in model.laws:
                out.append(f"[law {n}]")
                law = model.laws[n]
                for v in model.alphabets[n]:
                    if v in law.probs:
                        out.append(f"{_render_value(v)} = {render_number(law.probs[v])}")
                out.append("")
        for n in model.graph.nodes:
            if n in model.mechanisms:
                mech = model.mechanisms[n]
                out.append(f"[mechanism {n}]")
                out.append(f"parents = {', '.join(mech.parents)}")
                for row in sorted(mech.table, key=repr):
                    key = ",".join(_render_value(v) for v in row)
                    out.append(f"{key} = {_render_value(mech.table[row])}")
                out.append("")
    else:
        out.append("[distribution]")
        out += _render_table_lines(model.observed_table)
        out.append("")
        for targets in sorted(model.interventional, key=lambda t: sorted(t)):
            names = sorted(targets)
            for key in sorted(model.interventional[targets], key=repr):
                pins = " ".join(f"{n}={_render_value(v)}" for n, v in zip(names, key))
                out.append(f"[interventional {pins}]")
                out += _render_table_lines(model.interventional[targets][key])
                out.append("")
    if roles is not None:
        out.append("[roles]")
        out.append(f"settings = {', '.join(roles.settings)}")
        out.append(f"outcomes = {', '.join(roles.outcomes)}")
        if roles.common_cause:
            out.append(f"common_cause = {roles.common_cause}")
        out.append("")
    if embedding is not None:
        out.append("[embedding]")
        out.append(f"backend = {embedding.backend}")
        if embedding.backend == "poset":
            for e in embedding.order.elements:
                out.append(f"element {e}")
            for u, v in embedding.order.pairs:
                out.append(f"less {u} {v}")
            for n in embedding.nodes:
                out.append(f"at {n} {embedding.events[n]}")
        else:
            for n in embedding.nodes:
                ev = embedding.events[n]
                coords = [render_number(c) for c in ev.space] + [render_number(ev.time)]
                out.append(f"at {n} {' '.join(coords)}")
        out.append("")
    return "\n".join(out).rstrip() + "\n"
