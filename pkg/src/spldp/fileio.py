"""JSON instance files and DOT rendering.

An instance file is one JSON object::

    {
      "problem": "pcsp" | "lospre" | "bank",       (default "pcsp")
      "cost_kind": "int" | "lex2",                  (default "int")
      "vertices": [id | {"id": id, "U": bool, "I": bool, "precolor": bank}, ...],
      "edges": [[src, dst] | {"id": id, "src": .., "dst": .., "taken": bool, "label": str}, ...],
      "entry": id, "exit": id, "break": id, "continue": id,      (all optional)

      pcsp:   "domains": [values] | {vertex: [values]},
              "edge_costs": {"default": cost, "exceptions": [[edge, a, b, cost], ...]},
              "node_costs": {"default": cost, "exceptions": [[vertex, a, cost], ...]}
      lospre: "U": [...], "I": [...],
              "c": {"default": cost, "exceptions": [[edge, cost], ...]},
              "l": {"default": cost, "exceptions": [[vertex, cost], ...]}
      bank:   "banks": [...], "precolored": {vertex: bank}, "c0": int, "c1": int,
              "taken": [edge, ...]

      "decomposition": tree     (optional; otherwise recovered from the edges)
    }

Edges given as pairs get their list position as id.  Costs are integers,
pairs for ``lex2``, or ``"inf"``.  Domain values that are JSON lists are
read as tuples.  Vertices and edges flagged ``"phantom": true`` are the
padding the decomposition may need (see :mod:`spldp.recognize`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from . import costs
from .bankselect import BankInstance
from .decompose import (ATOM, LOOP, PARALLEL, PHANTOM, SERIES, Cfg, DecompNode, DecompositionError,
                        SplDecomposition, cfg_of)
from .graph import AtomKind, Edge, SplGraph
from .lospre import LospreInstance
from .pcsp import PcspInstance
from .recognize import recognize

PROBLEMS = ("pcsp", "lospre", "bank")
_ATOMS = {"eps": AtomKind.EPS, "break": AtomKind.BREAK, "continue": AtomKind.CONTINUE}
_ATOM_NAMES = {v: k for k, v in _ATOMS.items()}


class InstanceError(ValueError):
    """A malformed instance; ``key`` locates the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message


@dataclass(frozen=True)
class Label:
    """Payload of an edge read from a file."""

    text: str = ""

    def label(self) -> str:
        return self.text


def _value(x):
    if isinstance(x, list):
        return tuple(_value(y) for y in x)
    return x


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


def _cost(kind: str, raw, key: str):
    try:
        return costs.coerce(kind, _value(raw) if isinstance(raw, list) else raw)
    except ValueError as exc:
        raise InstanceError(key, str(exc)) from None


def _need(data: Mapping, name: str, where: str = ""):
    if name not in data:
        raise InstanceError(where + name, "missing")
    return data[name]


# --------------------------------------------------------------------------- graphs


@dataclass
class _Graph:
    cfg: Cfg
    vertex_flags: Dict[Any, dict]
    edge_flags: Dict[Any, dict]


def _read_graph(data: Mapping) -> _Graph:
    raw_vertices = _need(data, "vertices")
    if not isinstance(raw_vertices, list) or not raw_vertices:
        raise InstanceError("vertices", "expected a nonempty list")
    vertices, flags, phantom_v = [], {}, []
    for i, item in enumerate(raw_vertices):
        if isinstance(item, dict):
            vid = _need(item, "id", f"vertices[{i}].")
            flags[vid] = item
            if item.get("phantom"):
                phantom_v.append(vid)
        else:
            vid = item
            flags[vid] = {}
        if not isinstance(vid, (int, str)) or isinstance(vid, bool):
            raise InstanceError(f"vertices[{i}]", f"vertex ids must be integers or strings, got {vid!r}")
        if vid in vertices:
            raise InstanceError(f"vertices[{i}]", f"duplicate vertex {vid!r}")
        vertices.append(vid)
    known = set(vertices)
    edges, eflags, phantom_e = [], {}, []
    raw_edges = _need(data, "edges")
    if not isinstance(raw_edges, list):
        raise InstanceError("edges", "expected a list")
    for i, item in enumerate(raw_edges):
        where = f"edges[{i}]"
        if isinstance(item, dict):
            eid = item.get("id", i)
            if eid in eflags:
                raise InstanceError(where, f"duplicate edge id {eid!r}")
            src, dst = _need(item, "src", where + "."), _need(item, "dst", where + ".")
            eflags[eid] = item
            if item.get("phantom"):
                phantom_e.append(eid)
            payload = PHANTOM if item.get("phantom") else Label(str(item.get("label", "")))
        elif isinstance(item, list) and len(item) == 2:
            eid, (src, dst) = i, item
            if eid in eflags:
                raise InstanceError(where, f"duplicate edge id {eid!r}")
            eflags[eid] = {}
            payload = Label()
        else:
            raise InstanceError(where, "expected [src, dst] or an object with src and dst")
        for end, v in (("src", src), ("dst", dst)):
            if v not in known:
                raise InstanceError(f"{where}.{end}", f"unknown vertex {v!r}")
        edges.append(Edge(eid, src, dst, payload))
    specials = {}
    for name in ("entry", "exit", "break", "continue"):
        if name in data:
            if data[name] not in known:
                raise InstanceError(name, f"unknown vertex {data[name]!r}")
            specials[name] = data[name]
    if "decomposition" in data:
        d = _read_tree(data["decomposition"], vertices, edges, phantom_v, phantom_e)
    else:
        if phantom_v or phantom_e:
            raise InstanceError("vertices", "phantom entries need an explicit decomposition")
        try:
            d = recognize(vertices, edges, specials.get("entry"), specials.get("exit"),
                          specials.get("break"), specials.get("continue"))
        except DecompositionError as exc:
            raise InstanceError("edges", str(exc)) from None
    return _Graph(cfg_of(d), flags, eflags)


def _read_tree(tree, vertices, edges, phantom_v, phantom_e) -> SplDecomposition:
    emap = {e.id: e for e in edges}
    root_holder: List[DecompNode] = []
    stack = [(tree, "decomposition", None)]
    while stack:
        item, where, parent = stack.pop()
        if not isinstance(item, dict):
            raise InstanceError(where, "expected an object")
        op = _need(item, "op", where + ".")
        sp = _need(item, "specials", where + ".")
        if not isinstance(sp, list) or len(sp) != 4:
            raise InstanceError(where + ".specials", "expected four vertex ids")
        node = DecompNode(op, *sp)
        if op == ATOM:
            kind = _need(item, "atom", where + ".")
            if kind not in _ATOMS:
                raise InstanceError(where + ".atom", f"unknown atom {kind!r}")
            node.atom = _ATOMS[kind]
            eid = _need(item, "edge", where + ".")
            if eid not in emap:
                raise InstanceError(where + ".edge", f"unknown edge {eid!r}")
            node.edges = (eid,)
        elif op in (SERIES, PARALLEL, LOOP):
            kids = _need(item, "children", where + ".")
            if op == LOOP:
                loop_edges = _need(item, "edges", where + ".")
                for k, eid in enumerate(loop_edges):
                    if eid not in emap:
                        raise InstanceError(f"{where}.edges[{k}]", f"unknown edge {eid!r}")
                node.edges = tuple(loop_edges)
            for k in range(len(kids) - 1, -1, -1):
                stack.append((kids[k], f"{where}.children[{k}]", node))
        else:
            raise InstanceError(where + ".op", f"unknown operation {op!r}")
        if parent is None:
            root_holder.append(node)
        else:
            parent.children.append(node)
    d = SplDecomposition(root_holder[0], emap, vertices, phantom_v, phantom_e)
    try:
        d.validate()
    except DecompositionError as exc:
        raise InstanceError("decomposition", str(exc)) from None
    return d


def tree_to_json(d: SplDecomposition) -> dict:
    out: Dict[int, dict] = {}
    for node in d.postorder():
        item: Dict[str, Any] = {"op": node.kind, "specials": list(node.specials)}
        if node.kind == ATOM:
            item["atom"] = _ATOM_NAMES[node.atom]
            item["edge"] = node.edges[0]
        else:
            if node.kind == LOOP:
                item["edges"] = list(node.edges)
            item["children"] = [out.pop(ch.index) for ch in node.children]
        out[node.index] = item
    return out[d.root.index]


def _label_of(payload) -> str:
    label = getattr(payload, "label", None)
    if callable(label):
        return label()
    return "" if payload is None else str(payload)


def graph_to_json(cfg: Cfg, vertex_extra: Optional[Mapping] = None,
                  edge_extra: Optional[Mapping] = None) -> dict:
    vertex_extra = vertex_extra or {}
    edge_extra = edge_extra or {}
    vertices = []
    for v in cfg.vertices:
        item = {"id": v, **vertex_extra.get(v, {})}
        if v in cfg.phantom_vertices:
            item["phantom"] = True
        vertices.append(item if len(item) > 1 else v)
    edges = []
    for e in cfg.edges:
        item = {"id": e.id, "src": e.src, "dst": e.dst}
        if e.id in cfg.phantom_edges:
            item["phantom"] = True
        else:
            text = _label_of(e.payload)
            if text:
                item["label"] = text
        item.update(edge_extra.get(e.id, {}))
        edges.append(item)
    return {"vertices": vertices, "edges": edges, "entry": cfg.s, "exit": cfg.t,
            "break": cfg.b, "continue": cfg.c, "decomposition": tree_to_json(cfg.decomposition)}


# --------------------------------------------------------------------------- instances

Instance = Union[PcspInstance, LospreInstance, BankInstance]


def _read_pcsp(data: Mapping, g: _Graph, kind: str) -> PcspInstance:
    cfg = g.cfg
    raw = _need(data, "domains")
    if isinstance(raw, list):
        domains = {v: tuple(_value(x) for x in raw) for v in cfg.real_vertices}
    elif isinstance(raw, dict):
        domains = {}
        keyed = {str(k): v for k, v in raw.items()}
        for v in cfg.real_vertices:
            if str(v) not in keyed:
                raise InstanceError(f"domains.{v}", "missing")
            domains[v] = tuple(_value(x) for x in keyed[str(v)])
        stray = set(keyed) - {str(v) for v in cfg.real_vertices}
        if stray:
            raise InstanceError(f"domains.{sorted(stray)[0]}", "unknown vertex")
    else:
        raise InstanceError("domains", "expected a list or an object")
    for v, dom in domains.items():
        if not dom:
            raise InstanceError(f"domains.{v}", "empty domain")
        if len(set(dom)) != len(dom):
            raise InstanceError(f"domains.{v}", "duplicate values")
    index = {v: {x: i for i, x in enumerate(dom)} for v, dom in domains.items()}
    real = {e.id: e for e in cfg.real_edges}

    block = data.get("edge_costs", {})
    default = _cost(kind, block.get("default", 0), "edge_costs.default")
    tables = {eid: [[default] * len(domains[e.dst]) for _ in domains[e.src]] for eid, e in real.items()}
    for k, row in enumerate(block.get("exceptions", [])):
        where = f"edge_costs.exceptions[{k}]"
        if not isinstance(row, list) or len(row) != 4:
            raise InstanceError(where, "expected [edge, a, b, cost]")
        eid, a, b, c = row
        if eid not in real:
            raise InstanceError(where, f"unknown edge {eid!r}")
        e = real[eid]
        a, b = _value(a), _value(b)
        if a not in index[e.src] or b not in index[e.dst]:
            raise InstanceError(where, f"value outside the domain of edge {eid!r}")
        tables[eid][index[e.src][a]][index[e.dst][b]] = _cost(kind, c, where)

    node_tables = None
    if "node_costs" in data:
        block = data["node_costs"]
        default = _cost(kind, block.get("default", 0), "node_costs.default")
        node_tables = {v: [default] * len(domains[v]) for v in cfg.real_vertices}
        for k, row in enumerate(block.get("exceptions", [])):
            where = f"node_costs.exceptions[{k}]"
            if not isinstance(row, list) or len(row) != 3:
                raise InstanceError(where, "expected [vertex, a, cost]")
            v, a, c = row
            a = _value(a)
            if v not in index:
                raise InstanceError(where, f"unknown vertex {v!r}")
            if a not in index[v]:
                raise InstanceError(where, f"value outside the domain of vertex {v!r}")
            node_tables[v][index[v][a]] = _cost(kind, c, where)
    return PcspInstance(cfg, domains, kind=kind, edge_tables=tables, node_tables=node_tables)


def _flag_set(data: Mapping, g: _Graph, name: str) -> set:
    out = {v for v, f in g.vertex_flags.items() if f.get(name)}
    known = set(g.cfg.real_vertices)
    for k, v in enumerate(data.get(name, [])):
        if v not in known:
            raise InstanceError(f"{name}[{k}]", f"unknown vertex {v!r}")
        out.add(v)
    return out


def _read_lospre(data: Mapping, g: _Graph, kind: str) -> LospreInstance:
    cfg = g.cfg
    U, I = _flag_set(data, g, "U"), _flag_set(data, g, "I")
    real_e = {e.id for e in cfg.real_edges}
    real_v = set(cfg.real_vertices)

    def weights(name, keys, what):
        block = data.get(name, {})
        default = _cost(kind, block.get("default", 1 if name == "c" else 0), f"{name}.default")
        out = {k: default for k in keys}
        for k, row in enumerate(block.get("exceptions", [])):
            where = f"{name}.exceptions[{k}]"
            if not isinstance(row, list) or len(row) != 2:
                raise InstanceError(where, f"expected [{what}, cost]")
            if row[0] not in keys:
                raise InstanceError(where, f"unknown {what} {row[0]!r}")
            out[row[0]] = _cost(kind, row[1], where)
        return out

    c = weights("c", real_e, "edge")
    l = weights("l", real_v, "vertex")
    try:
        return LospreInstance(cfg, U, I, c, l, kind)
    except ValueError as exc:
        raise InstanceError("I", str(exc)) from None


def _read_bank(data: Mapping, g: _Graph) -> BankInstance:
    cfg = g.cfg
    banks = [_value(b) for b in _need(data, "banks")]
    pre = {v: _value(f["precolor"]) for v, f in g.vertex_flags.items() if "precolor" in f}
    known = {str(v): v for v in cfg.real_vertices}
    for k, b in data.get("precolored", {}).items():
        if k not in known:
            raise InstanceError(f"precolored.{k}", "unknown vertex")
        pre[known[k]] = _value(b)
    for v, b in pre.items():
        if b not in banks:
            raise InstanceError(f"precolored.{v}", f"bank {b!r} is not listed in banks")
    taken = {eid for eid, f in g.edge_flags.items() if f.get("taken")}
    real_e = {e.id for e in cfg.real_edges}
    for k, eid in enumerate(data.get("taken", [])):
        if eid not in real_e:
            raise InstanceError(f"taken[{k}]", f"unknown edge {eid!r}")
        taken.add(eid)
    c0, c1 = data.get("c0", 3), data.get("c1", 6)
    try:
        return BankInstance(cfg, banks, pre, c0, c1, taken)
    except ValueError as exc:
        raise InstanceError("banks", str(exc)) from None


def instance_from_json(data: Mapping) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("<root>", "expected a JSON object")
    problem = data.get("problem", "pcsp")
    if problem not in PROBLEMS:
        raise InstanceError("problem", f"expected one of {PROBLEMS}, got {problem!r}")
    kind = data.get("cost_kind", "int")
    if kind not in costs.KINDS:
        raise InstanceError("cost_kind", f"expected one of {costs.KINDS}, got {kind!r}")
    g = _read_graph(data)
    if problem == "pcsp":
        return _read_pcsp(data, g, kind)
    if problem == "lospre":
        return _read_lospre(data, g, kind)
    return _read_bank(data, g)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"<json line {exc.lineno}>", exc.msg) from None
    return instance_from_json(data)


def instance_to_json(inst: Instance) -> dict:
    cfg = inst.cfg
    if isinstance(inst, PcspInstance):
        out = {"problem": "pcsp", "cost_kind": inst.kind, **graph_to_json(cfg)}
        out["domains"] = {str(v): [_jsonable(x) for x in inst.domains[v]] for v in cfg.real_vertices}
        zero = costs.zero(inst.kind)
        exc = []
        for e in cfg.real_edges:
            for a in inst.domains[e.src]:
                for b in inst.domains[e.dst]:
                    c = inst.edge_cost(e, a, b)
                    if c != zero:
                        exc.append([e.id, _jsonable(a), _jsonable(b), costs.to_json(c)])
        out["edge_costs"] = {"default": costs.to_json(zero), "exceptions": exc}
        if inst.has_node_costs():
            exc = [[v, _jsonable(a), costs.to_json(inst.node_cost(v, a))] for v in cfg.real_vertices
                   for a in inst.domains[v] if inst.node_cost(v, a) != zero]
            out["node_costs"] = {"default": costs.to_json(zero), "exceptions": exc}
        return out
    if isinstance(inst, LospreInstance):
        out = {"problem": "lospre", "cost_kind": inst.kind, **graph_to_json(cfg)}
        out["U"] = sorted(inst.U, key=str)
        out["I"] = sorted(inst.I, key=str)
        zero = costs.zero(inst.kind)
        out["c"] = {"default": costs.to_json(zero),
                    "exceptions": [[e.id, costs.to_json(inst.edge_cost(e.id))] for e in cfg.real_edges]}
        out["l"] = {"default": costs.to_json(zero),
                    "exceptions": [[v, costs.to_json(inst.vertex_cost(v))] for v in cfg.real_vertices]}
        return out
    if isinstance(inst, BankInstance):
        out = {"problem": "bank", **graph_to_json(cfg)}
        out["banks"] = [_jsonable(b) for b in inst.banks]
        out["precolored"] = {str(v): _jsonable(b) for v, b in inst.precolored.items()}
        out["c0"], out["c1"] = inst.c0, inst.c1
        out["taken"] = sorted(inst.taken_edges, key=str)
        return out
    raise TypeError(f"cannot serialize {type(inst).__name__}")


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_json(inst), fh, indent=1, ensure_ascii=False)
        fh.write("\n")


# --------------------------------------------------------------------------- DOT


def _q(x) -> str:
    return '"' + str(x).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def emit_dot(obj, name: str = "G") -> str:
    """DOT text for a graph or Cfg (vertices and labeled edges) or for a
    decomposition (its parse tree)."""
    if isinstance(obj, SplDecomposition):
        return _tree_dot(obj, name)
    if isinstance(obj, Cfg):
        vertices, edges, sp = obj.vertices, obj.edges, obj.specials
        phantom_v, phantom_e = obj.phantom_vertices, obj.phantom_edges
    elif isinstance(obj, SplGraph):
        vertices, edges, sp = obj.vertices, obj.edges, obj.specials
        phantom_v = phantom_e = frozenset()
    else:
        raise TypeError(f"cannot render {type(obj).__name__}")
    role = dict(zip(sp, "STBC"))
    lines = [f"digraph {_q(name)} {{", "  node [shape=circle];"]
    for v in vertices:
        label = f"{role[v]}\\n{v}" if v in role else str(v)
        style = ", style=dashed" if v in phantom_v else ""
        shape = ", shape=doublecircle" if v in role else ""
        lines.append(f"  {_q(v)} [label=\"{label}\"{shape}{style}];")
    for e in edges:
        style = ", style=dashed" if e.id in phantom_e else ""
        lines.append(f"  {_q(e.src)} -> {_q(e.dst)} [label={_q(_label_of(e.payload))}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _tree_dot(d: SplDecomposition, name: str) -> str:
    lines = [f"digraph {_q(name)} {{", "  node [shape=box];"]
    for node in d.nodes:
        lines.append(f"  n{node.index} [label={_q(node.label())}];")
    for node in d.nodes:
        for ch in node.children:
            lines.append(f"  n{node.index} -> n{ch.index};")
    lines.append("}")
    return "\n".join(lines) + "\n"
