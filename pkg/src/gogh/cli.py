"""Text format and command-line interface.

Graph description files hold one declaration per line ("#" starts a
comment):

    vertex NAME free INT
    vertex NAME dihedral
    edge NAME from=NAME to=NAME img_from="WORD" img_to="WORD"

Word letters are `v.1` (free generator, 1-based), `v.r` / `v.s` (dihedral),
`e.t` (stable letter), each optionally followed by `^<signed int>`; words
are whitespace-separated letters.  `img_to` is the image of the edge-group
generator in the target vertex group, `img_from` the image in the source,
and the defining relation reads t_e * img_to * t_e^-1 = img_from.

All commands print one deterministic JSON object (sorted keys, integers
beyond 2^53 rendered as decimal strings) and exit 0; malformed input exits
2 with a machine-readable error object.  Verdicts are data, not exit codes.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from .balance import Balanced, Unbalanced, edge_balanced, group_balanced
from .certify import NoWitness, almost_bs_witness, distortion_certificate
from .conjgraph import build_conjugacy_graph, class_of_edge
from .model import (
    DIHEDRAL_R,
    DIHEDRAL_S,
    DihedralInfinite,
    Free,
    GoghError,
    GraphOfGroups,
    EdgeRecord,
    ValidationError,
    VertexWord,
    make_graph,
    validate,
)
from .parametrize import HHG, hhg_verdict, parametrize, verify_parametrization
from .words import britton_reduce, display_tokens, to_path_form, tokens_of_path, vw_normalize


class ParseError(GoghError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.error = message
        self.line = line
        self.column = column


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_VERTEX_RE = re.compile(rf"^vertex\s+({_NAME})\s+(free\s+(\d+)|dihedral)\s*$")
_EDGE_RE = re.compile(
    rf'^edge\s+({_NAME})\s+from=({_NAME})\s+to=({_NAME})\s+img_from="([^"]*)"\s+img_to="([^"]*)"\s*$'
)
_LETTER_RE = re.compile(rf"^({_NAME})\.(\d+|r|s|t)(\^(-?\d+))?$")


def _strip_comment(line: str) -> str:
    out = []
    quoted = False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def parse_letter(text: str, line: int = 0, column: int = 1):
    m = _LETTER_RE.match(text)
    if not m:
        raise ParseError(f"bad letter {text!r}", line, column)
    owner, gen, _, exp = m.groups()
    exponent = int(exp) if exp is not None else 1
    if gen == "t":
        return ("t", owner, exponent)
    if gen in (DIHEDRAL_R, DIHEDRAL_S):
        return ("g", owner, gen, exponent)
    return ("g", owner, int(gen), exponent)


def _parse_attachment(text: str, vertex: str, kind, line: int) -> VertexWord:
    letters = []
    for i, piece in enumerate(text.split()):
        tok = parse_letter(piece, line, 1 + text.find(piece))
        if tok[0] != "g":
            raise ParseError(f"stable letter {piece!r} inside attachment word", line, 1)
        if tok[1] != vertex:
            raise ParseError(
                f"attachment letter {piece!r} does not live in vertex {vertex!r}", line, 1
            )
        letters.append((tok[2], tok[3]))
    word = VertexWord(vertex, tuple(letters))
    return vw_normalize(kind, word) if kind is not None else word


def parse(text: str) -> GraphOfGroups:
    """Parse and validate a graph description."""
    vertices: dict[str, object] = {}
    pending_edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("vertex"):
            m = _VERTEX_RE.match(line)
            if not m:
                raise ParseError("malformed vertex declaration", lineno, 1)
            name, _, rank = m.groups()
            if name in vertices:
                raise ParseError(f"duplicate vertex {name!r}", lineno, 1)
            vertices[name] = Free(int(rank)) if rank is not None else DihedralInfinite()
        elif line.startswith("edge"):
            m = _EDGE_RE.match(line)
            if not m:
                raise ParseError("malformed edge declaration", lineno, 1)
            pending_edges.append((lineno, m.groups()))
        else:
            raise ParseError(f"unrecognized declaration {line.split()[0]!r}", lineno, 1)
    edges = []
    seen = set()
    for lineno, (name, src, tgt, img_from, img_to) in pending_edges:
        if name in seen:
            raise ParseError(f"duplicate edge {name!r}", lineno, 1)
        seen.add(name)
        for v in (src, tgt):
            if v not in vertices:
                raise ParseError(f"edge {name!r} references unknown vertex {v!r}", lineno, 1)
        edges.append(
            EdgeRecord(
                name=name,
                source=src,
                target=tgt,
                attachment_source=_parse_attachment(img_from, src, vertices[src], lineno),
                attachment_target=_parse_attachment(img_to, tgt, vertices[tgt], lineno),
            )
        )
    graph = make_graph(list(vertices.items()), edges)
    validate(graph)
    return graph


def _letter_str(gen, exp: int) -> str:
    return f"{gen}" + (f"^{exp}" if exp != 1 else "")


def _word_str(word: VertexWord) -> str:
    return " ".join(f"{word.vertex}.{_letter_str(g, e)}" for g, e in word.letters)


def serialize(graph: GraphOfGroups) -> str:
    lines = []
    for name, kind in graph.vertices:
        if isinstance(kind, Free):
            lines.append(f"vertex {name} free {kind.rank}")
        else:
            lines.append(f"vertex {name} dihedral")
    for e in graph.edges:
        lines.append(
            f'edge {e.name} from={e.source} to={e.target} '
            f'img_from="{_word_str(e.attachment_source)}" img_to="{_word_str(e.attachment_target)}"'
        )
    return "\n".join(lines) + "\n"


def parse_word(graph: GraphOfGroups, text: str, line: int = 0):
    tokens = []
    vertex_ids = set(graph.vertex_ids())
    edge_ids = set(graph.edge_ids())
    for piece in text.split():
        tok = parse_letter(piece, line, 1)
        if tok[0] == "t":
            if tok[1] not in edge_ids:
                raise ParseError(f"unknown edge {tok[1]!r} in word", line, 1)
        else:
            if tok[1] not in vertex_ids:
                raise ParseError(f"unknown vertex {tok[1]!r} in word", line, 1)
            kind = graph.kind(tok[1])
            if isinstance(kind, Free):
                if not isinstance(tok[2], int) or not 1 <= tok[2] <= kind.rank:
                    raise ParseError(f"unknown generator in {piece!r}", line, 1)
            elif not isinstance(tok[2], str):
                raise ParseError(f"unknown generator in {piece!r}", line, 1)
        tokens.append(tok)
    return tokens


# -- JSON rendering ------------------------------------------------------------

_BIG = 2**53


def _canon(value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) > _BIG else value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, dict):
        return {str(k): _canon(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canon(v) for v in value]
    raise TypeError(f"cannot render {type(value)!r}")


def render_json(obj) -> str:
    return json.dumps(_canon(obj), sort_keys=True, separators=(",", ":"))


def _node_str(node) -> str:
    return f"{node.vertex}|" + " ".join(_letter_str(g, e) for g, e in node.root)


def _arc_json(arc) -> dict:
    via = f"{arc.label}.t" if arc.kind == "edge" else f"{arc.label}.s"
    if arc.kind == "edge" and arc.sign < 0:
        via += "^-1"
    return {
        "from": _node_str(arc.src),
        "to": _node_str(arc.dst),
        "weight": arc.weight,
        "via": via,
    }


def _phi_json(graph: GraphOfGroups, phi) -> dict:
    out = {}
    for vertex, images in phi.vertex_images:
        for gen, el in images:
            out[f"{vertex}.{gen}"] = [el.eps, el.k]
    for edge, el in phi.stable_images:
        out[f"{edge}.t"] = [el.eps, el.k]
    return out


def _witness_json(graph: GraphOfGroups, witness) -> dict:
    return {
        "a": _word_str(witness.a),
        "s": display_tokens(graph, witness.s),
        "i": witness.i,
        "j": witness.j,
        "transcript": display_tokens(graph, tokens_of_path(witness.transcript)),
    }


# -- commands ------------------------------------------------------------------


def _cmd_check(graph: GraphOfGroups, args) -> dict:
    return {"ok": True, "vertices": len(graph.vertices), "edges": len(graph.edges)}


def _cmd_reduce(graph: GraphOfGroups, args) -> dict:
    tokens = parse_word(graph, args.word)
    path = to_path_form(graph, tokens, args.base)
    reduced = britton_reduce(graph, path)
    return {
        "input": args.word,
        "reduced": display_tokens(graph, tokens_of_path(reduced)),
        "trivial": not reduced.tail and reduced.head.is_identity,
    }


def _cmd_balance(graph: GraphOfGroups, args) -> dict:
    names = [args.edge] if args.edge else list(graph.edge_ids())
    edges = []
    for name in names:
        verdict = edge_balanced(graph, name)
        if isinstance(verdict, Balanced):
            edges.append({"id": name, "verdict": "Balanced"})
        else:
            edges.append(
                {
                    "id": name,
                    "verdict": "Unbalanced",
                    "modulus": verdict.modulus,
                    "cycle": [_arc_json(a) for a in verdict.cycle],
                }
            )
    return {"edges": edges}


def _cmd_conjgraph(graph: GraphOfGroups, args) -> dict:
    cls = class_of_edge(graph, args.class_of)
    cg = build_conjugacy_graph(graph, cls)
    text = serialize(cg.graph)
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(text)
    return {
        "class": cls.index,
        "members": [[e, side] for e, side in cls.members],
        "vertices": [
            {
                "id": name,
                "origin": cg.vertex_origin[name][0],
                "root": _word_str(cg.vertex_origin[name][1]),
            }
            for name, _ in cg.graph.vertices
        ],
        "provenance": {
            f"{e}.{side}": _word_str(g) for (e, side), g in sorted(cg.attachment_conjugator.items())
        },
        "text": text,
    }


def _verdict_json(graph: GraphOfGroups, verdict) -> dict:
    if isinstance(verdict, HHG):
        return {
            "status": "HHG",
            "certificates": [
                {"class": c.class_index, "phi": _phi_json(c.conjugacy_graph.graph, c.phi)}
                for c in verdict.certificates
            ],
            "verified": True,
        }
    return {
        "status": "NotHHG",
        "edge": verdict.edge,
        "witness": _witness_json(graph, verdict.witness),
        "verified": True,
    }


def _cmd_verdict(graph: GraphOfGroups, args) -> dict:
    return _verdict_json(graph, hhg_verdict(graph))


def _cmd_parametrize(graph: GraphOfGroups, args) -> dict:
    result = parametrize(graph)
    if isinstance(result, Unbalanced):
        witness = almost_bs_witness(graph, result)
        return {
            "status": "NotHHG",
            "witness": _witness_json(graph, witness),
            "verified": True,
        }
    ok, report = verify_parametrization(graph, result)
    assert ok, report
    return {
        "status": "HHG",
        "certificates": [{"class": 0, "phi": _phi_json(graph, result)}],
        "verified": True,
    }


def _cmd_witness(graph: GraphOfGroups, args) -> dict:
    verdict = group_balanced(graph)
    if isinstance(verdict, Balanced):
        return {"status": "Balanced"}
    witness = almost_bs_witness(graph, verdict)
    out = _witness_json(graph, witness)
    out["edge"] = min(arc.label for arc in verdict.cycle if arc.kind == "edge")
    return out


def _cmd_distortion(graph: GraphOfGroups, args) -> dict:
    verdict = group_balanced(graph)
    if isinstance(verdict, Balanced):
        return {"status": "Balanced"}
    witness = almost_bs_witness(graph, verdict)
    cert = distortion_certificate(graph, witness, args.depth)
    return {
        "witness": _witness_json(graph, witness),
        "table": [
            {
                "k": row.k,
                "exponent": row.exponent,
                "length_bound": row.length_bound,
                "ratio": row.ratio,
            }
            for row in cert.rows
        ],
    }


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gogh", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **extra):
        p = sub.add_parser(name)
        p.add_argument("file")
        p.set_defaults(fn=fn)
        return p

    add("check", _cmd_check)
    p = add("reduce", _cmd_reduce)
    p.add_argument("--word", required=True)
    p.add_argument("--base", default=None)
    p = add("balance", _cmd_balance)
    p.add_argument("--edge", default=None)
    p = add("conjgraph", _cmd_conjgraph)
    p.add_argument("--class-of", dest="class_of", required=True)
    p.add_argument("--emit", default=None)
    add("parametrize", _cmd_parametrize)
    add("verdict", _cmd_verdict)
    add("witness", _cmd_witness)
    p = add("distortion", _cmd_distortion)
    p.add_argument("--depth", type=int, required=True)
    return ap


def run(argv) -> tuple[int, dict]:
    args = build_arg_parser().parse_args(argv)
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        return 2, {"error": str(exc), "line": 0, "column": 0}
    try:
        graph = parse(text)
        return 0, args.fn(graph, args)
    except ParseError as exc:
        return 2, {"error": exc.error, "line": exc.line, "column": exc.column}
    except ValidationError as exc:
        return 2, {"error": f"{exc.code}: {exc.message}", "line": 0, "column": 0}
    except (NoWitness, GoghError) as exc:
        return 2, {"error": str(exc), "line": 0, "column": 0}


def main(argv=None) -> int:
    code, payload = run(sys.argv[1:] if argv is None else argv)
    print(render_json(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
