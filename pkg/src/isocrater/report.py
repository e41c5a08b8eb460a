"""Serialization: graph JSON and DOT, and the prediction/measurement report."""

from __future__ import annotations

import json
from dataclasses import dataclass

from sympy import factorint

from .graph import LSGraph, check_principal_counts, components, components_by_label
from .qorder import QuadOrder, factor_prime
from .theory import ComponentProfile, Prediction

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class JobConfig:
    p: int
    a: int
    b: int
    ell: int
    N: int
    kind: str
    disc: int
    out: str | None = None
    max_ext_degree: int = 24
    seed: int = 0

    def params(self) -> dict:
        return {
            "p": self.p,
            "a": self.a,
            "b": self.b,
            "ell": self.ell,
            "N": self.N,
            "kind": self.kind,
            "disc": self.disc,
            "max_ext_degree": self.max_ext_degree,
            "seed": self.seed,
        }


def profile_pairs(prof: ComponentProfile) -> list:
    return [[s, k] for s, k in prof.counts]


def profile_from_pairs(pairs, n: int) -> ComponentProfile:
    return ComponentProfile.from_counter({int(s): int(k) for s, k in pairs}, n)


# ---------------------------------------------------------------------------
# graph documents


def graph_document(G: LSGraph, cfg: JobConfig) -> dict:
    C = G.crater
    return {
        "version": SCHEMA_VERSION,
        "params": cfg.params(),
        "crater": {"n": C.n, "j_cycle": C.j_cycle},
        "vertices": [{"id": i, "curve": v.curve, "level": G.level_codes[v]} for i, v in enumerate(G.vertices)],
        "edges": [{"from": a, "to": b, "label": lab} for a, b, lab in G.edges],
        "profile": profile_pairs(components(G)),
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def parse_graph(text: str) -> dict:
    """Vertex and edge sets of a graph document, validated against the schema."""
    doc = json.loads(text)
    if doc.get("version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported graph document version {doc.get('version')!r}")
    for k in ("params", "crater", "vertices", "edges", "profile"):
        if k not in doc:
            raise ValueError(f"graph document lacks {k!r}")
    verts = {v["id"]: (v["curve"], v["level"]) for v in doc["vertices"]}
    edges = {(e["from"], e["to"], e["label"]) for e in doc["edges"]}
    for a, b, lab in edges:
        if a not in verts or b not in verts or lab not in ("l", "lbar"):
            raise ValueError(f"bad edge {(a, b, lab)}")
    return {"vertices": verts, "edges": edges, "crater": doc["crater"], "params": doc["params"], "profile": doc["profile"]}


def graph_sets(G: LSGraph) -> dict:
    return {
        "vertices": {i: (v.curve, G.level_codes[v]) for i, v in enumerate(G.vertices)},
        "edges": set(G.edges),
    }


def to_dot(G: LSGraph) -> str:
    """Undirected l-edges for gamma0; otherwise a digraph, l solid and lbar dashed."""
    C = G.crater
    directed = not G.undirected
    lines = [f"{'digraph' if directed else 'graph'} crater {{"]
    lines.append(f'  graph [label="p={C.seed.p} ell={C.ell} N={G.N} {G.kind} n={C.n}"];')
    lines.append("  node [shape=circle, fontsize=9];")
    for i, v in enumerate(G.vertices):
        j = C.curves[v.curve].j_int
        level = G.level_codes[v].replace('"', "'")
        lines.append(f'  v{i} [label="{j}", tooltip="{level}"];')
    if directed:
        for a, b, lab in G.edges:
            style = "solid" if lab == "l" else "dashed"
            lines.append(f"  v{a} -> v{b} [style={style}];")
    else:
        # each vertex has one l-edge; its lbar partner is the same undirected edge
        for a, b, lab in G.edges:
            if lab == "l":
                lines.append(f"  v{a} -- v{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reports


def factor_NO(O: QuadOrder, N: int) -> str:
    if N == 1:
        return "O"
    parts = []
    for q, e in sorted(factorint(N).items()):
        fp = factor_prime(O, q)
        sup = "" if e == 1 else f"^{e}"
        if fp.kind == "split":
            parts.extend(f"{I}{sup}" for I in sorted(fp.ideals, key=lambda I: (I.a, I.b)))
        elif fp.kind == "inert":
            parts.append(f"({q}){sup}")
        else:
            parts.append(f"{fp.ideals[0]}^{2 * e}")
    return "".join(parts)


def prediction_block(pred: Prediction, alternatives: dict | None = None) -> dict:
    cd = pred.crater
    O = cd.O
    out = {
        "n": cd.n,
        "shape": str(cd.shape),
        "ell_factorization": repr(factor_prime(O, cd.ell)),
        "l": repr(cd.l),
        "lbar": repr(cd.lbar),
        "N_factorization": factor_NO(O, pred.N),
        "lambda": O.fmt(cd.lam),
        "lambda_bar": O.fmt(cd.lam_bar),
        "rows": [
            {
                "ideal": repr(r.A),
                "colon_ideal": repr(r.colon),
                "phi_O": r.phi,
                "structures": r.count,
                "m": r.m,
                "size": r.size,
                "components": r.components,
            }
            for r in pred.rows
        ],
        "profile": profile_pairs(pred.profile),
    }
    if pred.m_full is not None:
        out["m"] = pred.m_full
    for name, alt in (alternatives or {}).items():
        out[f"profile_generators_{name}"] = profile_pairs(alt.profile)
    return out


def measurement_block(G: LSGraph) -> dict:
    C = G.crater
    prof = components(G)
    out = {
        "n": C.n,
        "j_cycle": C.j_cycle,
        "orientation": C.orientation,
        "torsion_field_degree": G.field_degree,
        "vertices": len(G.vertices),
        "profile": profile_pairs(prof),
        "principal_counts_ok": check_principal_counts(G),
    }
    if C.lbar_edges and not G.undirected:
        out["profile_l_edges_only"] = profile_pairs(components_by_label(G, ("l",)))
    return out


def profile_diff(a: ComponentProfile, b: ComponentProfile) -> dict:
    da, db = a.as_dict(), b.as_dict()
    keys = sorted(set(da) | set(db), reverse=True)
    return {str(s): [da.get(s, 0), db.get(s, 0)] for s in keys if da.get(s, 0) != db.get(s, 0)}
