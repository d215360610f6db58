"""SteinLib .stp import/export for cross-checking against other solvers.

Export integerizes weights with a configurable scale factor and is
therefore lossy; the scale is recorded in the comment section.
"""

from __future__ import annotations

import numpy as np

from .errors import WirelayError
from .graph import WeightedWireGraph

HEADER = "33D32945 STP File, STP Format Version 1.0"


def write_stp(path, graph: WeightedWireGraph, scale: float = 1e6, name: str = "wirelay") -> None:
    with open(path, "w") as fh:
        fh.write(HEADER + "\n\n")
        fh.write("SECTION Comment\n")
        fh.write(f'Name "{name}"\n')
        fh.write('Creator "wirelay"\n')
        fh.write(f'Remark "weights scaled by {scale:g} and rounded"\n')
        fh.write("END\n\n")
        fh.write("SECTION Graph\n")
        fh.write(f"Nodes {graph.num_nodes}\n")
        fh.write(f"Edges {graph.num_edges}\n")
        for i, (u, v) in enumerate(np.asarray(graph.edges)):
            w = int(round(float(graph.weight[i]) * scale))
            fh.write(f"E {int(u) + 1} {int(v) + 1} {w}\n")
        fh.write("END\n\n")
        fh.write("SECTION Terminals\n")
        fh.write(f"Terminals {len(graph.terminals)}\n")
        for t in graph.terminals:
            fh.write(f"T {t + 1}\n")
        fh.write("END\n\nEOF\n")


def read_stp(path) -> WeightedWireGraph:
    nodes = 0
    edges = []
    weights = []
    terminals = []
    section = None
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            low = line.lower()
            if low.startswith("section"):
                section = low.split()[1]
                continue
            if low == "end":
                section = None
                continue
            if low == "eof":
                break
            if section == "graph":
                parts = line.split()
                key = parts[0].lower()
                if key == "nodes":
                    nodes = int(parts[1])
                elif key in ("e", "a"):
                    u, v, w = int(parts[1]) - 1, int(parts[2]) - 1, float(parts[3])
                    if u > v:
                        u, v = v, u
                    edges.append((u, v))
                    weights.append(w)
            elif section == "terminals":
                parts = line.split()
                if parts[0].lower() == "t":
                    terminals.append(int(parts[1]) - 1)
    if nodes <= 0 or not edges:
        raise WirelayError(f"{path}: no graph section parsed")
    order = sorted(range(len(edges)), key=lambda i: edges[i])
    edges_arr = np.array([edges[i] for i in order], dtype=np.int32)
    w_arr = np.array([weights[i] for i in order])
    return WeightedWireGraph(
        num_nodes=nodes,
        edges=edges_arr,
        length=w_arr.copy(),
        weight=w_arr,
        terminals=tuple(sorted(set(terminals))),
        eta=0.0,
        wd=0.0,
    )
