"""Graph exports: full landscapes and local optima networks.

Landscape graphs carry one node per config (fitness, isLocalOptimum, and
the size of the basin its local search drains into; 0 for plateau-stuck
configs) and one directed edge per neighbor pair pointing at the fitter
endpoint. Equal-fitness neighbors become a pair of opposing edges. Full
landscapes export only below a size guard; the LON has no such limit.

GraphML is written with the stdlib XML tree so the output always reparses;
DOT is plain text with quoted numeric node names.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from ._kernels import CLS_OPTIMUM
from .errors import ValidationError
from .landscape import Landscape
from .optima import BEST, LocalOptimaNetwork, _scan, _terminals, assign_basins

DEFAULT_SIZE_GUARD = 1 << 16

FORMATS = ("graphml", "dot")


def _check_format(fmt: str) -> None:
    if fmt not in FORMATS:
        raise ValidationError(f"format must be one of {FORMATS}")


def _neighbor_edges(l: Landscape):
    """Directed (src, dst) pairs pointing at the fitter endpoint.

    Each unordered neighbor pair is visited once through src < dst
    enumeration; ties yield both directions.
    """
    space = l.space
    gain = l.gain
    edges = []
    for a in range(space.cardinality):
        for b in space.neighbors(a):
            if b < a:
                continue
            if gain[a] < gain[b]:
                edges.append((a, b))
            elif gain[b] < gain[a]:
                edges.append((b, a))
            else:
                edges.append((a, b))
                edges.append((b, a))
    return edges


def _landscape_nodes(l: Landscape):
    """(fitness, is_optimum, basin_size) arrays indexed by ConfigId."""
    report = assign_basins(l, strategy=BEST, seed=0)
    card = l.space.cardinality
    is_opt = np.zeros(card, dtype=bool)
    is_opt[report.optima] = True
    succ, cls = _scan(l, BEST, 0)
    terminals, _ = _terminals(succ)
    size_at = np.zeros(card, dtype=np.int64)
    for b in report.basins:
        size_at[b.optimum_id] = b.size
    basin_size = np.where(cls[terminals] == CLS_OPTIMUM, size_at[terminals], 0)
    return l.values, is_opt, basin_size


def _graphml_root():
    ET.register_namespace("", "http://graphml.graphdrawing.org/xmlns")
    return ET.Element("{http://graphml.graphdrawing.org/xmlns}graphml")


def _graphml_key(root, key_id: str, target: str, attr_type: str) -> None:
    ET.SubElement(root, "key", {
        "id": key_id,
        "for": target,
        "attr.name": key_id,
        "attr.type": attr_type,
    })


def _data(parent, key: str, value: str) -> None:
    el = ET.SubElement(parent, "data", {"key": key})
    el.text = value


def _write_xml(root, path) -> None:
    tree = ET.ElementTree(root)
    ET.indent(tree)
    tree.write(path, encoding="utf-8", xml_declaration=True)


def _bool_str(flag) -> str:
    return "true" if flag else "false"


def export_landscape(l: Landscape, path, fmt: str = "graphml",
                     size_guard: int = DEFAULT_SIZE_GUARD) -> None:
    """Write the full neighbor graph; refuses spaces above the size guard."""
    _check_format(fmt)
    l.require_complete("landscape export")
    card = l.space.cardinality
    if card > size_guard:
        raise ValidationError(
            f"cardinality {card} exceeds the export guard {size_guard}; "
            "export the local optima network instead"
        )
    fitness, is_opt, basin_size = _landscape_nodes(l)
    edges = _neighbor_edges(l)
    if fmt == "graphml":
        root = _graphml_root()
        _graphml_key(root, "fitness", "node", "double")
        _graphml_key(root, "isLocalOptimum", "node", "boolean")
        _graphml_key(root, "basinSize", "node", "long")
        graph = ET.SubElement(root, "graph", {"id": "landscape", "edgedefault": "directed"})
        for cid in range(card):
            node = ET.SubElement(graph, "node", {"id": f"n{cid}"})
            _data(node, "fitness", repr(float(fitness[cid])))
            _data(node, "isLocalOptimum", _bool_str(is_opt[cid]))
            _data(node, "basinSize", str(int(basin_size[cid])))
        for src, dst in edges:
            ET.SubElement(graph, "edge", {"source": f"n{src}", "target": f"n{dst}"})
        _write_xml(root, path)
    else:
        lines = ["digraph landscape {"]
        for cid in range(card):
            lines.append(
                f'  "{cid}" [fitness={float(fitness[cid])!r}, '
                f"isLocalOptimum={_bool_str(is_opt[cid])}, "
                f"basinSize={int(basin_size[cid])}];"
            )
        for src, dst in edges:
            lines.append(f'  "{src}" -> "{dst}";')
        lines.append("}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def export_lon(lon: LocalOptimaNetwork, path, fmt: str = "graphml") -> None:
    """Write the local optima network with escape-edge weights."""
    _check_format(fmt)
    if fmt == "graphml":
        root = _graphml_root()
        _graphml_key(root, "fitness", "node", "double")
        _graphml_key(root, "isLocalOptimum", "node", "boolean")
        _graphml_key(root, "basinSize", "node", "long")
        _graphml_key(root, "weight", "edge", "long")
        graph = ET.SubElement(root, "graph", {"id": "lon", "edgedefault": "directed"})
        for v in lon.vertices:
            node = ET.SubElement(graph, "node", {"id": f"n{v.id}"})
            _data(node, "fitness", repr(float(v.fitness)))
            _data(node, "isLocalOptimum", "true")
            _data(node, "basinSize", str(int(v.basin_size)))
        for src, dst, weight in lon.edges:
            edge = ET.SubElement(graph, "edge", {"source": f"n{src}", "target": f"n{dst}"})
            _data(edge, "weight", str(int(weight)))
        _write_xml(root, path)
    else:
        lines = ["digraph lon {"]
        for v in lon.vertices:
            lines.append(
                f'  "{v.id}" [fitness={float(v.fitness)!r}, '
                f"isLocalOptimum=true, basinSize={int(v.basin_size)}];"
            )
        for src, dst, weight in lon.edges:
            lines.append(f'  "{src}" -> "{dst}" [weight={int(weight)}];')
        lines.append("}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
