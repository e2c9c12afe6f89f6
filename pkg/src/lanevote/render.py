"""Static SVG drawings of scenes, decoded lanes, seeds and centerness fields."""
from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .fields import LaneScene

SVG_NS = "http://www.w3.org/2000/svg"
PALETTE = ("#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
           "#42d4f4", "#f032e6", "#bfef45", "#469990", "#9a6324")


def lane_color(index: int) -> str:
    return PALETTE[index % len(PALETTE)]


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def render_svg(scene: LaneScene, seeds=None, field=None, field_step: int = 4, stroke: float = 2.0) -> str:
    """SVG text for ``scene``.

    The optional centerness ``field`` is drawn as grey cells sampled every
    ``field_step`` pixels (zero cells are skipped); lanes become ``<path>``
    elements coloured by index and seeds become ``<circle>`` elements.
    """
    ET.register_namespace("", SVG_NS)
    root = ET.Element(f"{{{SVG_NS}}}svg", {
        "width": str(scene.width), "height": str(scene.height),
        "viewBox": f"0 0 {scene.width} {scene.height}", "version": "1.1"})
    ET.SubElement(root, f"{{{SVG_NS}}}rect", {"x": "0", "y": "0", "width": str(scene.width),
                                             "height": str(scene.height), "fill": "black"})
    if field is not None:
        f = np.asarray(field)
        g = ET.SubElement(root, f"{{{SVG_NS}}}g", {"id": "centerness"})
        for r in range(0, f.shape[0], field_step):
            for c in range(0, f.shape[1], field_step):
                v = float(f[r:r + field_step, c:c + field_step].max())
                if v <= 0:
                    continue
                level = int(round(255 * min(v, 1.0)))
                ET.SubElement(g, f"{{{SVG_NS}}}rect", {
                    "x": str(c), "y": str(r), "width": str(field_step), "height": str(field_step),
                    "fill": f"rgb({level},{level},{level})"})
    lanes = ET.SubElement(root, f"{{{SVG_NS}}}g", {"id": "lanes", "fill": "none"})
    for i, lane in enumerate(scene.lanes):
        d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in lane.points)
        ET.SubElement(lanes, f"{{{SVG_NS}}}path", {"d": d, "stroke": lane_color(i),
                                                  "stroke-width": _fmt(stroke)})
    if seeds:
        g = ET.SubElement(root, f"{{{SVG_NS}}}g", {"id": "seeds"})
        for i, s in enumerate(seeds):
            ET.SubElement(g, f"{{{SVG_NS}}}circle", {"cx": _fmt(s.x), "cy": _fmt(s.y), "r": "3",
                                                    "fill": "yellow", "data-order": str(i)})
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"
