"""SVG path ingestion: path data to flat lists of rational Bezier curves.

Accepts either a whole SVG document or bare path data ("M 0 0 L 1 0 ...").
Lines, quadratics and cubics map directly to Bezier curves of the same
degree; elliptical arcs are converted through the standard endpoint-to-
center change of parameters and emitted as exact rational quadratic conic
pieces of at most a quarter turn each. Transform attributes (translate,
scale, rotate, matrix) are composed down the element tree and applied to
control points, which keeps arcs exact because rational Beziers are closed
under affine maps.

Only raw outline geometry is read. Fill rules, strokes, styling and
reference elements have no bearing on winding numbers and are ignored.
"""

from __future__ import annotations

import csv
import math
import re
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from curvewind.geometry import Aabb, RationalBezierCurve, line


class MalformedPath(ValueError):
    """Path data that cannot be tokenized or is command-incomplete."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class UnsupportedFeature(UserWarning):
    """Input uses a named feature outside the supported subset."""


@dataclass
class Shape2D:
    """A flat collection of oriented boundary curves."""

    curves: list
    global_aabb: Aabb
    source_name: str = ""
    # populated by adaptive subdivision: fresh curve id -> original curve id
    source_ids: Optional[dict] = None
    depth_cap_hits: int = 0

    def __post_init__(self):
        ids = [c.id for c in self.curves]
        if len(set(ids)) != len(ids):
            raise ValueError("curve ids must be unique within a shape")

    def __len__(self):
        return len(self.curves)


def shape_from_curves(curves, source_name: str = "") -> Shape2D:
    """Shape with the tight global box of the given curves."""
    boxes = [c.aabb() for c in curves]
    if boxes:
        box = boxes[0]
        for b in boxes[1:]:
            box = box.union(b)
    else:
        box = Aabb(np.zeros(2), np.zeros(2))
    return Shape2D(list(curves), box, source_name)


_WS = r"[\s,]*"
_NUMBER = re.compile(_WS + r"([+-]?(?:[0-9]*\.[0-9]+|[0-9]+\.?)(?:[eE][+-]?[0-9]+)?)")
_FLAG = re.compile(_WS + r"([01])")
_COMMAND = re.compile(_WS + r"([MmLlHhVvCcSsQqTtAaZz])")
_TRAILING = re.compile(_WS + r"$")


class _PathScanner:
    """Tokenizer over one path data string, tracking byte offsets."""

    def __init__(self, data: str):
        self.data = data
        self.pos = 0

    def done(self) -> bool:
        return _TRAILING.match(self.data, self.pos) is not None

    def command(self) -> Optional[str]:
        m = _COMMAND.match(self.data, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group(1)

    def peek_number(self) -> bool:
        return _NUMBER.match(self.data, self.pos) is not None

    def number(self) -> float:
        m = _NUMBER.match(self.data, self.pos)
        if m is None:
            raise MalformedPath("expected a number", self.pos)
        self.pos = m.end()
        return float(m.group(1))

    def flag(self) -> int:
        # arc flags are single characters and may be run together: "0110 10"
        m = _FLAG.match(self.data, self.pos)
        if m is None:
            raise MalformedPath("expected an arc flag (0 or 1)", self.pos)
        self.pos = m.end()
        return int(m.group(1))

    def pair(self) -> np.ndarray:
        return np.array([self.number(), self.number()])


class _PathBuilder:
    """Consumes one path's command stream, emitting transformed curves."""

    def __init__(self, transform: np.ndarray, sink: list):
        self.transform = transform
        self.sink = sink
        self.cur = np.zeros(2)
        self.start = np.zeros(2)
        self.prev_cubic_ctrl = None       # second control point of last C/S
        self.prev_quad_ctrl = None        # control point of last Q/T

    def _emit(self, points, weights=None):
        pts = np.asarray(points, dtype=float)
        pts = pts @ self.transform[:, :2].T + self.transform[:, 2]
        if weights is None:
            weights = np.ones(len(pts))
        curve = RationalBezierCurve(pts, weights, len(self.sink))
        if not curve.is_degenerate():
            self.sink.append(curve)

    def run(self, scanner: _PathScanner) -> None:
        command = None
        while not scanner.done():
            nxt = scanner.command()
            if nxt is not None:
                command = nxt
            elif command is None:
                raise MalformedPath("path data must start with a command", scanner.pos)
            elif command in "Mm":
                command = "L" if command == "M" else "l"   # implicit lineto chain
            elif command in "Zz":
                raise MalformedPath("close command takes no arguments", scanner.pos)
            self._apply(command, scanner)

    def _apply(self, command: str, scanner: _PathScanner) -> None:
        rel = self.cur if command.islower() else np.zeros(2)
        op = command.upper()
        if op == "M":
            self.cur = rel + scanner.pair()
            self.start = self.cur.copy()
        elif op == "L":
            self._line_to(rel + scanner.pair())
        elif op == "H":
            self._line_to(np.array([scanner.number() + (rel[0] if command.islower() else 0.0),
                                    self.cur[1]]))
        elif op == "V":
            self._line_to(np.array([self.cur[0],
                                    scanner.number() + (rel[1] if command.islower() else 0.0)]))
        elif op == "C":
            c1, c2, end = rel + scanner.pair(), rel + scanner.pair(), rel + scanner.pair()
            self._cubic_to(c1, c2, end)
        elif op == "S":
            c1 = self._reflect(self.prev_cubic_ctrl)
            c2, end = rel + scanner.pair(), rel + scanner.pair()
            self._cubic_to(c1, c2, end)
        elif op == "Q":
            c, end = rel + scanner.pair(), rel + scanner.pair()
            self._quad_to(c, end)
        elif op == "T":
            c = self._reflect(self.prev_quad_ctrl)
            end = rel + scanner.pair()
            self._quad_to(c, end)
        elif op == "A":
            radii = scanner.pair()
            rot = scanner.number()
            large, sweep = scanner.flag(), scanner.flag()
            end = rel + scanner.pair()
            self._arc_to(radii, rot, large, sweep, end)
        elif op == "Z":
            if not np.array_equal(self.cur, self.start):
                self._line_to(self.start.copy())
            self.cur = self.start.copy()
        if op not in ("C", "S"):
            self.prev_cubic_ctrl = None
        if op not in ("Q", "T"):
            self.prev_quad_ctrl = None

    def _reflect(self, ctrl):
        if ctrl is None:
            return self.cur.copy()
        return 2.0 * self.cur - ctrl

    def _line_to(self, end):
        self._emit([self.cur, end])
        self.cur = end

    def _cubic_to(self, c1, c2, end):
        self._emit([self.cur, c1, c2, end])
        self.prev_cubic_ctrl = c2
        self.cur = end

    def _quad_to(self, c, end):
        self._emit([self.cur, c, end])
        self.prev_quad_ctrl = c
        self.cur = end

    def _arc_to(self, radii, rot_deg, large, sweep, end):
        start = self.cur
        if np.array_equal(start, end):
            return                                    # zero-length arc: nothing
        rx, ry = abs(radii[0]), abs(radii[1])
        if rx == 0.0 or ry == 0.0:
            warnings.warn("zero-radius arc treated as a straight line",
                          UnsupportedFeature, stacklevel=4)
            self._line_to(end)
            return
        phi = math.radians(rot_deg)
        cos_p, sin_p = math.cos(phi), math.sin(phi)
        rot = np.array([[cos_p, -sin_p], [sin_p, cos_p]])

        # endpoint parameterization -> center parameterization
        half = 0.5 * (start - end)
        p1 = rot.T @ half
        lam = (p1[0] / rx) ** 2 + (p1[1] / ry) ** 2
        if lam > 1.0:                                 # radii too small: scale up
            s = math.sqrt(lam)
            rx, ry = rx * s, ry * s
        num = (rx * ry) ** 2 - (rx * p1[1]) ** 2 - (ry * p1[0]) ** 2
        den = (rx * p1[1]) ** 2 + (ry * p1[0]) ** 2
        coef = math.sqrt(max(num, 0.0) / den)
        if large == sweep:
            coef = -coef
        center_local = coef * np.array([rx * p1[1] / ry, -ry * p1[0] / rx])
        center = rot @ center_local + 0.5 * (start + end)

        theta1 = math.atan2((p1[1] - center_local[1]) / ry, (p1[0] - center_local[0]) / rx)
        theta2 = math.atan2((-p1[1] - center_local[1]) / ry, (-p1[0] - center_local[0]) / rx)
        delta = theta2 - theta1
        if sweep and delta < 0.0:
            delta += 2.0 * math.pi
        elif not sweep and delta > 0.0:
            delta -= 2.0 * math.pi

        pieces = max(1, math.ceil(abs(delta) / (0.5 * math.pi) * (1.0 - 1e-12)))
        scale = np.array([rx, ry])

        def at(theta):
            return center + rot @ (scale * np.array([math.cos(theta), math.sin(theta)]))

        joints = [at(theta1 + delta * k / pieces) for k in range(pieces + 1)]
        joints[0], joints[-1] = start.copy(), end.copy()   # endpoints exact
        for k in range(pieces):
            ta = theta1 + delta * k / pieces
            tb = theta1 + delta * (k + 1) / pieces
            h = 0.5 * (tb - ta)
            mid = 0.5 * (ta + tb)
            w_mid = math.cos(h)
            apex = center + rot @ (scale * np.array([math.cos(mid), math.sin(mid)]) / w_mid)
            self._emit([joints[k], apex, joints[k + 1]], [1.0, w_mid, 1.0])
        self.cur = end


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


_TRANSFORM_CALL = re.compile(r"\s*([A-Za-z]+)\s*\(([^)]*)\)\s*,?")

_IDENTITY = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


def _compose(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    out = np.empty((2, 3))
    out[:, :2] = outer[:, :2] @ inner[:, :2]
    out[:, 2] = outer[:, :2] @ inner[:, 2] + outer[:, 2]
    return out


def parse_transform(text: str) -> np.ndarray:
    """2x3 affine matrix of a transform attribute (left-to-right application)."""
    mat = _IDENTITY
    pos = 0
    while pos < len(text) and text[pos:].strip():
        m = _TRANSFORM_CALL.match(text, pos)
        if m is None:
            raise MalformedPath("unparseable transform attribute", pos)
        pos = m.end()
        name = m.group(1)
        args = [float(a) for a in re.split(r"[\s,]+", m.group(2).strip()) if a]
        if name == "translate":
            tx = args[0]
            ty = args[1] if len(args) > 1 else 0.0
            step = np.array([[1.0, 0.0, tx], [0.0, 1.0, ty]])
        elif name == "scale":
            sx = args[0]
            sy = args[1] if len(args) > 1 else sx
            step = np.array([[sx, 0.0, 0.0], [0.0, sy, 0.0]])
        elif name == "rotate":
            a = math.radians(args[0])
            c, s = math.cos(a), math.sin(a)
            step = np.array([[c, -s, 0.0], [s, c, 0.0]])
            if len(args) == 3:
                cx, cy = args[1], args[2]
                pre = np.array([[1.0, 0.0, cx], [0.0, 1.0, cy]])
                post = np.array([[1.0, 0.0, -cx], [0.0, 1.0, -cy]])
                step = _compose(pre, _compose(step, post))
        elif name == "matrix":
            a, b, c, d, e, f = args
            step = np.array([[a, c, e], [b, d, f]])
        else:
            warnings.warn(f"transform function {name!r} is not supported and was ignored",
                          UnsupportedFeature, stacklevel=3)
            continue
        mat = _compose(mat, step)
    return mat


def _walk_paths(element, transform):
    t = element.get("transform")
    if t:
        transform = _compose(transform, parse_transform(t))
    if _local_name(element.tag) == "path":
        yield element, transform
    for child in element:
        yield from _walk_paths(child, transform)


def _document_root(document_text: str):
    try:
        return ET.fromstring(document_text)
    except ET.ParseError as exc:
        line_no, column = exc.position
        offset = sum(len(l) + 1 for l in document_text.splitlines()[:line_no - 1]) + column
        raise MalformedPath(f"not well-formed XML: {exc}", offset) from None


def parse_svg_paths(document_text: str, source_name: str = "") -> Shape2D:
    """All path outlines of an SVG document (or of bare path data) as curves.

    Curves appear in document/command order with sequential ids; coordinates
    stay in user units with element transforms applied.
    """
    curves: list = []
    text = document_text.strip()
    if text.startswith("<"):
        root = _document_root(document_text)
        for element, transform in _walk_paths(root, _IDENTITY):
            data = element.get("d")
            if data:
                _PathBuilder(transform, curves).run(_PathScanner(data))
    else:
        _PathBuilder(_IDENTITY, curves).run(_PathScanner(document_text))
    return shape_from_curves(curves, source_name)


def viewbox_grid(document_text: str, nx: int, ny: int) -> np.ndarray:
    """Cell-centered nx-by-ny sample grid over the document's viewBox.

    Falls back to the parsed shape's global bounding box when no viewBox is
    declared. Row-major: y varies slowest, x fastest.
    """
    if nx < 1 or ny < 1:
        raise ValueError("grid dimensions must be positive")
    box = None
    text = document_text.strip()
    if text.startswith("<"):
        root = _document_root(document_text)
        declared = root.get("viewBox") or root.get("viewbox")
        if declared:
            vx, vy, vw, vh = (float(v) for v in re.split(r"[\s,]+", declared.strip()))
            box = (vx, vy, vw, vh)
    if box is None:
        shape = parse_svg_paths(document_text)
        lo, hi = shape.global_aabb.min, shape.global_aabb.max
        box = (lo[0], lo[1], hi[0] - lo[0], hi[1] - lo[1])
    vx, vy, vw, vh = box
    xs = vx + (np.arange(nx) + 0.5) * (vw / nx)
    ys = vy + (np.arange(ny) + 0.5) * (vh / ny)
    gx, gy = np.meshgrid(xs, ys)               # row-major: y slowest
    return np.column_stack([gx.ravel(), gy.ravel()])


def dump_curves_csv(shape: Shape2D, fileobj) -> None:
    """One curve per row: id, degree, control point coordinates, weights."""
    writer = csv.writer(fileobj)
    writer.writerow(["id", "degree", "points...", "weights..."])
    for c in shape.curves:
        row = [c.id, c.degree]
        row.extend(repr(float(v)) for v in c.control_points.ravel())
        row.extend(repr(float(v)) for v in c.weights)
        writer.writerow(row)
