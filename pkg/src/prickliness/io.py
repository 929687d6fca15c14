"""Terrain file formats: OFF (2.5D), whitespace x/y lines (1.5D), ESRI ASCII grids."""
from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import List, Tuple, Union

from .geometry import format_rat
from .terrain import Terrain1D, Terrain2D


class TerrainFormatError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


def _number(tok: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise TerrainFormatError(f"not a number: {tok!r}", line, col) from None


def _tokens(text: str):
    """Non-empty, non-comment lines as (line number, [(col, token), ...])."""
    for ln, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = []
        col = 0
        for part in body.split():
            col = body.index(part, col)
            toks.append((col + 1, part))
            col += len(part)
        if toks:
            yield ln, toks


# ---------------------------------------------------------------------------
# OFF


def parse_off(text: str) -> Terrain2D:
    lines = list(_tokens(text))
    if not lines or lines[0][1][0][1] != "OFF":
        ln = lines[0][0] if lines else 1
        raise TerrainFormatError("missing OFF header", ln, 1)
    rest = lines[1:]
    hdr = lines[0][1][1:]
    if not hdr:
        if not rest:
            raise TerrainFormatError("missing counts line", lines[0][0], 1)
        ln, hdr = rest[0]
        rest = rest[1:]
    else:
        ln = lines[0][0]
    if len(hdr) < 2:
        raise TerrainFormatError("counts line needs vertex and face counts", ln, 1)
    counts = []
    for col, tok in hdr[:3]:
        try:
            counts.append(int(tok))
        except ValueError:
            raise TerrainFormatError(f"bad count {tok!r}", ln, col) from None
    nv, nf = counts[0], counts[1]
    if len(rest) < nv + nf:
        raise TerrainFormatError(f"expected {nv} vertices and {nf} faces, file ends early",
                                 rest[-1][0] if rest else ln, 1)
    V = []
    for ln, toks in rest[:nv]:
        if len(toks) != 3:
            raise TerrainFormatError("vertex line needs 3 coordinates", ln, toks[0][0])
        V.append(tuple(_number(t, ln, c) for c, t in toks))
    F = []
    for ln, toks in rest[nv:nv + nf]:
        vals = []
        for c, t in toks:
            try:
                vals.append(int(t))
            except ValueError:
                raise TerrainFormatError(f"bad index {t!r}", ln, c) from None
        if vals[0] != 3 or len(vals) != 4:
            raise TerrainFormatError("only triangular faces are supported", ln, toks[0][0])
        F.append(tuple(vals[1:]))
    if len(rest) > nv + nf:
        ln = rest[nv + nf][0]
        raise TerrainFormatError("unexpected trailing data", ln, 1)
    return Terrain2D(V, F)


def serialize_off(T: Terrain2D) -> str:
    out = ["OFF", f"{T.n} {len(T.triangles)} 0"]
    out += [" ".join(format_rat(c) for c in v) for v in T.vertices]
    out += [f"3 {a} {b} {c}" for a, b, c in T.triangles]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# 1.5D


def parse_1d(text: str) -> Terrain1D:
    V = []
    for ln, toks in _tokens(text):
        if len(toks) != 2:
            raise TerrainFormatError("expected 'x y'", ln, toks[0][0])
        V.append(tuple(_number(t, ln, c) for c, t in toks))
    return Terrain1D(V)


def serialize_1d(T: Terrain1D) -> str:
    return "".join(f"{format_rat(x)} {format_rat(y)}\n" for x, y in T.vertices)


# ---------------------------------------------------------------------------
# ESRI ASCII grid

_ESRI_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "xllcenter", "yllcenter",
              "cellsize", "nodata_value")


def parse_esri(text: str, diagonal: str = "ll-ur") -> Terrain2D:
    """ESRI ASCII grid to a grid terrain in cell units; NODATA cells are rejected."""
    from .generators import gen_grid

    header = {}
    rows: List[Tuple[int, List[Tuple[int, str]]]] = []
    for ln, toks in _tokens(text):
        key = toks[0][1].lower()
        if not rows and key in _ESRI_KEYS:
            if len(toks) != 2:
                raise TerrainFormatError(f"header {key} needs one value", ln, toks[0][0])
            header[key] = (ln, toks[1])
            continue
        rows.append((ln, toks))
    for req in ("ncols", "nrows"):
        if req not in header:
            raise TerrainFormatError(f"missing header {req}", 1, 1)
    dims = {}
    for req in ("ncols", "nrows"):
        ln, (c, t) = header[req]
        try:
            dims[req] = int(t)
        except ValueError:
            raise TerrainFormatError(f"{req} must be an integer", ln, c) from None
    nodata = None
    if "nodata_value" in header:
        ln, (c, t) = header["nodata_value"]
        nodata = _number(t, ln, c)
    if len(rows) != dims["nrows"]:
        ln = rows[-1][0] if rows else 1
        raise TerrainFormatError(f"expected {dims['nrows']} rows, found {len(rows)}", ln, 1)
    grid = []
    for ln, toks in rows:
        if len(toks) != dims["ncols"]:
            raise TerrainFormatError(f"expected {dims['ncols']} values, found {len(toks)}",
                                     ln, toks[-1][0])
        vals = []
        for c, t in toks:
            x = _number(t, ln, c)
            if nodata is not None and x == nodata:
                raise TerrainFormatError("NODATA cell present", ln, c)
            vals.append(x)
        grid.append(vals)
    grid.reverse()  # the first data row is the northernmost
    return gen_grid(grid, diagonal)


def serialize_esri(heights) -> str:
    nrows, ncols = len(heights), len(heights[0])
    out = [f"ncols {ncols}", f"nrows {nrows}", "xllcorner 0", "yllcorner 0", "cellsize 1"]
    for row in reversed(heights):
        out.append(" ".join(format_rat(Fraction(h)) for h in row))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------


def load_terrain(path: Union[str, Path]):
    p = Path(path)
    text = p.read_text()
    suffix = p.suffix.lower()
    if suffix == ".off":
        return parse_off(text)
    if suffix in (".asc", ".grd"):
        return parse_esri(text)
    if suffix in (".txt", ".xy", ".1d"):
        return parse_1d(text)
    head = text.lstrip()[:3]
    return parse_off(text) if head == "OFF" else parse_1d(text)


def serialize(T) -> str:
    return serialize_off(T) if isinstance(T, Terrain2D) else serialize_1d(T)


def save_terrain(T, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize(T))
