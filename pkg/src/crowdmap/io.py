"""File formats: DMAP rasters, head-list CSV, scene JSONL, PGM images.

DMAP v1 is a tiny binary raster container::

    bytes 0-3   magic "DMAP"
    bytes 4-5   u16 LE version (1)
    byte  6     u8 dtype (0 = 32-bit float)
    byte  7     u8 reserved (0)
    bytes 8-11  u32 LE height
    bytes 12-15 u32 LE width
    then        height*width float32 LE, row-major

Loading returns the float32 payload exactly as stored, so save(load(x))
reproduces the file byte for byte.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .dataset import SceneMeta, format_time_of_day, parse_time_of_day
from .density import HeadList
from .errors import FormatError, InvalidArgumentError

DMAP_MAGIC = b"DMAP"
DMAP_VERSION = 1
DMAP_HEADER = struct.Struct("<4sHBBII")


def save_dmap(path, values) -> None:
    arr = np.asarray(values)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidArgumentError(f"expected a nonempty 2-D map, got shape {arr.shape}")
    height, width = arr.shape
    payload = np.ascontiguousarray(arr, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(DMAP_HEADER.pack(DMAP_MAGIC, DMAP_VERSION, 0, 0, height, width))
        fh.write(payload.tobytes())


def load_dmap(path) -> np.ndarray:
    """Read a DMAP file; returns the float32 raster."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < DMAP_HEADER.size:
        raise FormatError(f"truncated header: got {len(data)} bytes, need 16",
                          offset=len(data))
    magic, version, dtype, _reserved, height, width = DMAP_HEADER.unpack_from(data)
    if magic != DMAP_MAGIC:
        raise FormatError(f"bad magic {magic!r}", offset=0)
    if version != DMAP_VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    if dtype != 0:
        raise FormatError(f"unsupported dtype code {dtype}", offset=6)
    if height < 1 or width < 1:
        raise FormatError(f"bad shape {height}x{width}", offset=8)
    expected = height * width * 4
    got = len(data) - DMAP_HEADER.size
    if got != expected:
        raise FormatError(
            f"payload is {got} bytes, shape {height}x{width} needs {expected}",
            offset=DMAP_HEADER.size + min(got, expected))
    flat = np.frombuffer(data, dtype="<f4", offset=DMAP_HEADER.size)
    return flat.reshape(height, width).copy()


def save_heads_csv(path, heads: HeadList) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("x,y\n")
        for x, y in heads.points:
            fh.write(f"{x},{y}\n")


def load_heads_csv(path, height: int, width: int) -> HeadList:
    """Read an `x,y` CSV into a HeadList bound to the given raster shape."""
    points = []
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline()
        if header.strip() != "x,y":
            raise FormatError(f"expected header 'x,y', got {header.strip()!r}", line=1)
        for lineno, row in enumerate(fh, start=2):
            row = row.strip()
            if not row:
                continue
            parts = row.split(",")
            if len(parts) != 2:
                raise FormatError(f"expected 'x,y', got {row!r}", line=lineno)
            try:
                points.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise FormatError(f"non-integer coordinates {row!r}",
                                  line=lineno) from None
    try:
        return HeadList(points=np.asarray(points, dtype=np.int64).reshape(-1, 2),
                        height=height, width=width)
    except InvalidArgumentError as exc:
        raise FormatError(f"head list invalid for {height}x{width} raster: {exc}") from exc


def save_scenes_jsonl(path, metas) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for m in metas:
            fh.write(json.dumps({
                "id": m.id,
                "level": m.level,
                "time": format_time_of_day(m.time_minutes),
                "weather": m.weather,
                "count": m.count,
                "ratio": m.ratio,
            }) + "\n")


def load_scenes_jsonl(path) -> list[SceneMeta]:
    metas = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, row in enumerate(fh, start=1):
            row = row.strip()
            if not row:
                continue
            try:
                obj = json.loads(row)
            except json.JSONDecodeError as exc:
                raise FormatError(f"bad JSON: {exc.msg}", line=lineno) from exc
            try:
                metas.append(SceneMeta(
                    id=str(obj["id"]),
                    level=int(obj["level"]),
                    time_minutes=parse_time_of_day(obj["time"]),
                    weather=int(obj["weather"]),
                    count=int(obj["count"]),
                    ratio=float(obj["ratio"]),
                ))
            except KeyError as exc:
                raise FormatError(f"missing field {exc.args[0]!r}", line=lineno) from exc
            except (TypeError, ValueError, InvalidArgumentError) as exc:
                raise FormatError(f"bad scene record: {exc}", line=lineno) from exc
    return metas


def save_trace_jsonl(path, trace) -> None:
    """Selection trace as JSON lines {"j", "x", "y", "p"}."""
    with open(path, "w", encoding="ascii") as fh:
        for j, ((x, y), p) in enumerate(trace):
            fh.write(json.dumps({"j": j, "x": int(x), "y": int(y), "p": float(p)}) + "\n")


def _pgm_tokens(data: bytes):
    """Yield header tokens, skipping whitespace and '#' comments."""
    pos = 0
    while pos < len(data):
        ch = data[pos:pos + 1]
        if ch.isspace():
            pos += 1
            continue
        if ch == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
            continue
        end = pos
        while end < len(data) and not data[end:end + 1].isspace():
            end += 1
        yield pos, data[pos:end]
        pos = end


def load_pgm(path) -> np.ndarray:
    """Read an 8- or 16-bit PGM (binary P5 or ASCII P2) as float32."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = _pgm_tokens(data)
    try:
        magic_pos, magic = next(tokens)
    except StopIteration:
        raise FormatError("empty file", offset=0) from None
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"bad magic {magic!r}, expected P2 or P5", offset=magic_pos)

    fields = []
    last = magic_pos + len(magic)
    for pos, tok in tokens:
        try:
            fields.append(int(tok))
        except ValueError:
            raise FormatError(f"bad header token {tok!r}", offset=pos) from None
        last = pos + len(tok)
        if len(fields) == 3:
            break
    if len(fields) < 3:
        raise FormatError("truncated header", offset=len(data))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError(f"bad shape {height}x{width}", offset=last)
    if not (0 < maxval < 65536):
        raise FormatError(f"bad maxval {maxval}", offset=last)

    if magic == b"P2":
        values = []
        for pos, tok in tokens:
            try:
                values.append(int(tok))
            except ValueError:
                raise FormatError(f"bad sample {tok!r}", offset=pos) from None
        if len(values) != width * height:
            raise FormatError(
                f"expected {width * height} samples, got {len(values)}",
                offset=len(data))
        arr = np.asarray(values, dtype=np.float32)
    else:
        start = last + 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2" if maxval > 255 else "u1")
        need = width * height * dtype.itemsize
        raster = data[start:start + need]
        if len(raster) != need:
            raise FormatError(f"raster is {len(raster)} bytes, need {need}",
                              offset=start + len(raster))
        arr = np.frombuffer(raster, dtype=dtype).astype(np.float32)
    return arr.reshape(height, width)
