import json
import struct

import numpy as np
import pytest

from crowdmap import (
    FormatError,
    HeadList,
    SceneMeta,
    load_dmap,
    load_heads_csv,
    load_pgm,
    load_scenes_jsonl,
    save_dmap,
    save_heads_csv,
    save_scenes_jsonl,
    save_trace_jsonl,
)


def test_dmap_round_trip_bitwise(tmp_path):
    rng = np.random.default_rng(51)
    for i in range(10):
        h = int(rng.integers(1, 40))
        w = int(rng.integers(1, 40))
        values = rng.normal(size=(h, w)).astype(np.float32)
        path = tmp_path / f"m{i}.dmap"
        save_dmap(path, values)
        loaded = load_dmap(path)
        assert loaded.dtype == np.float32
        assert np.array_equal(
            loaded.view(np.uint32), values.view(np.uint32))
        # saving the loaded map reproduces the file byte for byte
        again = tmp_path / f"m{i}b.dmap"
        save_dmap(again, loaded)
        assert again.read_bytes() == path.read_bytes()


def test_dmap_round_trip_large_shapes(tmp_path):
    rng = np.random.default_rng(52)
    for h, w in [(1, 2048), (2048, 1), (2048, 2048)]:
        values = rng.normal(size=(h, w)).astype(np.float32)
        path = tmp_path / "big.dmap"
        save_dmap(path, values)
        assert np.array_equal(load_dmap(path), values)


def test_dmap_header_layout(tmp_path):
    path = tmp_path / "m.dmap"
    save_dmap(path, np.zeros((2, 3), dtype=np.float32))
    raw = path.read_bytes()
    assert raw[:4] == b"DMAP"
    version, dtype, reserved, h, w = struct.unpack_from("<HBBII", raw, 4)
    assert (version, dtype, reserved, h, w) == (1, 0, 0, 2, 3)
    assert len(raw) == 16 + 2 * 3 * 4


def test_dmap_truncated_header(tmp_path):
    path = tmp_path / "short.dmap"
    path.write_bytes(b"DMAP" + b"\0" * 8)
    with pytest.raises(FormatError, match="truncated header") as err:
        load_dmap(path)
    assert err.value.offset == 12


def test_dmap_bad_magic(tmp_path):
    path = tmp_path / "bad.dmap"
    path.write_bytes(b"PAMD" + b"\0" * 20)
    with pytest.raises(FormatError, match="magic") as err:
        load_dmap(path)
    assert err.value.offset == 0


def test_dmap_bad_version_and_dtype(tmp_path):
    header = bytearray(struct.pack("<4sHBBII", b"DMAP", 2, 0, 0, 1, 1))
    path = tmp_path / "v2.dmap"
    path.write_bytes(bytes(header) + b"\0" * 4)
    with pytest.raises(FormatError, match="version") as err:
        load_dmap(path)
    assert err.value.offset == 4

    header = struct.pack("<4sHBBII", b"DMAP", 1, 7, 0, 1, 1)
    path.write_bytes(header + b"\0" * 4)
    with pytest.raises(FormatError, match="dtype") as err:
        load_dmap(path)
    assert err.value.offset == 6


def test_dmap_payload_mismatch(tmp_path):
    header = struct.pack("<4sHBBII", b"DMAP", 1, 0, 0, 4, 4)
    path = tmp_path / "trunc.dmap"
    path.write_bytes(header + b"\0" * 10)  # needs 64
    with pytest.raises(FormatError, match="payload"):
        load_dmap(path)
    path.write_bytes(struct.pack("<4sHBBII", b"DMAP", 1, 0, 0, 0, 4) + b"")
    with pytest.raises(FormatError, match="shape"):
        load_dmap(path)


def test_heads_csv_round_trip(tmp_path):
    heads = HeadList(points=[(15, 20), (0, 0), (99, 5)], height=50, width=100)
    path = tmp_path / "h.csv"
    save_heads_csv(path, heads)
    assert path.read_text().splitlines()[0] == "x,y"
    loaded = load_heads_csv(path, 50, 100)
    assert np.array_equal(loaded.points, heads.points)


def test_heads_csv_single_row(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("x,y\n15,20\n")
    loaded = load_heads_csv(path, 64, 64)
    assert loaded.points.tolist() == [[15, 20]]


def test_heads_csv_errors(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("col,row\n1,2\n")
    with pytest.raises(FormatError, match="header"):
        load_heads_csv(path, 8, 8)
    path.write_text("x,y\n1,2,3\n")
    with pytest.raises(FormatError) as err:
        load_heads_csv(path, 8, 8)
    assert err.value.line == 2
    path.write_text("x,y\nab,2\n")
    with pytest.raises(FormatError):
        load_heads_csv(path, 8, 8)
    path.write_text("x,y\n9,2\n")
    with pytest.raises(FormatError, match="invalid"):
        load_heads_csv(path, 8, 8)


def test_scenes_jsonl_round_trip(tmp_path):
    metas = [
        SceneMeta(id="a", level=4, time_minutes=750, weather=1, count=320, ratio=0.7),
        SceneMeta(id="b", level=0, time_minutes=0, weather=6, count=0, ratio=0.0),
    ]
    path = tmp_path / "scenes.jsonl"
    save_scenes_jsonl(path, metas)
    assert load_scenes_jsonl(path) == metas
    first = json.loads(path.read_text().splitlines()[0])
    assert first["time"] == "12:30"


def test_scenes_jsonl_errors(tmp_path):
    path = tmp_path / "scenes.jsonl"
    path.write_text('{"id": "a"}\n')
    with pytest.raises(FormatError, match="missing field"):
        load_scenes_jsonl(path)
    path.write_text("not json\n")
    with pytest.raises(FormatError) as err:
        load_scenes_jsonl(path)
    assert err.value.line == 1
    path.write_text('{"id":"a","level":9,"time":"10:00","weather":0,"count":1,"ratio":0.5}\n')
    with pytest.raises(FormatError, match="bad scene record"):
        load_scenes_jsonl(path)


def test_trace_jsonl(tmp_path):
    path = tmp_path / "trace.jsonl"
    save_trace_jsonl(path, [((4, 5), 0.75), ((0, 1), 0.5)])
    rows = [json.loads(line) for line in path.read_text().splitlines()]
    assert rows == [{"j": 0, "x": 4, "y": 5, "p": 0.75},
                    {"j": 1, "x": 0, "y": 1, "p": 0.5}]


def test_pgm_binary_8bit(tmp_path):
    path = tmp_path / "img.pgm"
    path.write_bytes(b"P5\n# comment\n3 2\n255\n" + bytes([0, 10, 20, 30, 40, 255]))
    arr = load_pgm(path)
    assert arr.dtype == np.float32
    assert arr.tolist() == [[0, 10, 20], [30, 40, 255]]


def test_pgm_binary_16bit_big_endian(tmp_path):
    path = tmp_path / "img.pgm"
    samples = struct.pack(">4H", 0, 256, 1000, 65535)
    path.write_bytes(b"P5 2 2 65535\n" + samples)
    arr = load_pgm(path)
    assert arr.tolist() == [[0, 256], [1000, 65535]]


def test_pgm_ascii(tmp_path):
    path = tmp_path / "img.pgm"
    path.write_text("P2\n2 2\n255\n1 2\n3 4\n")
    assert load_pgm(path).tolist() == [[1, 2], [3, 4]]


def test_pgm_errors(tmp_path):
    path = tmp_path / "img.pgm"
    path.write_bytes(b"P6\n1 1\n255\n\0")
    with pytest.raises(FormatError, match="magic"):
        load_pgm(path)
    path.write_bytes(b"P5\n2 2\n255\n\0\0")
    with pytest.raises(FormatError, match="raster"):
        load_pgm(path)
    path.write_bytes(b"P5\n2\n")
    with pytest.raises(FormatError, match="truncated"):
        load_pgm(path)
