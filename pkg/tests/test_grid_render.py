"""Grid evaluation, CSV/binary export, and PNG rendering."""

import math
import struct
import zlib

import numpy as np
import pytest

from flwave import (
    BreatherChart,
    ConfigError,
    DeformationProfile,
    DtConfig,
    FieldGrid,
    GridSpec,
    PlaneWaveSeed,
    RogueChart,
    closed_form_rw1,
    critical_lambda,
    evaluate_grid,
    export_field,
    load_binary_field,
    render_heatmap,
    resolve_workers,
)
from flwave.grid_render import (
    BINARY_MAGIC,
    COLORMAP_TABLE,
    CSV_HEADER,
    MASK_COLOR,
)

SEED_B = PlaneWaveSeed(-1, -1, -1, -2, 1, 1)
SEED_R = PlaneWaveSeed(-0.5, -0.5, -1, -1, 1, 1)
LAM_CRIT = critical_lambda(-0.5, 1.0)
LIN = DeformationProfile.LINEAR


def tiny_grid():
    spec = GridSpec(0.0, 1.0, 10.0, 11.0, 2, 2)
    q1 = np.array([[1 + 2j, 3 - 4j], [-0.5j, 2 + 0j]])
    q2 = np.array([[0j, 1 + 1j], [2 - 2j, -3 + 0j]])
    return FieldGrid(spec=spec, q1=q1, q2=q2,
                     mask=np.zeros((2, 2), dtype=bool))


def rw1_grid(nx=51, ny=51, half=5.0):
    spec = GridSpec(-half, half, -half, half, nx, ny)
    xs = spec.xs()
    ys = spec.ys()
    q1 = np.array([[closed_form_rw1((x, y, 0.0)) for x in xs] for y in ys])
    return FieldGrid(spec=spec, q1=q1, q2=q1.copy(),
                     mask=np.zeros((ny, nx), dtype=bool))


def png_pixels(path):
    """Minimal decoder for the writer's fixed layout: 8-bit RGB, filter 0."""
    with open(path, "rb") as fh:
        blob = fh.read()
    assert blob[:8] == b"\x89PNG\r\n\x1a\n"
    off = 8
    width = height = None
    idat = b""
    while off < len(blob):
        (length,) = struct.unpack_from(">I", blob, off)
        tag = blob[off + 4:off + 8]
        payload = blob[off + 8:off + 8 + length]
        if tag == b"IHDR":
            width, height, depth, color = struct.unpack_from(">IIBB", payload)
            assert (depth, color) == (8, 2)
        elif tag == b"IDAT":
            idat += payload
        off += 12 + length
    raw = zlib.decompress(idat)
    stride = 1 + 3 * width
    assert len(raw) == stride * height
    rows = []
    for r in range(height):
        line = raw[r * stride:(r + 1) * stride]
        assert line[0] == 0
        rows.append([tuple(line[1 + 3 * i:4 + 3 * i]) for i in range(width)])
    return width, height, rows


# -- CSV export --------------------------------------------------------------


def test_csv_two_by_two_has_five_lines():
    grid = tiny_grid()
    export_field(grid, "/tmp/tiny.csv", format="csv")
    with open("/tmp/tiny.csv") as fh:
        lines = fh.read().splitlines()
    assert len(lines) == 5
    assert lines[0] == CSV_HEADER


def test_csv_row_order_y_outer_x_fastest():
    grid = tiny_grid()
    export_field(grid, "/tmp/tiny.csv", format="csv")
    with open("/tmp/tiny.csv") as fh:
        rows = [line.split(",") for line in fh.read().splitlines()[1:]]
    coords = [(float(r[0]), float(r[1])) for r in rows]
    assert coords == [(0.0, 10.0), (1.0, 10.0), (0.0, 11.0), (1.0, 11.0)]
    assert float(rows[1][2]) == 3.0
    assert float(rows[1][3]) == -4.0


def test_csv_abs_column_within_one_ulp():
    grid = rw1_grid(nx=11, ny=11)
    export_field(grid, "/tmp/rw.csv", format="csv")
    with open("/tmp/rw.csv") as fh:
        rows = [line.split(",") for line in fh.read().splitlines()[1:]]
    k = 0
    for j in range(11):
        for i in range(11):
            want = abs(grid.q1[j, i])
            got = float(rows[k][4])
            assert abs(got - want) <= math.ulp(want)
            k += 1


def test_unknown_export_format_rejected():
    with pytest.raises(ConfigError):
        export_field(tiny_grid(), "/tmp/x.dat", format="hdf5")


# -- binary export -----------------------------------------------------------


def test_binary_round_trip_is_bitwise():
    grid = rw1_grid(nx=7, ny=5)
    export_field(grid, "/tmp/rw.f64", format="f64bin")
    nx, ny, data = load_binary_field("/tmp/rw.f64")
    assert (nx, ny) == (7, 5)
    assert data.shape == (35, 8)
    flat1 = grid.q1.ravel()
    flat2 = grid.q2.ravel()
    assert np.array_equal(data[:, 2], flat1.real)
    assert np.array_equal(data[:, 3], flat1.imag)
    assert np.array_equal(data[:, 5], flat2.real)
    assert np.array_equal(data[:, 6], flat2.imag)


def test_binary_starts_with_magic():
    export_field(tiny_grid(), "/tmp/tiny.f64", format="f64bin")
    with open("/tmp/tiny.f64", "rb") as fh:
        head = fh.read(12)
    assert head[:4] == BINARY_MAGIC
    assert struct.unpack("<II", head[4:]) == (2, 2)


def test_binary_bad_magic_rejected():
    with open("/tmp/bad.f64", "wb") as fh:
        fh.write(b"NOPE" + b"\x00" * 32)
    with pytest.raises(ConfigError):
        load_binary_field("/tmp/bad.f64")


# -- PNG rendering -----------------------------------------------------------


def test_heatmap_constant_field_is_uniform_midscale():
    spec = GridSpec(-1, 1, -1, 1, 4, 3)
    q1 = np.full((3, 4), 2.0 + 0j)
    grid = FieldGrid(spec=spec, q1=q1, q2=q1.copy(),
                     mask=np.zeros((3, 4), dtype=bool))
    render_heatmap(grid, "/tmp/flat.png")
    width, height, rows = png_pixels("/tmp/flat.png")
    assert (width, height) == (4, 3)
    mid = COLORMAP_TABLE[128]
    assert all(px == mid for row in rows for px in row)


def test_heatmap_extremes_hit_colormap_ends():
    grid = rw1_grid(nx=21, ny=21)
    render_heatmap(grid, "/tmp/rw.png")
    _, _, rows = png_pixels("/tmp/rw.png")
    flat = [px for row in rows for px in row]
    assert COLORMAP_TABLE[255] in flat
    assert COLORMAP_TABLE[0] in flat


def test_heatmap_brightest_pixel_sits_on_the_crest():
    grid = rw1_grid(nx=51, ny=51, half=5.0)
    render_heatmap(grid, "/tmp/rw51.png")
    width, height, rows = png_pixels("/tmp/rw51.png")
    hits = [(r, i) for r in range(height) for i in range(width)
            if rows[r][i] == COLORMAP_TABLE[255]]
    assert len(hits) == 1
    r, i = hits[0]
    xs = grid.spec.xs()
    ys = grid.spec.ys()
    x = xs[i]
    y = ys[height - 1 - r]
    assert abs(x - 1.0) <= 0.1 + 1e-12
    assert abs(y + 1.0) <= 0.1 + 1e-12


def test_heatmap_masked_pixel_is_black():
    spec = GridSpec(0, 1, 0, 1, 3, 3)
    q1 = np.linspace(0, 8, 9).reshape(3, 3).astype(complex)
    mask = np.zeros((3, 3), dtype=bool)
    mask[0, 2] = True
    grid = FieldGrid(spec=spec, q1=q1, q2=q1.copy(), mask=mask)
    render_heatmap(grid, "/tmp/masked.png")
    _, _, rows = png_pixels("/tmp/masked.png")
    # grid row j=0 is y_min, which the writer puts at the bottom image row
    assert rows[2][2] == MASK_COLOR
    assert rows[0][0] != MASK_COLOR


def test_heatmap_explicit_value_range_pins_the_scale():
    spec = GridSpec(0, 1, 0, 1, 2, 2)
    q1 = np.array([[1.0, 1.0], [1.0, 1.0]]).astype(complex)
    grid = FieldGrid(spec=spec, q1=q1, q2=q1.copy(),
                     mask=np.zeros((2, 2), dtype=bool))
    render_heatmap(grid, "/tmp/pinned.png", value_range=(0.0, 2.0))
    _, _, rows = png_pixels("/tmp/pinned.png")
    assert all(px == COLORMAP_TABLE[128] for row in rows for px in row)


def test_heatmap_unknown_channel_rejected():
    with pytest.raises(ConfigError):
        render_heatmap(tiny_grid(), "/tmp/x.png", channel="phase")


# -- evaluate_grid -----------------------------------------------------------


def test_evaluate_grid_matches_pointwise_evaluation():
    cfg = DtConfig((RogueChart(LAM_CRIT),))
    spec = GridSpec(-2, 2, -2, 2, 9, 9)
    grid = evaluate_grid(SEED_R, cfg, LIN, spec)
    assert grid.singular_count == 0
    xs = spec.xs()
    ys = spec.ys()
    for j in (0, 4, 8):
        for i in (0, 4, 8):
            want = closed_form_rw1((xs[i], ys[j], 0.0))
            assert abs(grid.q1[j, i] - want) < 1e-8


def test_evaluate_grid_parallel_bitwise_equal():
    cfg = DtConfig((RogueChart(LAM_CRIT),))
    spec = GridSpec(-2, 2, -2, 2, 13, 13)
    serial = evaluate_grid(SEED_R, cfg, LIN, spec, workers=1)
    parallel = evaluate_grid(SEED_R, cfg, LIN, spec, workers=2)
    assert np.array_equal(serial.q1, parallel.q1)
    assert np.array_equal(serial.q2, parallel.q2)
    assert np.array_equal(serial.mask, parallel.mask)


def test_evaluate_grid_masks_singular_nodes_and_continues():
    # the cubic-profile wing of this chart crosses a band where the
    # determinant underflows: rows below y = -9.15 flag, rows above stay
    # finite, and the evaluation never aborts
    chart = BreatherChart(0.5 + 0.5j, 1, 1, 1, 1 + 1j, 1 + 1j)
    cfg = DtConfig((chart,))
    spec = GridSpec(-14.4, -13.6, -9.4, -8.9, 5, 6, 2.0)
    grid = evaluate_grid(SEED_B, cfg, DeformationProfile.CUBIC, spec)
    assert grid.singular_count == 15
    assert grid.mask[:3].all()
    assert not grid.mask[3:].any()
    assert np.isfinite(grid.q1[3:]).all()


def test_masked_nodes_export_as_nan():
    spec = GridSpec(0, 1, 0, 1, 2, 2)
    q1 = np.ones((2, 2), dtype=complex)
    mask = np.zeros((2, 2), dtype=bool)
    mask[1, 0] = True
    grid = FieldGrid(spec=spec, q1=q1, q2=q1.copy(), mask=mask)
    export_field(grid, "/tmp/nan.f64", format="f64bin")
    _, _, data = load_binary_field("/tmp/nan.f64")
    assert np.isnan(data[2, 2:]).all()
    assert not np.isnan(data[[0, 1, 3]][:, 2:]).any()


# -- worker resolution -------------------------------------------------------


def test_resolve_workers_explicit_request(monkeypatch):
    monkeypatch.delenv("FLWAVE_THREADS", raising=False)
    assert resolve_workers(3) == 3
    assert resolve_workers(0) == 1


def test_resolve_workers_env_cap(monkeypatch):
    monkeypatch.setenv("FLWAVE_THREADS", "2")
    assert resolve_workers(8) == 2
    assert resolve_workers(1) == 1
    assert resolve_workers(None) <= 2


def test_resolve_workers_bad_env_rejected(monkeypatch):
    monkeypatch.setenv("FLWAVE_THREADS", "many")
    with pytest.raises(ConfigError):
        resolve_workers(4)
