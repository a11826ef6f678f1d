import numpy as np
import pytest

from pcfgeom.errors import ContractError
from pcfgeom.render import (INTERIOR, MARKER, RenderConfig, c_to_pixel, escape_counts, ppm_bytes,
                            read_ppm, render_mandelbrot, svg_text)


def _cfg(**kw):
    base = dict(region=(-2.2, 2.2, -1.5, 1.5), width=88, height=60, max_iter=100)
    base.update(kw)
    return RenderConfig(**base)


def test_origin_interior_and_two_escapes():
    cfg = _cfg()
    counts = escape_counts(cfg)
    col, row = c_to_pixel(cfg, 0j)
    assert counts[row, col] == cfg.max_iter
    img = render_mandelbrot(cfg)
    assert tuple(img[row, col]) == INTERIOR
    col, row = c_to_pixel(cfg, 2.0 + 0j)
    assert counts[row, col] <= 2
    assert tuple(img[row, col]) != INTERIOR


def test_dimensions_and_header():
    cfg = _cfg(width=37, height=0, region=(-2.0, 1.0, -1.0, 1.0))
    img = render_mandelbrot(cfg)
    data = ppm_bytes(img)
    assert data.startswith(b"P6\n37 25\n255\n")
    w, h, arr = read_ppm(data)
    assert (w, h) == (37, 25)
    assert len(data) == len(b"P6\n37 25\n255\n") + 37 * 25 * 3
    assert np.array_equal(arr, img)


def test_markers_drawn():
    cfg = _cfg(markers=(complex(-1, 0), complex(0, 1)), marker_radius=1)
    img = render_mandelbrot(cfg)
    for c in cfg.markers:
        col, row = c_to_pixel(cfg, c)
        assert tuple(img[row, col]) == MARKER


def test_bad_region():
    with pytest.raises(ContractError):
        _cfg(region=(1, 0, 0, 1)).size()
    with pytest.raises(ContractError):
        _cfg(width=0).size()


def test_svg_overlay():
    cfg = _cfg(markers=(0j,), traces=((1, 0, 0), (0, 1, 0)))
    text = svg_text(cfg)
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert text.count("<line") == 2 and text.count("<circle") == 1


def test_render_deterministic():
    cfg = _cfg(markers=(0j,))
    assert ppm_bytes(render_mandelbrot(cfg)) == ppm_bytes(render_mandelbrot(cfg))
