"""Escape-time pictures of the Mandelbrot set with PCF markers and line traces."""
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError

INTERIOR = (0, 0, 0)
MARKER = (255, 221, 0)
TRACE = (230, 40, 40)


@dataclass(frozen=True)
class RenderConfig:
    region: tuple = (-2.2, 0.8, -1.5, 1.5)     # re_min, re_max, im_min, im_max
    width: int = 600
    height: int = 0                            # 0: keep the region's aspect ratio
    max_iter: int = 200
    marker_radius: int = 2
    markers: tuple = field(default=())          # complex points
    traces: tuple = field(default=())           # ((a, b, r) real line a x + b y = r, ...)

    def size(self):
        x0, x1, y0, y1 = self.region
        if not (x1 > x0 and y1 > y0):
            raise ContractError("region must be nonempty")
        if self.width < 1 or self.height < 0:
            raise ContractError("resolution must be positive")
        h = self.height or max(1, round(self.width * (y1 - y0) / (x1 - x0)))
        return self.width, h


def pixel_to_c(cfg, col, row):
    x0, x1, y0, y1 = cfg.region
    w, h = cfg.size()
    return complex(x0 + (col + 0.5) * (x1 - x0) / w, y1 - (row + 0.5) * (y1 - y0) / h)


def c_to_pixel(cfg, c):
    x0, x1, y0, y1 = cfg.region
    w, h = cfg.size()
    return (int(np.floor((c.real - x0) / (x1 - x0) * w)),
            int(np.floor((y1 - c.imag) / (y1 - y0) * h)))


def escape_counts(cfg):
    """Iteration at which |z| > 2, or max_iter for points that never escape."""
    w, h = cfg.size()
    x0, x1, y0, y1 = cfg.region
    re = x0 + (np.arange(w) + 0.5) * (x1 - x0) / w
    im = y1 - (np.arange(h) + 0.5) * (y1 - y0) / h
    c = re[None, :] + 1j * im[:, None]
    z = np.zeros_like(c)
    counts = np.full(c.shape, cfg.max_iter, dtype=np.int32)
    alive = np.ones(c.shape, dtype=bool)
    for k in range(cfg.max_iter):
        z[alive] = z[alive] ** 2 + c[alive]
        out = alive & (np.abs(z) > 2)
        counts[out] = k
        alive &= ~out
        if not alive.any():
            break
    return counts


def colorize(counts, max_iter):
    img = np.zeros(counts.shape + (3,), dtype=np.uint8)
    inside = counts >= max_iter
    t = np.sqrt(np.clip(counts, 0, max_iter) / max_iter)
    img[..., 0] = (40 + 80 * t).astype(np.uint8)
    img[..., 1] = (60 + 150 * t).astype(np.uint8)
    img[..., 2] = (120 + 135 * t).astype(np.uint8)
    img[inside] = INTERIOR
    return img


def _draw_markers(img, cfg):
    h, w = img.shape[:2]
    r = cfg.marker_radius
    for c in cfg.markers:
        px, py = c_to_pixel(cfg, complex(c))
        if -r <= px < w + r and -r <= py < h + r:
            ys, xs = np.ogrid[-r:r + 1, -r:r + 1]
            disk = xs * xs + ys * ys <= r * r
            for dy, dx in zip(*np.nonzero(disk)):
                yy, xx = py + dy - r, px + dx - r
                if 0 <= yy < h and 0 <= xx < w:
                    img[yy, xx] = MARKER


def _draw_traces(img, cfg):
    h, w = img.shape[:2]
    x0, x1, y0, y1 = cfg.region
    for a, b, r in cfg.traces:
        a, b, r = float(a), float(b), float(r)
        if abs(b) >= abs(a):
            for col in range(w):
                x = x0 + (col + 0.5) * (x1 - x0) / w
                row = int(np.floor((y1 - (r - a * x) / b) / (y1 - y0) * h))
                if 0 <= row < h:
                    img[row, col] = TRACE
        else:
            for row in range(h):
                y = y1 - (row + 0.5) * (y1 - y0) / h
                col = int(np.floor(((r - b * y) / a - x0) / (x1 - x0) * w))
                if 0 <= col < w:
                    img[row, col] = TRACE


def render_mandelbrot(cfg):
    """RGB array (height, width, 3)."""
    img = colorize(escape_counts(cfg), cfg.max_iter)
    _draw_traces(img, cfg)
    _draw_markers(img, cfg)
    return img


def ppm_bytes(img):
    h, w = img.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def write_ppm(path, img):
    with open(path, "wb") as fh:
        fh.write(ppm_bytes(img))


def read_ppm(data):
    """(width, height, array) from P6 bytes; used by tests and scripts."""
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a P6 image")
    w, h = map(int, parts[1].split())
    arr = np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)
    return w, h, arr


def svg_text(cfg):
    """Vector overlay: region frame, line traces and PCF markers in complex coordinates."""
    x0, x1, y0, y1 = cfg.region
    w, h = cfg.size()
    sx, sy = w / (x1 - x0), h / (y1 - y0)

    def tx(x):
        return f"{(x - x0) * sx:.3f}"

    def ty(y):
        return f"{(y1 - y) * sy:.3f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
           f'viewBox="0 0 {w} {h}">',
           f'<rect width="{w}" height="{h}" fill="white" stroke="black"/>']
    for a, b, r in cfg.traces:
        a, b, r = float(a), float(b), float(r)
        if abs(b) >= abs(a):
            pts = [(x0, (r - a * x0) / b), (x1, (r - a * x1) / b)]
        else:
            pts = [((r - b * y0) / a, y0), ((r - b * y1) / a, y1)]
        (ax, ay), (bx, by) = pts
        out.append(f'<line x1="{tx(ax)}" y1="{ty(ay)}" x2="{tx(bx)}" y2="{ty(by)}" '
                   'stroke="rgb(230,40,40)" stroke-width="1"/>')
    for c in cfg.markers:
        c = complex(c)
        out.append(f'<circle cx="{tx(c.real)}" cy="{ty(c.imag)}" r="{cfg.marker_radius}" '
                   'fill="rgb(255,221,0)" stroke="black" stroke-width="0.3"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
