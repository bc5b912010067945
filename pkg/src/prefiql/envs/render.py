"""Deterministic 64x64 RGB rasterization of environment states.

Integer-only drawing primitives so identical states produce byte-identical
images on every platform. Images are the observation representation handed
to the vision-language labeling path and re-rendered from states on demand.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .core import CHAIN_N_STATES, CHAIN_TERMINAL_STATE, EnvId, EnvSpec, EnvState, _check_state

IMG_SIZE = 64

WHITE = (255, 255, 255)
RED = (220, 40, 40)
GREEN = (40, 180, 60)
BLUE = (50, 80, 220)
BLACK = (30, 30, 30)
GRAY = (150, 150, 150)


def _put(img: np.ndarray, x: int, y: int, color) -> None:
    if 0 <= x < IMG_SIZE and 0 <= y < IMG_SIZE:
        img[y, x] = color


def _disc(img: np.ndarray, cx: int, cy: int, radius: int, color) -> None:
    r2 = radius * radius
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dx * dx + dy * dy <= r2:
                _put(img, cx + dx, cy + dy, color)


def _rect(img: np.ndarray, x0: int, y0: int, w: int, h: int, color) -> None:
    for y in range(y0, y0 + h):
        for x in range(x0, x0 + w):
            _put(img, x, y, color)


def _line(img: np.ndarray, x0: int, y0: int, x1: int, y1: int, color) -> None:
    """Bresenham line, integer endpoints."""
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        _put(img, x, y, color)
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def _pm_pixel(coord: float) -> int:
    # [-1, 1] -> [0, 63]
    return _round_half_up((coord + 1.0) * 0.5 * (IMG_SIZE - 1))


def render(spec: EnvSpec, state: EnvState) -> np.ndarray:
    """Rasterize a state to a (64, 64, 3) uint8 RGB image."""
    v = _check_state(spec, state)
    img = np.empty((IMG_SIZE, IMG_SIZE, 3), dtype=np.uint8)
    img[:] = WHITE

    if spec.env_id is EnvId.POINT_MASS:
        gx, gy = _pm_pixel(v[2]), IMG_SIZE - 1 - _pm_pixel(v[3])
        ax, ay = _pm_pixel(v[0]), IMG_SIZE - 1 - _pm_pixel(v[1])
        _disc(img, gx, gy, 4, GREEN)
        _disc(img, ax, ay, 3, RED)
    elif spec.env_id is EnvId.CARTPOLE:
        x, theta = v[0], v[2]
        ground_y = 52
        _rect(img, 0, ground_y, IMG_SIZE, 2, GRAY)
        cx = 32 + _round_half_up(x / 2.4 * 24.0)
        cx = max(0, min(IMG_SIZE - 1, cx))
        _rect(img, cx - 7, ground_y - 8, 14, 8, BLACK)
        pole_len = 26
        px = cx + _round_half_up(pole_len * math.sin(theta))
        py = ground_y - 8 - _round_half_up(pole_len * math.cos(theta))
        _line(img, cx, ground_y - 8, px, py, BLUE)
        _line(img, cx + 1, ground_y - 8, px + 1, py, BLUE)
    else:
        cell = int(v[0])
        y0 = 26
        for i in range(CHAIN_N_STATES):
            x0 = 2 + i * 12
            border = GREEN if i == CHAIN_TERMINAL_STATE else BLACK
            _rect(img, x0, y0, 12, 1, border)
            _rect(img, x0, y0 + 11, 12, 1, border)
            _rect(img, x0, y0, 1, 12, border)
            _rect(img, x0 + 11, y0, 1, 12, border)
        _rect(img, 2 + cell * 12 + 2, y0 + 2, 8, 8, BLUE)

    return img


def to_ppm_bytes(img: np.ndarray) -> bytes:
    """Encode an RGB uint8 image as binary PPM (P6, maxval 255)."""
    h, w = img.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def write_ppm(img: np.ndarray, path) -> None:
    Path(path).write_bytes(to_ppm_bytes(img))


def dump_renders(dataset, out_dir) -> None:
    """Write every observation (s_next at traj/t) as `{traj:05}_{t:04}.ppm`."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(len(dataset)):
        traj = int(dataset.traj_ids[i])
        t = int(dataset.ts[i])
        state = EnvState(values=dataset.next_states[i].astype(np.float64), t=t + 1)
        write_ppm(render(dataset.spec, state), out / f"{traj:05}_{t:04}.ppm")
