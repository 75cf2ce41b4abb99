"""Angle scans and their CSV / SVG renderings."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import GridScan, InPlaneScan, ScanConfig
from .theories import CLASSICAL, PredictionPoint, Theory, predict

LOG_FLOOR = 1e-30


@dataclass(frozen=True)
class ScanResult:
    """Column-oriented scan output; one entry per direction, in scan order."""

    theta_x_deg: np.ndarray
    theta_y_deg: np.ndarray
    T: np.ndarray
    L: np.ndarray
    gamma: np.ndarray
    omega2: dict
    intensity: dict
    theories: tuple
    in_plane: bool
    label: str = ""
    extras: list = field(default_factory=list, compare=False)

    def __len__(self) -> int:
        return self.theta_x_deg.size

    def rows(self):
        for k in range(len(self)):
            yield PredictionPoint(
                theta_x=float(np.radians(self.theta_x_deg[k])),
                theta_y=float(np.radians(self.theta_y_deg[k])),
                T=float(self.T[k]),
                L=float(self.L[k]),
                gamma=float(self.gamma[k]),
                omega2={th: float(v[k]) for th, v in self.omega2.items()},
                intensity={th: float(v[k]) for th, v in self.intensity.items()},
            )


def scan_angles(scan):
    """``(theta_x_deg, theta_y_deg)`` flattened in row-major theta_x order."""
    if isinstance(scan, InPlaneScan):
        tx = np.linspace(scan.theta_min_deg, scan.theta_max_deg, scan.steps)
        return tx, np.zeros_like(tx)
    if isinstance(scan, GridScan):
        gx = np.linspace(scan.theta_x_min_deg, scan.theta_x_max_deg, scan.steps)
        gy = np.linspace(scan.theta_y_min_deg, scan.theta_y_max_deg, scan.steps)
        tx, ty = np.meshgrid(gx, gy, indexing="ij")
        return tx.ravel(), ty.ravel()
    raise TypeError(f"unknown scan mode {scan!r}")


def _evaluate(cfg: ScanConfig, tx_deg, ty_deg):
    return predict(cfg.shape, cfg.filter, cfg.p0, np.radians(tx_deg), np.radians(ty_deg), cfg.theories)


def run_scan(cfg: ScanConfig, threads: int = 1, chunk: int = 256) -> ScanResult:
    """Evaluate every requested theory over the configured directions.

    All work is elementwise, so splitting rows across ``threads`` workers
    gives results bit-identical to the serial run.
    """
    tx, ty = scan_angles(cfg.scan)
    if threads <= 1:
        parts = [_evaluate(cfg, tx, ty)]
    else:
        bounds = [(s, min(s + chunk, tx.size)) for s in range(0, tx.size, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _evaluate(cfg, tx[b[0]:b[1]], ty[b[0]:b[1]]), bounds))

    def cat(get):
        return np.concatenate([np.atleast_1d(np.asarray(get(p), dtype=float)) for p in parts])

    intensity = {th: cat(lambda p, th=th: p["I"][th]) for th in cfg.theories}
    for th, col in intensity.items():
        if not np.all(np.isfinite(col)):
            raise FloatingPointError(f"non-finite {th.label} intensity in scan")
    return ScanResult(
        theta_x_deg=tx,
        theta_y_deg=ty,
        T=cat(lambda p: p["T"]),
        L=cat(lambda p: p["L"]),
        gamma=cat(lambda p: p["Gamma"]),
        omega2={th: cat(lambda p, th=th: p["Omega2"][th]) for th in CLASSICAL},
        intensity=intensity,
        theories=tuple(cfg.theories),
        in_plane=isinstance(cfg.scan, InPlaneScan),
    )


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def csv_header(theories) -> str:
    cols = ["theta_x_deg", "theta_y_deg", "T", "L", "Gamma"]
    cols += ["I_" + th.label for th in Theory if th in theories]
    return ",".join(cols)


def csv_text(result: ScanResult) -> str:
    cols = [result.theta_x_deg, result.theta_y_deg, result.T, result.L, result.gamma]
    cols += [result.intensity[th] for th in Theory if th in result.theories]
    table = np.column_stack(cols)
    lines = [csv_header(result.theories)]
    lines += [",".join("%.12e" % v for v in row) for row in table]
    return "\n".join(lines) + "\n"


def emit_csv(result: ScanResult, path) -> None:
    # newline="" keeps LF endings on every platform
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(result))


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_COLOURS = {
    Theory.QM: "#d62728",
    Theory.FK: "#1f77b4",
    Theory.RS1: "#2ca02c",
    Theory.RS2: "#9467bd",
    Theory.SOMMERFELD: "#ff7f0e",
}
_EXTRA_COLOURS = ("#8c564b", "#e377c2", "#7f7f7f", "#17becf")

_W, _H = 800, 500
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 170, 30, 50


def svg_text(result: ScanResult, log_scale: bool = False, title: str = "") -> str:
    """Deterministic SVG of intensity versus theta_x, one polyline per curve.

    ``result.extras`` may hold ``(label, theta_deg, values)`` curves from
    companion scans (for instance the Dirac-filter QM curve).
    """
    if len(result) == 0:
        raise ValueError("cannot plot an empty scan result")
    if not result.in_plane:
        raise ValueError("the SVG plot covers in-plane scans only")
    curves = [(th.label, _COLOURS[th], result.theta_x_deg, result.intensity[th]) for th in result.theories]
    for k, (label, x, y) in enumerate(result.extras):
        curves.append((label, _EXTRA_COLOURS[k % len(_EXTRA_COLOURS)], np.asarray(x), np.asarray(y)))

    x_lo = float(min(c[2].min() for c in curves))
    x_hi = float(max(c[2].max() for c in curves))
    clamped = False
    if log_scale:
        ys = []
        for _, _, _, y in curves:
            clamped |= bool(np.any(y < LOG_FLOOR))
            ys.append(np.log10(np.maximum(y, LOG_FLOOR)))
        y_lo = float(np.floor(min(v.min() for v in ys)))
        y_hi = float(np.ceil(max(v.max() for v in ys)))
    else:
        ys = [y for _, _, _, y in curves]
        y_lo = 0.0
        y_hi = float(max(v.max() for v in ys))
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0

    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def sx(v):
        return _LEFT + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return _TOP + (y_hi - v) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{_LEFT}" y="{_TOP - 10}" font-size="14">{_escape(title)}</text>')
    for k in range(6):
        v = x_lo + (x_hi - x_lo) * k / 5
        out.append(f'<text x="{sx(v):.2f}" y="{_TOP + ph + 18}" font-size="11" text-anchor="middle">{v:.4g}</text>')
    for k in range(6):
        v = y_lo + (y_hi - y_lo) * k / 5
        lab = f"1e{v:.0f}" if log_scale else f"{v:.3g}"
        out.append(f'<text x="{_LEFT - 6}" y="{sy(v) + 4:.2f}" font-size="11" text-anchor="end">{lab}</text>')
    out.append(f'<text x="{_LEFT + pw / 2:.2f}" y="{_H - 10}" font-size="12" text-anchor="middle">'
               'theta_x (deg)</text>')
    ylab = "log10 relative intensity" if log_scale else "relative intensity"
    out.append(f'<text x="16" y="{_TOP + ph / 2:.2f}" font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 16 {_TOP + ph / 2:.2f})">{ylab}</text>')

    for (label, colour, x, _), y in zip(curves, ys):
        pts = " ".join(f"{sx(a):.3f},{sy(b):.3f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.2" '
                   f'data-label="{_escape(label)}" points="{pts}"/>')

    lx = _W - _RIGHT + 15
    for k, (label, colour, _, _) in enumerate(curves):
        yy = _TOP + 15 + 18 * k
        out.append(f'<line x1="{lx}" y1="{yy}" x2="{lx + 20}" y2="{yy}" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{yy + 4}" font-size="12">{_escape(label)}</text>')
    if clamped:
        out.append(f'<text x="{_LEFT + 5}" y="{_TOP + ph - 6}" font-size="10">'
                   f'values below {LOG_FLOOR:g} clamped to the floor</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def emit_svg(result: ScanResult, path, log_scale: bool = False, title: str = "") -> None:
    text = svg_text(result, log_scale, title)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
