"""Line-oriented ``key = value`` scan configuration.

Schema (one key per line, ``#`` starts a comment, blank lines ignored)::

    wavelength_nm = 632.8
    shape         = rect 5 50            # half-width a, half-height b (um)
                  | circle 2              # radius r (um)
                  | polygon x1 y1 x2 y2 x3 y3 ...
                  | union { rect 5 50 at -20 0 ; rect 5 50 at 20 0 }
    filter        = dirac | gauss 0.5 | uniform 1.0
    theories      = qm,fk,rs1,rs2,sommerfeld   # any non-empty subset
    scan          = in_plane 0 89.9 1000        # deg, deg, steps
                  | grid 0 30 0 30 50           # x range, y range, steps per axis
    mc_seed       = 20240601                    # required, no ambient entropy
    mc_samples    = 1000000                     # optional
    quad_tolerance = 1e-10                      # optional
    delta_p_rel   = 1e-3                        # optional
    pdf_checks    = off                         # optional, on | off
    output        = result.csv                  # optional
    svg           = result.svg                  # optional
    log_scale     = on                          # optional, on | off

``rect`` and ``circle`` accept a trailing ``at cx cy`` to offset the centre.
Angles are degrees here and radians everywhere else.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field

from .aperture import Circle, Polygon, Rectangle, ShapeError, Union, max_radius
from .longitudinal import Dirac, Gaussian, Uniform
from .theories import Theory

REQUIRED_KEYS = ("wavelength_nm", "shape", "filter", "theories", "scan", "mc_seed")
OPTIONAL_KEYS = ("mc_samples", "quad_tolerance", "delta_p_rel", "pdf_checks", "output", "svg", "log_scale")
_KEY_ORDER = REQUIRED_KEYS + OPTIONAL_KEYS


class ConfigError(ValueError):
    """Raised with every problem found, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class FraunhoferWarning(UserWarning):
    pass


@dataclass(frozen=True)
class InPlaneScan:
    theta_min_deg: float
    theta_max_deg: float
    steps: int


@dataclass(frozen=True)
class GridScan:
    theta_x_min_deg: float
    theta_x_max_deg: float
    theta_y_min_deg: float
    theta_y_max_deg: float
    steps: int  # per axis; the grid has steps**2 points


@dataclass(frozen=True)
class ScanConfig:
    wavelength_nm: float
    shape: object
    filter: object
    theories: tuple
    scan: object
    mc_seed: int
    mc_samples: int = 1_000_000
    quad_tolerance: float = 1e-10
    delta_p_rel: float = 1e-3
    pdf_checks: bool = False
    output: str | None = None
    svg: str | None = None
    log_scale: bool = False
    warnings: tuple = field(default=(), compare=False)

    @property
    def wavelength_um(self) -> float:
        return self.wavelength_nm * 1e-3

    @property
    def p0(self) -> float:
        """Incident wavenumber in rad/um."""
        return 2.0 * math.pi / self.wavelength_um


# ---------------------------------------------------------------------------
# value parsers; each returns the value or raises ValueError with a message
# ---------------------------------------------------------------------------


def _positive(token: str, what: str) -> float:
    try:
        x = float(token)
    except ValueError:
        raise ValueError(f"{what}: {token!r} is not a number") from None
    if not (math.isfinite(x) and x > 0):
        raise ValueError(f"{what} must be a positive finite number, got {token}")
    return x


def _number(token: str, what: str) -> float:
    try:
        x = float(token)
    except ValueError:
        raise ValueError(f"{what}: {token!r} is not a number") from None
    if not math.isfinite(x):
        raise ValueError(f"{what} must be finite, got {token}")
    return x


def _centre(tokens, what):
    if not tokens:
        return (0.0, 0.0)
    if len(tokens) != 3 or tokens[0] != "at":
        raise ValueError(f"{what}: expected 'at cx cy' after the size, got {' '.join(tokens)!r}")
    return (_number(tokens[1], "centre x"), _number(tokens[2], "centre y"))


def _parse_simple_shape(text: str):
    tokens = text.split()
    if not tokens:
        raise ValueError("shape is empty")
    kind, args = tokens[0].lower(), tokens[1:]
    if kind == "rect":
        if len(args) < 2:
            raise ValueError("rect needs half-width and half-height in um")
        return Rectangle(_positive(args[0], "rect half-width"), _positive(args[1], "rect half-height"),
                         center=_centre(args[2:], "rect"))
    if kind == "circle":
        if len(args) < 1:
            raise ValueError("circle needs a radius in um")
        return Circle(_positive(args[0], "circle radius"), center=_centre(args[1:], "circle"))
    if kind == "polygon":
        if len(args) % 2 or len(args) < 6:
            raise ValueError("polygon needs at least three x y vertex pairs")
        vals = [_number(t, "polygon vertex") for t in args]
        return Polygon(tuple(zip(vals[0::2], vals[1::2])))
    raise ValueError(f"unknown shape kind {kind!r} (rect, circle, polygon, union)")


def parse_shape(text: str):
    text = text.strip()
    m = re.fullmatch(r"union\s*\{(.*)\}", text, flags=re.IGNORECASE | re.DOTALL)
    try:
        if m:
            parts = [s for s in m.group(1).split(";") if s.strip()]
            if len(parts) < 2:
                raise ValueError("union needs at least two members separated by ';'")
            if any(p.strip().lower().startswith("union") for p in parts):
                raise ValueError("nested unions are not supported")
            return Union(tuple(_parse_simple_shape(p) for p in parts))
        return _parse_simple_shape(text)
    except ShapeError as exc:
        raise ValueError(f"invalid shape: {exc}") from None


def parse_filter(text: str):
    tokens = text.split()
    if not tokens:
        raise ValueError("filter is empty")
    kind, args = tokens[0].lower(), tokens[1:]
    if kind == "dirac" and not args:
        return Dirac()
    if kind == "gauss" and len(args) == 1:
        return Gaussian(_positive(args[0], "gauss sigma_um"))
    if kind == "uniform" and len(args) == 1:
        return Uniform(_positive(args[0], "uniform dz_um"))
    raise ValueError(f"filter must be 'dirac', 'gauss SIGMA_UM' or 'uniform DZ_UM', got {text!r}")


def parse_theories(text: str):
    names = [s.strip().lower() for s in text.split(",") if s.strip()]
    if not names:
        raise ValueError("theories must list at least one of qm, fk, rs1, rs2, sommerfeld")
    out = []
    for name in names:
        try:
            th = Theory(name)
        except ValueError:
            raise ValueError(f"unknown theory {name!r}") from None
        if th not in out:
            out.append(th)
    # canonical order keeps CSV columns independent of how the list was typed
    return tuple(th for th in Theory if th in out)


def _angle(token: str, what: str) -> float:
    x = _number(token, what)
    if not 0.0 <= x < 90.0:
        raise ValueError(f"{what} must lie in [0, 90) degrees, got {token}")
    return x


def _steps(token: str) -> int:
    try:
        n = int(token)
    except ValueError:
        raise ValueError(f"steps: {token!r} is not an integer") from None
    if n < 2:
        raise ValueError(f"steps must be >= 2, got {n}")
    return n


def parse_scan(text: str):
    tokens = text.split()
    kind = tokens[0].lower() if tokens else ""
    if kind == "in_plane" and len(tokens) == 4:
        lo, hi = _angle(tokens[1], "theta_min_deg"), _angle(tokens[2], "theta_max_deg")
        if not lo < hi:
            raise ValueError("theta_min_deg must be below theta_max_deg")
        return InPlaneScan(lo, hi, _steps(tokens[3]))
    if kind == "grid" and len(tokens) == 6:
        xlo, xhi = _angle(tokens[1], "theta_x_min_deg"), _angle(tokens[2], "theta_x_max_deg")
        ylo, yhi = _angle(tokens[3], "theta_y_min_deg"), _angle(tokens[4], "theta_y_max_deg")
        if not (xlo < xhi and ylo < yhi):
            raise ValueError("grid ranges must have min below max")
        return GridScan(xlo, xhi, ylo, yhi, _steps(tokens[5]))
    raise ValueError(f"scan must be 'in_plane MIN MAX STEPS' or 'grid XMIN XMAX YMIN YMAX STEPS', got {text!r}")


def _switch(text: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "true", "yes", "1"):
        return True
    if t in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on or off, got {text!r}")


def _int_at_least(text: str, what: str, lo: int) -> int:
    try:
        n = int(text)
    except ValueError:
        raise ValueError(f"{what}: {text!r} is not an integer") from None
    if n < lo:
        raise ValueError(f"{what} must be >= {lo}, got {n}")
    return n


def _relative(text: str, what: str) -> float:
    x = _positive(text, what)
    if not x < 1:
        raise ValueError(f"{what} must be below 1, got {text}")
    return x


_PARSERS = {
    "wavelength_nm": lambda v: _positive(v, "wavelength_nm"),
    "shape": parse_shape,
    "filter": parse_filter,
    "theories": parse_theories,
    "scan": parse_scan,
    "mc_seed": lambda v: _int_at_least(v, "mc_seed", 0),
    "mc_samples": lambda v: _int_at_least(v, "mc_samples", 1),
    "quad_tolerance": lambda v: _relative(v, "quad_tolerance"),
    "delta_p_rel": lambda v: _relative(v, "delta_p_rel"),
    "pdf_checks": _switch,
    "output": lambda v: v.strip(),
    "svg": lambda v: v.strip(),
    "log_scale": _switch,
}


def aperture_size(shape) -> float:
    """Smallest bounding-box extent, the scale compared with the wavelength."""
    if isinstance(shape, Union):
        return min(aperture_size(m) for m in shape.members)
    xmin, xmax, ymin, ymax = shape.bbox()
    return min(xmax - xmin, ymax - ymin)


def parse_config(text: str) -> ScanConfig:
    """Parse and validate; raises ConfigError listing every problem found."""
    errors = []
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep:
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        if key not in _PARSERS:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        # later lines override earlier ones, which is how presets are amended
        raw[key] = (lineno, value.strip())

    values = {}
    for key, (lineno, value) in raw.items():
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            errors.append(f"line {lineno}: {key}: {exc}")
    for key in REQUIRED_KEYS:
        if key not in raw:
            errors.append(f"missing required key {key!r}")

    theories = values.get("theories", ())
    if Theory.SOMMERFELD in theories:
        if "shape" in values and not isinstance(values["shape"], Rectangle):
            errors.append("theories: sommerfeld requires a rect shape")
        if isinstance(values.get("scan"), GridScan):
            errors.append("theories: sommerfeld covers the in-plane scan only")
    if errors:
        raise ConfigError(errors)

    notes = []
    size = aperture_size(values["shape"])
    wavelength_um = values["wavelength_nm"] * 1e-3
    if wavelength_um > size:
        msg = (f"wavelength {wavelength_um:g} um exceeds the aperture size {size:g} um; "
               "the far-field model assumes a wavelength smaller than the aperture")
        warnings.warn(msg, FraunhoferWarning, stacklevel=2)
        notes.append(msg)
    return ScanConfig(**values, warnings=tuple(notes))


# ---------------------------------------------------------------------------
# serialisation (parse(serialize(c)) == c)
# ---------------------------------------------------------------------------


def _num(x: float) -> str:
    return repr(float(x))


def _centre_text(c):
    return "" if tuple(c) == (0.0, 0.0) else f" at {_num(c[0])} {_num(c[1])}"


def format_shape(shape) -> str:
    if isinstance(shape, Rectangle):
        return f"rect {_num(shape.half_width_a)} {_num(shape.half_height_b)}{_centre_text(shape.center)}"
    if isinstance(shape, Circle):
        return f"circle {_num(shape.radius_r)}{_centre_text(shape.center)}"
    if isinstance(shape, Polygon):
        return "polygon " + " ".join(f"{_num(x)} {_num(y)}" for x, y in shape.vertices)
    if isinstance(shape, Union):
        return "union { " + " ; ".join(format_shape(m) for m in shape.members) + " }"
    raise TypeError(f"unknown shape {shape!r}")


def format_filter(filt) -> str:
    if isinstance(filt, Dirac):
        return "dirac"
    if isinstance(filt, Gaussian):
        return f"gauss {_num(filt.sigma_z)}"
    if isinstance(filt, Uniform):
        return f"uniform {_num(filt.delta_z)}"
    raise TypeError(f"unknown filter {filt!r}")


def format_scan(scan) -> str:
    if isinstance(scan, InPlaneScan):
        return f"in_plane {_num(scan.theta_min_deg)} {_num(scan.theta_max_deg)} {scan.steps}"
    return (f"grid {_num(scan.theta_x_min_deg)} {_num(scan.theta_x_max_deg)} "
            f"{_num(scan.theta_y_min_deg)} {_num(scan.theta_y_max_deg)} {scan.steps}")


def serialize_config(cfg: ScanConfig) -> str:
    onoff = {True: "on", False: "off"}
    fields = {
        "wavelength_nm": _num(cfg.wavelength_nm),
        "shape": format_shape(cfg.shape),
        "filter": format_filter(cfg.filter),
        "theories": ",".join(th.value for th in cfg.theories),
        "scan": format_scan(cfg.scan),
        "mc_seed": str(cfg.mc_seed),
        "mc_samples": str(cfg.mc_samples),
        "quad_tolerance": _num(cfg.quad_tolerance),
        "delta_p_rel": _num(cfg.delta_p_rel),
        "pdf_checks": onoff[cfg.pdf_checks],
        "output": cfg.output,
        "svg": cfg.svg,
        "log_scale": onoff[cfg.log_scale],
    }
    return "".join(f"{k} = {fields[k]}\n" for k in _KEY_ORDER if fields[k] is not None)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

PRESETS = {
    # 10 um wide, 100 um tall slit under He-Ne light, sigma_z = a / 10
    "fig3": """\
wavelength_nm = 632.8
shape = rect 5 50
filter = gauss 0.5
theories = qm,fk,rs1,rs2,sommerfeld
scan = in_plane 0 89.9 1000
mc_seed = 1
log_scale = on
""",
    # 4 um diameter circular hole, sigma_z = r / 19
    "fig4": f"""\
wavelength_nm = 532.45
shape = circle 2
filter = gauss {_num(2.0 / 19.0)}
theories = qm,fk,rs1,rs2
scan = in_plane 0 89.9 1000
mc_seed = 1
log_scale = on
""",
}


def preset_text(name: str) -> str:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError([f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}"]) from None


# ---------------------------------------------------------------------------
# far-field criterion
# ---------------------------------------------------------------------------

FRAUNHOFER_LIMIT = 0.01


@dataclass(frozen=True)
class FraunhoferReport:
    delta_um: float
    ratio_detector: float  # Delta^2 / (lambda d)
    ratio_source: float  # Delta^2 / (lambda s)

    @property
    def flagged(self) -> bool:
        return max(self.ratio_detector, self.ratio_source) >= FRAUNHOFER_LIMIT


def fraunhofer_check(shape, wavelength_um: float, s_mm: float, d_mm: float) -> FraunhoferReport:
    """Far-field ratios for source distance ``s`` and detector distance ``d``.

    Delta is the largest distance from the origin to a point of the aperture;
    either ratio at or above 0.01 is flagged.
    """
    if not (wavelength_um > 0 and s_mm > 0 and d_mm > 0):
        raise ValueError("wavelength and distances must be positive")
    delta = max_radius(shape)
    d2 = delta * delta / wavelength_um
    return FraunhoferReport(delta, d2 / (d_mm * 1e3), d2 / (s_mm * 1e3))
