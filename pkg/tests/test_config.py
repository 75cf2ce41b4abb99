import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdiffract.aperture import Circle, Polygon, Rectangle, Union
from qdiffract.config import (
    REQUIRED_KEYS,
    ConfigError,
    FraunhoferWarning,
    GridScan,
    InPlaneScan,
    fraunhofer_check,
    parse_config,
    preset_text,
    serialize_config,
)
from qdiffract.longitudinal import Dirac, Gaussian, Uniform
from qdiffract.theories import Theory

BASE = """\
wavelength_nm = 632.8
shape = rect 5 50
filter = dirac
theories = qm,rs1
scan = in_plane 0 80 5
mc_seed = 3
"""


def test_fig3_preset():
    cfg = parse_config(preset_text("fig3"))
    assert cfg.shape == Rectangle(5.0, 50.0)
    assert cfg.wavelength_nm == 632.8
    assert cfg.filter == Gaussian(0.5)
    assert cfg.theories == tuple(Theory)


def test_fig4_preset():
    cfg = parse_config(preset_text("fig4"))
    assert cfg.shape == Circle(2.0)
    assert cfg.wavelength_nm == 532.45
    assert cfg.filter.sigma_z == pytest.approx(0.10526, abs=1e-5)
    assert Theory.SOMMERFELD not in cfg.theories


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset_text("fig5")


def test_empty_text_names_every_required_key():
    with pytest.raises(ConfigError) as info:
        parse_config("")
    msg = " ".join(info.value.errors)
    for key in REQUIRED_KEYS:
        assert key in msg
    assert len(info.value.errors) == len(REQUIRED_KEYS)


def test_all_errors_are_collected():
    text = BASE.replace("rect 5 50", "circle 2").replace("qm,rs1", "qm,sommerfeld,xx") + "colour = red\n"
    text = text.replace("in_plane 0 80 5", "in_plane 0 95 1")
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    errs = info.value.errors
    assert any("unknown key 'colour'" in e for e in errs)
    assert any("unknown theory 'xx'" in e for e in errs)
    assert any("theta_max_deg" in e for e in errs)


def test_sommerfeld_requires_a_rectangle_and_a_plane_scan():
    with pytest.raises(ConfigError, match="sommerfeld requires a rect"):
        parse_config(BASE.replace("rect 5 50", "circle 2").replace("qm,rs1", "sommerfeld"))
    with pytest.raises(ConfigError, match="in-plane"):
        parse_config(BASE.replace("qm,rs1", "sommerfeld").replace("in_plane 0 80 5", "grid 0 10 0 10 3"))


@pytest.mark.parametrize("line", [
    "wavelength_nm = -1", "wavelength_nm = abc", "shape = rect 5", "shape = hexagon 1", "shape = circle 2 at 1",
    "shape = polygon 0 0 1 1", "shape = union { rect 1 1 }", "shape = union { rect 1 1 ; rect 1 1 }",
    "filter = gauss", "filter = gauss 0", "theories = ", "scan = in_plane 10 5 4", "scan = in_plane 0 90 4",
    "scan = grid 0 1 2 3", "mc_seed = -4", "mc_seed = 1.5", "delta_p_rel = 2", "pdf_checks = maybe",
    "log_scale = 3", "not a key value line",
])
def test_invalid_values_are_rejected(line):
    with pytest.raises(ConfigError):
        parse_config(BASE + line + "\n")


def test_comments_overrides_and_shapes():
    cfg = parse_config(BASE + "# note\nshape = union { rect 1 2 at -5 0 ; circle 1 at 5 0 }  # two holes\n")
    assert cfg.shape == Union((Rectangle(1, 2, (-5, 0)), Circle(1, (5, 0))))
    cfg = parse_config(BASE + "shape = polygon 0 0 0 3 3 0\nfilter = uniform 0.7\nscan = grid 0 10 0 20 4\n")
    assert isinstance(cfg.shape, Polygon)
    assert cfg.filter == Uniform(0.7)
    assert cfg.scan == GridScan(0, 10, 0, 20, 4)


def test_theories_are_stored_in_canonical_order():
    cfg = parse_config(BASE.replace("qm,rs1", "rs2, qm ,fk,qm"))
    assert cfg.theories == (Theory.QM, Theory.FK, Theory.RS2)


def test_wavelength_larger_than_aperture_warns():
    with pytest.warns(FraunhoferWarning):
        cfg = parse_config(BASE.replace("rect 5 50", "circle 0.2"))
    assert cfg.warnings
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert parse_config(BASE).warnings == ()


def test_fraunhofer_examples():
    slit = Rectangle(5, 50)
    far = fraunhofer_check(slit, 0.6328, s_mm=1e6, d_mm=1000)
    assert far.delta_um == pytest.approx(math.sqrt(25 + 2500))
    assert far.delta_um == pytest.approx(50.249, abs=1e-3)
    assert far.ratio_detector == pytest.approx(3.99e-3, rel=1e-3)
    assert not far.flagged
    near = fraunhofer_check(slit, 0.6328, s_mm=1e6, d_mm=10)
    assert near.ratio_detector == pytest.approx(0.399, rel=1e-3)
    assert near.flagged
    tiny = fraunhofer_check(Circle(1e-12), 0.6328, 1.0, 1.0)
    assert tiny.ratio_detector == pytest.approx(0.0, abs=1e-20) and not tiny.flagged
    with pytest.raises(ValueError):
        fraunhofer_check(slit, 0.6328, 0.0, 1.0)


def test_round_trip_of_presets_and_base():
    for text in (preset_text("fig3"), preset_text("fig4"), BASE + "output = out.csv\nsvg = p.svg\npdf_checks = on\n"):
        cfg = parse_config(text)
        assert parse_config(serialize_config(cfg)) == cfg


pos = st.floats(0.01, 100.0, allow_nan=False)
deg = st.floats(0.0, 89.0)


@st.composite
def configs(draw):
    kind = draw(st.sampled_from(["rect", "circle", "polygon"]))
    if kind == "rect":
        shape = f"rect {draw(pos)!r} {draw(pos)!r} at {draw(st.floats(-5, 5))!r} {draw(st.floats(-5, 5))!r}"
    elif kind == "circle":
        shape = f"circle {draw(pos)!r}"
    else:
        s = draw(pos)
        shape = f"polygon 0 0 {s!r} 0 0 {s!r}"
    filt = draw(st.sampled_from(["dirac", f"gauss {draw(pos)!r}", f"uniform {draw(pos)!r}"]))
    theories = draw(st.lists(st.sampled_from(["qm", "fk", "rs1", "rs2"]), min_size=1, unique=True))
    lo = draw(deg)
    hi = draw(st.floats(lo + 0.01, 89.99))
    return (f"wavelength_nm = {draw(st.floats(100, 2000))!r}\nshape = {shape}\nfilter = {filt}\n"
            f"theories = {','.join(theories)}\nscan = in_plane {lo!r} {hi!r} {draw(st.integers(2, 50))}\n"
            f"mc_seed = {draw(st.integers(0, 2**31))}\ndelta_p_rel = {draw(st.floats(1e-6, 0.5))!r}\n")


@settings(max_examples=100, deadline=None)
@given(configs())
def test_round_trip_property(text):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FraunhoferWarning)
        cfg = parse_config(text)
        again = parse_config(serialize_config(cfg))
    assert again == cfg
    assert serialize_config(again) == serialize_config(cfg)
    assert isinstance(cfg.scan, InPlaneScan)
