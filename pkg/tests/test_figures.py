import io
import re

import pytest

from kms.core import EigType
from kms.figures import FigureId, FigureSpec, emit_figure, render_figure


def test_curves_figure_has_both_curves_and_labels():
    svg = render_figure(FigureSpec(FigureId.CURVES, 5, resolution=60)).decode()
    assert 'id="curve-type1"' in svg and 'id="curve-type2"' in svg
    assert "[1,0]" in svg and "[0,0]" in svg


def test_phase_figure_marks_jumps():
    svg = render_figure(FigureSpec("phase", 6, EigType.TYPE2)).decode()
    group = re.search(r'<g id="jump-markers">(.*?)</g>\n  </g>', svg, re.S)
    assert group is not None
    assert len(re.findall(r"<use ", group.group(1))) == 4


def test_parabola_figure_is_dash_dot():
    svg = render_figure(FigureSpec("parabola", 7)).decode()
    block = svg[svg.index('id="parabola"'):]
    dash = re.search(r"stroke-dasharray: ([0-9.,\s]+)", block)
    assert dash is not None and len(dash.group(1).replace(",", " ").split()) == 4


def test_bifurcation_needs_type():
    with pytest.raises(ValueError):
        FigureSpec("bifurcation", 7)
    svg = render_figure(FigureSpec("bifurcation", 7, EigType.TYPE1)).decode()
    assert 'id="modulus-a"' in svg and 'id="modulus-b"' in svg


def test_figures_are_deterministic(tmp_path):
    spec = FigureSpec("curves", 4, resolution=50)
    a = render_figure(spec)
    sink = io.BytesIO()
    emit_figure(spec, sink)
    path = tmp_path / "x.svg"
    emit_figure(spec, str(path))
    assert a == sink.getvalue() == path.read_bytes()
