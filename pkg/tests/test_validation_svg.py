import xml.etree.ElementTree as ET

import numpy as np
import pytest

from hyperheat import svg, validation

NS = "{http://www.w3.org/2000/svg}"


@pytest.mark.parametrize("suite", ["normalization", "consistency", "bessel"])
def test_suites_pass(suite):
    checks = validation.run_suite(suite)
    assert checks and all(c.passed for c in checks), [c.line() for c in checks if not c.passed]


def test_order_suite_reports_two_checks():
    checks = validation.run_suite("order")
    assert [c.name.split()[0] for c in checks] == ["unbiased", "straight-line"]
    assert all(c.observed > 1 for c in checks)


def test_unknown_suite():
    with pytest.raises(ValueError):
        validation.run_suite("speed")


def test_check_line():
    assert validation.Check("x", 0.5, "<= 1", True).line() == "PASS  x: observed 0.5, bound <= 1"
    assert validation.Check("x", 2.0, "<= 1", False).line().startswith("FAIL")


def test_svg_structure():
    x = np.linspace(0, 1, 11)
    panels = [svg.Panel("a", x, {"s1": x, "s2": x ** 2, "s3": np.sqrt(x)}),
              svg.Panel("b", x, {"s1": -x, "s2": np.full_like(x, 2.0), "s3": x})]
    root = ET.fromstring(svg.render(panels, "r", "p"))
    assert root.tag == NS + "svg"
    assert root.get("width") == "800" and root.get("height") == "600"
    groups = root.findall(NS + "g")
    assert len(groups) == 2
    for gr in groups:
        lines = gr.findall(NS + "polyline")
        assert [p.get("data-series") for p in lines] == ["s1", "s2", "s3"]
        assert all(len(p.get("points").split()) == 11 for p in lines)


def test_svg_escapes_and_skips_nonfinite():
    x = np.array([0.0, 1.0, 2.0])
    doc = svg.render([svg.Panel("a < b & c", x, {"y": np.array([1.0, np.nan, 3.0])})])
    root = ET.fromstring(doc)
    poly = root.find(f"{NS}g/{NS}polyline")
    assert len(poly.get("points").split()) == 2
    with pytest.raises(ValueError):
        svg.render([])
