import json
from fractions import Fraction

import numpy as np
import pytest

from goldens import B_3x3, C_3x3, EPDA_4, LEX_3x3
from macc2d.arrays import CachingArray, Epda, verify_delivery_array
from macc2d.constructions import optimal_construct
from macc2d.errors import ArrayFormatError
from macc2d.formats import emit_report, parse_array, print_array, read_array, write_array
from macc2d.grid import NetworkParams
from macc2d.scheme import compute_ndt
from sweep import sweep_instances

OPT3x3 = NetworkParams(3, 3, 2, 5, Fraction(1, 9))


def test_epda_document():
    text = print_array(Epda(4, 2, 4, 2, 2, EPDA_4))
    assert text == "EPDA K=4 L=2 F=4 Z=2 S=2\n* 2 1 *\n* * 2 1\n1 * * 2\n2 1 * *\n"
    assert parse_array(text) == Epda(4, 2, 4, 2, 2, EPDA_4)


def test_caching_document_head():
    c, b = optimal_construct(OPT3x3)
    lines = print_array(c).splitlines()
    assert lines[0] == "CACHING K1=3 K2=3 F=9 Z=1"
    assert lines[1] == "COLS 1,1 1,2 1,3 2,1 2,2 2,3 3,1 3,2 3,3"
    assert lines[2] == "* - - - - - - - -"
    assert print_array(b).splitlines()[2] == "* 1 * 1 1 1 * 1 *"


def test_roundtrip_every_construction():
    for name, _, c, b in sweep_instances():
        for a in (c, b):
            back = parse_array(print_array(a))
            assert back == a and back.cols == a.cols, name
            assert print_array(back) == print_array(a)


def test_comments_and_blank_lines_ignored():
    text = "# example\n\nEPDA K=2 L=1 F=2 Z=1 S=1\n* 1\n\n1 *\n"
    assert parse_array(text).s == 1


def test_file_roundtrip(tmp_path):
    a = Epda(4, 2, 4, 2, 2, EPDA_4)
    write_array(a, tmp_path / "a.txt")
    assert read_array(tmp_path / "a.txt") == a


@pytest.mark.parametrize("text, line, column", [
    ("FOO K=1\n", 1, 1),
    ("EPDA K=2 L=1 F=2 Z=1 S=1 Q=3\n* 1\n1 *\n", 1, 26),
    ("EPDA K=2 L=1 F=2 Z=1\n* 1\n1 *\n", 1, None),
    ("EPDA K=2 L=1 F=2 Z=1 S=1\n* 1\n1 x\n", 3, 3),
    ("EPDA K=2 L=1 F=2 Z=1 S=1\n* 1\n1 * *\n", 3, None),
    ("EPDA K=2 L=1 F=2 Z=1 S=1\n* 1\n", 2, None),
    ("EPDA K=2 L=1 F=2 Z=1 S=1\n* -\n1 *\n", 2, 3),
    ("EPDA K=2 L=1 F=2 Z=1 S=1\n* 0\n1 *\n", 2, 3),
    ("CACHING K1=1 K2=2 F=1 Z=1\n* -\n", 2, 1),
    ("CACHING K1=1 K2=2 F=1 Z=1\nCOLS 1,1 1;2\n* -\n", 2, 10),
    ("CACHING K1=1 K2=2 F=1 Z=1\nCOLS 1,1 1,2\n* 3\n", 3, 3),
    ("", None, None),
])
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ArrayFormatError) as err:
        parse_array(text)
    assert err.value.line == line and err.value.column == column
    if line is not None:
        assert str(err.value).startswith(f"line {line}")


def test_report_json():
    c, b = optimal_construct(OPT3x3)
    out = emit_report(compute_ndt(b, OPT3x3, c))
    assert '"achieved":"5/9"' in out and '"optimal_flag":true' in out
    assert out == emit_report(compute_ndt(b, OPT3x3, c))
    assert emit_report({"b": 0.1 + 0.2, "a": np.float64(1 / 3), "c": [np.int64(2)]}) == \
        '{"a":0.333333333333,"b":0.3,"c":[2]}'


def test_zero_rows_rejected():
    with pytest.raises(ArrayFormatError):
        parse_array("EPDA K=2 L=1 F=0 Z=0 S=0\n")


def test_documented_delivery_text_verifies():
    labels = " ".join(f"{a},{b}" for a, b in LEX_3x3)
    rows = "\n".join(" ".join("*" if v < 0 else str(v) for v in row) for row in B_3x3)
    b = parse_array(f"DELIVERY K1=3 K2=3 F=9 R=2 L=5 S=5\nCOLS {labels}\n{rows}\n")
    rep = verify_delivery_array(b, CachingArray(3, 3, 1, C_3x3, LEX_3x3))
    out = json.loads(emit_report(rep))
    assert out["conditions"] == {"D1": True, "D2": True, "D3": True, "D4": True}
    assert out["counterexamples"] == [] and out["pass"] is True
