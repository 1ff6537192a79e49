import json

import numpy as np
import pytest

from osotoc import __version__
from osotoc.models import BoundSeries, OTOCSeries
from osotoc.types import Scheme
from osotoc.utils import (
    bound_csv,
    format_float,
    otoc_csv,
    provenance_header,
    summary_line,
)


def _bound_series(difference: bool) -> BoundSeries:
    times = np.array([0.0, 1.0])
    return BoundSeries(
        times=times,
        d_values=np.array([0.0, 0.4]),
        d3_values=np.array([0.0, 1.1]),
        fbte_factor=np.exp(-np.array([0.0, 1.6])),
        pbte_factor=np.exp(-np.array([0.0, 1.1])),
        difference=np.array([0.0, 0.7]) if difference else None,
        methods=("closed_s1", "closed_s1"),
    )


def test_format_float_round_trips() -> None:
    """Test that formatted values parse back to the same double."""
    for value in (0.1, 1 / 3, -2.5e-17, 1e300, np.exp(-40.0)):
        assert float(format_float(value)) == value
    assert format_float(1.0) == "1"


def test_provenance_header() -> None:
    """Test version, command, parameters and the method run lengths."""
    header = provenance_header(
        "run", {"b": 2, "a": 1}, ["closed_s1", "closed_s1", "quadrature"]
    )
    assert header[0] == f"# osotoc {__version__}"
    assert header[1] == "# command: run"
    assert json.loads(header[2].removeprefix("# params: ")) == {"a": 1, "b": 2}
    assert header[3] == "# d_method per row: closed_s1 x2, quadrature x1"
    assert len(provenance_header("figure2", {})) == 3


def test_otoc_csv_columns() -> None:
    """Test the OTOC CSV layout."""
    series = OTOCSeries(np.array([0.0, 0.5]), np.array([1.0, 0.6j]), Scheme.CLOSED)
    lines = otoc_csv(series, ["# osotoc"]).splitlines()
    assert lines[1] == "t,re_F,im_F,abs_F"
    assert lines[2] == "0,1,0,1"
    t, re_f, im_f, abs_f = (float(x) for x in lines[3].split(","))
    assert (t, re_f, im_f) == (0.5, 0.0, 0.6)
    assert abs_f == pytest.approx(0.6)


def test_bound_csv_columns() -> None:
    """Test the bound CSV with and without the difference column."""
    with_difference = bound_csv(_bound_series(True), []).splitlines()
    assert with_difference[0].split(",")[-1] == "diff_bound"
    assert len(with_difference[2].split(",")) == 6

    without = bound_csv(_bound_series(False), [], include_difference=False)
    assert without.splitlines()[0].endswith("pbte_factor")
    with pytest.raises(ValueError):
        bound_csv(_bound_series(False), [])


def test_summary_line_is_single_json_line() -> None:
    """Test that the summary is one sorted JSON object."""
    line = summary_line({"output": "a.csv", "command": "run", "truncation": None})
    assert "\n" not in line
    assert line.startswith('{"command": "run"')
    assert json.loads(line)["truncation"] is None
