"""Result files: number formatting, provenance headers and atomic writes."""

import json
import os
import shutil
import tempfile
from itertools import groupby
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from osotoc import __version__
from osotoc.exceptions import DiskSpaceError, OutputError
from osotoc.logging import get_logger
from osotoc.models import BoundSeries, OTOCSeries
from osotoc.types import JsonDict

logger = get_logger()

OTOC_COLUMNS = ("t", "re_F", "im_F", "abs_F")
BOUND_COLUMNS = ("t", "D_t", "D_3t", "fbte_factor", "pbte_factor", "diff_bound")


def format_float(value: float) -> str:
    """Shortest text with 17 significant digits, so values round-trip exactly."""
    return f"{float(value):.17g}"


def check_disk_space(path: Path, required_bytes: int) -> None:
    """Raise DiskSpaceError if the target directory cannot hold the file."""
    try:
        usage = shutil.disk_usage(path.parent)
    except OSError as e:
        raise OutputError(str(e), str(path), "check space") from e
    if usage.free < required_bytes:
        raise DiskSpaceError(str(path), required_bytes, usage.free)


def atomic_write_text(path: Path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(str(e), str(path.parent), "create directory") from e
    data = text.encode("utf-8")
    check_disk_space(path, len(data))

    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except OSError as e:
        Path(tmp_name).unlink(missing_ok=True)
        raise OutputError(str(e), str(path), "write") from e
    logger.info_with_fields(
        "Wrote result file",
        operation="atomic_write",
        path=str(path),
        size=len(data),
    )


def _run_lengths(labels: Iterable[str]) -> str:
    return ", ".join(f"{label} x{len(list(run))}" for label, run in groupby(labels))


def provenance_header(
    command: str,
    params: JsonDict,
    methods: Optional[Sequence[str]] = None,
) -> List[str]:
    """Comment lines naming the producing version, command and parameters."""
    lines = [
        f"# osotoc {__version__}",
        f"# command: {command}",
        f"# params: {json.dumps(params, sort_keys=True, default=str)}",
    ]
    if methods is not None:
        lines.append(f"# d_method per row: {_run_lengths(methods)}")
    return lines


def otoc_csv(series: OTOCSeries, header: Sequence[str]) -> str:
    """CSV text `t,re_F,im_F,abs_F` preceded by the header block."""
    lines = list(header)
    lines.append(",".join(OTOC_COLUMNS))
    for row in series.rows():
        lines.append(",".join(format_float(x) for x in row))
    return "\n".join(lines) + "\n"


def bound_csv(
    series: BoundSeries,
    header: Sequence[str],
    include_difference: bool = True,
) -> str:
    """CSV text of a bound series; `diff_bound` is dropped when not requested."""
    if include_difference and series.difference is None:
        raise ValueError("series carries no difference bound")
    columns = BOUND_COLUMNS if include_difference else BOUND_COLUMNS[:-1]
    lines = list(header)
    lines.append(",".join(columns))
    for index, t in enumerate(series.times):
        values = [
            t,
            series.d_values[index],
            series.d3_values[index],
            series.fbte_factor[index],
            series.pbte_factor[index],
        ]
        if include_difference:
            assert series.difference is not None
            values.append(series.difference[index])
        lines.append(",".join(format_float(x) for x in values))
    return "\n".join(lines) + "\n"


def summary_line(payload: JsonDict) -> str:
    """Single-line JSON summary for standard output."""
    return json.dumps(payload, sort_keys=True, default=str)
