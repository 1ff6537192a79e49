import os
from pathlib import Path
from unittest.mock import Mock, patch

import pytest
from rich.console import Console

from osotoc.exceptions import (
    CapabilityError,
    ConfigError,
    DimensionCapError,
    DiskSpaceError,
    DomainError,
    NonCommutingChainError,
    OutputError,
    QuadratureError,
    TruncationError,
    handle_error,
)
from osotoc.utils import atomic_write_text, check_disk_space


@pytest.mark.parametrize(
    "error,code",
    [
        (ConfigError("grid.points", "must be at least 1"), 1),
        (OutputError("read-only", "/out.csv", "write"), 1),
        (QuadratureError("D(t)", 1e-6), 2),
        (TruncationError([4, 8], 1e-3, "ceiling reached"), 2),
        (DimensionCapError(8192, 4096), 3),
        (NonCommutingChainError("transverse field g_0"), 3),
        (CapabilityError("too many sites"), 3),
        (DomainError("s < 1"), 1),
        (RuntimeError("unexpected"), 1),
    ],
)
def test_exit_codes(error: Exception, code: int, test_console: Console) -> None:
    """Test the exit code of every error family."""
    assert handle_error(test_console, error) == code


def test_error_panel_content(test_console: Console) -> None:
    """Test the panel title and details for a configuration error."""
    with test_console.capture() as capture:
        handle_error(test_console, ConfigError("bath.coupling", "is required"))
    text = capture.get()
    assert "Configuration error" in text
    assert "bath.coupling" in text
    assert "is required" in text


def test_dimension_panel_content(test_console: Console) -> None:
    """Test that the dimension and cap are printed."""
    with test_console.capture() as capture:
        handle_error(test_console, DimensionCapError(8192, 4096))
    text = capture.get()
    assert "Unsupported request" in text
    assert "8,192" in text
    assert "4,096" in text


def test_truncation_panel_lists_cutoffs(test_console: Console) -> None:
    """Test that the tried cutoffs are reported."""
    with test_console.capture() as capture:
        handle_error(test_console, TruncationError([4, 8, 16], 2e-6, "ceiling"))
    assert "4, 8, 16" in capture.get()


def test_disk_space_check(tmp_path: Path) -> None:
    """Test disk space checking functionality."""
    file = tmp_path / "series.csv"
    mock_usage = Mock(free=1000)
    with patch("shutil.disk_usage", return_value=mock_usage):
        check_disk_space(file, 500)

        with pytest.raises(DiskSpaceError) as exc_info:
            check_disk_space(file, 2000)

        assert exc_info.value.required_bytes == 2000
        assert exc_info.value.available_bytes == 1000
        assert exc_info.value.exit_code == 1


def test_atomic_write_failure_leaves_no_temp_file(tmp_path: Path) -> None:
    """Test that a failed rename raises OutputError and cleans up."""
    target = tmp_path / "series.csv"
    with patch("os.replace", side_effect=OSError("disk detached")):
        with pytest.raises(OutputError) as exc_info:
            atomic_write_text(target, "t,re_F\n")
    assert exc_info.value.operation == "write"
    assert not target.exists()
    assert os.listdir(tmp_path) == []


def test_atomic_write_replaces_existing_file(tmp_path: Path) -> None:
    """Test that a completed write replaces the previous content."""
    target = tmp_path / "out" / "series.csv"
    atomic_write_text(target, "old\n")
    atomic_write_text(target, "new\n")
    assert target.read_text() == "new\n"
    assert sorted(os.listdir(target.parent)) == ["series.csv"]
