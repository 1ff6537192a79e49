import json
from pathlib import Path

from osotoc.logging import get_logger, setup_logging


def test_json_log_file(tmp_path: Path) -> None:
    """Test that structured fields reach the JSON log file."""
    log_file = tmp_path / "osotoc.log"
    logger = setup_logging(log_file, json_format=True)
    try:
        logger.info_with_fields("Grid evaluation completed", operation="test", points=3)
        for handler in logger.handlers:
            handler.flush()
        records = [json.loads(line) for line in log_file.read_text().splitlines()]
    finally:
        setup_logging()

    record = records[-1]
    assert record["level"] == "DEBUG"
    assert record["logger"] == "osotoc"
    assert record["fields"] == {"operation": "test", "points": 3}
    assert record["location"]["function"] == "test_json_log_file"


def test_plain_log_file(tmp_path: Path) -> None:
    """Test the plain text format and the shared logger instance."""
    log_file = tmp_path / "plain.log"
    logger = setup_logging(log_file)
    try:
        assert get_logger() is logger
        logger.warning_with_fields("Raising Fock cutoff", n_max=8)
        for handler in logger.handlers:
            handler.flush()
        text = log_file.read_text()
    finally:
        setup_logging()
    assert "WARNING" in text
    assert "Raising Fock cutoff {'n_max': 8}" in text
