"""Test suite for osotoc."""
