"""Tests for quotegraph."""
