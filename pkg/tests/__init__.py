"""Test suite for levinson-check."""
