"""Tests for utility functions."""

import math

import pytest

from src.utils import complex_to_pair, csv_text, format_complex, format_float, parse_complex


class TestParseComplex:
    """Tests for parse_complex."""

    def test_pair(self):
        """Test "re,im" input."""
        assert parse_complex("0.3,-1.5") == complex(0.3, -1.5)

    def test_real_only(self):
        """Test that a plain real number has zero imaginary part."""
        assert parse_complex("-0.5") == complex(-0.5, 0.0)
        assert parse_complex(" 2 ") == 2

    @pytest.mark.parametrize("text", ["", "  ", "a,b", "1,2,3", "nan,0", "0,inf", "1,"])
    def test_invalid(self, text):
        """Test that malformed and non-finite values are rejected."""
        with pytest.raises(ValueError):
            parse_complex(text)


class TestFormatting:
    """Tests for the number formatting helpers."""

    def test_format_float_is_lossless(self):
        """Test that 17 significant digits read back exactly."""
        for value in (0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789):
            assert float(format_float(value)) == value

    def test_format_float_special(self):
        """Test nan and infinity."""
        assert format_float(math.nan) == "nan"
        assert format_float(math.inf) == "inf"

    def test_complex_to_pair(self):
        """Test the JSON pair encoding."""
        assert complex_to_pair(2 - 1j) == [2.0, -1.0]
        assert complex_to_pair(3) == [3.0, 0.0]

    def test_format_complex(self):
        """Test the table format of complex numbers."""
        assert format_complex(2) == "2 + 0i"
        assert format_complex(0.31 - 1.2j) == "0.31 - 1.2i"
        assert format_complex(1 / 3 + 1j, digits=3) == "0.333 + 1i"


class TestCsvText:
    """Tests for csv_text."""

    def test_rows(self):
        """Test header, float formatting and line endings."""
        text = csv_text(("a", "b", "c"), [[0.1, 2, "ok"], [math.nan, "", "B2"]])
        assert text == "a,b,c\n0.10000000000000001,2,ok\nnan,,B2\n"

    def test_quoting(self):
        """Test that fields with commas are quoted."""
        assert csv_text(("x",), [["a,b"]]) == 'x\n"a,b"\n'
