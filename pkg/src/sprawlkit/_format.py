"""Number rendering shared by tree text output and query headlines."""

from __future__ import annotations


def fmt_plain(value: float) -> str:
    """Shortest faithful rendering: 11713160 not 11713160.0, 18.88 as-is."""
    if value == int(value):
        return str(int(value))
    return repr(value)


def fmt_human(value: float) -> str:
    """Like fmt_plain but with thousands separators: 20000 -> 20,000."""
    if value == int(value):
        return f"{int(value):,}"
    return f"{value:,}"
