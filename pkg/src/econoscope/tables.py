"""Aligned-text table rendering for report output."""

from __future__ import annotations


def format_table(headers: list[str], rows: list[list], indent: str = "") -> str:
    cells = [[str(c) for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, c in enumerate(row):
            widths[i] = max(widths[i], len(c))
    def line(items):
        return indent + "  ".join(str(c).rjust(w) for c, w in zip(items, widths))
    out = [line(headers), line("-" * w for w in widths)]
    out.extend(line(row) for row in cells)
    return "\n".join(out)
