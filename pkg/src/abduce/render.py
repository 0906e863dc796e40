"""Static SVG timeline of an interpretation.

Three lanes: evidence beats from the input record, explained heartbeats
from the interpretation annotation, and rhythm intervals from its ``+``
markers.  Pure string building over sorted rows, so output bytes are a
deterministic function of the inputs.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from .io_wfdb import AnnotationRecord, sample_to_ms

WIDTH = 1000
LANE_HEIGHT = 60
MARGIN = 60
LANES = ("evidence", "heartbeats", "rhythms")


def render_svg(record: Optional[AnnotationRecord], interpretation: AnnotationRecord) -> str:
    """SVG document for an input record and an interpretation annotation."""
    beats_in: List[Tuple[int, str]] = []
    if record is not None:
        for sample, code, _sub, _chan, _num, _aux in record.entries:
            if code != "+":
                beats_in.append((sample_to_ms(sample, record.fs), code))
    beats_out: List[Tuple[int, str]] = []
    rhythms: List[Tuple[int, str]] = []
    for sample, code, _sub, _chan, _num, aux in interpretation.entries:
        ms = sample_to_ms(sample, interpretation.fs)
        if code == "+":
            rhythms.append((ms, aux or ""))
        else:
            beats_out.append((ms, code))

    times = [t for t, _ in beats_in + beats_out + rhythms]
    t_min = min(times) if times else 0
    t_max = max(times) if times else 1000
    span = max(t_max - t_min, 1)

    def x(t: int) -> float:
        return MARGIN + (WIDTH - 2 * MARGIN) * (t - t_min) / span

    height = 2 * MARGIN + LANE_HEIGHT * len(LANES)
    parts: List[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">'
    )
    parts.append(f'<rect width="{WIDTH}" height="{height}" fill="white"/>')
    for i, lane in enumerate(LANES):
        y = MARGIN + i * LANE_HEIGHT
        parts.append(
            f'<text x="8" y="{y + LANE_HEIGHT // 2}" font-size="12" '
            f'font-family="monospace">{lane}</text>'
        )
        parts.append(
            f'<line x1="{MARGIN}" y1="{y + LANE_HEIGHT - 14}" x2="{WIDTH - MARGIN}" '
            f'y2="{y + LANE_HEIGHT - 14}" stroke="#ccc"/>'
        )

    def beat_marks(beats: List[Tuple[int, str]], lane_index: int, color: str) -> None:
        y = MARGIN + lane_index * LANE_HEIGHT
        for t, code in sorted(beats):
            bx = round(x(t), 2)
            parts.append(
                f'<line x1="{bx}" y1="{y + 8}" x2="{bx}" y2="{y + LANE_HEIGHT - 14}" '
                f'stroke="{color}" class="beat"/>'
            )
            parts.append(
                f'<text x="{bx}" y="{y + 6}" font-size="9" text-anchor="middle" '
                f'font-family="monospace">{code}</text>'
            )

    beat_marks(beats_in, 0, "#888")
    beat_marks(beats_out, 1, "#1562a6")

    y = MARGIN + 2 * LANE_HEIGHT
    ordered = sorted(rhythms)
    for i, (t, label) in enumerate(ordered):
        t_end = ordered[i + 1][0] if i + 1 < len(ordered) else t_max
        x0, x1 = round(x(t), 2), round(x(max(t_end, t + 1)), 2)
        parts.append(
            f'<rect x="{x0}" y="{y + 10}" width="{round(x1 - x0, 2)}" '
            f'height="{LANE_HEIGHT - 28}" fill="#dbeffa" stroke="#1562a6" class="rhythm"/>'
        )
        parts.append(
            f'<text x="{round(x0 + 4, 2)}" y="{y + 26}" font-size="11" '
            f'font-family="monospace">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
