"""Static SVG rendering for histograms and cross-section region maps.

Both renderers take the serialized (JSON-ready) data only, so a plot can be
regenerated from the saved output files.  Numbers are printed with fixed
precision to keep the output byte-stable.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

WIDTH, HEIGHT, MARGIN = 640, 400, 48

# Sequential palette indexed by polygon edge count (3, 4, 5, ... clamps at the end).
_PALETTE = ("#fde725", "#a0da39", "#4ac16d", "#1fa187", "#277f8e", "#365c8d", "#46327e", "#440154")


def _f(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _doc(body: list[str], width: int = WIDTH, height: int = HEIGHT) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">'
    )
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>', *body, "</svg>"]) + "\n"


def histogram_svg(bins, title: str = "#simplices per region") -> str:
    """Bar chart from ``(lo, hi, count)`` triples."""
    bins = [tuple(int(v) for v in b) for b in bins]
    body = [f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>']
    plot_w, plot_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN
    x0, y0 = MARGIN, HEIGHT - MARGIN
    body.append(f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" stroke="black"/>')
    body.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{MARGIN}" stroke="black"/>')
    if bins:
        peak = max(c for _, _, c in bins) or 1
        bar_w = plot_w / len(bins)
        body.append(f'<text x="{x0 - 4}" y="{MARGIN + 4}" text-anchor="end">{peak}</text>')
        body.append(f'<text x="{x0 - 4}" y="{y0}" text-anchor="end">0</text>')
        label_every = max(1, len(bins) // 10)
        for i, (lo, hi, count) in enumerate(bins):
            h = plot_h * count / peak
            x = x0 + i * bar_w
            body.append(
                f'<rect x="{_f(x + 1)}" y="{_f(y0 - h)}" width="{_f(max(bar_w - 2, 0.5))}" '
                f'height="{_f(h)}" fill="#365c8d"><title>{lo}-{hi}: {count}</title></rect>'
            )
            if i % label_every == 0:
                body.append(f'<text x="{_f(x + bar_w / 2)}" y="{y0 + 14}" text-anchor="middle">{lo}-{hi}</text>')
    body.append(f'<text x="{WIDTH // 2}" y="{HEIGHT - 8}" text-anchor="middle">simplices</text>')
    return _doc(body)


def region_map_svg(section: dict, title: str = "cross-section") -> str:
    """Polygons of a cross-section document, filled by edge count."""
    extent = float(section["extent"])
    size = min(WIDTH, HEIGHT) - 2 * MARGIN
    scale = size / (2 * extent)
    ox, oy = MARGIN, MARGIN

    def pt(s, t):
        return _f(ox + (s + extent) * scale), _f(oy + (extent - t) * scale)

    body = [f'<text x="{MARGIN}" y="20" font-size="13">{escape(title)}</text>']
    for reg in section["regions"]:
        coords = " ".join(",".join(pt(s, t)) for s, t in reg["vertices"])
        colour = _PALETTE[min(max(int(reg["edges"]) - 3, 0), len(_PALETTE) - 1)]
        body.append(
            f'<polygon points="{coords}" fill="{colour}" stroke="black" stroke-width="0.5">'
            f'<title>{escape(reg["pattern"])} edges={int(reg["edges"])}</title></polygon>'
        )
    lx = MARGIN + size + 20
    for i, colour in enumerate(_PALETTE):
        y = MARGIN + 16 * i
        label = f"{i + 3}" + ("+" if i == len(_PALETTE) - 1 else "")
        body.append(f'<rect x="{lx}" y="{y}" width="12" height="12" fill="{colour}" stroke="black" stroke-width="0.5"/>')
        body.append(f'<text x="{lx + 18}" y="{y + 10}">{label} edges</text>')
    return _doc(body)
