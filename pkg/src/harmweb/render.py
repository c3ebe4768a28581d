"""SVG figures of traced webs.

The disc of radius R is mapped to a fixed 1000x1000 frame (centre 500,500,
radius 460 so leaf labels fit).  RE curves use stroke class ``re`` and IM
curves class ``im``.  Coordinates are printed with two decimals so figures
are byte-stable.
"""
from .webtrace import Color, NodeKind, Web

SIZE = 1000
CENTER = 500.0
SCALE = 460.0

_STYLE = (".re{stroke:#c0392b;fill:none;stroke-width:2}"
          ".im{stroke:#2471a3;fill:none;stroke-width:2}"
          ".rim{stroke:#999;fill:none;stroke-width:1}"
          ".root{fill:#000}.crit{fill:#f39c12}"
          "text{font:14px sans-serif;text-anchor:middle;dominant-baseline:middle}")


def _xy(z: complex, R: float):
    return CENTER + SCALE * z.real / R, CENTER - SCALE * z.imag / R


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def web_svg(web: Web) -> str:
    R = web.radius
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">',
           f"<style>{_STYLE}</style>",
           f'<circle class="rim" cx="{_fmt(CENTER)}" cy="{_fmt(CENTER)}" r="{_fmt(SCALE)}"/>']
    for c in web.curves:
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (_xy(complex(p), R) for p in c.polyline))
        cls = "re" if c.color == Color.RE else "im"
        out.append(f'<polyline class="{cls}" points="{pts}"/>')
    for nd in web.nodes:
        x, y = _xy(nd.position, R)
        cls = "root" if nd.kind == NodeKind.ROOT else "crit"
        out.append(f'<circle class="{cls}" cx="{_fmt(x)}" cy="{_fmt(y)}" r="5"/>')
    for lf in web.leaves:
        x, y = _xy(lf.point * R * 1.06, R)
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(y)}">{lf.index}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
