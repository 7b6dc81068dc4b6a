"""Minimal SVG line plots, written directly as path elements.

Enough for convergence studies: linear or logarithmic axes, one polyline
with markers per series, a legend, and an optional fitted-slope readout.
No plotting dependency; output is deterministic for identical input.
"""

import math

_WIDTH = 640.0
_HEIGHT = 440.0
_MARGIN_L = 70.0
_MARGIN_R = 20.0
_MARGIN_T = 40.0
_MARGIN_B = 55.0
_COLORS = ("#1f6fb2", "#c24d2c", "#3a7d44", "#7a4fa3", "#b0892b")


def fit_loglog_slope(x, y):
    """Least-squares slope of log(y) against log(x); needs positive data."""
    lx = [math.log(float(v)) for v in x]
    ly = [math.log(float(v)) for v in y]
    n = len(lx)
    if n < 2:
        raise ValueError("need at least two points to fit a slope")
    mx = sum(lx) / n
    my = sum(ly) / n
    denom = sum((v - mx) ** 2 for v in lx)
    if denom == 0.0:
        raise ValueError("degenerate abscissae")
    return sum((u - mx) * (v - my) for u, v in zip(lx, ly)) / denom


def _ticks(lo, hi, log):
    if log:
        klo = math.floor(math.log10(lo) - 1e-12)
        khi = math.ceil(math.log10(hi) + 1e-12)
        vals = [10.0 ** k for k in range(int(klo), int(khi) + 1)]
        return [v for v in vals if lo / 1.0001 <= v <= hi * 1.0001] or [lo, hi]
    span = hi - lo
    if span <= 0:
        return [lo]
    step = 10.0 ** math.floor(math.log10(span / 4.0))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= 6:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-12 * max(1.0, abs(hi)):
        out.append(v)
        v += step
    return out or [lo, hi]


def _esc(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def line_plot(series, title="", xlabel="", ylabel="", logx=False, logy=False):
    """Render series = [{label, x, y}] to an SVG document string."""
    pts_all = [(float(px), float(py)) for s in series
               for px, py in zip(s["x"], s["y"])]
    if not pts_all:
        raise ValueError("nothing to plot")
    for fx, fy in pts_all:
        if (logx and fx <= 0) or (logy and fy <= 0):
            raise ValueError("log axes need positive data")

    def tx(v):
        return math.log(v) if logx else v

    def ty(v):
        return math.log(v) if logy else v

    xs = [tx(px) for px, _ in pts_all]
    ys = [ty(py) for _, py in pts_all]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    padx = 0.05 * (xhi - xlo)
    pady = 0.08 * (yhi - ylo)
    xlo, xhi = xlo - padx, xhi + padx
    ylo, yhi = ylo - pady, yhi + pady
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px_of(v):
        return _MARGIN_L + (tx(v) - xlo) / (xhi - xlo) * plot_w

    def py_of(v):
        return _MARGIN_T + (yhi - ty(v)) / (yhi - ylo) * plot_h

    out = []
    out.append('<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
               'viewBox="0 0 %d %d" font-family="monospace" font-size="12">'
               % (_WIDTH, _HEIGHT, _WIDTH, _HEIGHT))
    out.append('<rect width="%d" height="%d" fill="white"/>' % (_WIDTH, _HEIGHT))
    out.append('<rect x="%.1f" y="%.1f" width="%.1f" height="%.1f" '
               'fill="none" stroke="#444"/>'
               % (_MARGIN_L, _MARGIN_T, plot_w, plot_h))
    if title:
        out.append('<text x="%.1f" y="22" text-anchor="middle" '
                   'font-size="14">%s</text>' % (_WIDTH / 2, _esc(title)))

    xlo_data = math.exp(xlo) if logx else xlo
    xhi_data = math.exp(xhi) if logx else xhi
    ylo_data = math.exp(ylo) if logy else ylo
    yhi_data = math.exp(yhi) if logy else yhi
    for v in _ticks(xlo_data, xhi_data, logx):
        x = px_of(v)
        out.append('<line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" '
                   'stroke="#bbb" stroke-dasharray="3,3"/>'
                   % (x, _MARGIN_T, x, _MARGIN_T + plot_h))
        out.append('<text x="%.1f" y="%.1f" text-anchor="middle">%s</text>'
                   % (x, _MARGIN_T + plot_h + 18, _esc("%.3g" % v)))
    for v in _ticks(ylo_data, yhi_data, logy):
        y = py_of(v)
        out.append('<line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" '
                   'stroke="#bbb" stroke-dasharray="3,3"/>'
                   % (_MARGIN_L, y, _MARGIN_L + plot_w, y))
        out.append('<text x="%.1f" y="%.1f" text-anchor="end">%s</text>'
                   % (_MARGIN_L - 6, y + 4, _esc("%.3g" % v)))
    if xlabel:
        out.append('<text x="%.1f" y="%.1f" text-anchor="middle">%s</text>'
                   % (_MARGIN_L + plot_w / 2, _HEIGHT - 12, _esc(xlabel)))
    if ylabel:
        out.append('<text x="16" y="%.1f" text-anchor="middle" '
                   'transform="rotate(-90 16 %.1f)">%s</text>'
                   % (_MARGIN_T + plot_h / 2, _MARGIN_T + plot_h / 2,
                      _esc(ylabel)))

    for i, s in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        coords = ["%.2f,%.2f" % (px_of(px), py_of(py))
                  for px, py in zip(s["x"], s["y"])]
        out.append('<polyline points="%s" fill="none" stroke="%s" '
                   'stroke-width="1.6"/>' % (" ".join(coords), color))
        for px, py in zip(s["x"], s["y"]):
            out.append('<circle cx="%.2f" cy="%.2f" r="3" fill="%s"/>'
                       % (px_of(px), py_of(py), color))
        label = s.get("label", "series %d" % i)
        ly = _MARGIN_T + 16 + 16 * i
        out.append('<line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" '
                   'stroke="%s" stroke-width="1.6"/>'
                   % (_MARGIN_L + plot_w - 150, ly - 4,
                      _MARGIN_L + plot_w - 126, ly - 4, color))
        out.append('<text x="%.1f" y="%.1f">%s</text>'
                   % (_MARGIN_L + plot_w - 120, ly, _esc(label)))
    out.append("</svg>")
    return "\n".join(out) + "\n"
