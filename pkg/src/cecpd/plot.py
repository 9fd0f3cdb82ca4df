"""Self-contained SVG rendering of a detection run.

Two aligned panels: the series (first column) on top, the per-split
statistic profiles with the threshold line below, and vertical markers
through both at every detected change point.  Output is plain SVG text
built with fixed-precision coordinates, so identical inputs give
byte-identical files - no plotting library involved.
"""

import numpy as np

__all__ = ["render_svg"]

_W, _H = 880, 560
_MARGIN_L, _MARGIN_R = 64, 16
_TOP = (40, 280)  # y-extent of the series panel
_BOT = (330, 530)  # y-extent of the statistic panel

_SERIES_STYLE = 'fill="none" stroke="#2b6cb0" stroke-width="1.5"'
_PROFILE_STYLE = 'fill="none" stroke="#6b46c1" stroke-width="1.2"'
_THRESHOLD_STYLE = 'stroke="#c05621" stroke-width="1" stroke-dasharray="6 3"'
_MARKER_STYLE = 'stroke="#c53030" stroke-width="1" stroke-dasharray="2 2"'
_AXIS_STYLE = 'stroke="#4a5568" stroke-width="1"'
_TEXT = 'font-family="monospace" font-size="11" fill="#1a202c"'


def _fmt(v):
    return "%.2f" % v


def _xmap(n):
    span = _W - _MARGIN_L - _MARGIN_R
    denom = max(n - 1, 1)

    def to_x(i):
        return _MARGIN_L + span * (i / denom)

    return to_x


def _ymap(lo, hi, panel):
    if hi <= lo:
        hi = lo + 1.0
    y0, y1 = panel

    def to_y(v):
        return y1 - (y1 - y0) * ((v - lo) / (hi - lo))

    return to_y


def _polyline(xs, ys, style):
    pts = " ".join("%s,%s" % (_fmt(x), _fmt(y)) for x, y in zip(xs, ys))
    return '<polyline points="%s" %s/>' % (pts, style)


def _panel_ticks(out, to_y, lo, hi):
    for v in (lo, (lo + hi) / 2.0, hi):
        y = to_y(v)
        out.append(
            '<line x1="%s" y1="%s" x2="%s" y2="%s" %s/>'
            % (_fmt(_MARGIN_L - 4), _fmt(y), _fmt(_MARGIN_L), _fmt(y), _AXIS_STYLE)
        )
        out.append(
            '<text x="%s" y="%s" text-anchor="end" %s>%.3g</text>'
            % (_fmt(_MARGIN_L - 7), _fmt(y + 4), _TEXT, v)
        )


def render_svg(series, segmentation, threshold=None):
    """Render a series and its segmentation as an SVG document string.

    Parameters
    ----------
    series : TimeSeries
        Only the first column is drawn.
    segmentation : Segmentation
        Supplies the detected points and the examined profiles.
    threshold : float, optional
        Defaults to ``segmentation.config.threshold``.

    Returns
    -------
    str
        A complete standalone SVG document.
    """
    values = np.asarray(series.values, dtype=np.float64)[:, 0]
    n = values.shape[0]
    if threshold is None:
        threshold = segmentation.config.threshold
    to_x = _xmap(n)

    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (_W, _H, _W, _H),
        '<rect width="%d" height="%d" fill="#ffffff"/>' % (_W, _H),
        '<text x="%s" y="24" %s>%s (n=%d)</text>'
        % (_fmt(_MARGIN_L), _TEXT, series.name or "series", n),
    ]

    # --- series panel ---
    lo, hi = float(values.min()), float(values.max())
    to_y = _ymap(lo, hi, _TOP)
    out.append(
        '<line x1="%s" y1="%s" x2="%s" y2="%s" %s/>'
        % (_fmt(_MARGIN_L), _fmt(_TOP[0]), _fmt(_MARGIN_L), _fmt(_TOP[1]), _AXIS_STYLE)
    )
    _panel_ticks(out, to_y, lo, hi)
    out.append(_polyline([to_x(i) for i in range(n)], [to_y(v) for v in values], _SERIES_STYLE))

    # --- statistic panel ---
    stat_values = [v for prof in segmentation.profiles for _, v in prof.stats]
    slo = min(stat_values + [0.0, threshold]) if stat_values else min(0.0, threshold)
    shi = max(stat_values + [threshold]) if stat_values else max(1.0, threshold)
    pad = 0.05 * (shi - slo) or 0.5
    slo, shi = slo - pad, shi + pad
    to_s = _ymap(slo, shi, _BOT)
    out.append(
        '<line x1="%s" y1="%s" x2="%s" y2="%s" %s/>'
        % (_fmt(_MARGIN_L), _fmt(_BOT[0]), _fmt(_MARGIN_L), _fmt(_BOT[1]), _AXIS_STYLE)
    )
    _panel_ticks(out, to_s, slo, shi)
    out.append(
        '<line x1="%s" y1="%s" x2="%s" y2="%s" %s/>'
        % (
            _fmt(_MARGIN_L),
            _fmt(to_s(threshold)),
            _fmt(_W - _MARGIN_R),
            _fmt(to_s(threshold)),
            _THRESHOLD_STYLE,
        )
    )
    out.append(
        '<text x="%s" y="%s" %s>threshold=%.3g</text>'
        % (_fmt(_W - _MARGIN_R - 130), _fmt(to_s(threshold) - 5), _TEXT, threshold)
    )
    for prof in segmentation.profiles:
        if not prof.stats:
            continue
        xs = [to_x(i) for i, _ in prof.stats]
        ys = [to_s(v) for _, v in prof.stats]
        out.append(_polyline(xs, ys, _PROFILE_STYLE))

    # --- detection markers through both panels ---
    for p in segmentation.points:
        x = _fmt(to_x(p.index))
        for y0, y1 in (_TOP, _BOT):
            out.append(
                '<line x1="%s" y1="%s" x2="%s" y2="%s" %s/>'
                % (x, _fmt(y0), x, _fmt(y1), _MARKER_STYLE)
            )
        label = series.labels[p.index] if series.labels is not None else p.index + 1
        out.append(
            '<text x="%s" y="%s" text-anchor="middle" %s>%s</text>'
            % (x, _fmt(_TOP[0] - 6), _TEXT, label)
        )

    # x ticks: first and last index (axis labels when present)
    for i in (0, n - 1):
        lab = series.labels[i] if series.labels is not None else i + 1
        out.append(
            '<text x="%s" y="%s" text-anchor="middle" %s>%s</text>'
            % (_fmt(to_x(i)), _fmt(_BOT[1] + 18), _TEXT, lab)
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
