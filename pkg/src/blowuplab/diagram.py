"""SVG emission for the (kbar, p) region diagram.

Layout follows the usual convention for these diagrams: blow-up shaded
below the critical curve, known existence above, the heat-type curve
p = p_F(kbar + mu/2) and the straight existence boundary drawn on top,
and the intersection (kbar0, p_S(n + mu)) annotated.  When the shifted
dimension n + mu is an integer the annotation carries the exact
quadratic-surd value, e.g. (3+v17)/4 rendered with a real radical sign.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .exponents import AtlasResult, Verdict

__all__ = ["exact_boundary_labels", "write_atlas_svg"]


def _squarefree(D: int) -> tuple[int, int]:
    """D = s^2 q with q squarefree; returns (s, q)."""
    s, q, f = 1, D, 2
    while f * f <= q:
        while q % (f * f) == 0:
            q //= f * f
            s *= f
        f += 1
    return s, q


def _format_surd(A: int, B: int, q: int, C: int) -> str:
    """Render (A + B*sqrt(q))/C with C > 0."""
    if B == 0:
        return str(Fraction(A, C))
    root = f"√{q}"
    if abs(B) != 1:
        root = f"{abs(B)}{root}"
    if A == 0:
        num = root if B > 0 else f"-{root}"
    else:
        num = f"{A}{'+' if B > 0 else '-'}{root}"
    if C == 1:
        return num
    return f"({num})/{C}"


def exact_boundary_labels(n: int, mu: float) -> tuple[str | None, str | None]:
    """Exact-form strings (kbar0, p_S(n+mu)) when n + mu is an integer,
    else (None, None).

    p_S(d) = ((d+1) + sqrt((d+1)^2 + 8(d-1))) / (2(d-1)) reduces to
    (A + B sqrt(q))/C; kbar0 = 2/(p_S - 1) - mu/2 is rationalized in the
    same radical field.
    """
    if not float(mu).is_integer():
        return None, None
    d = n + int(mu)
    if d <= 1:
        return None, None
    D = (d + 1) ** 2 + 8 * (d - 1)
    s, q = _squarefree(D)
    if q == 1:
        ps = Fraction(d + 1 + s, 2 * (d - 1))
        kb0 = 2 / (ps - 1) - Fraction(int(mu), 2)
        return str(kb0), str(ps)

    A, B, C = d + 1, s, 2 * (d - 1)
    g = math.gcd(A, math.gcd(B, C))
    A, B, C = A // g, B // g, C // g
    ps_label = _format_surd(A, B, q, C)

    # kbar0 = 2/(p_S - 1) - mu/2; rationalize 2C / ((A-C) + B sqrt(q))
    E = (A - C) ** 2 - B * B * q
    A2, B2, C2 = 2 * C * (A - C), -2 * C * B, E
    if C2 < 0:
        A2, B2, C2 = -A2, -B2, -C2
    half_mu = Fraction(int(mu), 2)
    fa, fc = half_mu.numerator, half_mu.denominator
    A3, B3, C3 = A2 * fc - fa * C2, B2 * fc, C2 * fc
    g = math.gcd(math.gcd(abs(A3), abs(B3)), C3)
    A3, B3, C3 = A3 // g, B3 // g, C3 // g
    return _format_surd(A3, B3, q, C3), ps_label


_FILL = {
    Verdict.BLOW_UP.value: "#e4584f",
    Verdict.GLOBAL_EXISTENCE.value: "#5470d6",
}


def write_atlas_svg(result: AtlasResult, target, width: int = 720, height: int = 540) -> None:
    """Write the region diagram as a standalone SVG file (no timestamps:
    repeated emission is byte-identical)."""
    own = isinstance(target, (str, bytes)) or hasattr(target, "__fspath__")
    fh = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        fh.write(_render(result, width, height))
    finally:
        if own:
            fh.close()


def _render(res: AtlasResult, W: int, H: int) -> str:
    ML, MR, MT, MB = 84, 26, 28, 58
    pw, ph = W - ML - MR, H - MT - MB
    ks, ps = res.kbar_values, res.p_values
    k_lo, k_hi = float(ks.min()), float(ks.max())
    p_lo, p_hi = float(ps.min()), float(ps.max())

    def X(k: float) -> float:
        return ML + (k - k_lo) / (k_hi - k_lo) * pw if k_hi > k_lo else ML + pw / 2

    def Y(p: float) -> float:
        return MT + (p_hi - p) / (p_hi - p_lo) * ph if p_hi > p_lo else MT + ph / 2

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">'
    )
    out.append(f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>')

    # verdict cells (edges at midpoints between neighbouring grid values)
    k_edges = _edges(ks)
    p_edges = _edges(ps)
    out.append('<g opacity="0.55">')
    for i in range(ks.size):
        x0, x1 = X(k_edges[i]), X(k_edges[i + 1])
        for j in range(ps.size):
            fill = _FILL.get(res.verdicts[i, j])
            if fill is None:
                continue
            y1, y0 = Y(p_edges[j]), Y(p_edges[j + 1])
            out.append(
                f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" '
                f'height="{y1 - y0:.2f}" fill="{fill}"/>'
            )
    out.append("</g>")

    # boundary curves
    out.append(_polyline(res.fujita_curve, X, Y, p_lo, p_hi, "#15257d", 2.0))
    out.append(_polyline(res.existence_line, X, Y, p_lo, p_hi, "#15257d", 1.4, dash="6 4"))
    if p_lo <= res.p_strauss <= p_hi:
        y = Y(res.p_strauss)
        out.append(
            f'<line x1="{ML}" y1="{y:.2f}" x2="{ML + pw}" y2="{y:.2f}" '
            f'stroke="#b1221c" stroke-width="1.4"/>'
        )

    # intersection marker, guides, annotations
    kb_label, ps_label = exact_boundary_labels(res.n, res.mu)
    if k_lo <= res.kbar0 <= k_hi and p_lo <= res.p_strauss <= p_hi:
        cx, cy = X(res.kbar0), Y(res.p_strauss)
        out.append(
            f'<line x1="{cx:.2f}" y1="{cy:.2f}" x2="{cx:.2f}" y2="{MT + ph}" '
            f'stroke="#555" stroke-width="1" stroke-dasharray="2 3"/>'
        )
        out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3.5" fill="#15257d"/>')
    kb_text = f"k̄0 = {res.kbar0:.6f}" if kb_label is None else f"k̄0 = {kb_label} ≈ {res.kbar0:.6f}"
    ps_text = (
        f"p_S = {res.p_strauss:.6f}"
        if ps_label is None
        else f"p_S = {ps_label} ≈ {res.p_strauss:.6f}"
    )
    out.append(f'<text x="{ML + 10}" y="{MT + 18}" font-size="14" font-family="sans-serif">{kb_text}</text>')
    out.append(f'<text x="{ML + 10}" y="{MT + 36}" font-size="14" font-family="sans-serif">{ps_text}</text>')

    # axes and labels
    out.append(
        f'<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1.2"/>'
    )
    out.append(
        f'<text x="{ML + pw + 4}" y="{MT + ph + 18}" font-size="16" font-style="italic" '
        f'font-family="serif">k̄</text>'
    )
    out.append(
        f'<text x="{ML - 26}" y="{MT - 8}" font-size="16" font-style="italic" font-family="serif">p</text>'
    )
    for k in (k_lo, k_hi):
        out.append(
            f'<text x="{X(k):.2f}" y="{MT + ph + 18}" font-size="12" text-anchor="middle" '
            f'font-family="sans-serif">{k:.3g}</text>'
        )
    for p in (p_lo, p_hi):
        out.append(
            f'<text x="{ML - 8}" y="{Y(p) + 4:.2f}" font-size="12" text-anchor="end" '
            f'font-family="sans-serif">{p:.3g}</text>'
        )
    legend = [
        (Verdict.BLOW_UP.value, "blow-up (lifespan bound applies)"),
        (Verdict.GLOBAL_EXISTENCE.value, "global existence (encoded results)"),
    ]
    lx = ML + 10
    ly = MT + ph - 16 - 18 * (len(legend) - 1)
    for name, desc in legend:
        out.append(f'<rect x="{lx}" y="{ly - 10}" width="12" height="12" fill="{_FILL[name]}" opacity="0.55"/>')
        out.append(
            f'<text x="{lx + 18}" y="{ly}" font-size="12" font-family="sans-serif">{desc}</text>'
        )
        ly += 18
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _edges(values: np.ndarray) -> np.ndarray:
    if values.size == 1:
        half = 0.5 if values[0] == 0 else abs(values[0]) * 0.05 + 0.05
        return np.array([values[0] - half, values[0] + half])
    mids = 0.5 * (values[:-1] + values[1:])
    first = values[0] - (mids[0] - values[0])
    last = values[-1] + (values[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def _polyline(curve: np.ndarray, X, Y, p_lo: float, p_hi: float, color: str, width: float, dash: str | None = None) -> str:
    if curve.size == 0:
        return ""
    pts = [(X(k), Y(min(max(p, p_lo), p_hi))) for k, p in curve if p_lo <= p <= p_hi]
    if len(pts) < 2:
        return ""
    path = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="{width}"{dash_attr}/>'
