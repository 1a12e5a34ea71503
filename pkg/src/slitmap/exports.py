"""Serialization of results: moduli records (JSON/CSV), automorphism-group
exports, sweep tables, jump reports, and a side-by-side SVG of a domain and
its image slit annulus.

Numeric formatting is fixed for determinism: 17 significant digits in JSON
(exact round-trip), 9 in CSV.
"""

from __future__ import annotations

import json
from typing import List, Optional, Sequence

import numpy as np

from .circular_aut import AutGroup
from .families import FamilySweep, JumpReport
from .geometry import MultiplyConnectedDomain
from .koebe import CanonicalMap, SlitAnnulus

__all__ = [
    "moduli_record",
    "moduli_csv_row",
    "aut_record",
    "sweep_csv",
    "jump_text",
    "map_svg",
    "dump_json",
]


def _j(x: float) -> float:
    return float(f"{float(x):.17g}")


def _c(x: float) -> str:
    return f"{float(x):.9g}"


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")


def moduli_record(m: int, sl: SlitAnnulus, diagnostics: Optional[dict] = None) -> dict:
    """Fixed field order: m, r2, then (r, alpha, beta) per slit."""
    rec = {
        "m": int(m),
        "r2": _j(sl.r2),
        "slits": [
            {"r": _j(r), "alpha": _j(alpha), "beta": _j(beta)}
            for r, alpha, beta in sl.slits
        ],
    }
    if diagnostics is not None:
        rec["diagnostics"] = {
            "residual": _j(diagnostics.get("residual", float("nan"))),
            "cond": _j(diagnostics.get("cond", float("nan"))),
            "modulus_stdev": [_j(s) for s in diagnostics.get("modulus_stdev", ())],
            "closure_errors": [_j(e) for e in diagnostics.get("closure_errors", ())],
        }
    return rec


def moduli_csv_row(m: int, sl: SlitAnnulus) -> str:
    cells = [str(int(m)), _c(sl.r2)]
    for r, alpha, beta in sl.slits:
        cells.extend([_c(r), _c(alpha), _c(beta)])
    return ",".join(cells)


def aut_record(group: AutGroup) -> dict:
    """Normalized coefficient quadruples plus the classification tag."""
    return {
        "classification": group.classification,
        "order": group.order,
        "generators": list(group.generator_tags),
        "elements": [
            [[_j(c.real), _j(c.imag)] for c in e.coefficient_tuple()]
            for e in group.elements
        ],
    }


def sweep_csv(sweep: FamilySweep) -> str:
    """Header lambda,r2,r3,alpha3,beta3,...,residual; empty cells for
    failed grid points."""
    names = sweep.column_names()
    lines = ["lambda," + ",".join(names) + ",residual"]
    for i, lam in enumerate(sweep.grid):
        rec = sweep.moduli[i]
        cells = [_c(lam)]
        if rec is None:
            cells.extend([""] * (len(names) + 1))
        else:
            flat = rec.as_row()
            cells.extend(_c(v) for v in flat)
            cells.extend([""] * (len(names) - len(flat)))
            cells.append(_c(sweep.residuals[i]))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def jump_text(report: JumpReport) -> str:
    lines = [
        f"probe: {report.probe.real:.9g}{report.probe.imag:+.9g}i",
        f"one-sided sup differences: +side {report.sup_diff_pos:.3e}, "
        f"-side {report.sup_diff_neg:.3e}",
        f"limit from lambda > 0: "
        f"{report.limit_pos.real:.9g}{report.limit_pos.imag:+.9g}i",
        f"limit from lambda < 0: "
        f"{report.limit_neg.real:.9g}{report.limit_neg.imag:+.9g}i",
        f"cross-zero jump: {report.jump:.9g} "
        f"(identity-vs-involution reference {report.reference_jump:.9g})",
        f"discontinuity detected: {'yes' if report.is_discontinuous else 'no'}",
    ]
    return "\n".join(lines) + "\n"


# -- SVG rendering ---------------------------------------------------------


def _panel_transform(points: np.ndarray, origin_x: float, size: float):
    lo = min(points.real.min(), points.imag.min())
    hi = max(points.real.max(), points.imag.max())
    pad = 0.06 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    scale = size / (hi - lo)

    def to_xy(z: complex):
        return (origin_x + (z.real - lo) * scale, 20 + (hi - z.imag) * scale)

    return to_xy


def _polyline(points: Sequence[complex], to_xy, color: str, width: float = 1.5) -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in (to_xy(p) for p in points))
    return (f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"/>')


def map_svg(domain: MultiplyConnectedDomain, kmap: CanonicalMap) -> str:
    """Source domain and image slit annulus side by side; slits drawn as
    stroked arcs with endpoint dots."""
    size = 400.0
    parts: List[str] = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 860 460" '
        'font-family="monospace" font-size="13">'
    ]
    src_pts = np.concatenate([c.refined for c in domain.components])
    to_src = _panel_transform(src_pts, 20.0, size)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]
    for i, c in enumerate(domain.components):
        closed = np.append(c.refined, c.refined[0])
        parts.append(_polyline(closed, to_src, colors[i % len(colors)]))
    parts.append('<text x="20" y="445">source domain</text>')

    circle_pts = np.exp(2j * np.pi * np.arange(257) / 256)
    to_img = _panel_transform(np.concatenate([circle_pts, -circle_pts]), 440.0, size)
    sl = kmap.moduli
    parts.append(_polyline(circle_pts, to_img, colors[kmap.gamma1 % len(colors)]))
    parts.append(_polyline(sl.r2 * circle_pts, to_img,
                           colors[kmap.gamma2 % len(colors)]))
    for slit_idx, (r, alpha, beta) in enumerate(sl.slits):
        comp = kmap.slit_components[slit_idx]
        th = np.linspace(alpha, beta, 128)
        arc = r * np.exp(1j * th)
        parts.append(_polyline(arc, to_img, colors[comp % len(colors)], width=3.0))
        for ang in (alpha, beta):
            x, y = to_img(r * np.exp(1j * ang))
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" '
                         f'fill="{colors[comp % len(colors)]}"/>')
    parts.append(f'<text x="440" y="445">image slit annulus '
                 f'(r2={sl.r2:.6g})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
