"""Six experts' log-normal opinions on tick survival time under four conditions.

Each condition is pooled separately and summarised; the pooled curve for
condition 3 has two modes because the experts split into two camps.
"""
import numpy as np

from sqrtpool import pool
from sqrtpool.panelfile import load_panel_file

pf = load_panel_file("ecology_ticks")

for name, panel in pf.panels():
    pp = pool(panel)
    lo, hi = pp.effective_support()
    x = np.linspace(lo, hi, 2000)
    y = pp(x)
    peaks = x[1:-1][(y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])]
    weights = ", ".join(f"{lab}={a:+.3f}" for lab, a in zip(panel.labels, pp.alpha))
    print(f"condition {name}: {weights}")
    print(f"  information {pp.information:.3e}, reduction {pp.reduction_percent:.1f}% vs {pp.dominant_label}")
    print(f"  modes at {np.round(peaks, 1)}")
