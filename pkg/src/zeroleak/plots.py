"""Render sweep figures from result rows.

One PNG per (scenario, metric): mechanisms as separate lines over the swept
parameter, Monte Carlo estimates with error bars, closed-form overlays
dashed. The CSV remains the output of record; figures are a convenience
rendering of the same rows.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

__all__ = ["render_figures"]

_STYLE = {
    "m1": "tab:blue",
    "m2": "tab:orange",
    "central": "tab:green",
    "local": "tab:red",
    "rr": "tab:purple",
    "laplace": "tab:brown",
    "mask_uniform": "tab:gray",
    "mask_prior": "tab:olive",
}


def _params_dict(params: str) -> dict[str, float]:
    out = {}
    for part in params.split(";"):
        if "=" in part:
            key, val = part.split("=", 1)
            out[key] = float(val)
    return out


def _sweep_key(rows) -> str:
    """The parameter that actually varies across rows (first one wins)."""
    seen: dict[str, set] = defaultdict(set)
    for row in rows:
        for key, val in _params_dict(row.params).items():
            seen[key].add(val)
    for key, vals in seen.items():
        if len(vals) > 1:
            return key
    return next(iter(seen), "param")


def render_figures(rows, out_dir) -> list[Path]:
    """Write one PNG per (scenario, metric); returns the created paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    groups: dict[tuple[str, str], list] = defaultdict(list)
    for row in rows:
        groups[(row.scenario, row.metric)].append(row)
    paths = []
    for (scenario, metric), grp in sorted(groups.items()):
        xkey = _sweep_key(grp)
        fig, ax = plt.subplots(figsize=(5.5, 4))
        series: dict[tuple[str, bool], list] = defaultdict(list)
        for row in grp:
            x = _params_dict(row.params).get(xkey)
            if x is None:
                continue
            series[(row.mechanism, row.trials > 0)].append((x, row.value, row.std_error))
        for (mech, is_mc), pts in sorted(series.items()):
            pts.sort()
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            es = [p[2] for p in pts]
            color = _STYLE.get(mech)
            label = f"{mech} ({'MC' if is_mc else 'closed'})"
            if is_mc:
                ax.errorbar(xs, ys, yerr=es, marker="o", ms=3, lw=1.2,
                            color=color, label=label, capsize=2)
            else:
                ax.plot(xs, ys, ls="--", lw=1.2, color=color, label=label)
        ax.set_xlabel(xkey)
        ax.set_ylabel(metric)
        ax.set_title(f"{scenario}: {metric}")
        ax.legend(fontsize=7)
        ax.grid(alpha=0.3)
        fig.tight_layout()
        path = out_dir / f"{scenario}_{metric}.png"
        fig.savefig(path, dpi=130)
        plt.close(fig)
        paths.append(path)
    return paths
