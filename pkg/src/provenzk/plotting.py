"""Figures for the benchmark report."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_bench(rows, path: str | Path) -> Path:
    path = Path(path)
    ns = [r.N for r in rows]
    fig, (ax_t, ax_g) = plt.subplots(1, 2, figsize=(10, 4))
    ax_t.plot(ns, [r.prove_ms / 1e3 for r in rows], "o-", label="prove")
    ax_t.plot(ns, [r.verify_ms / 1e3 for r in rows], "s--", label="verify")
    ax_t.set_xscale("log", base=2)
    ax_t.set_xlabel("data elements N")
    ax_t.set_ylabel("seconds")
    ax_t.set_title(f"wall time (t = {rows[0].t})" if rows else "wall time")
    ax_t.legend()
    ax_t.grid(True, alpha=0.3)
    ax_g.plot(ns, [r.mul_gates for r in rows], "o-", label="mul gates")
    ax_g.plot(ns, [r.gates for r in rows], "s--", label="all gates")
    ax_g.set_xscale("log", base=2)
    ax_g.set_yscale("log")
    ax_g.set_xlabel("data elements N")
    ax_g.set_title("circuit size")
    ax_g.legend()
    ax_g.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
