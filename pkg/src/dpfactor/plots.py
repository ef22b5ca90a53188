"""Render error-table rows to a figure file (headless backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be set first


def save_error_plot(rows: list[dict], path: str) -> None:
    """One expected-error-vs-n line per factorization kind, log-log axes.

    Rows with a recorded per-cell error are skipped.  The theoretical
    lower bound is drawn dashed when present.
    """
    by_kind: dict[str, list[tuple[int, float]]] = {}
    floor_points: dict[int, float] = {}
    for row in rows:
        if row.get("expected_error") is None:
            continue
        by_kind.setdefault(row["kind"], []).append((row["n"], row["expected_error"]))
        if row.get("lower_bound") is not None:
            floor_points[row["n"]] = row["lower_bound"]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for kind in sorted(by_kind):
        points = sorted(by_kind[kind])
        ax.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=kind)
    if floor_points:
        points = sorted(floor_points.items())
        ax.plot(
            [p[0] for p in points],
            [p[1] for p in points],
            linestyle="--",
            color="gray",
            label="lower bound",
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("steps n")
    ax.set_ylabel("expected approximation error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
