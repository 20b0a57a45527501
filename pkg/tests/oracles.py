"""Independent brute-force oracles used to pin expected test values.

These deliberately re-derive results through a different route than the
library (offline array scans, exhaustive graph walks) so they can catch
bugs in the streaming/state-machine implementations.
"""

from __future__ import annotations

import numpy as np


def reachable_sections(edges: dict[str, list[str]], entry: str) -> set[str]:
    """Exhaustive walk of the section graph; edges may contain dangling ids."""
    seen: set[str] = set()
    stack = [entry]
    while stack:
        node = stack.pop()
        if node in seen or node not in edges:
            continue
        seen.add(node)
        stack.extend(edges[node])
    return seen


def breath_cycles_offline(
    t: np.ndarray,
    v: np.ndarray,
    lo: float = 0.4,
    hi: float = 0.6,
) -> list[tuple[int, float]]:
    """Offline cycle segmentation over a whole recording.

    A cycle opens at a rise above ``hi``, must fall below ``lo``, and closes
    at the next rise above ``hi``; its amplitude is max-min of the samples
    from open through close (both inclusive). Returns (t_close, amplitude)
    pairs. This is a batch re-derivation of the online hysteresis detector.
    """
    v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
    t = np.asarray(t)
    above_hi = v > hi
    below_lo = v < lo
    cycles: list[tuple[int, float]] = []
    open_idx: int | None = None
    fell = False
    for i in range(len(v)):
        if open_idx is None:
            if above_hi[i]:
                open_idx = i
            continue
        if not fell:
            if below_lo[i]:
                fell = True
            continue
        if above_hi[i]:
            window = v[open_idx : i + 1]
            cycles.append((int(t[i]), float(window.max() - window.min())))
            open_idx = i
            fell = False
    return cycles


def deep_cycle_count(
    t: np.ndarray,
    v: np.ndarray,
    lo: float = 0.4,
    hi: float = 0.6,
    deep: float = 0.7,
) -> int:
    return sum(1 for _, amp in breath_cycles_offline(t, v, lo, hi) if amp >= deep)
