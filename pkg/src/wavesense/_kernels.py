"""Hot-loop window arbitration: numba kernel with a pure-numpy fallback.

Set WAVESENSE_NO_NUMBA=1 to force the numpy path. Both paths implement the
same decode rule; results are identical up to floating-point summation order
in the interference accumulation.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("WAVESENSE_NO_NUMBA", "").strip() in ("1", "true", "yes")

if not _FORCE_NUMPY:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def decode_window_numpy(
    starts: np.ndarray,
    senders: np.ndarray,
    gains_w: np.ndarray,
    noise_w: float,
    thr_linear: float,
    collision_window_s: float,
    own_start_s: np.ndarray,
    node_transmits: np.ndarray,
) -> np.ndarray:
    """Decode mask, shape (n_transmissions, n_nodes).

    decoded[t, r] is True iff receiver r decodes transmission t: the sender
    is in range (power over noise alone clears the SINR threshold), the SINR
    against all time-overlapping transmissions clears it, and r is not
    transmitting within the collision window of t (half-duplex).
    """
    n_tx = starts.shape[0]
    n_nodes = gains_w.shape[0]
    if n_tx == 0:
        return np.zeros((0, n_nodes), dtype=bool)
    overlap = np.abs(starts[:, None] - starts[None, :]) < collision_window_s
    np.fill_diagonal(overlap, False)
    g_tx = gains_w[senders, :]  # (t, r)
    interference = overlap.astype(g_tx.dtype) @ g_tx
    in_range = g_tx >= thr_linear * noise_w
    sinr_ok = g_tx >= thr_linear * (noise_w + interference)
    deaf = node_transmits[None, :] & (
        np.abs(starts[:, None] - own_start_s[None, :]) < collision_window_s
    )
    not_self = senders[:, None] != np.arange(n_nodes)[None, :]
    return in_range & sinr_ok & ~deaf & not_self


if HAVE_NUMBA:

    @njit(cache=True)
    def _decode_window_numba(
        starts, senders, gains_w, noise_w, thr_linear, collision_window_s, own_start_s, node_transmits
    ):  # pragma: no cover - compiled
        n_tx = starts.shape[0]
        n_nodes = gains_w.shape[0]
        decoded = np.zeros((n_tx, n_nodes), dtype=np.bool_)
        order = np.argsort(starts)
        sorted_starts = starts[order]
        floor = thr_linear * noise_w
        for ti in range(n_tx):
            t = order[ti]
            s = senders[t]
            t_start = starts[t]
            lo = np.searchsorted(sorted_starts, t_start - collision_window_s, side="right")
            hi = np.searchsorted(sorted_starts, t_start + collision_window_s, side="left")
            for r in range(n_nodes):
                if r == s:
                    continue
                p = gains_w[s, r]
                if p < floor:
                    continue
                if node_transmits[r] and abs(t_start - own_start_s[r]) < collision_window_s:
                    continue
                interference = 0.0
                for oi in range(lo, hi):
                    o = order[oi]
                    if o == t:
                        continue
                    if abs(starts[o] - t_start) < collision_window_s:
                        interference += gains_w[senders[o], r]
                if p >= thr_linear * (noise_w + interference):
                    decoded[t, r] = True
        return decoded

    def decode_window(
        starts, senders, gains_w, noise_w, thr_linear, collision_window_s, own_start_s, node_transmits
    ) -> np.ndarray:
        return _decode_window_numba(
            np.ascontiguousarray(starts, dtype=np.float64),
            np.ascontiguousarray(senders, dtype=np.int64),
            np.ascontiguousarray(gains_w, dtype=np.float64),
            float(noise_w),
            float(thr_linear),
            float(collision_window_s),
            np.ascontiguousarray(own_start_s, dtype=np.float64),
            np.ascontiguousarray(node_transmits, dtype=np.bool_),
        )

else:
    decode_window = decode_window_numpy
