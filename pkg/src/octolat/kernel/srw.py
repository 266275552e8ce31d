"""Monte-Carlo estimate of the simple-random-walk Green's value G(0) on Z^8.

G(0) is the expected number of visits to the origin, counting the start.
The sublattice identity F^1(0) = -G(0) / 4 turns it into an independent
check of the Bessel quadrature for F^1.
"""

import numpy as np

DEFAULT_STEPS = 128
DEFAULT_CHUNK = 100_000


def truncation_bias(steps, dim=8):
    """Upper estimate of the visits expected after ``steps`` steps.

    Uses the local limit p_{2n}(0) ~ 2 (dim / (4 pi n))^{dim/2} summed
    over 2n > steps.
    """
    n0 = steps // 2
    k = dim / 2
    return 2 * (dim / (4 * np.pi)) ** k / ((k - 1) * n0 ** (k - 1))


def _visits(rng, walks, steps, dim):
    pos = np.zeros(walks * dim, dtype=np.int16)
    radius2 = np.zeros(walks, dtype=np.int32)
    visits = np.ones(walks, dtype=np.int32)
    base = np.arange(walks, dtype=np.int64) * dim
    moves = rng.integers(0, 2 * dim, size=(steps, walks), dtype=np.int8)
    for step in range(steps):
        move = moves[step]
        idx = base + (move >> 1)
        sign = (move & 1).astype(np.int16) * 2 - 1
        old = pos[idx]
        pos[idx] = old + sign
        radius2 += 2 * sign * old + 1
        if step % 2:
            visits += radius2 == 0
    return visits


def srw_green_oracle(walks, seed, steps=DEFAULT_STEPS, chunk=DEFAULT_CHUNK, dim=8):
    """Estimate G(0) from ``walks`` simple random walks of ``steps`` steps.

    Walks are simulated in fixed chunks, each with its own substream spawned
    from ``seed``, so the result depends only on (walks, seed, steps, chunk).

    Returns
    -------
    estimate, stderr : float
        Sample mean of the visit counts and its standard error.  The
        truncation bias is below :func:`truncation_bias`.
    """
    if walks < 1:
        raise ValueError("walks must be >= 1")
    sizes = [chunk] * (walks // chunk) + ([walks % chunk] if walks % chunk else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    total = 0.0
    total_sq = 0.0
    for size, stream in zip(sizes, streams):
        v = _visits(np.random.default_rng(stream), size, steps, dim).astype(np.float64)
        total += v.sum()
        total_sq += (v * v).sum()
    mean = total / walks
    var = max(total_sq / walks - mean * mean, 0.0)
    stderr = np.sqrt(var / max(walks - 1, 1))
    return float(mean), float(stderr)
