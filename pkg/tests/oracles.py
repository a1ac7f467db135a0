"""Independent reference implementations used to check the fast paths."""

import math

WEIGHTS = {"A": 0.08167, "C": 0.02782, "G": 0.02015, "T": 0.09056}
PRIORITY = ["dos", "probe", "r2l", "u2r"]


def base4(value, width):
    """Base-4 digits by repeated division, written with ACGT."""
    digits = []
    for _ in range(width):
        digits.append(value % 4)
        value //= 4
    assert value == 0
    return "".join("ACGT"[d] for d in reversed(digits))


def naive_find_all(patterns, text):
    """Every (start, pattern_id) where the pattern occurs, by brute-force slicing."""
    found = set()
    for pid, pat in enumerate(patterns):
        for start in range(len(text) - len(pat) + 1):
            if text[start:start + len(pat)] == pat:
                found.add((start, pid))
    return found


def naive_exact(signatures, probe):
    """signatures: list of (id, class_name, sequence). Linear scan with priority tie-break."""
    hits = [(PRIORITY.index(c), i, c) for i, c, s in signatures if s == probe]
    if not hits:
        return None
    _, sid, cls = min(hits)
    return cls, sid


def naive_weighted(signatures, probe, tau, weights=WEIGHTS, tol=1e-12):
    best = None
    for sid, cls, seq in signatures:
        d = sum(abs(weights[a] - weights[b]) for a, b in zip(probe, seq))
        key = (d, PRIORITY.index(cls), sid)
        if best is None or d < best[0] - tol or (abs(d - best[0]) <= tol and key[1:] < best[1:]):
            best = key
    if best is None or best[0] > tau + tol:
        return None
    return PRIORITY[best[1]], best[2], best[0]


def fnv1a_64_reference(data: bytes) -> int:
    h = 14695981039346656037
    for b in data:
        h ^= b
        h = (h * 1099511628211) % 2**64
    return h


def level_reference(x, lo, hi, levels):
    if hi == lo:
        return 0
    r = min(1.0, max(0.0, (x - lo) / (hi - lo)))
    return min(levels - 1, math.floor(r * levels))


def find_scan(patterns, text):
    """Per-pattern scan with str.find, restarting one past each hit (overlaps included)."""
    found = set()
    for pid, pat in enumerate(patterns):
        start = text.find(pat)
        while start != -1:
            found.add((start, pid))
            start = text.find(pat, start + 1)
    return found


class LinearScan:
    """Compares a probe against every signature row; no hashing involved."""

    def __init__(self, signatures):
        import numpy as np
        self.signatures = signatures
        self.rows = np.array([list(s.encode()) for _, _, s in signatures], dtype=np.uint8)

    def lookup(self, probe):
        import numpy as np
        p = np.frombuffer(probe.encode(), dtype=np.uint8)
        hits = np.flatnonzero((self.rows == p).all(axis=1))
        if hits.size == 0:
            return None
        best = min(hits, key=lambda i: (PRIORITY.index(self.signatures[i][1]), self.signatures[i][0]))
        return self.signatures[best][1], self.signatures[best][0]
