"""Pair-selection specs shared by verification and measurement routines.

A spec is ``"all"``, ``"sample:K"``, or a tuple ``("sample", K)``.
"""

import random
from itertools import combinations


def parse_pairs(spec):
    """Normalise a pair spec to ``None`` (all) or an int sample size."""
    if spec is None or spec == "all":
        return None
    if isinstance(spec, int):
        return spec
    if isinstance(spec, tuple) and len(spec) == 2 and spec[0] == "sample":
        return int(spec[1])
    if isinstance(spec, str) and spec.startswith("sample:"):
        k = int(spec.split(":", 1)[1])
        if k <= 0:
            raise ValueError(f"sample size must be positive, got {k}")
        return k
    raise ValueError(f"unrecognised pair spec {spec!r}; use 'all' or 'sample:K'")


def select_pairs(items, spec="all", seed=None, ordered=False):
    """Deterministically select pairs from ``items``.

    Unordered pairs ``(a, b)`` with ``a < b`` in item order unless
    ``ordered`` is set. Sampling draws without replacement using
    ``random.Random(seed)``; a seed is mandatory when sampling.
    """
    k = parse_pairs(spec)
    items = list(items)
    if ordered:
        allp = [(a, b) for a in items for b in items if a != b]
    else:
        allp = list(combinations(items, 2))
    if k is None or k >= len(allp):
        return allp
    if seed is None:
        raise ValueError("a seed is required when sampling pairs")
    rng = random.Random(seed)
    picked = sorted(rng.sample(range(len(allp)), k))
    return [allp[t] for t in picked]
