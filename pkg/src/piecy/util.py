"""Small shared helpers (deterministic seed derivation)."""

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15


def mix_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed with a splitmix64 finalizer.

    Pure integer arithmetic, so derived seeds are identical on every
    platform and Python build (unlike the builtin ``hash``).
    """
    acc = _GOLDEN
    for part in parts:
        z = (acc ^ (int(part) & MASK64)) & MASK64
        z = (z + _GOLDEN) & MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        acc = z ^ (z >> 31)
    return acc
