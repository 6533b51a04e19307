import numpy as np


def derive_seed(*parts: int) -> int:
    """Independent 32-bit seed for a (base seed, run, stage, ...) tuple."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])
