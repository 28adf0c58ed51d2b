import numpy as np


def substream(seed, *key: int) -> np.random.Generator:
    """Counter-based generator addressed by ``(seed, *key)``.

    Philox streams keyed this way are independent of how many other
    streams exist or in which order they are consumed.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
