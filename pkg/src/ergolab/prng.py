"""Seeded 64-bit mixed congruential generator for reproducible word choices.

state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64,
and each output bit is the top bit of the new state.  The seed is reduced
mod 2**64 and used as the initial state.
"""

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MASK = (1 << 64) - 1
DEFAULT_SEED = 20240611


class Lcg64:
    def __init__(self, seed: int = DEFAULT_SEED):
        self.state = int(seed) & MASK

    def next_state(self) -> int:
        self.state = (MULTIPLIER * self.state + INCREMENT) & MASK
        return self.state

    def bit(self) -> str:
        return "1" if self.next_state() >> 63 else "0"

    def word(self, length: int) -> str:
        return "".join(self.bit() for _ in range(length))


def seeded_words(seed: int, length: int, count: int) -> list:
    gen = Lcg64(seed)
    return [gen.word(length) for _ in range(count)]
