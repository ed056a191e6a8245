"""Non-overlapping block aggregation and the dyadic scale ladder."""

from dataclasses import dataclass

from .errors import DomainError, KindError, SizeError
from .synthesis import INCREMENTS, TraceSeries

DEFAULT_MIN_BLOCKS = 16


@dataclass(frozen=True)
class ScaleLadder:
    block_sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(b) for b in self.block_sizes)
        if not sizes or sizes[0] < 1 or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise DomainError("block sizes must be strictly increasing positive integers")
        object.__setattr__(self, "block_sizes", sizes)

    def __iter__(self):
        return iter(self.block_sizes)

    def __len__(self):
        return len(self.block_sizes)


def aggregate(series, block):
    """Sum increments over consecutive blocks of ``block`` samples.

    Block k covers samples ``k*block .. k*block + block - 1``; trailing
    samples that do not fill a block are dropped.
    """
    if series.kind != INCREMENTS:
        raise KindError(f"aggregate expects increments, got {series.kind}")
    if block < 1:
        raise DomainError(f"block size must be >= 1, got {block}")
    n = len(series)
    if block > n:
        raise SizeError(f"block size {block} exceeds series length {n}")
    count = n // block
    if block == 1:
        values = series.values.copy()
    else:
        values = series.values[: count * block].reshape(count, block).sum(axis=1)
    meta = dict(series.meta)
    meta["block"] = meta.get("block", 1) * block
    return TraceSeries(values, INCREMENTS, meta)


def dyadic_ladder(length, min_blocks=DEFAULT_MIN_BLOCKS):
    """Block sizes 1, 2, 4, ... that keep at least ``min_blocks`` blocks."""
    if min_blocks < 1 or length < 2 * min_blocks:
        raise SizeError(
            f"length {length} is too short for min_blocks={min_blocks}"
        )
    top = (length // min_blocks).bit_length() - 1
    return ScaleLadder(tuple(2 ** k for k in range(top + 1)))
