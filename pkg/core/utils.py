"""
Utility functions: seeded random streams and atomic result writing.
"""
import csv
import io
import os
import tempfile
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Sequence
import logging

import numpy as np

logger = logging.getLogger(__name__)


class Stream(IntEnum):
    """Independent random concerns of one trial."""
    TOPOLOGY = 0
    JAMMER_PLACEMENT = 1
    TRAFFIC = 2
    SHADOWING = 3
    FADING = 4
    RELAY = 5
    JAMMER_CHANNEL = 6
    LINK_SAMPLE = 7


def trial_rng(seed: int, stream: Stream) -> np.random.Generator:
    """Generator for a concern drawn once per trial (topology, jammer placement)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(stream),)))


def epoch_rng(seed: int, stream: Stream, epoch: int) -> np.random.Generator:
    """
    Generator for one concern within one epoch.
    Keyed by (stream, epoch) so that runs differing only after some epoch
    draw identical numbers before it.
    """
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(int(stream), epoch + 1))
    )


def atomic_write_text(path: Path, text: str) -> Path:
    """Write text next to its destination, then rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        mode='w', encoding='utf-8', newline='', dir=path.parent,
        prefix=f'.{path.name}.', suffix='.tmp', delete=False,
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise
    logger.info(f"Wrote {path}")
    return path


def atomic_write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return atomic_write_text(path, buffer.getvalue())


def format_sig(value: float, digits: int = 6) -> str:
    """Fixed-precision decimal rendering used by every CSV column."""
    return f"{float(value):.{digits}g}"
