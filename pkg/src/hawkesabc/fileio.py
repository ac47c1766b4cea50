"""Plain-text serialization: event files and chain CSVs.

Event files carry one timestamp per line, ``#`` comments, and an optional
``# horizon=<float>`` directive; chains are CSV with an exact header.  All
floats are written with 17 significant digits so round-trips are lossless.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .hawkes import EventSequence
from .inference import Chain

__all__ = ["ParseError", "read_events", "write_events", "write_chain", "read_chain"]

CHAIN_HEADER = ["iter", "mu", "K", "beta", "accepted"]


class ParseError(ValueError):
    def __init__(self, path, lineno: int | None, message: str):
        loc = f"{path}:{lineno}" if lineno is not None else str(path)
        super().__init__(f"{loc}: {message}")
        self.path = path
        self.lineno = lineno


def read_events(path, horizon: float | None = None) -> EventSequence:
    """Parse an event file; an explicit ``horizon`` argument wins over the
    file's directive."""
    path = Path(path)
    directive: float | None = None
    times: list[float] = []
    lines: list[int] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("horizon"):
                    _, _, value = body.partition("=")
                    try:
                        directive = float(value.strip())
                    except ValueError:
                        raise ParseError(path, lineno, f"bad horizon directive {line!r}")
                continue
            try:
                times.append(float(line))
            except ValueError:
                raise ParseError(path, lineno, f"unparseable timestamp {line!r}")
            lines.append(lineno)
    t = horizon if horizon is not None else directive
    if t is None:
        raise ParseError(path, None, "no horizon: pass one or add '# horizon=<T>'")
    for i in range(1, len(times)):
        if times[i] <= times[i - 1]:
            raise ParseError(path, lines[i], f"timestamps not strictly increasing at {times[i]}")
    for i, v in enumerate(times):
        if not 0 <= v <= t:
            raise ParseError(path, lines[i], f"timestamp {v} outside window [0, {t}]")
    return EventSequence(np.asarray(times), t)


def write_events(seq: EventSequence, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# horizon={seq.horizon:.17g}\n")
        for t in seq.times:
            fh.write(f"{t:.17g}\n")


def write_chain(chain: Chain, path) -> None:
    """CSV with header ``iter,mu,K,beta,accepted``, one row per iteration."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CHAIN_HEADER)
        for it, (mu, k, beta), acc in zip(chain.iters, chain.thetas, chain.accepted):
            writer.writerow([it, f"{mu:.17g}", f"{k:.17g}", f"{beta:.17g}", int(acc)])


def read_chain(path) -> Chain:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, 1, "empty chain file")
        if header != CHAIN_HEADER:
            raise ParseError(path, 1, f"expected header {','.join(CHAIN_HEADER)!r}")
        thetas = []
        accepted = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ParseError(path, lineno, f"expected 5 fields, got {len(row)}")
            try:
                thetas.append([float(row[1]), float(row[2]), float(row[3])])
                accepted.append(bool(int(row[4])))
            except ValueError:
                raise ParseError(path, lineno, f"unparseable row {row!r}")
    if not thetas:
        raise ParseError(path, None, "chain file has no samples")
    return Chain(np.asarray(thetas), np.asarray(accepted))
