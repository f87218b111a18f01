"""Line-oriented event file format: one CSV row per simulated pair.

Columns: pair_id, then (procedure, observable, outcome, time, channel) for the
left and the right side.  A discarded side is written as 'discarded' with
empty fields.  Times use Python's shortest round-trip float representation, so
a file parses back to exactly the values that were written.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .sim import _CHAN_INV, _OUT_INV, EventSet, SimConfig

HEADER = ("pair_id,left_procedure,left_observable,left_outcome,left_time,"
          "left_channel,right_procedure,right_observable,right_outcome,"
          "right_time,right_channel")

_PROC = {0: "active", 1: "passive"}
_OBS = {0: "strangeness", 1: "lifetime"}


def _side_fields(events: EventSet, prefix: str, i: int) -> list[str]:
    out = events.__dict__[prefix + "out"][i]
    if out < 0:
        return ["discarded", "", "", "", ""]
    chan = events.__dict__[prefix + "chan"][i]
    return [
        _PROC[int(events.__dict__[prefix + "proc"][i])],
        _OBS[int(events.__dict__[prefix + "obs"][i])],
        _OUT_INV[int(out)].value,
        repr(float(events.__dict__[prefix + "time"][i])),
        "" if chan < 0 else _CHAN_INV[int(chan)].value,
    ]


def to_lines(events: EventSet):
    yield HEADER
    for i in range(len(events)):
        fields = [str(i)] + _side_fields(events, "l_", i) + _side_fields(events, "r_", i)
        yield ",".join(fields)


def write_events(events: EventSet, path: str | Path) -> None:
    with open(path, "w") as fh:
        for line in to_lines(events):
            fh.write(line + "\n")


_PROC_CODE = {"active": 0, "passive": 1}
_OBS_CODE = {"strangeness": 0, "lifetime": 1}
_OUT_CODE = {o.value: c for c, o in _OUT_INV.items()}
_CHAN_CODE = {ch.value: c for c, ch in _CHAN_INV.items()}


def read_events(path: str | Path, kind: str = "unknown",
                config: SimConfig | None = None) -> EventSet:
    """Parse an event file back into an EventSet; malformed rows raise a
    ValueError naming the line number."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != HEADER:
        raise ValueError(f"{path}: line 1: missing or wrong header")
    n = len(lines) - 1
    if n == 0:
        raise ValueError(f"{path}: no event records")
    cols = {}
    for prefix in ("l_", "r_"):
        cols[prefix + "proc"] = np.zeros(n, dtype=np.int8)
        cols[prefix + "obs"] = np.zeros(n, dtype=np.int8)
        cols[prefix + "out"] = np.full(n, -1, dtype=np.int8)
        cols[prefix + "time"] = np.full(n, np.nan)
        cols[prefix + "chan"] = np.full(n, -1, dtype=np.int8)
    for i, line in enumerate(lines[1:]):
        lineno = i + 2
        parts = line.split(",")
        if len(parts) != 11:
            raise ValueError(f"{path}: line {lineno}: expected 11 fields, "
                             f"got {len(parts)}")
        try:
            for prefix, fields in (("l_", parts[1:6]), ("r_", parts[6:11])):
                proc, obs, out, time, chan = fields
                if proc == "discarded":
                    continue
                cols[prefix + "proc"][i] = _PROC_CODE[proc]
                cols[prefix + "obs"][i] = _OBS_CODE[obs]
                cols[prefix + "out"][i] = _OUT_CODE[out]
                cols[prefix + "time"][i] = float(time)
                if chan:
                    cols[prefix + "chan"][i] = _CHAN_CODE[chan]
        except (KeyError, ValueError) as exc:
            raise ValueError(f"{path}: line {lineno}: malformed record "
                             f"({exc})") from None
    if config is None:
        config = SimConfig(n_pairs=n)
    return EventSet(kind=kind, config=config, **cols)
