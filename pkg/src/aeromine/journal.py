"""Append-only experiment journal.

The journal is the system of record: a header line (format version, the
fully resolved run configuration, seed) followed by one JSON record per
evaluated array.  Every line is independently parseable and appends are
flushed before the engine proceeds, so any prefix truncated at a line
boundary is itself a valid journal.  Floats serialize via repr and
round-trip exactly.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, config_from_dict, config_to_dict
from .design_space import Genome
from .oracle import ArrayConfiguration, Measurement, aggregate_fitness

FORMAT_VERSION = 1

PROPOSAL_SOURCES = ("seed-human", "seed-random", "surrogate", "baseline", "fallback-mutation")


class JournalError(ValueError):
    pass


@dataclass
class EvaluationRecord:
    record_id: int
    round: int                 # 0 for seeding, mining rounds count from 1
    position: int              # 0-based
    source: str
    configuration: ArrayConfiguration
    readings: np.ndarray
    fitness: float
    provenance: str
    pending_id: str | None = None
    timestamp: float = 0.0

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "round": self.round,
            "position": self.position,
            "source": self.source,
            "genomes": [list(g.values) for g in self.configuration.genomes],
            "spacing": self.configuration.spacing,
            "wind_speeds": list(self.configuration.wind_speeds),
            "readings": [[float(x) for x in row] for row in np.asarray(self.readings)],
            "fitness": self.fitness,
            "provenance": self.provenance,
            "pending_id": self.pending_id,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationRecord":
        config = ArrayConfiguration(
            genomes=tuple(Genome(tuple(v)) for v in d["genomes"]),
            spacing=d["spacing"],
            wind_speeds=tuple(d["wind_speeds"]),
        )
        return cls(
            record_id=d["record_id"],
            round=d["round"],
            position=d["position"],
            source=d["source"],
            configuration=config,
            readings=np.array(d["readings"], dtype=float),
            fitness=d["fitness"],
            provenance=d["provenance"],
            pending_id=d.get("pending_id"),
            timestamp=d.get("timestamp", 0.0),
        )


def record_from_measurement(record_id: int, round_idx: int, position: int, source: str,
                            config: ArrayConfiguration, measurement: Measurement,
                            pending_id: str | None = None) -> EvaluationRecord:
    if source not in PROPOSAL_SOURCES:
        raise JournalError(f"unknown proposal source {source!r}")
    return EvaluationRecord(
        record_id=record_id,
        round=round_idx,
        position=position,
        source=source,
        configuration=config,
        readings=measurement.readings,
        fitness=measurement.fitness,
        provenance=measurement.provenance,
        pending_id=pending_id,
        timestamp=measurement.timestamp,
    )


class JournalWriter:
    """Single-writer append log; one flushed line per record, header first."""

    def __init__(self, path, config: RunConfig):
        self.path = str(path)
        self._last_id = 0
        self._f = open(self.path, "w", encoding="utf-8")
        header = {
            "format_version": FORMAT_VERSION,
            "seed": config.seed,
            "config": config_to_dict(config),
        }
        self._write_line(header)

    def _write_line(self, doc: dict):
        self._f.write(json.dumps(doc) + "\n")
        self._f.flush()
        os.fsync(self._f.fileno())

    def append(self, record: EvaluationRecord):
        if record.record_id != self._last_id + 1:
            raise JournalError(
                f"non-contiguous id {record.record_id} after {self._last_id}")
        self._write_line(record.to_dict())
        self._last_id = record.record_id

    @property
    def last_id(self) -> int:
        return self._last_id

    def close(self):
        if not self._f.closed:
            self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass
class LoadedJournal:
    config: RunConfig
    records: list[EvaluationRecord]
    truncated_tail: bool = False


def load(path) -> LoadedJournal:
    """Parse a journal file; tolerates (and flags) a partial final line."""
    with open(path, "r", encoding="utf-8") as f:
        raw = f.read()
    if not raw:
        raise JournalError("missing header")
    lines = raw.split("\n")
    truncated = False
    if lines and lines[-1] == "":
        lines.pop()
    elif lines:
        lines.pop()           # partial final line, no newline terminator
        truncated = True

    if not lines:
        raise JournalError("missing header")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise JournalError(f"corrupt header: {e}") from e
    if header.get("format_version") != FORMAT_VERSION:
        raise JournalError(f"unsupported version {header.get('format_version')!r}")
    config = config_from_dict(header["config"])

    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            records.append(EvaluationRecord.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError) as e:
            raise JournalError(f"corrupt record at line {lineno}: {e}") from e
    for prev, rec in zip([0] + [r.record_id for r in records], records):
        if rec.record_id != prev + 1:
            raise JournalError(f"non-contiguous record id {rec.record_id}")
        if rec.fitness != aggregate_fitness(rec.readings):
            raise JournalError(f"record {rec.record_id}: fitness does not match readings")
    return LoadedJournal(config=config, records=records, truncated_tail=truncated)


def resume(config: RunConfig, records: list[EvaluationRecord]):
    """Rebuild engine state by deterministic replay of journal records."""
    from .engine import Engine
    eng = Engine(config, oracle=None, writer=None, replay=records)
    eng.run(stop_on_replay_exhausted=True)
    return eng.state


def canonical_lines(path) -> list[str]:
    """Journal lines re-serialized with timestamps zeroed, for determinism diffs."""
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            doc.pop("timestamp", None)
            out.append(json.dumps(doc, sort_keys=True))
    return out


EXPORT_COLUMNS = ("record_id", "round", "position", "source", "provenance",
                  "pending_id", "spacing", "fitness", "wind_speeds", "genomes",
                  "readings", "timestamp")


def export_csv(journal_path, out_path) -> int:
    """Flatten a journal into a fixed-column CSV; returns the row count."""
    import csv

    loaded = load(journal_path)
    with open(out_path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(EXPORT_COLUMNS)
        for r in loaded.records:
            d = r.to_dict()
            w.writerow([
                d["record_id"], d["round"], d["position"], d["source"],
                d["provenance"], d["pending_id"] or "", repr(d["spacing"]),
                repr(d["fitness"]), json.dumps(d["wind_speeds"]),
                json.dumps(d["genomes"]), json.dumps(d["readings"]),
                repr(d["timestamp"]),
            ])
    return len(loaded.records)
