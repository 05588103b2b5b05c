"""HTTP facade over the engine for the operator console.

Runs execute in-process on background threads; every state change flows
through the journal, so killing and restarting the service against the
same data directory loses no accepted submissions.  Mutating endpoints
take client-supplied idempotency keys and replay the original response on
retry.  Progress is pushed as server-sent events with last-event-id
resume.

Endpoints (see docs/api.md for schemas), all under /api/v1:

    POST /runs
    GET  /runs/{id}
    GET  /runs/{id}/pending
    POST /runs/{id}/results
    GET  /runs/{id}/archive?position=p
    GET  /runs/{id}/surrogate/{p}
    GET  /runs/{id}/events
"""

from __future__ import annotations

import asyncio
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse

from . import journal as jr
from .config import ConfigError, RunConfig, config_from_dict, config_to_dict
from .engine import Engine
from .oracle import (AlreadySubmittedError, ManualOracle, ManualQueue,
                     OracleError, SyntheticOracle, UnknownPendingError)
from .surrogate import diagnostics


def _config_payload(config, space) -> dict:
    """Raw parameter values with names/units, ready for display."""
    positions = []
    for genome in config.genomes:
        positions.append([
            {"name": p.name, "value": v, "units": p.units, "kind": p.kind}
            for p, v in zip(space.parameters, genome.values)
        ])
    return {
        "positions": positions,
        "spacing": config.spacing,
        "wind_speeds": list(config.wind_speeds),
    }


@dataclass
class RunHandle:
    run_id: str
    config: RunConfig
    engine: Engine
    thread: threading.Thread
    journal_path: str
    queue: ManualQueue | None = None
    events: list[dict] = field(default_factory=list)
    cond: threading.Condition = field(default_factory=threading.Condition)
    idempotency: dict[str, dict] = field(default_factory=dict)
    error: str | None = None

    def emit(self, event: str, data: dict):
        with self.cond:
            data = dict(data)
            data["event_id"] = len(self.events) + 1
            self.events.append({"event": event, "data": data})
            self.cond.notify_all()


class RunRegistry:
    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.runs: dict[str, RunHandle] = {}
        self.idempotency: dict[str, dict] = {}
        self._lock = threading.Lock()

    def start_run(self, config: RunConfig, baseline: bool = False) -> RunHandle:
        run_id = uuid.uuid4().hex[:12]
        journal_path = str(self.data_dir / f"{run_id}.journal")
        writer = jr.JournalWriter(journal_path, config)

        queue = None
        if config.oracle_kind == "manual":
            queue = ManualQueue()
            oracle = ManualOracle(queue)
        else:
            oracle = SyntheticOracle(config.space, config.constants)

        handle: RunHandle

        def on_record(rec):
            handle.emit("record", {
                "record_id": rec.record_id,
                "round": rec.round,
                "position": rec.position,
                "source": rec.source,
                "fitness": rec.fitness,
                "best_fitness": engine.state.best_fitness,
                "oracle_calls": engine.state.oracle_calls,
            })

        def on_status(status):
            handle.emit("status", {"status": status})

        engine = Engine(config, oracle=oracle, writer=writer, baseline=baseline,
                        on_record=on_record, on_status=on_status)

        def worker():
            try:
                engine.run()
            except Exception as e:  # surfaced via GET /runs/{id}
                handle.error = str(e)
                engine.state.status = "cancelled"
                handle.emit("status", {"status": "cancelled", "error": str(e)})
            finally:
                writer.close()

        thread = threading.Thread(target=worker, daemon=True)
        handle = RunHandle(run_id=run_id, config=config, engine=engine,
                           thread=thread, journal_path=journal_path, queue=queue)
        if queue is not None:
            queue.on_propose = lambda pend: handle.emit("pending", {
                "pending_id": pend.pending_id,
                "issued_at": pend.issued_at,
                "configuration": _config_payload(pend.configuration, config.space),
            })
        with self._lock:
            self.runs[run_id] = handle
        thread.start()
        return handle

    def get(self, run_id: str) -> RunHandle:
        handle = self.runs.get(run_id)
        if handle is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
        return handle


def create_app(data_dir) -> FastAPI:
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="aeromine service")
    registry = RunRegistry(data_dir)
    app.state.registry = registry

    @app.post("/api/v1/runs", status_code=201)
    async def create_run(body: dict):
        idem = body.get("idempotency_key")
        if idem and idem in registry.idempotency:
            return JSONResponse(registry.idempotency[idem], status_code=201)
        try:
            config = config_from_dict(body.get("config", {}))
        except ConfigError as e:
            raise HTTPException(status_code=400, detail=e.violations)
        handle = registry.start_run(config, baseline=bool(body.get("baseline", False)))
        resp = {"run_id": handle.run_id, "journal": handle.journal_path,
                "status": handle.engine.state.status}
        if idem:
            registry.idempotency[idem] = resp
        return JSONResponse(resp, status_code=201)

    @app.get("/api/v1/runs/{run_id}")
    async def get_run(run_id: str):
        h = registry.get(run_id)
        st = h.engine.state
        best = None
        if st.best_configuration is not None:
            best = _config_payload(st.best_configuration, h.config.space)
        return {
            "run_id": run_id,
            "status": st.status,
            "oracle_calls": st.oracle_calls,
            "budget": h.config.budget,
            "round": st.round_index,
            "best_fitness": None if st.best_fitness == float("-inf") else st.best_fitness,
            "best_configuration": best,
            "elites": [
                None if p.elite_genome is None else {
                    "fitness": p.elite_fitness,
                    "parameters": [
                        {"name": sp.name, "value": v, "units": sp.units}
                        for sp, v in zip(h.config.space.parameters, p.elite_genome.values)
                    ],
                }
                for p in st.positions
            ],
            "error": h.error,
        }

    @app.get("/api/v1/runs/{run_id}/pending")
    async def get_pending(run_id: str):
        h = registry.get(run_id)
        if h.queue is None:
            return {"pending": []}
        return {"pending": [
            {
                "pending_id": p.pending_id,
                "issued_at": p.issued_at,
                "status": p.status,
                "configuration": _config_payload(p.configuration, h.config.space),
            }
            for p in sorted(h.queue.awaiting(), key=lambda p: p.issued_at)
        ]}

    @app.post("/api/v1/runs/{run_id}/results")
    async def submit_result(run_id: str, body: dict):
        h = registry.get(run_id)
        if h.queue is None:
            raise HTTPException(status_code=409, detail="run has no manual queue")
        idem = body.get("idempotency_key")
        if idem and idem in h.idempotency:
            return h.idempotency[idem]
        pending_id = body.get("pending_id")
        readings = body.get("readings")
        pend = h.queue.get(pending_id) if pending_id else None
        if pend is not None:
            expected = (len(pend.configuration.wind_speeds),
                        pend.configuration.n_positions)
            cells = []
            arr = readings if isinstance(readings, list) else []
            for i in range(expected[0]):
                row = arr[i] if i < len(arr) else []
                for j in range(expected[1]):
                    v = row[j] if isinstance(row, list) and j < len(row) else None
                    if not isinstance(v, (int, float)) or not np.isfinite(v):
                        cells.append({"speed_index": i, "position": j,
                                      "problem": "missing or non-finite"})
            shape_ok = (isinstance(arr, list) and len(arr) == expected[0]
                        and all(isinstance(r, list) and len(r) == expected[1] for r in arr))
            if cells or not shape_ok:
                raise HTTPException(status_code=400, detail={
                    "message": "readings do not match the pending configuration",
                    "expected_shape": list(expected),
                    "cells": cells,
                })
        try:
            m = h.queue.submit(pending_id, np.array(readings, dtype=float))
        except UnknownPendingError as e:
            raise HTTPException(status_code=404, detail=str(e))
        except AlreadySubmittedError as e:
            raise HTTPException(status_code=409, detail=str(e))
        except OracleError as e:
            raise HTTPException(status_code=400, detail=str(e))
        ack = {"pending_id": pending_id, "fitness": m.fitness, "status": "submitted"}
        if idem:
            h.idempotency[idem] = ack
        return ack

    @app.get("/api/v1/runs/{run_id}/archive")
    async def get_archive(run_id: str, position: int | None = None):
        h = registry.get(run_id)
        records = []
        for p, ps in enumerate(h.engine.state.positions):
            if position is not None and p != position:
                continue
            records.extend(r.to_dict() for r in ps.archive)
        records.sort(key=lambda r: r["record_id"])
        return {"records": records}

    @app.get("/api/v1/runs/{run_id}/surrogate/{position}")
    async def get_surrogate(run_id: str, position: int):
        h = registry.get(run_id)
        st = h.engine.state
        if not 0 <= position < len(st.positions):
            raise HTTPException(status_code=404, detail="unknown position")
        ps = st.positions[position]
        if ps.model is None:
            return {"fitted": False}
        data = h.engine._training_data(position)
        return {"fitted": True, **diagnostics(ps.model, data)}

    @app.get("/api/v1/runs/{run_id}/events")
    async def get_events(run_id: str, request: Request):
        h = registry.get(run_id)
        last_id = 0
        header = request.headers.get("last-event-id")
        if header is None:
            header = request.query_params.get("last_event_id")
        if header:
            last_id = int(header)

        async def stream(cursor: int):
            while True:
                with h.cond:
                    batch = h.events[cursor:]
                    cursor = len(h.events)
                    done = (not batch
                            and h.engine.state.status in ("finished", "cancelled"))
                for item in batch:
                    yield (f"id: {item['data']['event_id']}\n"
                           f"event: {item['event']}\n"
                           f"data: {json.dumps(item['data'])}\n\n")
                if done or await request.is_disconnected():
                    return
                if not batch:
                    await asyncio.sleep(0.05)

        return StreamingResponse(stream(last_id), media_type="text/event-stream")

    return app


def serve(bind: str, data_dir) -> None:
    import uvicorn

    host, _, port = bind.rpartition(":")
    uvicorn.run(create_app(data_dir), host=host or "127.0.0.1", port=int(port))
