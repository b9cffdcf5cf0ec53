"""
JSON-file store for simulation runs.

Reads and writes go through aiofiles so the API's event loop never blocks
on disk. The file (and its directory) is created on the first write.
"""

import asyncio
import json
import logging
import weakref
from pathlib import Path

import aiofiles

from ramplab.config import get_settings
from ramplab.models import SimulationRecord

logger = logging.getLogger(__name__)

_locks: weakref.WeakKeyDictionary[asyncio.AbstractEventLoop, asyncio.Lock] = weakref.WeakKeyDictionary()


def results_path() -> Path:
    """Store location, read from the settings at call time."""
    return get_settings().results_file


def _store_lock() -> asyncio.Lock:
    """Serialises access to the store file; one lock per event loop."""
    return _locks.setdefault(asyncio.get_running_loop(), asyncio.Lock())


async def _read_records() -> list[dict]:
    path = results_path()
    if not path.exists():
        return []
    async with aiofiles.open(path, "r", encoding="utf-8") as f:
        content = await f.read()
    return json.loads(content) if content.strip() else []


async def _write_records(records: list[dict]) -> None:
    path = results_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(path, "w", encoding="utf-8") as f:
        await f.write(json.dumps(records, indent=2, default=str))


async def save_simulation_record(record: SimulationRecord) -> None:
    """Append a run to the store."""
    async with _store_lock():
        records = await _read_records()
        records.append(record.model_dump(mode="json"))
        await _write_records(records)
    logger.info("Stored simulation %s (%d runs on file)", record.simulation_id, len(records))


async def get_simulation_record(simulation_id: str) -> SimulationRecord | None:
    async with _store_lock():
        records = await _read_records()
    for record in records:
        if record["simulation_id"] == simulation_id:
            return SimulationRecord.model_validate(record)
    return None


async def get_all_simulation_records() -> list[SimulationRecord]:
    async with _store_lock():
        records = await _read_records()
    return [SimulationRecord.model_validate(r) for r in records]


async def delete_simulation_record(simulation_id: str) -> bool:
    """
    Remove a run.

    Returns:
        True if deleted, False if not found
    """
    async with _store_lock():
        records = await _read_records()
        kept = [r for r in records if r["simulation_id"] != simulation_id]
        if len(kept) == len(records):
            return False
        await _write_records(kept)
    return True
