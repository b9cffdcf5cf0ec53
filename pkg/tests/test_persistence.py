"""Tests for the JSON simulation store."""

import asyncio
from datetime import datetime, timezone

import pytest

from ramplab.config import get_settings
from ramplab.models import EstimatorSummary, SimReport, SimScenario, SimulationRecord
from ramplab.persistence import (
    delete_simulation_record,
    get_all_simulation_records,
    get_simulation_record,
    save_simulation_record,
)


def make_record(simulation_id, ape1=0.1):
    report = SimReport(
        title="No interaction, x1 normal, x2 sym. binary, u ~ U(-0.5, 0.5)",
        scenario=SimScenario(design="sym", error_law="uniform", reps=2, n_obs=100),
        reps_completed=2,
        p_y1=0.5,
        p_band=0.9,
        summaries=[EstimatorSummary(estimator="truth", ape1_mean=ape1, n_ok=2)],
    )
    return SimulationRecord(
        simulation_id=simulation_id,
        report=report,
        timestamp=datetime.now(timezone.utc),
    )


@pytest.mark.asyncio
async def test_save_and_retrieve_record(results_file):
    """A stored run comes back unchanged."""
    record = make_record("sim_123")
    await save_simulation_record(record)

    retrieved = await get_simulation_record("sim_123")

    assert retrieved is not None
    assert retrieved.simulation_id == "sim_123"
    assert retrieved.report.summary("truth").ape1_mean == 0.1
    assert retrieved.report.scenario == record.report.scenario


@pytest.mark.asyncio
async def test_file_created_on_first_write(tmp_path, monkeypatch):
    """The store and its directory appear only when something is saved."""
    path = tmp_path / "nested" / "results.json"
    monkeypatch.setenv("RAMPLAB_RESULTS_FILE", str(path))
    get_settings.cache_clear()

    assert await get_all_simulation_records() == []
    assert not path.exists()

    await save_simulation_record(make_record("sim_first"))
    assert path.exists()


@pytest.mark.asyncio
async def test_get_nonexistent_record(results_file):
    assert await get_simulation_record("nonexistent") is None


@pytest.mark.asyncio
async def test_delete_record(results_file):
    """Deleting removes the run and reports whether it existed."""
    await save_simulation_record(make_record("sim_delete"))

    assert await delete_simulation_record("sim_delete")
    assert await get_simulation_record("sim_delete") is None
    assert not await delete_simulation_record("sim_delete")


@pytest.mark.asyncio
async def test_get_all_records(results_file):
    for i in range(3):
        await save_simulation_record(make_record(f"sim_{i}", ape1=0.1 * i))

    records = await get_all_simulation_records()
    assert [r.simulation_id for r in records] == ["sim_0", "sim_1", "sim_2"]


@pytest.mark.asyncio
async def test_concurrent_saves_keep_every_record(results_file):
    await asyncio.gather(*(save_simulation_record(make_record(f"sim_{i}")) for i in range(10)))

    records = await get_all_simulation_records()
    assert sorted(r.simulation_id for r in records) == sorted(f"sim_{i}" for i in range(10))
