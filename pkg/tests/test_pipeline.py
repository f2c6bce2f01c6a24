"""Batch pipeline tests.

A scenario with known ground truth is generated once per module; runs
against it must produce a complete, internally consistent, reproducible
workspace.  Reproducibility is enforced at the byte level across two
fresh workspace directories.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import time
from pathlib import Path

import pytest

from hubflow.analytics import FlowDirection
from hubflow.datagen import ScenarioConfig, generate, write_scenario
from hubflow.pipeline import (
    AnalysisBundle,
    PipelineConfig,
    PipelineInputError,
    StaleBundleError,
    load_bundle,
    pipeline_run,
)

D_START = dt.date(2011, 8, 12)
D_END = dt.date(2011, 8, 19)  # 8 days: last two become holdout

SMALL_IN = (0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0)
SMALL_OUT = (1.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 2.0)


def scenario_config(**overrides) -> ScenarioConfig:
    kwargs = dict(
        seed=5,
        start_date=D_START,
        end_date=D_END,
        inbound_means=SMALL_IN,
        outbound_means=SMALL_OUT,
    )
    kwargs.update(overrides)
    return ScenarioConfig(**kwargs)


@pytest.fixture(scope="module")
def scenario_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("scenario")
    write_scenario(scenario_config(), out)
    return out


@pytest.fixture(scope="module")
def bundle(scenario_dir, tmp_path_factory) -> AnalysisBundle:
    ws = tmp_path_factory.mktemp("workspace")
    return pipeline_run(scenario_dir / "pipeline_config.json", workspace=ws)


class TestRun:
    def test_counts_match_ground_truth(self, bundle):
        truth = generate(scenario_config())
        n_trips = sum(truth.truth_flows.values())
        counts = bundle.manifest["counts"]
        assert counts["trips"] == n_trips
        assert counts["records"] == 5 * n_trips
        assert counts["rejects"] == 0
        assert counts["tracks"] == n_trips
        assert counts["hub_events"] == n_trips

    def test_artifacts_exist(self, bundle):
        for name in bundle.manifest["artifacts"]:
            assert (bundle.workspace / name).is_file(), name
        assert "network.json" in bundle.manifest["artifacts"]

    def test_flows_match_truth(self, bundle):
        truth = generate(scenario_config())
        for direction in (FlowDirection.INBOUND, FlowDirection.OUTBOUND):
            series = bundle.flows[direction]
            for entry in series.entries:
                want = truth.truth_flows.get((entry.date, entry.period, direction.value), 0)
                assert entry.count == want

    def test_train_dates_exclude_holdout(self, bundle):
        manifest = bundle.manifest
        assert manifest["holdout_dates"] == ["2011-08-18", "2011-08-19"]
        assert manifest["train_dates"] == [
            (D_START + dt.timedelta(days=i)).isoformat() for i in range(6)
        ]
        assert manifest["date_range"] == {"start": "2011-08-12", "end": "2011-08-19"}

    def test_fits_present_with_validation(self, bundle):
        for direction in ("inbound", "outbound"):
            report = bundle.fit_reports[direction]
            assert "error" not in report
            assert report["model"]["periods"] == 12
            assert "validation" in report
            assert report["config_hash"] == bundle.config_hash
        fit = bundle.fit(FlowDirection.OUTBOUND)
        # Zero noise: the fit reproduces the per-period means exactly.
        assert fit.predict(5) == pytest.approx(3.0, abs=1e-8)
        assert fit.predict(12) == pytest.approx(2.0, abs=1e-8)
        validation = bundle.fit_reports["outbound"]["validation"]
        assert validation["mean_error_pct"] == pytest.approx(0.0, abs=1e-8)

    def test_od_conservation(self, bundle):
        eligible = [
            t
            for t in bundle.trips
            if bundle.od.window.contains(t.pickup_time) and not t.degenerate
        ]
        assert bundle.od.total_trips == len(eligible)
        assert sum(bundle.od.counts.values()) + bundle.od.unassigned == len(eligible)
        assert bundle.od.unassigned == 0

    def test_hub_zone_and_extent(self, bundle):
        truth = generate(scenario_config())
        assert bundle.hub_zone_id == truth.hub_zone_id
        assert "error" not in bundle.extent_doc
        assert bundle.extent_doc["q"] == 0.9
        assert bundle.extent_doc["radius_km"] > 0

    def test_accessibility_and_reliability_docs(self, bundle):
        for doc in (bundle.accessibility_doc, bundle.reliability_doc):
            assert doc["config_hash"] == bundle.config_hash
            assert len(doc["zones"]) == len(bundle.zones)
        reachable = [z for z in bundle.accessibility_doc["zones"] if z["reachable"]]
        assert reachable, "scenario hub departures must reach some zone"

    def test_congestion_rows_sorted_and_typed(self, bundle):
        keys = [(r["date"], r["zone_id"], r["period"]) for r in bundle.congestion_rows]
        assert keys == sorted(keys)
        assert all(r["samples"] >= 1 for r in bundle.congestion_rows)

    def test_load_bundle_round_trip(self, bundle):
        again = load_bundle(bundle.workspace)
        assert again.config_hash == bundle.config_hash
        assert again.manifest == bundle.manifest
        assert again.od.counts == bundle.od.counts
        assert len(again.trips) == len(bundle.trips)
        assert again.flows[FlowDirection.INBOUND] == bundle.flows[FlowDirection.INBOUND]
        assert again.network is not None


class TestDeterminism:
    def test_two_workspaces_byte_identical(self, scenario_dir, tmp_path):
        ws_a = tmp_path / "a"
        ws_b = tmp_path / "b"
        config_path = scenario_dir / "pipeline_config.json"
        bundle_a = pipeline_run(config_path, workspace=ws_a)
        bundle_b = pipeline_run(config_path, workspace=ws_b)
        assert bundle_a.config_hash == bundle_b.config_hash
        names = sorted(bundle_a.manifest["artifacts"]) + ["manifest.json"]
        for name in names:
            assert (ws_a / name).read_bytes() == (ws_b / name).read_bytes(), name

    def test_cache_hit_skips_rewrite(self, scenario_dir, tmp_path):
        ws = tmp_path / "ws"
        config_path = scenario_dir / "pipeline_config.json"
        pipeline_run(config_path, workspace=ws)
        stamps = {
            name: (ws / name).stat().st_mtime_ns
            for name in ("manifest.json", "trips.csv", "fit_outbound.json")
        }
        time.sleep(0.02)
        pipeline_run(config_path, workspace=ws)
        for name, stamp in stamps.items():
            assert (ws / name).stat().st_mtime_ns == stamp, name

    def test_force_recomputes(self, scenario_dir, tmp_path):
        ws = tmp_path / "ws"
        config_path = scenario_dir / "pipeline_config.json"
        pipeline_run(config_path, workspace=ws)
        before = (ws / "manifest.json").stat().st_mtime_ns
        time.sleep(0.02)
        pipeline_run(config_path, workspace=ws, force=True)
        assert (ws / "manifest.json").stat().st_mtime_ns > before

    def test_config_change_recomputes(self, scenario_dir, tmp_path):
        ws = tmp_path / "ws"
        config_path = scenario_dir / "pipeline_config.json"
        first = pipeline_run(config_path, workspace=ws)
        doc = json.loads(config_path.read_text())
        doc["service_extent_q"] = 0.5
        changed = tmp_path / "changed.json"
        changed.write_text(json.dumps(doc))
        # Point the relative inputs back at the scenario directory.
        config = PipelineConfig.from_dict(doc, base_dir=scenario_dir)
        second = pipeline_run(config, workspace=ws)
        assert second.config_hash != first.config_hash
        assert second.extent_doc["q"] == 0.5


class TestErrors:
    def test_missing_probe_csv(self, scenario_dir, tmp_path):
        doc = json.loads((scenario_dir / "pipeline_config.json").read_text())
        doc["probe_csv"] = "does-not-exist.csv"
        config = PipelineConfig.from_dict(doc, base_dir=scenario_dir)
        with pytest.raises(PipelineInputError, match="probe_csv"):
            pipeline_run(config, workspace=tmp_path / "ws")

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(PipelineInputError, match="not found"):
            pipeline_run(tmp_path / "nope.json", workspace=tmp_path / "ws")

    def test_invalid_config_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(PipelineInputError, match="valid JSON"):
            pipeline_run(bad, workspace=tmp_path / "ws")

    def test_config_requires_hub(self, scenario_dir):
        doc = json.loads((scenario_dir / "pipeline_config.json").read_text())
        del doc["hub"]
        with pytest.raises(PipelineInputError, match="hub"):
            PipelineConfig.from_dict(doc, base_dir=scenario_dir)

    def test_no_workspace_configured(self, scenario_dir):
        with pytest.raises(PipelineInputError, match="workspace"):
            pipeline_run(scenario_dir / "pipeline_config.json")

    def test_relative_paths_resolve_against_config_dir(self, scenario_dir):
        config = PipelineConfig.from_json(scenario_dir / "pipeline_config.json")
        assert config.probe_csv == scenario_dir / "probe.csv"
        assert config.zones_geojson == scenario_dir / "zones.geojson"


class TestPartialResults:
    def test_fit_failure_leaves_error_entry(self, tmp_path):
        # One day of data: 12 observations cannot support the 12-term model.
        out = tmp_path / "oneday"
        write_scenario(scenario_config(end_date=D_START), out)
        bundle = pipeline_run(out / "pipeline_config.json", workspace=tmp_path / "ws")
        for direction in ("inbound", "outbound"):
            report = bundle.fit_reports[direction]
            assert "error" in report
            assert report["config_hash"] == bundle.config_hash
        with pytest.raises(RuntimeError, match="no usable"):
            bundle.fit(FlowDirection.OUTBOUND)
        # The rest of the bundle is still written and loadable.
        assert (bundle.workspace / "od_matrix.csv").is_file()
        assert load_bundle(bundle.workspace).od.counts == bundle.od.counts

    def test_stale_fit_artifact_detected(self, scenario_dir, tmp_path):
        ws = tmp_path / "ws"
        pipeline_run(scenario_dir / "pipeline_config.json", workspace=ws)
        doc = json.loads((ws / "fit_outbound.json").read_text())
        doc["config_hash"] = "0" * 64
        (ws / "fit_outbound.json").write_text(json.dumps(doc))
        with pytest.raises(StaleBundleError, match="fit_outbound"):
            load_bundle(ws)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(PipelineInputError, match="manifest"):
            load_bundle(tmp_path)
