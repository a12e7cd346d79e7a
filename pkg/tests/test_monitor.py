import pytest

from helpers_sim import ALICE, jdl_text, shipped_sim, small_sim
from worldgrid import errors
from worldgrid.fabric.scenario import FailureSpec
from worldgrid.monitor import DOWN, MonitorCenter, UP, WARN, export_map, parse_map


class TestProbes:
    def test_all_up_when_healthy(self):
        sim = small_sim()
        results = sim.monitor.run_probes()
        assert results and all(r.status == UP for r in results)

    def test_failure_window_turns_exactly_that_probe_down(self):
        sim = small_sim(mutate=lambda s: s.failures.append(
            FailureSpec("alpha", "gatekeeper", 0.0, 100.0)
        ))
        results = sim.monitor.run_probes()
        downs = [r for r in results if r.status == DOWN]
        assert [(r.site, r.kind) for r in downs] == [("alpha", "gatekeeper")]
        sim.advance(150)
        assert all(r.status == UP for r in sim.monitor.run_probes())

    def test_stale_crl_warns_on_gatekeeper_probe(self):
        # initial fetch at t=0 succeeds, then alpha's CRL cron is blocked for
        # good; its copy expires at t=900
        sim = small_sim(mutate=lambda s: s.failures.append(
            FailureSpec("alpha", "crl", 1.0, 10_000.0)
        ))
        sim.advance(800)
        assert all(r.status == UP for r in sim.monitor.run_probes())
        sim.advance(150)  # now 950 > 900
        results = sim.monitor.run_probes()
        warned = [(r.site, r.kind) for r in results if r.status == WARN]
        assert warned == [("alpha", "gatekeeper")]

    def test_stale_registration_warns_on_gris_probe(self):
        # gris outage longer than the ttl, observed after the window closes
        # but before the next refresh re-registers
        sim = small_sim(mutate=lambda s: s.failures.append(
            FailureSpec("beta", "gris", 100.0, 161.0)
        ))
        sim.advance(170)
        snapshot = sim.monitor.aggregate("site", "beta")
        gris_status = next(
            s for s in snapshot.sites[0].services if s.kind == "gris"
        )
        assert gris_status.status == WARN
        assert snapshot.sites[0].rollup == WARN
        sim.advance(40)  # refresh at 180 re-registered
        snapshot = sim.monitor.aggregate("site", "beta")
        assert snapshot.sites[0].rollup == UP

    def test_history_ring_bounded(self):
        sim = small_sim()
        sim.monitor.history = type(sim.monitor.history)(maxlen=10)
        for _ in range(5):
            sim.monitor.run_probes()
        assert len(sim.monitor.history) == 10


class TestAggregate:
    def test_vo_filter_scans_authorized_vos(self):
        sim = small_sim(gamma_vos="ivdgl")
        snapshot = sim.monitor.aggregate("vo", "datatag")
        expected = {
            ce.site_id for ce in sim.fabric.ces.values() if "datatag" in ce.authorized_vos
        }
        assert {s.id for s in snapshot.sites} == expected
        assert "gamma" not in {s.id for s in snapshot.sites}

    def test_none_filter_includes_all_sites(self):
        sim = small_sim()
        snapshot = sim.monitor.aggregate()
        assert {s.id for s in snapshot.sites} == set(sim.fabric.sites)

    def test_country_filter(self):
        sim = shipped_sim()
        snapshot = sim.monitor.aggregate("country", "IT")
        assert {s.id for s in snapshot.sites} == {"bologna", "milano", "padova"}

    @pytest.mark.parametrize(
        "kind,value",
        [("vo", "cms"), ("country", "XX"), ("site", "atlantis"), ("magic", "x")],
    )
    def test_unknown_filter_value(self, kind, value):
        sim = small_sim()
        with pytest.raises(errors.UnknownFilterValue):
            sim.monitor.aggregate(kind, value)

    def test_filtered_site_set_is_subset_of_unfiltered(self):
        sim = shipped_sim()
        everything = {s.id for s in sim.monitor.aggregate().sites}
        for kind, value in (("vo", "datatag"), ("country", "US"), ("site", "bologna")):
            subset = {s.id for s in sim.monitor.aggregate(kind, value).sites}
            assert subset <= everything

    def test_metrics_reflect_load(self):
        sim = small_sim(alpha_cpus=2)
        sim.wms.submit(jdl_text(), ALICE, "rb-edg")
        sim.wms.submit(jdl_text(), ALICE, "rb-edg")
        sim.advance(5)
        snapshot = sim.monitor.aggregate("site", "alpha")
        metrics = snapshot.sites[0].metrics
        assert metrics["load"] == 1.0
        assert 0 <= metrics["disk"] <= 1


class TestExport:
    def test_empty_fabric_exports_valid_document(self):
        from worldgrid.fabric import parse_scenario
        from worldgrid.simulation import Simulation

        sim = Simulation(parse_scenario("[defaults]\nrefresh_period = 30\n"))
        text = export_map(sim.monitor.aggregate())
        parsed = parse_map(text)
        assert parsed.sites == []

    def test_shipped_scenario_exports_17_sites_with_coordinates(self):
        sim = shipped_sim()
        snapshot = sim.monitor.aggregate()
        text = export_map(snapshot)
        parsed = parse_map(text)
        assert len(parsed.sites) == 17
        assert all(s.coords != (0.0, 0.0) for s in parsed.sites)

    def test_round_trip_field_for_field(self):
        sim = small_sim(mutate=lambda s: s.failures.append(
            FailureSpec("alpha", "gridftp", 0.0, 50.0)
        ))
        sim.advance(10)
        snapshot = sim.monitor.aggregate()
        parsed = parse_map(export_map(snapshot))
        assert parsed == snapshot

    def test_colors_track_rollup(self):
        import json

        sim = small_sim(mutate=lambda s: s.failures.append(
            FailureSpec("alpha", "gatekeeper", 0.0, 50.0)
        ))
        doc = json.loads(export_map(sim.monitor.aggregate()))
        by_id = {s["id"]: s for s in doc["sites"]}
        assert by_id["alpha"]["color"] == "red"
        assert by_id["beta"]["color"] == "green"
