import random

import pytest

from worldgrid import errors
from worldgrid.auth import GridFlavor
from worldgrid.datamgmt import (
    LogicalFileName,
    PhysicalFileName,
    ReplicaCatalog,
    ReplicaManager,
)
from worldgrid.fabric.model import (
    Connectivity,
    Endpoint,
    Fabric,
    GB,
    MB,
    Site,
    StorageElementSim,
)


def small_fabric(se_capacity=1 * GB):
    fabric = Fabric()
    for sid, continent in [("bologna", "EU"), ("boston", "US")]:
        fabric.sites[sid] = Site(
            id=sid, country="IT" if continent == "EU" else "US", continent=continent,
            coords=(0.0, 0.0), flavor=GridFlavor.EDG, lrms="PBS", worker_nodes=2,
        )
        fabric.ses[f"se.{sid}"] = StorageElementSim(
            id=f"se.{sid}", site_id=sid, total_bytes=se_capacity
        )
    fabric.ui_site = "bologna"
    return fabric


def lfn(text="lfn:/datatag/run42/out.dat"):
    return LogicalFileName(text)


class TestLfn:
    def test_parses_vo_and_path(self):
        f = lfn()
        assert f.vo == "datatag"
        assert f.path == "run42/out.dat"

    @pytest.mark.parametrize("bad", ["", "out.dat", "lfn:/", "lfn:/vo", "lfn:/vo/", "lfn://x"])
    def test_malformed_rejected(self, bad):
        with pytest.raises(errors.BadLfn):
            LogicalFileName(bad)


class TestCopyAndRegister:
    def setup_method(self):
        self.fabric = small_fabric()
        self.mgr = ReplicaManager(self.fabric, ReplicaCatalog("rc-central"))

    def test_wn_output_to_close_se(self):
        self.fabric.sites["bologna"].scratch["out.dat"] = 5 * MB
        pfn = self.mgr.copy_and_register(
            Endpoint("wn", "bologna", "out.dat"), "se.bologna", lfn()
        )
        assert pfn.se == "se.bologna" and pfn.size == 5 * MB
        assert self.mgr.list_replicas(lfn()) == [pfn]
        assert self.fabric.ses["se.bologna"].files[pfn.path] == 5 * MB
        self.mgr.check_consistency()

    def test_dest_full_leaves_catalogue_unchanged(self):
        fabric = small_fabric(se_capacity=1 * MB)
        mgr = ReplicaManager(fabric, ReplicaCatalog("rc"))
        fabric.ui_files["big.dat"] = 2 * MB
        with pytest.raises(errors.NoSpace):
            mgr.copy_and_register(Endpoint("ui", "", "big.dat"), "se.bologna", lfn())
        assert mgr.list_replicas(lfn()) == []
        assert fabric.ses["se.bologna"].files == {}

    def test_wn_outbound_disabled_denied(self):
        self.fabric.sites["bologna"].connectivity = Connectivity(wn_outbound=False)
        self.fabric.sites["bologna"].scratch["out.dat"] = 1 * MB
        with pytest.raises(errors.ConnectivityDenied):
            self.mgr.copy_and_register(
                Endpoint("wn", "bologna", "out.dat"), "se.bologna", lfn()
            )
        # the UI is not a worker: still allowed
        self.fabric.ui_files["in.dat"] = 1 * MB
        self.mgr.copy_and_register(Endpoint("ui", "", "in.dat"), "se.bologna", lfn())

    def test_source_missing(self):
        with pytest.raises(errors.SourceMissing):
            self.mgr.copy_and_register(Endpoint("ui", "", "ghost"), "se.bologna", lfn())

    def test_size_mismatch_rejected(self):
        self.fabric.ui_files["a"] = 1 * MB
        self.fabric.ui_files["b"] = 2 * MB
        self.mgr.copy_and_register(Endpoint("ui", "", "a"), "se.bologna", lfn())
        with pytest.raises(errors.BadLfn):
            self.mgr.copy_and_register(Endpoint("ui", "", "b"), "se.boston", lfn())


class TestReplicate:
    def setup_method(self):
        self.fabric = small_fabric()
        self.mgr = ReplicaManager(self.fabric, ReplicaCatalog("rc-central"))
        self.fabric.ui_files["data"] = 3 * MB
        self.mgr.copy_and_register(Endpoint("ui", "", "data"), "se.bologna", lfn())

    def test_second_replica_across_the_ocean(self):
        pfn = self.mgr.replicate(lfn(), "se.boston")
        assert {p.se for p in self.mgr.list_replicas(lfn())} == {"se.bologna", "se.boston"}
        assert pfn.size == 3 * MB
        self.mgr.check_consistency()

    def test_unknown_lfn(self):
        with pytest.raises(errors.UnknownLfn):
            self.mgr.replicate(lfn("lfn:/datatag/none/x"), "se.boston")

    def test_idempotent_on_existing_target(self):
        first = self.mgr.list_replicas(lfn())[0]
        again = self.mgr.replicate(lfn(), "se.bologna")
        assert again == first
        assert len(self.mgr.list_replicas(lfn())) == 1


class TestUnregister:
    def setup_method(self):
        self.fabric = small_fabric()
        self.mgr = ReplicaManager(self.fabric, ReplicaCatalog("rc-central"))
        self.fabric.ui_files["data"] = 3 * MB
        self.mgr.copy_and_register(Endpoint("ui", "", "data"), "se.bologna", lfn())
        self.mgr.replicate(lfn(), "se.boston")

    def test_remove_one_of_two(self):
        a, b = self.mgr.list_replicas(lfn())
        self.mgr.unregister(lfn(), a)
        assert self.mgr.list_replicas(lfn()) == [b]

    def test_remove_last_removes_lfn(self):
        for pfn in list(self.mgr.list_replicas(lfn())):
            self.mgr.unregister(lfn(), pfn)
        assert self.mgr.list_replicas(lfn()) == []
        assert not self.mgr.catalog.known(lfn())

    def test_unknown_pair(self):
        ghost = PhysicalFileName("gsiftp", "se.bologna", "/data/none", 1)
        with pytest.raises(errors.UnknownPair):
            self.mgr.unregister(lfn("lfn:/datatag/none/x"), ghost)
        with pytest.raises(errors.UnknownPair):
            self.mgr.unregister(lfn(), ghost)


def test_dump_sorted_and_stable():
    fabric = small_fabric()
    mgr = ReplicaManager(fabric, ReplicaCatalog("rc"))
    fabric.ui_files["a"] = 1 * MB
    fabric.ui_files["b"] = 2 * MB
    mgr.copy_and_register(Endpoint("ui", "", "b"), "se.boston", lfn("lfn:/ivdgl/z/b"))
    mgr.copy_and_register(Endpoint("ui", "", "a"), "se.bologna", lfn("lfn:/datatag/a/a"))
    mgr.replicate(lfn("lfn:/datatag/a/a"), "se.boston")
    dump = mgr.catalog.dump()
    assert dump.splitlines() == sorted(dump.splitlines())
    assert "lfn:/datatag/a/a gsiftp://se.bologna/data/datatag/a/a 1000000" in dump


def test_random_op_sequences_agree_with_reference_model():
    # model: dict lfn -> set of (se, path, size); replayed on every step
    rng = random.Random(20021116)
    lfn_pool = [f"lfn:/datatag/set{i}/file{i}.dat" for i in range(6)]
    se_pool = ["se.bologna", "se.boston"]
    for trial in range(60):
        fabric = small_fabric(se_capacity=20 * MB)
        mgr = ReplicaManager(fabric, ReplicaCatalog("rc"))
        for i in range(6):
            fabric.ui_files[f"src{i}"] = (i + 1) * MB
        model: dict[str, set] = {}
        for step in range(40):
            op = rng.choice(["copy", "replicate", "unregister", "list"])
            name = rng.choice(lfn_pool)
            f = LogicalFileName(name)
            se = rng.choice(se_pool)
            if op == "copy":
                idx = int(name[len("lfn:/datatag/set")])
                src = Endpoint("ui", "", f"src{idx}")
                path = f"/data/datatag/set{idx}/file{idx}.dat"
                size = (idx + 1) * MB
                try:
                    mgr.copy_and_register(src, se, f)
                except errors.NoSpace:
                    continue
                model.setdefault(name, set()).add((se, path, size))
            elif op == "replicate":
                try:
                    mgr.replicate(f, se)
                except errors.UnknownLfn:
                    assert name not in model
                    continue
                except errors.NoSpace:
                    continue
                (se0, path, size) = next(iter(sorted(model[name])))
                model[name].add((se, path, size))
            elif op == "unregister":
                existing = sorted(model.get(name, set()))
                if existing and rng.random() < 0.8:
                    victim = rng.choice(existing)
                    pfn = PhysicalFileName("gsiftp", victim[0], victim[1], victim[2])
                    mgr.unregister(f, pfn)
                    model[name].discard(victim)
                    if not model[name]:
                        del model[name]
                else:
                    ghost = PhysicalFileName("gsiftp", se, "/data/ghost", 1)
                    with pytest.raises(errors.UnknownPair):
                        mgr.unregister(f, ghost)
            got = {
                name2: {(p.se, p.path, p.size) for p in mgr.list_replicas(LogicalFileName(name2))}
                for name2 in lfn_pool
            }
            want = {name2: model.get(name2, set()) for name2 in lfn_pool}
            assert got == want, f"trial {trial} step {step} op {op}"
            mgr.check_consistency()
