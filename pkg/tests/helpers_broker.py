"""Shared harness: random small grids plus an independent match oracle.

The oracle re-derives the candidate set and picks the winner by explicit
pairwise comparison (data-close tier, then rank, then CE id), touching none
of the broker's ordering code.
"""

import random

from worldgrid.auth import GridMapfile
from worldgrid.clock import Clock
from worldgrid.datamgmt import LogicalFileName, PhysicalFileName, ReplicaCatalog
from worldgrid.infosys import (
    DirectoryEntry,
    DistinguishedName,
    InformationService,
    Level,
    RESOURCE_SCHEMA,
)
from worldgrid.jdl import evaluate, is_number, parse as parse_jdl, requirements_satisfied
from worldgrid.wms import BrokerConfig, DEFAULT_RANK, Job, ResourceBroker
from worldgrid.wms.broker import entry_eval_env

OWNER = "/C=IT/O=INFN/CN=Alice Rossi"
OTHER_USER = "/C=XX/CN=Someone Else"
SE_POOL = [f"se{i}.example" for i in range(5)]
LFN_POOL = [f"lfn:/datatag/input/f{i}.dat" for i in range(3)]
TAGS = ["ATLAS", "CMS", "LHCB"]

REQUIREMENT_TEMPLATES = [
    "true",
    'Member("ATLAS", other.RunTimeEnvironment)',
    'Member("CMS", other.RunTimeEnvironment)',
    "other.FreeCPUs >= {k}",
    "other.TotalCPUs > {k} && Member(\"ATLAS\", other.RunTimeEnvironment)",
    "other.FreeCPUs > 0 || other.WaitingJobs <= {k}",
    "other.NoSuchAttr > 0",
    "!(other.WaitingJobs > {k})",
]

RANK_TEMPLATES = [
    None,
    "other.FreeCPUs",
    "other.TotalCPUs - other.WaitingJobs",
    "other.FreeCPUs * 2 - other.RunningJobs",
    "other.NoSuchAttr",
]


def make_grid(rng: random.Random):
    """One random grid: entries, per-CE mapfiles, catalogue, job, broker cfg."""
    n_ce = rng.randint(1, 10)
    entries = []
    gridmaps = {}
    for i in range(n_ce):
        ce_id = f"ce{i:02d}.example:2119/pbs-long"
        total = rng.randint(1, 20)
        attrs = {
            "CEId": [ce_id],
            "LRMSType": [rng.choice(["PBS", "LSF", "Condor"])],
            "TotalCPUs": [str(total)],
            "FreeCPUs": [str(rng.randint(0, total))],
            "RunningJobs": [str(rng.randint(0, total))],
            "WaitingJobs": [str(rng.randint(0, 5))],
        }
        tags = rng.sample(TAGS, k=rng.randint(0, len(TAGS)))
        if tags:
            attrs["RunTimeEnvironment"] = tags
        vos = rng.sample(["datatag", "ivdgl"], k=rng.randint(0, 2))
        if vos:
            attrs["AuthorizedVOs"] = vos
        close = rng.sample(SE_POOL, k=rng.randint(0, 2))
        if close:
            attrs["CloseSEs"] = close
        entries.append(
            DirectoryEntry(
                dn=DistinguishedName.parse(f"ceid={ce_id}, mds-vo-name=site{i}, o=grid"),
                object_classes=("ComputingElement",),
                attributes=attrs,
            )
        )
        mapped = [(OTHER_USER, "pool001")]
        if rng.random() < 0.8:
            mapped.append((OWNER, "datatag001"))
        gridmaps[ce_id] = GridMapfile(mapped)

    catalog = ReplicaCatalog("rc-test")
    for lfn_text in LFN_POOL:
        for se in rng.sample(SE_POOL, k=rng.randint(0, 3)):
            catalog.register(
                LogicalFileName(lfn_text),
                PhysicalFileName("gsiftp", se, f"/data/{lfn_text[5:]}", 1000),
            )

    requirement = rng.choice(REQUIREMENT_TEMPLATES).format(k=rng.randint(0, 6))
    rank = rng.choice(RANK_TEMPLATES)
    input_data = rng.sample(LFN_POOL, k=rng.randint(0, 2))
    jdl_lines = [
        'Executable = "sim.sh";',
        'VirtualOrganisation = "datatag";',
        f"Requirements = {requirement};",
    ]
    if rank is not None:
        jdl_lines.append(f"Rank = {rank};")
    if input_data:
        quoted = ", ".join(f'"{x}"' for x in input_data)
        jdl_lines.append(f"InputData = {{{quoted}}};")
    jdl_text = "\n".join(jdl_lines)
    job = Job(
        id="job-under-test",
        owner=OWNER,
        vo="datatag",
        jdl=parse_jdl(jdl_text),
        jdl_text=jdl_text,
        rb="rb-test",
        submitted_at=0.0,
    )
    strict = rng.random() < 0.3
    return entries, gridmaps, catalog, job, strict


def build_broker(entries, gridmaps, catalog, strict):
    svc = InformationService(RESOURCE_SCHEMA, Clock())
    svc.add_node("top", Level.TOP_GIIS)
    svc.add_node("gris", Level.GRIS)
    svc.publish("gris", entries)
    svc.register("top", "gris", ttl=1e9)
    config = BrokerConfig(
        id="rb-test", info_primary="top", info_backup="top", strict_data=strict
    )
    return ResourceBroker(config, svc, lambda ce: gridmaps.get(ce), catalog)


def oracle_match(entries, gridmaps, catalog, job, strict):
    """Score every CE independently; return the ordered candidate tuples."""
    scored = []
    for entry in entries:
        ce_id = entry.attributes["CEId"][0]
        vos = entry.attributes.get("AuthorizedVOs", [])
        if job.vo not in vos:
            continue
        mapfile = gridmaps.get(ce_id)
        if mapfile is None or mapfile.account_for(job.owner) is None:
            continue
        env = entry_eval_env(entry)
        if not requirements_satisfied(job.jdl, env):
            continue
        rank_value = evaluate(job.jdl.rank or DEFAULT_RANK, job.jdl.eval_env(env))
        rank = float(rank_value) if is_number(rank_value) else None
        if not job.jdl.input_data:
            close = True
        else:
            close_ses = set(entry.attributes.get("CloseSEs", []))
            close = False
            for lfn_text in job.jdl.input_data:
                replicas = catalog.replicas(LogicalFileName(lfn_text))
                if any(p.se in close_ses for p in replicas):
                    close = True
                    break
        if strict and not close:
            continue
        scored.append((ce_id, rank, close))

    def better(a, b):
        # (ce_id, rank, close): data-close tier first, then rank, then id
        if a[2] != b[2]:
            return a[2]
        ra = a[1] if a[1] is not None else float("-inf")
        rb = b[1] if b[1] is not None else float("-inf")
        if ra != rb:
            return ra > rb
        return a[0] < b[0]

    ordered = []
    remaining = list(scored)
    while remaining:
        best = remaining[0]
        for cand in remaining[1:]:
            if better(cand, best):
                best = cand
        ordered.append(best)
        remaining.remove(best)
    return ordered
