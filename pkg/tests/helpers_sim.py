"""Small scenarios and drivers shared by the simulation-level test suites."""

from worldgrid.fabric import parse_scenario
from worldgrid.simulation import Simulation, builtin_scenario_path, load_scenario
from worldgrid.wms import JobState

ALICE = "/C=IT/O=INFN/CN=Alice Rossi"
BRUNO = "/C=IT/O=INFN/CN=Bruno Bianchi"
ELLEN = "/DC=org/DC=doegrids/OU=People/CN=Ellen Park"
HAL = "/O=Grid/O=Globus/CN=Hal Turner"

SMALL_SCENARIO = """
[defaults]
registration_ttl = 60
refresh_period = 30
probe_period = 30
probe_timeout = 5
crl_refresh_period = 300
cert_lifetime = 100000000
job_duration_min = {dmin}
job_duration_max = {dmax}

[bandwidth]
intra_site = 100MB
same_continent = 50MB
intercontinental = 10MB

[ca edg-it]
crl_validity = 900

[ca doe]
crl_validity = 900

[vo datatag]
member "/C=IT/O=INFN/CN=Alice Rossi" ca=edg-it serial=1001
member "/C=IT/O=INFN/CN=Bruno Bianchi" ca=edg-it serial=1002

[vo ivdgl]
member "/DC=org/DC=doegrids/OU=People/CN=Ellen Park" ca=doe serial=2001

[site alpha]
country = IT
continent = EU
coords = 44.49 11.34
flavor = EDG
lrms = PBS
cpus = {alpha_cpus}
wns = 4
se_bytes = 1GB
vos = datatag ivdgl
tags = ATLAS CMS

[site beta]
country = CH
continent = EU
coords = 46.20 6.14
flavor = EDG
lrms = LSF
cpus = {beta_cpus}
wns = 2
se_bytes = 1GB
glue = yes
vos = datatag ivdgl
tags = ATLAS CMS

[site gamma]
country = US
continent = US
coords = 42.36 -71.06
flavor = VDT
lrms = PBS
cpus = {gamma_cpus}
wns = 2
se_bytes = 1GB
vos = {gamma_vos}
tags = ATLAS

[index ii-primary]
site = alpha
level = top

[index ii-backup]
site = beta
level = top
backup_of = ii-primary

[broker rb-edg]
site = alpha
info_primary = ii-primary
info_backup = ii-backup
replica_catalog = rc-central

[broker rb-glue]
site = alpha
info_primary = ii-primary
info_backup = ii-backup
glue_aware = yes
replica_catalog = rc-central

[catalog rc-central]
site = alpha

[ui]
site = alpha
"""


def small_scenario_text(dmin=50, dmax=50, alpha_cpus=4, beta_cpus=2, gamma_cpus=2,
                        gamma_vos="datatag ivdgl"):
    return SMALL_SCENARIO.format(
        dmin=dmin, dmax=dmax, alpha_cpus=alpha_cpus, beta_cpus=beta_cpus,
        gamma_cpus=gamma_cpus, gamma_vos=gamma_vos,
    )


def small_sim(seed=0, mutate=None, **kwargs) -> Simulation:
    scenario = parse_scenario(small_scenario_text(**kwargs))
    if mutate:
        mutate(scenario)
    return Simulation(scenario, seed=seed)


def shipped_sim(seed=0, mutate=None) -> Simulation:
    scenario = load_scenario(builtin_scenario_path())
    if mutate:
        mutate(scenario)
    return Simulation(scenario, seed=seed)


def jdl_text(vo="datatag", tag="ATLAS", rank=None, input_data=(), output_data=(),
             sandbox=("job.sh",)):
    lines = [
        'Executable = "job.sh";',
        f'VirtualOrganisation = "{vo}";',
        'StdOutput = "out.log";',
        'StdError = "err.log";',
        'OutputSandbox = {"out.log", "err.log"};',
    ]
    if sandbox:
        quoted = ", ".join(f'"{x}"' for x in sandbox)
        lines.append(f"InputSandbox = {{{quoted}}};")
    if tag:
        lines.append(f'Requirements = Member("{tag}", other.RunTimeEnvironment);')
    if rank:
        lines.append(f"Rank = {rank};")
    if input_data:
        quoted = ", ".join(f'"{x}"' for x in input_data)
        lines.append(f"InputData = {{{quoted}}};")
    if output_data:
        quoted = ", ".join(f'"{x}"' for x in output_data)
        lines.append(f"OutputData = {{{quoted}}};")
    return "\n".join(lines)


def run_until_settled(sim: Simulation, horizon=5000.0, step=100.0):
    """Advance until every job is terminal (or the horizon passes)."""
    while sim.engine.now < horizon:
        sim.advance(min(step, horizon - sim.engine.now))
        jobs = sim.wms.jobs.values()
        if jobs and all(j.terminal for j in jobs):
            break
    return sim


def site_of_ce(sim: Simulation, ce_id: str) -> str:
    return sim.fabric.ce(ce_id).site_id


def assert_lb_consistent(sim: Simulation):
    """Replaying each job's event chain must land on its stored state, and
    transition counts must match event counts exactly."""
    for job_id, job in sim.wms.jobs.items():
        assert sim.lb.replay(job_id) == job.state
        transitions = [e for e in sim.lb.events_for(job_id) if e.is_transition]
        # creation event plus one per state change
        seen = [e.to_state for e in transitions]
        assert seen[0] == JobState.SUBMITTED.value
        assert seen[-1] == job.state.value
