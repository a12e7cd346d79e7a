"""`grid` command line tool.

Single commands run against a fresh simulation built from --scenario/--seed,
or against a running gateway via --server. `grid run` executes a command
script on a fresh simulation and writes the bookkeeping and event logs;
`grid serve` starts the HTTP gateway (batch mode by default, where only
POST /v1/sim/advance moves time).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import GridError
from ..simulation import Simulation, builtin_scenario_path, load_scenario
from .backend import HttpBackend, LocalBackend
from .scripts import execute_command, run_script

USAGE = """usage:
  grid [--scenario PATH] [--seed N] [--server URL] COMMAND [ARGS...]
  grid run SCENARIO --script FILE [--seed N] [--lb-log F] [--event-log F]
  grid serve [--scenario PATH] [--seed N] [--listen HOST:PORT]
             [--mode batch|interactive] [--scale X] [--portal DIR]

commands:
  submit --user S (--rb ID | --ce ID) JDLFILE     submit a job
  status [JOBID] [--owner S] [--state ST]         job table / one job
  events JOBID                                    bookkeeping trail
  cancel JOBID                                    cancel a job
  output JOBID                                    output sandbox listing
  advance SECONDS | time                          move / read virtual time
  info query 'FILTER' [--class edg|glue]          search the directory
  replica cp KIND LOC PATH DEST_SE LFN            copy + register a replica
  replica ls LFN                                  list replicas
  monitor snapshot [--filter kind:value] [--out F] world-map export
  vo list | vo add-member VO SUBJECT [--ca CA] [--serial N]
  gridmap gen SITE                                print a site's grid-mapfile
"""


def _build_local_backend(scenario_path, seed) -> LocalBackend:
    path = Path(scenario_path) if scenario_path else builtin_scenario_path()
    return LocalBackend(Simulation(load_scenario(path), seed=seed))


def cmd_run(args: list[str]) -> int:
    parser = argparse.ArgumentParser(prog="grid run")
    parser.add_argument("scenario")
    parser.add_argument("--script", required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--lb-log", default="lb.log")
    parser.add_argument("--event-log", default="events.log")
    ns = parser.parse_args(args)
    backend = _build_local_backend(ns.scenario, ns.seed)
    run_script(backend, ns.script)
    Path(ns.lb_log).write_text(backend.lb_text())
    Path(ns.event_log).write_text(backend.event_log_text())
    print(f"wrote {ns.lb_log} and {ns.event_log}")
    return 0


def cmd_serve(global_ns, args: list[str]) -> int:
    import uvicorn

    from .api import create_app

    parser = argparse.ArgumentParser(prog="grid serve")
    parser.add_argument("--listen", default="127.0.0.1:8710")
    parser.add_argument("--mode", choices=["batch", "interactive"], default="batch")
    parser.add_argument("--scale", type=float, default=10.0)
    parser.add_argument("--portal", default="")
    ns = parser.parse_args(args)
    backend = _build_local_backend(global_ns.scenario, global_ns.seed)
    if not backend.sim.brokers:
        print("error: scenario configures no resource broker", file=sys.stderr)
        return 2
    scale = ns.scale if ns.mode == "interactive" else None
    app = create_app(backend.sim, interactive_scale=scale, portal_dir=ns.portal or None)
    host, _, port = ns.listen.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = argparse.ArgumentParser(prog="grid", add_help=False)
    parser.add_argument("--scenario", default="")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--server", default="")
    parser.add_argument("-h", "--help", action="store_true")
    ns, rest = parser.parse_known_args(argv)
    if ns.help or not rest:
        print(USAGE)
        return 0 if ns.help else 64
    command = rest[0]
    try:
        if command == "run":
            return cmd_run(rest[1:])
        if command == "serve":
            return cmd_serve(ns, rest[1:])
        if ns.server:
            backend = HttpBackend(ns.server)
        else:
            backend = _build_local_backend(ns.scenario, ns.seed)
        execute_command(backend, rest)
        return 0
    except GridError as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
