"""Command dispatch shared by the CLI and the script runner.

A command script is a sequence of CLI-shaped lines (shlex rules, `#`
comments) executed against one backend. Running the same script against a
local simulation and against a served gateway must leave identical
bookkeeping logs.
"""

from __future__ import annotations

import shlex
from pathlib import Path

from ..errors import BadRequest


class CommandError(BadRequest):
    code = "UsageError"


def _take_flag(args: list[str], flag: str, default: str = "") -> str:
    if flag in args:
        idx = args.index(flag)
        if idx + 1 >= len(args):
            raise CommandError(f"{flag} needs a value")
        value = args[idx + 1]
        del args[idx : idx + 2]
        return value
    return default


def _format_job(j: dict) -> str:
    ce = j["ce"] or "-"
    return f"{j['id']}  {j['state']:<11} ce={ce}  vo={j['vo']}  owner={j['owner']}"


def execute_command(backend, argv: list[str], script_dir: Path | None = None, out=print) -> None:
    """Run one command against the backend; raises GridError subtypes on failure."""
    if not argv:
        return
    args = list(argv)
    cmd = args.pop(0)

    if cmd == "submit":
        user = _take_flag(args, "--user")
        rb = _take_flag(args, "--rb")
        ce = _take_flag(args, "--ce")
        jdl_path = _take_flag(args, "--jdl")
        if not jdl_path and args:
            jdl_path = args.pop(0)
        if not user or not jdl_path:
            raise CommandError("submit needs --user and a JDL file")
        if args:
            raise CommandError(f"unexpected arguments: {args}")
        path = Path(jdl_path)
        if script_dir and not path.is_absolute():
            path = script_dir / path
        summary = backend.submit(path.read_text(), user, rb=rb, ce=ce)
        out(f"submitted {summary['id']}")
        return

    if cmd == "status":
        owner = _take_flag(args, "--owner")
        state = _take_flag(args, "--state")
        if args:
            out(_format_job(backend.job(args[0])))
            return
        for j in backend.jobs(owner=owner, state=state):
            out(_format_job(j))
        return

    if cmd == "events":
        if not args:
            raise CommandError("events needs a job id")
        for e in backend.events(args[0]):
            out(f"{e['t']:.3f}  {e['component']:<4} {e['from']} -> {e['to']}  {e['reason']}")
        return

    if cmd == "cancel":
        if not args:
            raise CommandError("cancel needs a job id")
        result = backend.cancel(args[0])
        out(f"{result['id']} cancelled={str(result['cancelled']).lower()} state={result['state']}")
        return

    if cmd == "output":
        if not args:
            raise CommandError("output needs a job id")
        result = backend.output(args[0])
        out(f"{result['id']} {result['state']}")
        for f in result["files"]:
            out(f"  {f['name']}  {f['size']}")
        return

    if cmd == "advance":
        if not args:
            raise CommandError("advance needs a number of virtual seconds")
        result = backend.advance(float(args[0]))
        out(f"t={result['now']:.3f} events={result['events']}")
        return

    if cmd == "time":
        out(f"t={backend.now()['now']:.3f}")
        return

    if cmd == "replica":
        if not args:
            raise CommandError("replica needs a subcommand: cp | ls")
        sub = args.pop(0)
        if sub == "ls":
            if not args:
                raise CommandError("replica ls needs an lfn")
            result = backend.replicas(args[0])
            for p in result["replicas"]:
                out(f"{result['lfn']} {p['url']} {p['size']}")
            if not result["replicas"]:
                out(f"{result['lfn']} has no replicas")
            return
        if sub == "cp":
            if len(args) != 5:
                raise CommandError("replica cp KIND LOCATION PATH DEST_SE LFN")
            kind, location, path, dest_se, lfn = args
            if location == "-":
                location = ""
            p = backend.replica_cp(kind, location, path, dest_se, lfn)
            out(f"registered {lfn} -> {p['url']} ({p['size']} bytes)")
            return
        raise CommandError(f"unknown replica subcommand {sub!r}")

    if cmd == "info":
        if not args or args.pop(0) != "query":
            raise CommandError("usage: info query '<filter>' [--class edg|glue]")
        schema_class = _take_flag(args, "--class")
        query = args[0] if args else ""
        # without an explicit dialect, search both resource trees
        classes = [schema_class] if schema_class else ["edg", "glue"]
        entries = [e for c in classes for e in backend.resources(c, query)]
        for e in entries:
            out(f"dn: {e['dn']}")
        out(f"{len(entries)} entries")
        return

    if cmd == "monitor":
        if not args or args.pop(0) != "snapshot":
            raise CommandError("usage: monitor snapshot [--filter kind:value] [--out FILE]")
        raw = _take_flag(args, "--filter")
        out_file = _take_flag(args, "--out")
        kind, value = ("none", "")
        if raw and raw != "none":
            if ":" not in raw:
                raise CommandError("filter must look like kind:value")
            kind, _, value = raw.partition(":")
        text = backend.monitor_map(kind, value)
        if out_file:
            Path(out_file).write_text(text)
            out(f"wrote {out_file}")
        else:
            out(text.rstrip("\n"))
        return

    if cmd == "vo":
        if not args:
            raise CommandError("vo needs a subcommand: list | add-member")
        sub = args.pop(0)
        if sub == "list":
            for vo in backend.vos():
                out(f"[vo {vo['name']}]")
                for member in vo["members"]:
                    flag = "" if member in vo["signed"] else "  (policy unsigned)"
                    out(f"  {member}{flag}")
            return
        if sub == "add-member":
            if len(args) < 2:
                raise CommandError("vo add-member VO SUBJECT [--ca CA] [--serial N]")
            ca = _take_flag(args, "--ca")
            serial = int(_take_flag(args, "--serial", "0"))
            vo, subject = args[0], args[1]
            backend.vo_add_member(vo, subject, ca=ca, serial=serial)
            out(f"added {subject} to {vo}")
            return
        raise CommandError(f"unknown vo subcommand {sub!r}")

    if cmd == "gridmap":
        if not args or args.pop(0) != "gen":
            raise CommandError("usage: gridmap gen SITE")
        if not args:
            raise CommandError("gridmap gen needs a site id")
        out(backend.gridmap(args[0]).rstrip("\n"))
        return

    raise CommandError(f"unknown command {cmd!r}")


def run_script(backend, script_path: str | Path, out=print) -> None:
    path = Path(script_path)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        argv = shlex.split(line)
        try:
            execute_command(backend, argv, script_dir=path.parent, out=out)
        except BadRequest as exc:
            raise CommandError(f"{path.name}:{lineno}: {exc.message}") from exc
