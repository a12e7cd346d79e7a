"""Scenario file format: the whole testbed as sectioned structured text.

Sections: `[defaults]`, `[bandwidth]`, `[ca <id>]`, `[vo <name>]`,
`[site <id>]`, `[index <id>]`, `[broker <id>]`, `[catalog <id>]`, `[ui]`,
`[failures]`. Site sections carry `key = value` lines; vo sections carry
`member "<subject>" ca=<ca> serial=<n> [unsigned]` rows; the failures
section carries `<site> <service> <t_start> <t_end>` rows.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field

from ..errors import ScenarioParseError

SIZE_SUFFIXES = {"KB": 10**3, "MB": 10**6, "GB": 10**9, "TB": 10**12}


def parse_size(text: str, lineno: int = 0) -> int:
    raw = text.strip()
    for suffix, factor in SIZE_SUFFIXES.items():
        if raw.upper().endswith(suffix):
            try:
                return int(float(raw[: -len(suffix)]) * factor)
            except ValueError:
                break
    try:
        return int(raw)
    except ValueError:
        raise ScenarioParseError(f"line {lineno}: bad size {text!r}") from None


def _parse_bool(text: str, lineno: int) -> bool:
    low = text.strip().lower()
    if low in ("yes", "true", "on", "1"):
        return True
    if low in ("no", "false", "off", "0"):
        return False
    raise ScenarioParseError(f"line {lineno}: bad boolean {text!r}")


@dataclass
class UserSpec:
    subject: str
    ca: str
    serial: int
    signed: bool = True


@dataclass
class SiteSpec:
    id: str
    country: str = ""
    continent: str = "EU"
    coords: tuple[float, float] = (0.0, 0.0)
    flavor: str = "EDG"
    lrms: str = "PBS"
    cpus: int = 4
    wns: int = 2
    se_bytes: int = 20 * 10**9
    glue: bool = False
    vos: list[str] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)
    wn_outbound: bool = True
    inbound: bool = True
    brokerable: bool = True
    os_name: str = ""
    kerberos_like_local_auth: bool = False


@dataclass
class IndexSpec:
    id: str
    site: str = ""
    level: str = "top"
    backup_of: str = ""


@dataclass
class BrokerSpec:
    id: str
    site: str = ""
    info_primary: str = ""
    info_backup: str = ""
    glue_aware: bool = False
    strict_data: bool = False
    replica_catalog: str = ""


@dataclass
class CatalogSpec:
    id: str
    site: str = ""


@dataclass
class FailureSpec:
    site: str
    service: str
    t_start: float
    t_end: float


@dataclass
class BandwidthSpec:
    intra_site: float = 100e6
    same_continent: float = 50e6
    intercontinental: float = 10e6
    pairs: dict[tuple[str, str], float] = field(default_factory=dict)


@dataclass
class Scenario:
    defaults: dict[str, float] = field(default_factory=dict)
    bandwidth: BandwidthSpec = field(default_factory=BandwidthSpec)
    cas: dict[str, float] = field(default_factory=dict)  # id -> crl validity
    vos: dict[str, list[UserSpec]] = field(default_factory=dict)
    sites: list[SiteSpec] = field(default_factory=list)
    indexes: list[IndexSpec] = field(default_factory=list)
    brokers: list[BrokerSpec] = field(default_factory=list)
    catalogs: list[CatalogSpec] = field(default_factory=list)
    ui_site: str = ""
    failures: list[FailureSpec] = field(default_factory=list)

    def default(self, key: str, fallback: float) -> float:
        return self.defaults.get(key, fallback)

    def site(self, site_id: str) -> SiteSpec:
        for s in self.sites:
            if s.id == site_id:
                return s
        raise KeyError(site_id)


_SITE_KEYS = {
    "country": ("country", str),
    "continent": ("continent", str),
    "flavor": ("flavor", str),
    "lrms": ("lrms", str),
    "os": ("os_name", str),
}


def parse_scenario(text: str) -> Scenario:
    scenario = Scenario()
    section: list[str] | None = None
    current: object = None
    seen_sites: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioParseError(f"line {lineno}: unterminated section header")
            parts = line[1:-1].split()
            if not parts:
                raise ScenarioParseError(f"line {lineno}: empty section header")
            section = parts
            kind = parts[0].lower()
            if kind == "site":
                if len(parts) != 2:
                    raise ScenarioParseError(f"line {lineno}: [site <id>] expected")
                if parts[1] in seen_sites:
                    raise ScenarioParseError(f"line {lineno}: duplicate site {parts[1]!r}")
                seen_sites.add(parts[1])
                current = SiteSpec(id=parts[1])
                scenario.sites.append(current)
            elif kind == "vo":
                if len(parts) != 2:
                    raise ScenarioParseError(f"line {lineno}: [vo <name>] expected")
                if parts[1] in scenario.vos:
                    raise ScenarioParseError(f"line {lineno}: duplicate vo {parts[1]!r}")
                scenario.vos[parts[1]] = []
                current = scenario.vos[parts[1]]
            elif kind == "ca":
                if len(parts) != 2:
                    raise ScenarioParseError(f"line {lineno}: [ca <id>] expected")
                scenario.cas.setdefault(parts[1], 900.0)
                current = parts[1]
            elif kind == "index":
                current = IndexSpec(id=parts[1])
                scenario.indexes.append(current)
            elif kind == "broker":
                current = BrokerSpec(id=parts[1])
                scenario.brokers.append(current)
            elif kind == "catalog":
                current = CatalogSpec(id=parts[1])
                scenario.catalogs.append(current)
            elif kind in ("defaults", "bandwidth", "ui", "failures"):
                current = None
            else:
                raise ScenarioParseError(f"line {lineno}: unknown section {parts[0]!r}")
            continue
        if section is None:
            raise ScenarioParseError(f"line {lineno}: content before any section")

        kind = section[0].lower()
        try:
            _parse_line(scenario, kind, current, line, lineno)
        except ScenarioParseError:
            raise
        except Exception as exc:
            raise ScenarioParseError(f"line {lineno}: {exc}") from None
    _validate(scenario)
    return scenario


def _parse_line(scenario: Scenario, kind: str, current, line: str, lineno: int):
    if kind == "defaults":
        key, value = _keyvalue(line, lineno)
        scenario.defaults[key] = float(value)
        return
    if kind == "bandwidth":
        tokens = shlex.split(line)
        if tokens and tokens[0] == "pair":
            if len(tokens) != 4:
                raise ScenarioParseError(f"line {lineno}: pair <a> <b> <rate> expected")
            rate = float(parse_size(tokens[3], lineno))
            scenario.bandwidth.pairs[tuple(sorted((tokens[1], tokens[2])))] = rate
            return
        key, value = _keyvalue(line, lineno)
        rate = float(parse_size(value, lineno))
        if key not in ("intra_site", "same_continent", "intercontinental"):
            raise ScenarioParseError(f"line {lineno}: unknown bandwidth key {key!r}")
        setattr(scenario.bandwidth, key, rate)
        return
    if kind == "ca":
        key, value = _keyvalue(line, lineno)
        if key != "crl_validity":
            raise ScenarioParseError(f"line {lineno}: unknown ca key {key!r}")
        scenario.cas[current] = float(value)
        return
    if kind == "vo":
        tokens = shlex.split(line)
        if not tokens or tokens[0] != "member" or len(tokens) < 2:
            raise ScenarioParseError(f"line {lineno}: member \"<subject>\" ... expected")
        subject = tokens[1]
        ca, serial, signed = "", 0, True
        for tok in tokens[2:]:
            if tok == "unsigned":
                signed = False
            elif tok.startswith("ca="):
                ca = tok[3:]
            elif tok.startswith("serial="):
                serial = int(tok[7:])
            else:
                raise ScenarioParseError(f"line {lineno}: unknown member option {tok!r}")
        current.append(UserSpec(subject=subject, ca=ca, serial=serial, signed=signed))
        return
    if kind == "site":
        key, value = _keyvalue(line, lineno)
        site: SiteSpec = current
        if key in _SITE_KEYS:
            attr, conv = _SITE_KEYS[key]
            setattr(site, attr, conv(value))
        elif key == "coords":
            lat, lon = value.split()
            site.coords = (float(lat), float(lon))
        elif key in ("cpus", "wns"):
            setattr(site, key, int(value))
        elif key == "se_bytes":
            site.se_bytes = parse_size(value, lineno)
        elif key == "glue":
            site.glue = _parse_bool(value, lineno)
        elif key == "vos":
            site.vos = value.split()
        elif key == "tags":
            site.tags = value.split()
        elif key == "wn_outbound":
            site.wn_outbound = _parse_bool(value, lineno)
        elif key == "inbound":
            site.inbound = _parse_bool(value, lineno)
        elif key == "brokerable":
            site.brokerable = _parse_bool(value, lineno)
        elif key == "kerberos":
            site.kerberos_like_local_auth = _parse_bool(value, lineno)
        else:
            raise ScenarioParseError(f"line {lineno}: unknown site key {key!r}")
        return
    if kind == "index":
        key, value = _keyvalue(line, lineno)
        if key not in ("site", "level", "backup_of"):
            raise ScenarioParseError(f"line {lineno}: unknown index key {key!r}")
        setattr(current, key, value)
        return
    if kind == "broker":
        key, value = _keyvalue(line, lineno)
        spec: BrokerSpec = current
        if key in ("site", "info_primary", "info_backup", "replica_catalog"):
            setattr(spec, key, value)
        elif key in ("glue_aware", "strict_data"):
            setattr(spec, key, _parse_bool(value, lineno))
        else:
            raise ScenarioParseError(f"line {lineno}: unknown broker key {key!r}")
        return
    if kind == "catalog":
        key, value = _keyvalue(line, lineno)
        if key != "site":
            raise ScenarioParseError(f"line {lineno}: unknown catalog key {key!r}")
        current.site = value
        return
    if kind == "ui":
        key, value = _keyvalue(line, lineno)
        if key != "site":
            raise ScenarioParseError(f"line {lineno}: unknown ui key {key!r}")
        scenario.ui_site = value
        return
    if kind == "failures":
        tokens = line.split()
        if len(tokens) != 4:
            raise ScenarioParseError(
                f"line {lineno}: <site> <service> <t_start> <t_end> expected"
            )
        scenario.failures.append(
            FailureSpec(tokens[0], tokens[1], float(tokens[2]), float(tokens[3]))
        )
        return
    raise ScenarioParseError(f"line {lineno}: stray content in [{kind}] section")


def _keyvalue(line: str, lineno: int) -> tuple[str, str]:
    if "=" not in line:
        raise ScenarioParseError(f"line {lineno}: expected key = value")
    key, _, value = line.partition("=")
    key, value = key.strip(), value.strip()
    if not key or not value:
        raise ScenarioParseError(f"line {lineno}: expected key = value")
    return key, value


def _validate(scenario: Scenario):
    site_ids = {s.id for s in scenario.sites}
    for spec in scenario.indexes + scenario.brokers + scenario.catalogs:
        if spec.site and spec.site not in site_ids:
            raise ScenarioParseError(
                f"{type(spec).__name__} {spec.id!r} references unknown site {spec.site!r}"
            )
    if scenario.ui_site and scenario.ui_site not in site_ids:
        raise ScenarioParseError(f"ui references unknown site {scenario.ui_site!r}")
    for failure in scenario.failures:
        if failure.site not in site_ids:
            raise ScenarioParseError(f"failure references unknown site {failure.site!r}")
    for spec in scenario.sites:
        if spec.flavor not in ("EDG", "VDT"):
            raise ScenarioParseError(f"site {spec.id!r}: flavor must be EDG or VDT")
        if spec.continent not in ("EU", "US"):
            raise ScenarioParseError(f"site {spec.id!r}: continent must be EU or US")
        if spec.flavor == "EDG" and spec.wns < 1:
            raise ScenarioParseError(f"site {spec.id!r}: EDG sites need >= 1 worker node")
    broker_info = {i.id for i in scenario.indexes}
    for spec in scenario.brokers:
        for ref in (spec.info_primary, spec.info_backup):
            if ref and ref not in broker_info:
                raise ScenarioParseError(
                    f"broker {spec.id!r} references unknown index {ref!r}"
                )
        if spec.replica_catalog and spec.replica_catalog not in {
            c.id for c in scenario.catalogs
        }:
            raise ScenarioParseError(
                f"broker {spec.id!r} references unknown catalog {spec.replica_catalog!r}"
            )
