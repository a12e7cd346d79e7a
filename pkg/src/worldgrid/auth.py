"""Authorization chain: trusted CAs, certificate records, CRLs, VO
registries, and generation of per-resource grid-mapfiles.

Certificates are plain records (no cryptography). A subject gains access to
a resource only by appearing in that resource's grid-mapfile, which is
generated from the VO registries the site supports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .errors import Expired, NotAuthorized, Revoked, StaleCrl, UnknownVo, UntrustedCa

DENY = "DENY"


class GridFlavor(str, Enum):
    EDG = "EDG"
    VDT = "VDT"


@dataclass(frozen=True)
class CertificateRecord:
    subject: str
    issuer_ca: str
    serial: int
    not_before: float
    not_after: float

    def __post_init__(self):
        if not self.not_before < self.not_after:
            raise ValueError("certificate validity window is empty")


@dataclass
class CaRegistry:
    """Explicit allowlists of CA ids, one per grid flavor."""

    trusted: dict[GridFlavor, frozenset[str]]

    def is_trusted(self, ca_id: str, flavor: GridFlavor) -> bool:
        return ca_id in self.trusted.get(flavor, frozenset())

    @classmethod
    def worldgrid_default(cls, edg_cas: Iterable[str] = ("edg-it",)) -> "CaRegistry":
        """Both flavors trust doe and the EDG CAs; only VDT trusts globus."""
        edg_cas = frozenset(edg_cas) | {"doe"}
        return cls(
            trusted={
                GridFlavor.EDG: edg_cas,
                GridFlavor.VDT: edg_cas | {"globus"},
            }
        )


@dataclass
class Crl:
    ca: str
    revoked_serials: set[int]
    issued_at: float
    next_update: float

    def __post_init__(self):
        if not self.issued_at < self.next_update:
            raise ValueError("CRL next_update must follow issued_at")

    def is_fresh(self, now: float) -> bool:
        return now <= self.next_update


@dataclass
class CertificateAuthority:
    """Issues CRLs on a schedule; sites keep local copies of the latest one."""

    id: str
    crl_validity: float = 3600.0
    revoked_serials: set[int] = field(default_factory=set)
    current_crl: Crl | None = None

    def issue_crl(self, now: float) -> Crl:
        self.current_crl = Crl(
            ca=self.id,
            revoked_serials=set(self.revoked_serials),
            issued_at=now,
            next_update=now + self.crl_validity,
        )
        return self.current_crl

    def revoke(self, serial: int):
        self.revoked_serials.add(serial)


@dataclass
class VoRegistry:
    name: str
    members: list[str] = field(default_factory=list)
    usage_policy_signed: set[str] = field(default_factory=set)

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise ValueError(f"vo {self.name!r} has duplicate members")

    def add_member(self, subject: str, signed: bool = True):
        if subject in self.members:
            raise ValueError(f"{subject!r} already registered with {self.name!r}")
        self.members.append(subject)
        if signed:
            self.usage_policy_signed.add(subject)


@dataclass
class SitePolicy:
    supported_vos: list[str] = field(default_factory=list)
    overrides: list[tuple[str, str]] = field(default_factory=list)  # (subject, account|DENY)


@dataclass
class GridMapfile:
    mappings: list[tuple[str, str]] = field(default_factory=list)

    def account_for(self, subject: str) -> str | None:
        for mapped_subject, account in self.mappings:
            if mapped_subject == subject:
                return account
        return None

    def serialize(self) -> str:
        return "".join(f'"{subject}" {account}\n' for subject, account in self.mappings)


def mkgridmap(vos: list[VoRegistry], site_policy: SitePolicy) -> GridMapfile:
    """Build a resource's grid-mapfile from the VO registries it supports.

    Members who signed the usage policy map to pool account `<vo>NNN`, NNN
    being the 1-based position within the VO member order. A subject in
    several supported VOs keeps the first supporting VO's mapping. Overrides
    run last: DENY drops the subject, anything else pins the account.
    """
    by_name = {vo.name: vo for vo in vos}
    if len(by_name) != len(vos):
        raise ValueError("vo ids must be unique")
    for vo_id in site_policy.supported_vos:
        if vo_id not in by_name:
            raise UnknownVo(f"site policy references unknown vo {vo_id!r}")
    mappings: dict[str, str] = {}
    for vo_id in site_policy.supported_vos:
        vo = by_name[vo_id]
        for index, subject in enumerate(vo.members, start=1):
            if subject not in vo.usage_policy_signed:
                continue
            if subject in mappings:
                continue
            mappings[subject] = f"{vo.name}{index:03d}"
    for subject, account in site_policy.overrides:
        if account == DENY:
            mappings.pop(subject, None)
        else:
            mappings[subject] = account
    return GridMapfile(list(mappings.items()))


def authenticate(
    cert: CertificateRecord,
    flavor: GridFlavor,
    now: float,
    crls: Iterable[Crl],
    registry: CaRegistry,
) -> str:
    """Return the certificate subject or raise one distinct error per failure.

    Checks run in order: issuer trust, validity window, revocation, CRL
    freshness. A serial listed on a stale CRL still counts as revoked; only
    an absent serial on a stale CRL reports StaleCrl. A missing CRL copy is
    treated as stale (freshness can't be shown).
    """
    if not registry.is_trusted(cert.issuer_ca, flavor):
        raise UntrustedCa(f"ca {cert.issuer_ca!r} is not trusted for {flavor.value} resources")
    if not (cert.not_before <= now <= cert.not_after):
        raise Expired(f"certificate for {cert.subject!r} outside validity window")
    crl = next((c for c in crls if c.ca == cert.issuer_ca), None)
    if crl is not None and cert.serial in crl.revoked_serials:
        raise Revoked(f"serial {cert.serial} revoked by {cert.issuer_ca!r}")
    if crl is None or not crl.is_fresh(now):
        raise StaleCrl(f"no fresh CRL for ca {cert.issuer_ca!r}")
    return cert.subject


def authorize(subject: str, mapfile: GridMapfile) -> str:
    account = mapfile.account_for(subject)
    if account is None:
        raise NotAuthorized(f"{subject!r} has no grid-mapfile entry")
    return account


def refresh_crls(
    local_copies: dict[str, Crl],
    cas: Iterable[CertificateAuthority],
    now: float,
    fetch_ok=lambda ca_id: True,
) -> list[tuple[str, str]]:
    """Update one resource's CRL copies from each CA's current CRL.

    A failed fetch keeps the old copy in place (which may then go stale).
    Returns (ca id, "fetched" | "failed") per CA, in CA order.
    """
    report = []
    for ca in cas:
        if ca.current_crl is None:
            ca.issue_crl(now)
        if fetch_ok(ca.id):
            local_copies[ca.id] = ca.current_crl
            report.append((ca.id, "fetched"))
        else:
            report.append((ca.id, "failed"))
    return report


def parse_vo_registries(text: str) -> list[VoRegistry]:
    """Plain-text VO registry files: `[vo <name>]` headers, one subject per line."""
    registries: list[VoRegistry] = []
    current: VoRegistry | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            inner = line[1:-1].strip()
            parts = inner.split(None, 1)
            if len(parts) != 2 or parts[0].lower() != "vo":
                raise ValueError(f"line {lineno}: expected [vo <name>] header")
            current = VoRegistry(name=parts[1].strip())
            registries.append(current)
            continue
        if current is None:
            raise ValueError(f"line {lineno}: subject before any [vo ...] header")
        current.add_member(line)
    return registries


def format_vo_registries(vos: Iterable[VoRegistry]) -> str:
    blocks = []
    for vo in vos:
        lines = [f"[vo {vo.name}]"]
        lines.extend(vo.members)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
