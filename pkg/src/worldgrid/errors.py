"""Error hierarchy shared by all grid services.

Every failure that can cross a module boundary carries a stable machine
code so the gateway can map it to exactly one API error and monitoring
can count occurrences per code.
"""


class GridError(Exception):
    """Base class; `code` is the stable machine tag, `http_status` the API mapping."""

    code = "GridError"
    http_status = 400

    def __init__(self, message=""):
        super().__init__(message or self.code)
        self.message = message or self.code


def _make(name, status=400):
    return type(name, (GridError,), {"code": name, "http_status": status})


# infosys
DuplicateSourceId = _make("DuplicateSourceId", 409)
UnknownNode = _make("UnknownNode", 404)
CycleDetected = _make("CycleDetected", 409)
AllIndexesDown = _make("AllIndexesDown", 503)
FilterSyntaxError = _make("FilterSyntaxError", 400)
SchemaViolation = _make("SchemaViolation", 400)

# auth
UntrustedCa = _make("UntrustedCa", 403)
Expired = _make("Expired", 403)
Revoked = _make("Revoked", 403)
StaleCrl = _make("StaleCrl", 403)
NotAuthorized = _make("NotAuthorized", 403)
UnknownVo = _make("UnknownVo", 404)

# jdl
JdlSyntaxError = _make("JdlSyntaxError", 400)
DuplicateAttribute = _make("DuplicateAttribute", 400)

# wms
VoMembershipError = _make("VoMembershipError", 403)
NoMatchingResources = _make("NoMatchingResources", 409)
GatekeeperDown = _make("GatekeeperDown", 503)
SandboxTransferFailed = _make("SandboxTransferFailed", 502)
UnknownJob = _make("UnknownJob", 404)
IllegalTransition = _make("IllegalTransition", 409)

# datamgmt
NoSpace = _make("NoSpace", 409)
ConnectivityDenied = _make("ConnectivityDenied", 403)
SourceMissing = _make("SourceMissing", 404)
UnknownLfn = _make("UnknownLfn", 404)
UnknownPair = _make("UnknownPair", 404)
BadLfn = _make("BadLfn", 400)

# fabric
ScenarioParseError = _make("ScenarioParseError", 400)
UnknownSite = _make("UnknownSite", 404)
UnknownService = _make("UnknownService", 404)
UnknownCe = _make("UnknownCe", 404)
UnknownSe = _make("UnknownSe", 404)

# monitor
UnknownFilterValue = _make("UnknownFilterValue", 404)

# gateway
UnknownBroker = _make("UnknownBroker", 404)
UnknownUser = _make("UnknownUser", 404)
BadRequest = _make("BadRequest", 400)
