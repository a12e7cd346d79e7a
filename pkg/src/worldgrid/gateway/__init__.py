"""Gateway: the HTTP service and CLI over one simulation."""

from .backend import HttpBackend, LocalBackend
from .scripts import execute_command, run_script
from .views import entry_view, event_view, job_summary, pfn_view

__all__ = [
    "HttpBackend", "LocalBackend", "execute_command", "run_script",
    "entry_view", "event_view", "job_summary", "pfn_view",
]
