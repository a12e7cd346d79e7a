// The only state the portal keeps: which demo identity, VO, and broker are
// selected. Everything else is reconstructed from the API on every render.

export interface PortalSession {
  subject: string;
  vo: string;
  rb: string;
}

const KEY = "worldgrid-portal-session";

export function loadSession(storage: Storage): PortalSession | null {
  const raw = storage.getItem(KEY);
  if (!raw) return null;
  try {
    const parsed = JSON.parse(raw) as PortalSession;
    if (parsed.subject && parsed.vo && parsed.rb) return parsed;
  } catch {
    // fall through: corrupt entry is treated as absent
  }
  return null;
}

export function saveSession(storage: Storage, session: PortalSession): void {
  storage.setItem(KEY, JSON.stringify(session));
}

/** Constrain a stored session to the identities the gateway actually offers. */
export function reconcileSession(
  stored: PortalSession | null,
  vos: { name: string; members: string[] }[],
  brokers: { id: string }[],
): PortalSession {
  const subjects = vos.flatMap((vo) => vo.members.map((subject) => ({ subject, vo: vo.name })));
  const first = subjects[0] ?? { subject: "", vo: "" };
  const rbIds = brokers.map((b) => b.id);
  if (
    stored &&
    subjects.some((s) => s.subject === stored.subject && s.vo === stored.vo) &&
    rbIds.includes(stored.rb)
  ) {
    return stored;
  }
  return { subject: first.subject, vo: first.vo, rb: rbIds[0] ?? "" };
}
