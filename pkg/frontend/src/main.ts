import { GatewayClient } from "./api.js";
import type { Cleanup, PageContext } from "./context.js";
import { clear, el, fmtTime } from "./dom.js";
import { startPolling } from "./poll.js";
import { renderJobDetailPage, renderJobsPage } from "./pages/jobs.js";
import { renderMapPage } from "./pages/map.js";
import { renderReplicasPage, renderResourcesPage } from "./pages/resources.js";
import { renderSubmitPage } from "./pages/submit.js";
import { loadSession, reconcileSession, saveSession } from "./session.js";

const NAV = [
  ["#/submit", "Submit"],
  ["#/jobs", "Jobs"],
  ["#/resources", "Resources"],
  ["#/replicas", "Replicas"],
  ["#/map", "Map"],
] as const;

export interface App {
  navigate(hash: string): void;
  shutdown(): void;
}

export async function boot(
  doc: Document,
  api: GatewayClient,
  storage: Storage,
  win: { location: { hash: string }; addEventListener(type: string, fn: () => void): void },
): Promise<App> {
  const root = doc.getElementById("app");
  if (!root) throw new Error("missing #app container");
  clear(root);

  const [vos, brokers] = await Promise.all([api.vos(), api.brokers()]);
  let session = reconcileSession(loadSession(storage), vos, brokers);
  saveSession(storage, session);

  // header: identity/broker selectors (choices come from the API only) + clock
  const userSelect = el(doc, "select", { id: "session-user" });
  for (const vo of vos) {
    for (const member of vo.members) {
      const value = `${vo.name}|${member}`;
      const option = el(doc, "option", { value }, `${member} (${vo.name})`);
      if (member === session.subject && vo.name === session.vo) {
        option.setAttribute("selected", "");
      }
      userSelect.append(option);
    }
  }
  const rbSelect = el(doc, "select", { id: "session-rb" });
  for (const broker of brokers) {
    const option = el(doc, "option", { value: broker.id }, broker.id);
    if (broker.id === session.rb) option.setAttribute("selected", "");
    rbSelect.append(option);
  }
  userSelect.addEventListener("change", () => {
    const [vo, subject] = userSelect.value.split("|", 2);
    session = { ...session, vo, subject };
    saveSession(storage, session);
    render();
  });
  rbSelect.addEventListener("change", () => {
    session = { ...session, rb: rbSelect.value };
    saveSession(storage, session);
    render();
  });

  const clock = el(doc, "span", { id: "sim-clock", class: "mono" }, "t=…");
  const navBox = el(doc, "nav", {});
  for (const [hash, label] of NAV) {
    navBox.append(el(doc, "a", { href: hash, "data-nav": hash }, label));
  }
  const header = el(
    doc,
    "header",
    {},
    el(doc, "h1", {}, "WorldGrid portal"),
    navBox,
    el(doc, "div", { class: "session-bar" }, userSelect, rbSelect, clock),
  );
  const pageBox = el(doc, "main", { id: "page" });
  root.append(header, pageBox);

  const clockPoller = startPolling(
    async () => {
      clock.textContent = fmtTime(await api.simTime());
    },
    () => {
      clock.textContent = "gateway offline";
    },
    () => undefined,
  );

  let cleanup: Cleanup = () => undefined;

  const context = (): PageContext => ({
    doc,
    api,
    session,
    vos,
    brokers,
    navigate,
  });

  function render(): void {
    cleanup();
    const hash = win.location.hash || "#/jobs";
    for (const link of navBox.querySelectorAll("a")) {
      link.classList.toggle("active", link.getAttribute("data-nav") === hash);
    }
    const detail = hash.match(/^#\/jobs\/(.+)$/);
    if (detail) {
      cleanup = renderJobDetailPage(pageBox, context(), detail[1]);
    } else if (hash === "#/submit") {
      cleanup = renderSubmitPage(pageBox, context());
    } else if (hash === "#/resources") {
      cleanup = renderResourcesPage(pageBox, context());
    } else if (hash === "#/replicas") {
      cleanup = renderReplicasPage(pageBox, context());
    } else if (hash === "#/map") {
      cleanup = renderMapPage(pageBox, context());
    } else {
      cleanup = renderJobsPage(pageBox, context());
    }
  }

  function navigate(hash: string): void {
    if (win.location.hash !== hash) win.location.hash = hash;
    // render directly: hash assignment may or may not fire hashchange here,
    // and render() after cleanup() is safe to run twice
    render();
  }

  win.addEventListener("hashchange", render);
  render();

  return {
    navigate,
    shutdown() {
      cleanup();
      clockPoller.stop();
    },
  };
}
