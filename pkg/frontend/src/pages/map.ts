import type { MapDocument, MapSite } from "../api.js";
import type { Cleanup, PageContext } from "../context.js";
import { clear, el } from "../dom.js";
import { startPolling } from "../poll.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 720;
const HEIGHT = 360;

export function project(lat: number, lon: number): { x: number; y: number } {
  return { x: ((lon + 180) / 360) * WIDTH, y: ((90 - lat) / 180) * HEIGHT };
}

function siteTitle(site: MapSite): string {
  const services = site.services
    .map((s) => `${s.kind}: ${s.status} (${s.detail}, ${s.latency_ms.toFixed(0)} ms)`)
    .join("\n");
  const metrics = Object.entries(site.metrics)
    .map(([k, v]) => `${k}=${v}`)
    .join(" ");
  return `${site.id} [${site.country}] ${site.rollup}\n${services}\n${metrics}`;
}

export function renderWorldMap(doc: Document, mapDoc: MapDocument): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "world-map");
  // graticule: a light grid instead of coastlines keeps the page dependency-free
  for (let lon = -150; lon <= 150; lon += 30) {
    const line = doc.createElementNS(SVG_NS, "line");
    const { x } = project(0, lon);
    line.setAttribute("x1", String(x));
    line.setAttribute("x2", String(x));
    line.setAttribute("y1", "0");
    line.setAttribute("y2", String(HEIGHT));
    line.setAttribute("class", "graticule");
    svg.append(line);
  }
  for (let lat = -60; lat <= 60; lat += 30) {
    const line = doc.createElementNS(SVG_NS, "line");
    const { y } = project(lat, 0);
    line.setAttribute("x1", "0");
    line.setAttribute("x2", String(WIDTH));
    line.setAttribute("y1", String(y));
    line.setAttribute("y2", String(y));
    line.setAttribute("class", "graticule");
    svg.append(line);
  }
  for (const site of mapDoc.sites) {
    const { x, y } = project(site.lat, site.lon);
    const dot = doc.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(x));
    dot.setAttribute("cy", String(y));
    dot.setAttribute("r", "7");
    dot.setAttribute("fill", site.color);
    dot.setAttribute("class", `site-dot rollup-${site.rollup}`);
    dot.setAttribute("data-site", site.id);
    const title = doc.createElementNS(SVG_NS, "title");
    title.textContent = siteTitle(site);
    dot.append(title);
    svg.append(dot);
    const label = doc.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(x + 9));
    label.setAttribute("y", String(y + 4));
    label.setAttribute("class", "site-label");
    label.textContent = site.id;
    svg.append(label);
  }
  return svg;
}

export function renderMapPage(container: HTMLElement, ctx: PageContext): Cleanup {
  const { doc, api } = ctx;
  clear(container);
  const warn = el(doc, "div", { class: "error-box poll-banner", hidden: true });
  const mapBox = el(doc, "div", { id: "map-box" });
  const voSelect = el(doc, "select", { id: "map-vo" }, el(doc, "option", { value: "" }, "all VOs"));
  for (const vo of ctx.vos) {
    voSelect.append(el(doc, "option", { value: vo.name }, vo.name));
  }
  const countrySelect = el(
    doc,
    "select",
    { id: "map-country" },
    el(doc, "option", { value: "" }, "all countries"),
  );
  const legend = el(
    doc,
    "div",
    { class: "legend" },
    el(doc, "span", { class: "dot dot-green" }, " up"),
    el(doc, "span", { class: "dot dot-yellow" }, " warn"),
    el(doc, "span", { class: "dot dot-red" }, " down"),
  );
  container.append(
    el(
      doc,
      "div",
      { class: "panel" },
      el(doc, "h2", {}, "Testbed map"),
      warn,
      el(doc, "div", { class: "map-controls" }, voSelect, countrySelect, legend),
      mapBox,
    ),
  );

  let countriesLoaded = false;
  const activeFilter = (): { kind: string; value: string } => {
    if (voSelect.value) return { kind: "vo", value: voSelect.value };
    if (countrySelect.value) return { kind: "country", value: countrySelect.value };
    return { kind: "none", value: "" };
  };

  const tick = async () => {
    const mapDoc = await api.monitorMap(activeFilter());
    if (!countriesLoaded && activeFilter().kind === "none") {
      countriesLoaded = true;
      for (const country of Array.from(new Set(mapDoc.sites.map((s) => s.country))).sort()) {
        countrySelect.append(el(doc, "option", { value: country }, country));
      }
    }
    clear(mapBox);
    mapBox.append(renderWorldMap(doc, mapDoc));
  };
  voSelect.addEventListener("change", () => void tick().catch(() => undefined));
  countrySelect.addEventListener("change", () => void tick().catch(() => undefined));

  const poller = startPolling(
    tick,
    () => {
      warn.textContent = "gateway unreachable, retrying with backoff";
      warn.hidden = false;
    },
    () => {
      warn.hidden = true;
    },
  );
  return () => poller.stop();
}
