import type { Cleanup, PageContext } from "../context.js";
import { clear, el } from "../dom.js";

// Filter text assembled from the builder rows; free-text entry stays possible.
export function composeFilter(
  clauses: { attribute: string; op: string; value: string }[],
): string {
  const parts = clauses
    .filter((c) => c.attribute && (c.value || c.op === "=*"))
    .map((c) => (c.op === "=*" ? `(${c.attribute}=*)` : `(${c.attribute}${c.op}${c.value})`));
  if (parts.length === 0) return "";
  if (parts.length === 1) return parts[0];
  return `(&${parts.join("")})`;
}

export function renderResourcesPage(container: HTMLElement, ctx: PageContext): Cleanup {
  const { doc, api } = ctx;
  clear(container);
  const errorBox = el(doc, "div", { class: "error-box", hidden: true });
  const classSelect = el(
    doc,
    "select",
    { id: "res-class" },
    el(doc, "option", { value: "edg" }, "edg"),
    el(doc, "option", { value: "glue" }, "glue"),
  );
  const attrInput = el(doc, "input", { id: "res-attr", placeholder: "FreeCPUs" });
  const opSelect = el(
    doc,
    "select",
    { id: "res-op" },
    ...["=", ">=", "<=", "=*"].map((op) => el(doc, "option", { value: op }, op)),
  );
  const valueInput = el(doc, "input", { id: "res-value", placeholder: "1" });
  const rawInput = el(doc, "input", {
    id: "res-raw",
    placeholder: "(&(objectClass=GlueCE)(FreeCPUs>=1))",
  });
  const resultsBox = el(doc, "div", { id: "res-results" });

  const search = async () => {
    errorBox.hidden = true;
    const raw = rawInput.value.trim();
    const composed = composeFilter([
      { attribute: attrInput.value.trim(), op: opSelect.value, value: valueInput.value.trim() },
    ]);
    const query = raw || composed;
    try {
      const entries = await api.resources(classSelect.value as "edg" | "glue", query);
      clear(resultsBox);
      resultsBox.append(el(doc, "p", {}, `${entries.length} entries`));
      for (const entry of entries) {
        const attrs = Object.entries(entry.attributes)
          .map(([k, v]) => `${k}: ${v.join(", ")}`)
          .join("\n");
        resultsBox.append(
          el(
            doc,
            "details",
            { class: "resource-entry" },
            el(doc, "summary", { class: "mono" }, entry.dn),
            el(doc, "pre", {}, `objectClass: ${entry.objectClasses.join(", ")}\n${attrs}`),
          ),
        );
      }
    } catch (error) {
      errorBox.textContent = String(error);
      errorBox.hidden = false;
    }
  };

  container.append(
    el(
      doc,
      "div",
      { class: "panel" },
      el(doc, "h2", {}, "Resources"),
      errorBox,
      el(
        doc,
        "div",
        { class: "query-builder" },
        classSelect,
        attrInput,
        opSelect,
        valueInput,
        el(doc, "span", {}, " or raw: "),
        rawInput,
        el(doc, "button", { id: "res-search", onclick: () => void search() }, "Search"),
      ),
      resultsBox,
    ),
  );
  void search();
  return () => undefined;
}

export function renderReplicasPage(container: HTMLElement, ctx: PageContext): Cleanup {
  const { doc, api } = ctx;
  clear(container);
  const errorBox = el(doc, "div", { class: "error-box", hidden: true });
  const lfnInput = el(doc, "input", {
    id: "rep-lfn",
    placeholder: "lfn:/datatag/demo/atlas-run1.dat",
  });
  const resultsBox = el(doc, "div", { id: "rep-results" });

  const lookup = async () => {
    errorBox.hidden = true;
    const lfn = lfnInput.value.trim();
    if (!lfn) return;
    try {
      const result = await api.replicas(lfn);
      clear(resultsBox);
      if (result.replicas.length === 0) {
        resultsBox.append(el(doc, "p", {}, "no replicas registered"));
      }
      for (const replica of result.replicas) {
        resultsBox.append(
          el(doc, "div", { class: "mono replica-row" }, `${replica.url}  (${replica.size} bytes)`),
        );
      }
    } catch (error) {
      errorBox.textContent = String(error);
      errorBox.hidden = false;
    }
  };

  container.append(
    el(
      doc,
      "div",
      { class: "panel" },
      el(doc, "h2", {}, "Replica catalogue"),
      errorBox,
      el(
        doc,
        "div",
        { class: "query-builder" },
        lfnInput,
        el(doc, "button", { id: "rep-lookup", onclick: () => void lookup() }, "Look up"),
      ),
      resultsBox,
    ),
  );
  return () => undefined;
}
