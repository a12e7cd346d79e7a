import { ApiError } from "../api.js";
import type { Cleanup, PageContext } from "../context.js";
import { clear, el } from "../dom.js";

// Compose a job description from the form fields. Quotes inside values are
// escaped so arbitrary arguments survive the round trip.
export function buildJdl(fields: {
  executable: string;
  args: string;
  vo: string;
  tags: string[];
  inputData: string[];
}): string {
  const q = (s: string) => `"${s.replace(/\\/g, "\\\\").replace(/"/g, '\\"')}"`;
  const lines = [
    `Executable = ${q(fields.executable)};`,
    `StdOutput = "job.out";`,
    `StdError = "job.err";`,
    `OutputSandbox = {"job.out", "job.err"};`,
    `VirtualOrganisation = ${q(fields.vo)};`,
  ];
  if (fields.args) lines.push(`Arguments = ${q(fields.args)};`);
  if (fields.tags.length > 0) {
    const clauses = fields.tags.map((t) => `Member(${q(t)}, other.RunTimeEnvironment)`);
    lines.push(`Requirements = ${clauses.join(" && ")};`);
  }
  if (fields.inputData.length > 0) {
    lines.push(`InputData = {${fields.inputData.map(q).join(", ")}};`);
  }
  return lines.join("\n") + "\n";
}

export function renderSubmitPage(container: HTMLElement, ctx: PageContext): Cleanup {
  const { doc, api, session } = ctx;
  clear(container);

  const errorBox = el(doc, "div", { class: "error-box", hidden: true });
  const executable = el(doc, "input", { id: "f-executable", placeholder: "sim.sh" });
  const args = el(doc, "input", { id: "f-arguments", placeholder: "--events 100" });
  const inputData = el(doc, "textarea", {
    id: "f-inputdata",
    placeholder: "lfn:/datatag/demo/atlas-run1.dat (one per line)",
  });

  const tagBox = el(doc, "div", { class: "tag-picker", id: "f-tags" });
  const ceSelect = el(doc, "select", { id: "f-ce", disabled: true });
  const viaBroker = el(doc, "input", {
    type: "radio",
    name: "target",
    id: "f-via-broker",
    checked: true,
  });
  const viaDirect = el(doc, "input", { type: "radio", name: "target", id: "f-via-direct" });
  viaBroker.addEventListener("change", () => ceSelect.toggleAttribute("disabled", true));
  viaDirect.addEventListener("change", () => ceSelect.toggleAttribute("disabled", false));

  const showError = (message: string) => {
    errorBox.textContent = message;
    errorBox.hidden = false;
  };

  const submit = async () => {
    errorBox.hidden = true;
    const exe = executable.value.trim();
    if (!exe) {
      showError("Executable is required.");
      return;
    }
    const tags = Array.from(
      tagBox.querySelectorAll<HTMLInputElement>("input[type=checkbox]:checked"),
    ).map((c) => c.value);
    const lfns = inputData.value
      .split("\n")
      .map((s) => s.trim())
      .filter((s) => s.length > 0);
    const jdl = buildJdl({
      executable: exe,
      args: args.value.trim(),
      vo: session.vo,
      tags,
      inputData: lfns,
    });
    const target = viaDirect.checked ? { ce: ceSelect.value } : { rb: session.rb };
    try {
      const job = await api.submitJob(jdl, session.subject, target);
      ctx.navigate(`#/jobs/${job.id}`);
    } catch (error) {
      if (error instanceof ApiError) showError(`${error.code}: ${error.message}`);
      else showError(String(error));
    }
  };

  const form = el(
    doc,
    "div",
    { class: "panel form" },
    el(doc, "h2", {}, "Submit a job"),
    errorBox,
    el(doc, "label", {}, "Executable", executable),
    el(doc, "label", {}, "Arguments", args),
    el(doc, "label", {}, "Runtime environment tags", tagBox),
    el(doc, "label", {}, "Input data (logical file names)", inputData),
    el(
      doc,
      "fieldset",
      { class: "target-choice" },
      el(doc, "legend", {}, "Target"),
      el(doc, "label", { class: "inline" }, viaBroker, ` broker match (${session.rb})`),
      el(doc, "label", { class: "inline" }, viaDirect, " direct to computing element ", ceSelect),
    ),
    el(doc, "button", { id: "f-submit", onclick: () => void submit() }, "Submit"),
  );
  container.append(form);

  // tag picker and direct-CE choices come from the live resource directory
  void api
    .resources("edg", "(objectClass=ComputingElement)")
    .then((entries) => {
      const tags = new Set<string>();
      for (const entry of entries) {
        for (const tag of entry.attributes.RunTimeEnvironment ?? []) tags.add(tag);
        const ceId = entry.attributes.CEId?.[0];
        if (ceId) ceSelect.append(el(doc, "option", { value: ceId }, ceId));
      }
      for (const tag of Array.from(tags).sort()) {
        const box = el(doc, "input", { type: "checkbox", value: tag });
        tagBox.append(el(doc, "label", { class: "inline" }, box, ` ${tag}`));
      }
    })
    .catch((error) => showError(`cannot load resources: ${String(error)}`));

  return () => undefined;
}
