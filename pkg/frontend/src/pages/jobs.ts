import type { JobSummary } from "../api.js";
import type { Cleanup, PageContext } from "../context.js";
import { clear, el, fmtBytes, fmtTime } from "../dom.js";
import { startPolling } from "../poll.js";

const TERMINAL = new Set(["DONE_OK", "DONE_FAILED", "ABORTED", "CANCELLED"]);

function banner(doc: Document): HTMLElement {
  return el(doc, "div", { class: "error-box poll-banner", hidden: true });
}

export function renderJobsPage(container: HTMLElement, ctx: PageContext): Cleanup {
  const { doc, api } = ctx;
  clear(container);
  const warn = banner(doc);
  const tbody = el(doc, "tbody", { id: "jobs-body" });
  container.append(
    el(
      doc,
      "div",
      { class: "panel" },
      el(doc, "h2", {}, "Jobs"),
      warn,
      el(
        doc,
        "table",
        { class: "jobs-table" },
        el(
          doc,
          "thead",
          {},
          el(
            doc,
            "tr",
            {},
            ...["job", "state", "computing element", "submitted", "last event", ""].map((h) =>
              el(doc, "th", {}, h),
            ),
          ),
        ),
        tbody,
      ),
    ),
  );

  const renderRows = (jobs: JobSummary[]) => {
    clear(tbody);
    for (const job of jobs) {
      const cancelBtn = el(
        doc,
        "button",
        {
          class: "cancel-btn",
          disabled: TERMINAL.has(job.state),
          onclick: (event) => {
            event.stopPropagation();
            void api.cancel(job.id).then(() => tick());
          },
        },
        "cancel",
      );
      const row = el(
        doc,
        "tr",
        { class: `state-${job.state}`, "data-job": job.id, onclick: () => ctx.navigate(`#/jobs/${job.id}`) },
        el(doc, "td", { class: "mono" }, job.id),
        el(doc, "td", { class: "job-state" }, job.state),
        el(doc, "td", { class: "mono" }, job.ce ?? "-"),
        el(doc, "td", {}, fmtTime(job.submitted_at)),
        el(doc, "td", {}, job.reason),
        el(doc, "td", {}, cancelBtn),
      );
      tbody.append(row);
    }
  };

  const tick = async () => renderRows(await api.jobs());
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

export function renderJobDetailPage(
  container: HTMLElement,
  ctx: PageContext,
  jobId: string,
): Cleanup {
  const { doc, api } = ctx;
  clear(container);
  const warn = banner(doc);
  const headline = el(doc, "h2", {}, `Job ${jobId}`);
  const stateLine = el(doc, "p", { id: "detail-state", class: "mono" }, "loading");
  const eventsBox = el(doc, "pre", { id: "detail-events", class: "events" });
  const outputBox = el(doc, "div", { id: "detail-output" });
  const cancelBtn = el(
    doc,
    "button",
    { class: "cancel-btn", onclick: () => void api.cancel(jobId).then(() => tick()) },
    "cancel",
  );
  container.append(
    el(doc, "div", { class: "panel" }, headline, warn, stateLine, cancelBtn, eventsBox, outputBox),
  );

  let outputLoaded = false;
  const tick = async () => {
    const [job, events] = await Promise.all([api.job(jobId), api.events(jobId)]);
    stateLine.textContent = `${job.state}  ce=${job.ce ?? "-"}  ${job.reason}`;
    eventsBox.textContent = events
      .map((e) => `${e.t.toFixed(3)}  ${e.component.padEnd(4)} ${e.from} -> ${e.to}  ${e.reason}`)
      .join("\n");
    if (TERMINAL.has(job.state)) {
      cancelBtn.toggleAttribute("disabled", true);
      if (!outputLoaded) {
        outputLoaded = true;
        const listing = await api.output(jobId);
        clear(outputBox);
        outputBox.append(el(doc, "h3", {}, "Output sandbox"));
        for (const file of listing.files) {
          outputBox.append(el(doc, "div", { class: "mono" }, `${file.name}  ${fmtBytes(file.size)}`));
        }
        outputBox.append(
          el(
            doc,
            "a",
            { href: `/v1/jobs/${jobId}/output`, download: `${jobId}-output.json` },
            "download listing",
          ),
        );
      }
    }
  };

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
