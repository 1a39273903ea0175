import init, { walkProfile, summedDistribution, surjectionSweep } from "./pkg/fewrel_wasm.js";

const $ = (id) => document.getElementById(id);

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
}

function plotLines(canvas, series, { logY = false, xs } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  axes(ctx, w, h, pad);
  const tf = (y) => (logY ? Math.log10(Math.max(y, 1e-16)) : y);
  const all = series.flatMap((s) => s.values.map(tf));
  if (all.length === 0) return;
  const lo = logY ? Math.floor(Math.min(...all)) : 0;
  const hi = logY ? Math.ceil(Math.max(...all)) : Math.max(...all, 1e-9) * 1.05;
  const n = Math.max(...series.map((s) => s.values.length));
  const x = (i) => pad + ((w - 1.5 * pad) * i) / Math.max(n - 1, 1);
  const y = (v) => h - pad - ((h - 1.5 * pad) * (tf(v) - lo)) / (hi - lo || 1);
  ctx.fillText(logY ? `1e${hi}` : hi.toFixed(2), 2, pad / 2 + 4);
  ctx.fillText(logY ? `1e${lo}` : "0", 2, h - pad);
  ctx.fillText(`l = ${xs ? xs[0] : 1}`, pad, h - pad + 16);
  ctx.fillText(`${xs ? xs[n - 1] : n}`, w - pad, h - pad + 16);
  series.forEach((s, k) => {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.values.forEach((v, i) => (i ? ctx.lineTo(x(i), y(v)) : ctx.moveTo(x(i), y(v))));
    ctx.stroke();
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, w - 160, 16 + 14 * k);
  });
}

function plotBars(canvas, values) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  axes(ctx, w, h, pad);
  const hi = Math.max(...values);
  const bw = (w - 1.5 * pad) / values.length;
  ctx.fillText(hi.toFixed(4), 2, pad / 2 + 4);
  values.forEach((v, i) => {
    const bh = ((h - 1.5 * pad) * v) / hi;
    ctx.fillStyle = "#4a7ab5";
    ctx.fillRect(pad + i * bw + 1, h - pad - bh, Math.max(bw - 2, 1), bh);
  });
  ctx.strokeStyle = "#b55";
  const u = h - pad - ((h - 1.5 * pad) * (1 / values.length)) / hi;
  ctx.beginPath();
  ctx.moveTo(pad, u);
  ctx.lineTo(w - pad / 2, u);
  ctx.stroke();
}

function guard(out, f) {
  try {
    f();
  } catch (e) {
    out.innerHTML = `<span class="error">${e.message ?? e}</span>`;
  }
}

function runWalk() {
  guard($("w-info"), () => {
    const r = JSON.parse(walkProfile($("w-group").value, $("w-marks").value, Number($("w-l").value)));
    const lines = [`order ${r.order}, marks [${r.marks}]`];
    if (!r.irreducible) {
      lines.push(`reducible: marks generate proper subgroup {${r.generated}}`);
    } else {
      lines.push(`period ${r.period}` + (r.subgroup ? `, index-2 subgroup {${r.subgroup}}` : ""));
      lines.push(`TV at l = ${r.tv.length}: ${r.tv[r.tv.length - 1].toExponential(3)}`);
    }
    $("w-info").textContent = lines.join("\n");
    plotLines($("w-plot"), [{ label: "TV to target (log)", color: "#4a7ab5", values: r.tv }], { logY: true });
  });
}

function runDistribution() {
  guard($("d-info"), () => {
    const d = JSON.parse(summedDistribution($("d-group").value, $("d-marks").value, Number($("d-l").value)));
    $("d-info").textContent = `${d.length} elements; the red line is the uniform level 1/${d.length}`;
    plotBars($("d-plot"), d);
  });
}

function runSweep() {
  guard($("s-table"), () => {
    const r = JSON.parse(
      surjectionSweep(
        $("s-j").value,
        $("s-f").value,
        Number($("s-q").value),
        Number($("s-rho").value),
        $("s-l").value,
        Number($("s-trials").value),
        BigInt($("s-seed").value),
      ),
    );
    const xs = r.rows.map((row) => row.l);
    plotLines(
      $("s-plot"),
      [
        { label: "estimate", color: "#4a7ab5", values: r.rows.map((row) => row.estimate) },
        { label: "bound (capped at 1)", color: "#b55", values: r.rows.map((row) => Math.min(row.bound, 1)) },
      ],
      { xs },
    );
    const fmt = (v) => (v === null || v === undefined ? "-" : v.toFixed(4));
    const body = r.rows
      .map((row) => `<tr><td>${row.l}</td><td>${fmt(row.estimate)} ± ${fmt(row.ci)}</td><td>${fmt(row.exact)}</td><td>${fmt(row.epsilon)}</td><td>${fmt(row.bound)}</td></tr>`)
      .join("");
    $("s-table").innerHTML =
      `<p>D = ${r.dimension}, m between ${r.min_generators.lower} and ${r.min_generators.upper}, period ${r.period}</p>` +
      `<table><tr><th>l</th><th>estimate</th><th>exact</th><th>ε</th><th>bound</th></tr>${body}</table>`;
  });
}

await init();
$("w-run").addEventListener("click", runWalk);
$("d-run").addEventListener("click", runDistribution);
$("s-run").addEventListener("click", runSweep);
runWalk();
runDistribution();
