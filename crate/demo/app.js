// Plain-canvas front end for the simulator's wasm bindings. No framework;
// each section reads its inputs, calls one exported function, and redraws.

import init, { regret_experiment, bp_playground, selection_demo } from "./pkg/fedsel_wasm.js";

const status = document.getElementById("status");
const COLORS = ["#2563eb", "#dc2626", "#059669", "#9333ea", "#d97706"];

function num(id) {
  return Number(document.getElementById(id).value);
}

// --- tiny plotting helpers ---------------------------------------------

function frame(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "white";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  return { ctx, left: 52, right: canvas.width - 14, top: 16, bottom: canvas.height - 34 };
}

function axes(f, xMax, yMax, xLabel, yLabel) {
  const { ctx } = f;
  ctx.strokeStyle = "#94a3b8";
  ctx.lineWidth = 1;
  ctx.strokeRect(f.left, f.top, f.right - f.left, f.bottom - f.top);
  ctx.fillStyle = "#475569";
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(xLabel, (f.left + f.right) / 2, f.bottom + 24);
  ctx.fillText("1", f.left, f.bottom + 12);
  ctx.fillText(String(xMax), f.right, f.bottom + 12);
  ctx.save();
  ctx.translate(14, (f.top + f.bottom) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();
  ctx.textAlign = "right";
  ctx.fillText(yMax.toPrecision(3), f.left - 4, f.top + 8);
  ctx.fillText("0", f.left - 4, f.bottom);
  ctx.textAlign = "left";
}

function polyline(f, points, xMax, yMax, color) {
  const { ctx } = f;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.6;
  ctx.beginPath();
  points.forEach(([x, y], i) => {
    const px = f.left + ((f.right - f.left) * x) / xMax;
    const py = f.bottom - ((f.bottom - f.top) * Math.min(y, yMax)) / yMax;
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
}

function legend(f, entries) {
  const { ctx } = f;
  ctx.font = "11px sans-serif";
  entries.forEach(([label, color], i) => {
    const y = f.top + 14 + 15 * i;
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(f.left + 8, y);
    ctx.lineTo(f.left + 26, y);
    ctx.stroke();
    ctx.fillStyle = "#334155";
    ctx.fillText(label, f.left + 31, y + 3.5);
  });
}

function bars(f, values, colorFor, xLabel, yLabel) {
  const yMax = Math.max(...values) * 1.1 || 1;
  axes(f, values.length - 1, yMax, xLabel, yLabel);
  const w = (f.right - f.left) / values.length;
  values.forEach((v, i) => {
    const h = ((f.bottom - f.top) * v) / yMax;
    f.ctx.fillStyle = colorFor(i);
    f.ctx.fillRect(f.left + i * w + 2, f.bottom - h, w - 4, h);
  });
}

function busy(button, fn) {
  button.disabled = true;
  status.textContent = "Running…";
  // Yield to the event loop so the button state paints before the compute.
  setTimeout(() => {
    try {
      fn();
      status.textContent = "";
    } catch (e) {
      status.textContent = `Error: ${e}`;
    } finally {
      button.disabled = false;
    }
  }, 16);
}

// --- section 1: regret vs bound -----------------------------------------

function runRegret() {
  const params = {
    n: num("rg-n"), k: num("rg-k"), t: num("rg-t"),
    trials: num("rg-trials"), mu: num("rg-mu"), seed: num("rg-seed"),
  };
  const out = JSON.parse(regret_experiment(JSON.stringify(params)));
  const f = frame(document.getElementById("rg-plot"));
  const xMax = out.bound[out.bound.length - 1][0];
  const yMax = out.bound[out.bound.length - 1][1] * 1.05;
  axes(f, xMax, yMax, "slot", "cumulative regret");
  polyline(f, out.bound, xMax, yMax, COLORS[1]);
  polyline(f, out.regret, xMax, yMax, COLORS[0]);
  legend(f, [["mean regret", COLORS[0]], ["upper bound", COLORS[1]]]);
  const lastReg = out.regret[out.regret.length - 1][1];
  const lastBound = out.bound[out.bound.length - 1][1];
  document.getElementById("rg-stat").textContent =
    `${out.arms} subset arms, gap range [${out.r_min.toFixed(3)}, ${out.r_max.toFixed(3)}] — ` +
    `final mean regret ${lastReg.toFixed(1)} vs bound ${lastBound.toFixed(1)}`;
}

// --- section 2: belief propagation ---------------------------------------

function runBp() {
  const params = {
    n: num("bp-n"), area: num("bp-area"), link_radius: num("bp-radius"),
    c_db: num("bp-cdb"), beta: num("bp-beta"), seed: num("bp-seed"),
  };
  const out = JSON.parse(bp_playground(JSON.stringify(params)));

  // Graph: nodes sized by opinion, shaded by belief.
  const canvas = document.getElementById("bp-graph");
  const f = frame(canvas);
  const pad = 28;
  const xs = out.positions.map((p) => p[0]);
  const ys = out.positions.map((p) => p[1]);
  const span = Math.max(Math.max(...xs) - Math.min(...xs), Math.max(...ys) - Math.min(...ys)) || 1;
  const sx = (x) => pad + ((canvas.width - 2 * pad) * (x - Math.min(...xs))) / span;
  const sy = (y) => canvas.height - pad - ((canvas.height - 2 * pad) * (y - Math.min(...ys))) / span;
  f.ctx.strokeStyle = "#cbd5e1";
  out.edges.forEach(([a, b]) => {
    f.ctx.beginPath();
    f.ctx.moveTo(sx(out.positions[a][0]), sy(out.positions[a][1]));
    f.ctx.lineTo(sx(out.positions[b][0]), sy(out.positions[b][1]));
    f.ctx.stroke();
  });
  const bMax = Math.max(...out.beliefs) || 1;
  out.positions.forEach((p, i) => {
    const r = 5 + 9 * out.opinions[i];
    const heat = Math.round(235 - 180 * (out.beliefs[i] / bMax));
    f.ctx.fillStyle = `rgb(37, ${heat > 99 ? heat : 99}, 235)`;
    f.ctx.beginPath();
    f.ctx.arc(sx(p[0]), sy(p[1]), r, 0, 2 * Math.PI);
    f.ctx.fill();
    f.ctx.fillStyle = "#0f172a";
    f.ctx.font = "10px sans-serif";
    f.ctx.fillText(String(i), sx(p[0]) + r + 2, sy(p[1]) + 3);
  });
  f.ctx.fillStyle = "#475569";
  f.ctx.font = "11px sans-serif";
  f.ctx.fillText("size = opinion, shade = belief", pad, 14);

  // Residual curve on a log axis.
  const f2 = frame(document.getElementById("bp-resid"));
  const resid = out.residuals.map((r, i) => [i + 1, Math.max(r, 1e-16)]);
  const logs = resid.map(([i, r]) => [i, Math.log10(r)]);
  const lo = Math.min(...logs.map(([, v]) => v), -10);
  const shifted = logs.map(([i, v]) => [i, v - lo]);
  axes(f2, Math.max(resid.length, 2), Math.max(...shifted.map(([, v]) => v), 1), "sweep", "log10 residual");
  polyline(f2, shifted, Math.max(resid.length, 2), Math.max(...shifted.map(([, v]) => v), 1), COLORS[2]);

  document.getElementById("bp-stat").textContent =
    `λ = ${out.lambda.toFixed(3)} (${out.lambda_satisfied ? "contraction certified: unique fixed point" : "certificate not satisfied"}), ` +
    `${out.converged ? "converged" : "sweep cap reached"} in ${out.iterations} sweep(s)`;
}

// --- section 3: selection demo --------------------------------------------

function runSelection() {
  const params = {
    n: num("sd-n"), k: num("sd-k"), t: num("sd-t"),
    trials: num("sd-trials"), seed: num("sd-seed"),
    algorithms: ["quick_init_ucb", "bp_ucb", "random"],
  };
  const out = JSON.parse(selection_demo(JSON.stringify(params)));

  const f = frame(document.getElementById("sd-acc"));
  axes(f, out.t, 1.0, "slot", "held-out accuracy");
  out.runs.forEach((run, i) => polyline(f, run.accuracy, out.t, 1.0, COLORS[i]));
  legend(f, out.runs.map((run, i) => [run.algorithm, COLORS[i]]));

  const f2 = frame(document.getElementById("sd-hist"));
  const counts = out.runs[0].selection_counts;
  bars(f2, counts, (i) => (out.iid_clients.includes(i) ? COLORS[2] : "#cbd5e1"),
       "client id", `mean selections (${out.runs[0].algorithm})`);
  f2.ctx.fillStyle = "#475569";
  f2.ctx.font = "11px sans-serif";
  f2.ctx.fillText("green = clean-data clients", f2.left + 8, f2.top + 12);

  const finals = out.runs
    .map((r) => `${r.algorithm} ${(r.accuracy[r.accuracy.length - 1][1] * 100).toFixed(1)}%`)
    .join(", ");
  document.getElementById("sd-stat").textContent = `final mean accuracy — ${finals}`;
}

// --- boot -----------------------------------------------------------------

init().then(() => {
  status.textContent = "";
  document.getElementById("rg-run").onclick = (e) => busy(e.target, runRegret);
  document.getElementById("bp-run").onclick = (e) => busy(e.target, runBp);
  document.getElementById("sd-run").onclick = (e) => busy(e.target, runSelection);
  runRegret();
  runBp();
  runSelection();
}).catch((e) => {
  status.textContent =
    `Could not load the wasm module (${e}). Build it first: see the README's demo section.`;
});
