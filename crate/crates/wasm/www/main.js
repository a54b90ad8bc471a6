import init, { sample_solution, phase_portrait, perturbed_run } from "./pkg/ssps_wasm.js";

const $ = (id) => document.getElementById(id);

// Draws polylines into a canvas with a shared, padded bounding box.
function plot(canvas, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  let x0 = Infinity, x1 = -Infinity, y0 = Infinity, y1 = -Infinity;
  for (const s of series) {
    for (let i = 0; i < s.x.length; i++) {
      x0 = Math.min(x0, s.x[i]); x1 = Math.max(x1, s.x[i]);
      y0 = Math.min(y0, s.y[i]); y1 = Math.max(y1, s.y[i]);
    }
  }
  if (!isFinite(x0)) return;
  const pad = 0.05 * (y1 - y0 || 1);
  y0 -= pad; y1 += pad;
  const sx = (v) => 40 + (w - 50) * (v - x0) / (x1 - x0 || 1);
  const sy = (v) => h - 20 - (h - 30) * (v - y0) / (y1 - y0);

  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  if (y0 < 0 && y1 > 0) { ctx.moveTo(sx(x0), sy(0)); ctx.lineTo(sx(x1), sy(0)); }
  if (x0 < 0 && x1 > 0) { ctx.moveTo(sx(0), sy(y0)); ctx.lineTo(sx(0), sy(y1)); }
  ctx.stroke();
  ctx.fillStyle = "#777";
  ctx.fillText(y1.toPrecision(3), 2, 12);
  ctx.fillText(y0.toPrecision(3), 2, h - 22);
  ctx.fillText(x0.toPrecision(3), 40, h - 6);
  ctx.fillText(x1.toPrecision(3), w - 50, h - 6);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width || 1;
    ctx.setLineDash(s.dash || []);
    ctx.beginPath();
    for (let i = 0; i < s.x.length; i++) {
      const px = sx(s.x[i]), py = sy(s.y[i]);
      i ? ctx.lineTo(px, py) : ctx.moveTo(px, py);
    }
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function status(id, text, isError = false) {
  const el = $(id);
  el.textContent = text;
  el.classList.toggle("error", isError);
}

const params = () => ({ model: $("model").value, r: Number($("r").value) });

function drawCurve() {
  const { model, r } = params();
  try {
    const c = sample_solution(model, r, 801);
    plot($("curve"), [
      { x: c.t, y: c.x, color: "#1f5fbf", width: 2 },
      { x: c.t, y: c.dx.map((v) => v / 10), color: "#bf6f1f", dash: [4, 3] },
    ]);
    const tail = model === "exp" ? `, c = ${c.offset_c.toFixed(9)}` : "";
    status("curve-status", `k = ${c.modulus.toFixed(12)}${tail}   (solid x, dashed x′/10)`);
    c.free();
  } catch (e) {
    plot($("curve"), []);
    status("curve-status", String(e.message || e), true);
  }
}

function drawPhase() {
  const { model, r } = params();
  try {
    const p = phase_portrait(model, r, Number($("orbits").value));
    const x = p.x, y = p.y, starts = p.starts, periods = p.periods, hi = p.highlight;
    const series = [];
    for (let i = 0; i + 1 < starts.length; i++) {
      const special = i === hi;
      series.push({
        x: x.subarray(starts[i], starts[i + 1]),
        y: y.subarray(starts[i], starts[i + 1]),
        color: special ? "#c0202a" : "#8aa",
        width: special ? 2.5 : 1,
      });
    }
    plot($("phase"), series);
    status("phase-status", `periods ${Array.from(periods, (v) => v.toFixed(3)).join(", ")}; red: period 2`);
    p.free();
  } catch (e) {
    plot($("phase"), []);
    status("phase-status", String(e.message || e), true);
  }
}

function drawRun() {
  const { model, r } = params();
  try {
    const run = perturbed_run(model, r, Number($("eps").value), Number($("horizon").value), Number($("intervals").value));
    const stopped = run.stopped;
    if (stopped) {
      plot($("sim"), []);
      status("sim-status", `stopped: ${stopped}`, true);
    } else {
      const t = run.t, xs = run.x_sim, xc = run.x_closed;
      plot($("sim"), [
        { x: t, y: xc, color: "#999", dash: [5, 4] },
        { x: t, y: xs, color: "#2a8a3a", width: 2 },
      ]);
      let gap = 0;
      for (let i = 0; i < t.length; i++) if (t[i] >= 0) gap = Math.max(gap, Math.abs(xs[i] - xc[i]));
      status("sim-status", `max |x_sim − x_closed| on [0, T] = ${gap.toExponential(3)}   (dashed: closed form)`);
    }
    run.free();
  } catch (e) {
    plot($("sim"), []);
    status("sim-status", String(e.message || e), true);
  }
}

function redraw() {
  drawCurve();
  drawPhase();
}

await init();
$("r-slider").addEventListener("input", () => { $("r").value = $("r-slider").value; redraw(); });
$("r").addEventListener("change", () => { $("r-slider").value = $("r").value; redraw(); drawRun(); });
$("r-slider").addEventListener("change", drawRun);
$("model").addEventListener("change", () => { redraw(); drawRun(); });
$("orbits").addEventListener("change", drawPhase);
$("run").addEventListener("click", drawRun);
redraw();
drawRun();
