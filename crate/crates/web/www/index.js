import init, { fig1_curve, coherent_split_report, qfi_direction_sweep } from "./pkg/bosent_web.js";

const $ = (id) => document.getElementById(id);

function plot(canvas, series, { xLabel, yLabel, hline }) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 48;
  ctx.clearRect(0, 0, w, h);

  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y).concat(hline === undefined ? [] : [hline]);
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  let y0 = Math.min(...ys), y1 = Math.max(...ys);
  if (y1 - y0 < 1e-12) { y0 -= 1; y1 += 1; }
  const px = (x) => pad + (w - 2 * pad) * (x - x0) / ((x1 - x0) || 1);
  const py = (y) => h - pad - (h - 2 * pad) * (y - y0) / (y1 - y0);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.fillText(y1.toPrecision(4), 2, pad + 4);
  ctx.fillText(y0.toPrecision(4), 2, h - pad);
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 16);
  ctx.fillText(x1.toPrecision(3), w - pad - 24, h - pad + 16);
  ctx.fillText(xLabel, w / 2, h - 8);
  ctx.fillText(yLabel, 4, 16);

  const draw = (x, y, color, dash) => {
    ctx.strokeStyle = color;
    ctx.setLineDash(dash);
    ctx.beginPath();
    x.forEach((xi, i) => (i ? ctx.lineTo(px(xi), py(y[i])) : ctx.moveTo(px(xi), py(y[i]))));
    ctx.stroke();
  };
  if (hline !== undefined) draw([x0, x1], [hline, hline], "#888", [4, 4]);
  for (const s of series) draw(s.x, s.y, s.color, s.dash || []);
  ctx.setLineDash([]);
}

function show(el, err) {
  el.textContent = err ? String(err.message || err) : "";
  el.className = err ? "err" : "";
}

function updateFig1() {
  try {
    const flat = fig1_curve(Number($("fig1-n").value), Number($("fig1-order").value));
    const x = [], exact = [], approx = [];
    for (let i = 0; i < flat.length; i += 3) {
      x.push(flat[i]); exact.push(flat[i + 1]); approx.push(flat[i + 2]);
    }
    plot($("fig1-plot"), [
      { x, y: exact, color: "#1f5fa8" },
      { x, y: approx, color: "#c0392b", dash: [6, 4] },
    ], { xLabel: "2m", yLabel: "C_2m", hline: 1 });
    show($("fig1-msg"));
  } catch (e) {
    show($("fig1-msg"), e);
  }
}

function updateSplit() {
  const z = Number($("css-z").value), phi = Number($("css-phi").value);
  $("css-z-val").textContent = z.toFixed(2);
  $("css-phi-val").textContent = phi.toFixed(2);
  try {
    const r = JSON.parse(coherent_split_report(z, phi, Number($("css-n").value)));
    const f = (v) => (v === null ? "undefined" : v.toFixed(6));
    $("css-out").textContent = [
      `G_aa = ${f(r.g_aa)}   G_bb = ${f(r.g_bb)}   G_ab = ${f(r.g_ab)}`,
      `C_2  = ${f(r.csi)}   (entangled if > 1)`,
      `eta^2 = ${f(r.eta2)}   (number squeezed if < 1)`,
      `xi^2 = ${f(r.xi2)}   (entangled if < 1)`,
      `F_Q  = ${r.qfi.map(f).join(", ")}   for J_x, J_y, J_z; bound N = ${r.qfi_bound}`,
    ].join("\n");
    $("css-out").className = "";
  } catch (e) {
    show($("css-out"), e);
  }
}

function updateSweep() {
  const n = Number($("sweep-n").value);
  try {
    const y = Array.from(qfi_direction_sweep($("sweep-kind").value, n, Number($("sweep-z").value), 180));
    const x = y.map((_, i) => (Math.PI * i) / 180);
    plot($("sweep-plot"), [{ x, y, color: "#1f5fa8" }], { xLabel: "t", yLabel: "F_Q", hline: n });
    show($("sweep-msg"));
  } catch (e) {
    show($("sweep-msg"), e);
  }
}

await init();
for (const id of ["fig1-n", "fig1-order"]) $(id).addEventListener("input", updateFig1);
for (const id of ["css-n", "css-z", "css-phi"]) $(id).addEventListener("input", updateSplit);
for (const id of ["sweep-kind", "sweep-n", "sweep-z"]) $(id).addEventListener("input", updateSweep);
updateFig1();
updateSplit();
updateSweep();
