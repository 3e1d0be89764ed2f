// Built by `wasm-bindgen --target web` into ./pkg (see the README).
import init, { tradeoffCurve, epsilonFromTally, simulateAudit } from "./pkg/obsaudit_wasm_demo.js";

const $ = (id) => document.getElementById(id);

function axes(ctx, w, h, pad) {
  ctx.strokeStyle = "#5b6474";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
}

function polyline(ctx, ys, color, w, h, pad) {
  const n = ys.length;
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ys.forEach((y, i) => {
    const px = pad + (i / (n - 1)) * (w - 2 * pad);
    const py = h - pad - y * (h - 2 * pad);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
}

function drawCurve() {
  const mu = Number($("curve-mu").value);
  const tau = Number($("curve-tau").value);
  $("curve-mu-out").textContent = mu.toFixed(2);
  $("curve-tau-out").textContent = tau.toFixed(3);

  const canvas = $("curve-canvas");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  ctx.clearRect(0, 0, w, h);
  axes(ctx, w, h, pad);
  ctx.fillStyle = "#5b6474";
  ctx.fillText("type I error x", w / 2 - 30, h - 8);
  ctx.fillText("0", pad - 12, h - pad + 12);
  ctx.fillText("1", w - pad - 3, h - pad + 12);
  ctx.fillText("1", pad - 12, pad + 4);

  const points = 201;
  polyline(ctx, tradeoffCurve(0, 0, points), "#9aa3b2", w, h, pad);
  polyline(ctx, tradeoffCurve(mu, 0, points), "#2456c7", w, h, pad);
  polyline(ctx, tradeoffCurve(mu, tau, points), "#d9822b", w, h, pad);
}

function show(el, text, isError) {
  el.textContent = text;
  el.classList.toggle("error", Boolean(isError));
}

function onTally(event) {
  event.preventDefault();
  const f = new FormData(event.target);
  const out = $("tally-out");
  try {
    const e = epsilonFromTally(
      Number(f.get("m")),
      Number(f.get("cPrime")),
      Number(f.get("c")),
      Number(f.get("gamma")),
      Number(f.get("delta")),
      Number(f.get("tau")),
    );
    const sat = e.saturated ? " (saturated: every μ in range rejected)" : "";
    show(out, `ε ≥ ${e.epsilon.toFixed(3)}   strongest accepted μ = ${e.mu.toFixed(4)}${sat}`);
  } catch (err) {
    show(out, String(err.message ?? err), true);
  }
}

function drawBars(values, eps) {
  const canvas = $("sim-canvas");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 24;
  ctx.clearRect(0, 0, w, h);
  axes(ctx, w, h, pad);
  const top = Math.max(eps, ...values, 1e-9) * 1.1;
  const bw = (w - 2 * pad) / values.length;
  values.forEach((v, i) => {
    const bh = (v / top) * (h - 2 * pad);
    ctx.fillStyle = v > eps ? "#d9822b" : "#2456c7";
    ctx.fillRect(pad + i * bw + 1, h - pad - bh, Math.max(bw - 2, 1), bh);
  });
  const ty = h - pad - (eps / top) * (h - 2 * pad);
  ctx.strokeStyle = "#b3261e";
  ctx.setLineDash([5, 4]);
  ctx.beginPath();
  ctx.moveTo(pad, ty);
  ctx.lineTo(w - pad, ty);
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.fillStyle = "#b3261e";
  ctx.fillText(`true ε = ${eps}`, w - pad - 70, ty - 4);
}

function onSimulate(event) {
  event.preventDefault();
  const f = new FormData(event.target);
  const out = $("sim-out");
  show(out, "running…");
  // Let the status paint before the synchronous run blocks the thread.
  setTimeout(() => {
    const eps = Number(f.get("eps"));
    try {
      const t0 = performance.now();
      const s = simulateAudit(
        Number(f.get("n")),
        Number(f.get("k")),
        eps,
        Number(f.get("fraction")),
        Number(f.get("reps")),
        Number(f.get("seed")),
      );
      const secs = ((performance.now() - t0) / 1000).toFixed(1);
      show(out, `mean ε̂ = ${s.mean.toFixed(3)} ± ${s.std.toFixed(3)}   guess accuracy = ${s.accuracy.toFixed(3)}   (${secs}s)`);
      drawBars(Array.from(s.perRepetition), eps);
    } catch (err) {
      show(out, String(err.message ?? err), true);
    }
  }, 20);
}

await init();
$("curve-mu").addEventListener("input", drawCurve);
$("curve-tau").addEventListener("input", drawCurve);
$("tally-form").addEventListener("submit", onTally);
$("sim-form").addEventListener("submit", onSimulate);
drawCurve();
