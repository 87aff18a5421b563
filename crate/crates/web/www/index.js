import init, { roomResponse, competitorSequence, separate } from "./pkg/adaptive_array_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function plot(canvas, ys, { points = false, reference = null } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  let lo = Math.min(...ys, reference ?? Infinity);
  let hi = Math.max(...ys, reference ?? -Infinity);
  if (hi === lo) { hi += 1; lo -= 1; }
  const pad = 10;
  const x = (i) => pad + (i / Math.max(ys.length - 1, 1)) * (w - 2 * pad);
  const y = (v) => h - pad - ((v - lo) / (hi - lo)) * (h - 2 * pad);
  if (reference !== null) {
    ctx.strokeStyle = "#bbb";
    ctx.beginPath();
    ctx.moveTo(pad, y(reference));
    ctx.lineTo(w - pad, y(reference));
    ctx.stroke();
  }
  ctx.strokeStyle = "#1f5fa8";
  ctx.fillStyle = "#1f5fa8";
  ctx.beginPath();
  ys.forEach((v, i) => (i ? ctx.lineTo(x(i), y(v)) : ctx.moveTo(x(i), y(v))));
  ctx.stroke();
  if (points) ys.forEach((v, i) => ctx.fillRect(x(i) - 2, y(v) - 2, 4, 4));
}

function guard(out, f) {
  try {
    f();
  } catch (e) {
    $(out).textContent = `error: ${e.message ?? e}`;
  }
}

function showRir() {
  guard("rir-out", () => {
    const r = roomResponse(num("rir-t60"), num("rir-angle"), num("rir-dist"));
    plot($("rir-plot"), Array.from(r.samples));
    const t60 = Number.isNaN(r.measuredT60) ? "-" : `${(r.measuredT60 * 1e3).toFixed(0)} ms`;
    const rc = Number.isNaN(r.criticalDistance) ? "-" : `${r.criticalDistance.toFixed(2)} m`;
    $("rir-out").textContent = `${r.samples.length} samples, measured T60 ${t60}, critical distance ${rc}`;
    r.free();
  });
}

function showSequence() {
  guard("seq-out", () => {
    const d = num("seq-d");
    const seq = Array.from(competitorSequence(d, num("seq-eps")));
    plot($("seq-plot"), seq, { points: true, reference: d });
    $("seq-out").textContent = seq.map((v, i) => `a=${i + 1}  ${v.toFixed(4)} m`).join("\n");
  });
}

function showSeparation() {
  $("sep-out").textContent = "running...";
  // let the status paint before the synchronous run
  setTimeout(() => guard("sep-out", () => {
    const r = separate(num("sep-angle"), num("sep-t60"), num("sep-d"), num("sep-s"), 1n);
    $("sep-out").textContent =
      `input SIR  ${r.inputSir.toFixed(2)} dB\n` +
      `output SIR ${r.outputSir.toFixed(2)} dB\n` +
      `weighted MSC of the outputs ${r.msc.toFixed(4)}`;
    r.free();
  }), 20);
}

await init();
$("rir-go").onclick = showRir;
$("seq-go").onclick = showSequence;
$("sep-go").onclick = showSeparation;
showRir();
showSequence();
