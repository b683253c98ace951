import init, { dynamics, infidelity_row, ramsey_fringe } from "./pkg/lambda_de_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

// Line plot of several series sharing one x axis. opts.log plots log10(y).
function plot(canvas, x, series, opts = {}) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 36;
  ctx.clearRect(0, 0, w, h);
  const tf = opts.log ? (v) => Math.log10(Math.max(v, 1e-12)) : (v) => v;
  let lo = Infinity, hi = -Infinity;
  for (const s of series) for (const v of s.y) {
    if (v === null) continue;
    const y = tf(v);
    if (Number.isFinite(y)) { lo = Math.min(lo, y); hi = Math.max(hi, y); }
  }
  if (opts.ylim) [lo, hi] = opts.ylim;
  if (hi === lo) { hi += 1; lo -= 1; }
  const x0 = x[0], x1 = x[x.length - 1];
  const px = (v) => pad + (v - x0) / (x1 - x0) * (w - 2 * pad);
  const py = (v) => h - pad + (tf(v) - lo) / (hi - lo) * (2 * pad - h);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad / 2, w - 2 * pad, h - 1.5 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toPrecision(3), pad, h - pad / 2 + 8);
  ctx.fillText(x1.toPrecision(3), w - pad - 20, h - pad / 2 + 8);
  ctx.fillText((opts.log ? "1e" : "") + hi.toPrecision(3), 2, pad / 2 + 8);
  ctx.fillText((opts.log ? "1e" : "") + lo.toPrecision(3), 2, h - pad);
  if (opts.xlabel) ctx.fillText(opts.xlabel, w / 2 - 30, h - 4);

  series.forEach((s, i) => {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    let started = false;
    x.forEach((xv, k) => {
      const yv = s.y[k] === null ? NaN : py(s.y[k]);
      if (!Number.isFinite(yv)) { started = false; return; }
      if (started) ctx.lineTo(px(xv), yv); else ctx.moveTo(px(xv), yv);
      started = true;
    });
    ctx.stroke();
    ctx.fillStyle = s.color;
    ctx.fillText(s.name, w - pad - 90, pad / 2 + 14 + 13 * i);
  });
}

function guarded(out, f) {
  return () => {
    $(out).textContent = "running...";
    setTimeout(() => {
      try { f(); } catch (e) { $(out).textContent = "error: " + e; }
    }, 10);
  };
}

function runDynamics() {
  const d = JSON.parse(dynamics(num("dyn-area"), num("dyn-omega"), num("dyn-detuning"), num("dyn-phase"), 600));
  plot($("dyn-fields"), d.t, [
    { name: "Omega_p", y: d.omega_p, color: "#1f77b4" },
    { name: "Omega_s", y: d.omega_s, color: "#d62728" },
  ], { xlabel: "t / t_p" });
  plot($("dyn-pops"), d.t, [
    { name: "P(+1)", y: d.p1, color: "#1f77b4" },
    { name: "P(0)", y: d.p0, color: "#2ca02c" },
    { name: "P(-1)", y: d.pm1, color: "#d62728" },
  ], { ylim: [0, 1], xlabel: "t / t_p" });
  const n = d.t.length - 1;
  $("dyn-out").textContent = `final P(+1)=${d.p1[n].toFixed(5)} P(0)=${d.p0[n].toExponential(2)} P(-1)=${d.pm1[n].toFixed(5)}`;
}

function runRow() {
  const scheme = $("row-scheme").value;
  const r = JSON.parse(infidelity_row(scheme, num("row-area"), num("row-min"), num("row-max"), Math.round(num("row-n"))));
  plot($("row-plot"), r.freq_tp, [{ name: "1 - P(-1)", y: r.infidelity, color: "#9467bd" }], {
    log: true,
    xlabel: scheme === "de" ? "(omega_e/2pi) t_p" : "(Delta/2pi) t_p",
  });
  let best = 0;
  r.infidelity.forEach((v, k) => { if (v < r.infidelity[best]) best = k; });
  $("row-out").textContent = `min ${r.infidelity[best].toExponential(2)} at ${r.freq_tp[best].toFixed(3)}`;
}

function runRamsey() {
  const f = JSON.parse(ramsey_fringe($("ram-scheme").value, num("ram-area"), num("ram-detuning"), num("ram-omega")));
  const ideal = f.delta_tau.map((x) => -Math.cos(x));
  plot($("ram-plot"), f.delta_tau, [
    { name: "signal", y: f.signal, color: "#1f77b4" },
    { name: "normalized", y: f.normalized, color: "#ff7f0e" },
    { name: "-cos", y: ideal, color: "#bbb" },
  ], { ylim: [-1.05, 1.05], xlabel: "delta tau (rad)" });
  const ph = f.relative_phase === null ? "undefined" : f.relative_phase.toExponential(2) + " rad";
  $("ram-out").textContent = `contrast ${f.contrast.toFixed(4)}, phase shift ${ph}`;
}

await init();
$("dyn-run").onclick = guarded("dyn-out", runDynamics);
$("row-run").onclick = guarded("row-out", runRow);
$("ram-run").onclick = guarded("ram-out", runRamsey);
guarded("dyn-out", runDynamics)();
