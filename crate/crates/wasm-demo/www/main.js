import init, { compare_estimators, lower_bound_scaling, failure_curve } from "./pkg/renyi_wasm_demo.js";

const val = (box, name) => box.querySelector(`[name=${name}]`).value.trim();
const num = (box, name) => Number(val(box, name));
const big = (box, name) => BigInt(val(box, name));

// Series: [{label, color, points: [[x, y], ...]}]. Log axes take log10 first.
function plot(canvas, series, { logX = false, logY = false, bars = false } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 40;
  ctx.clearRect(0, 0, W, H);
  const tx = (v) => (logX ? Math.log10(v) : v);
  const ty = (v) => (logY ? Math.log10(v) : v);
  const pts = series.flatMap((s) => s.points).filter(([x, y]) => isFinite(tx(x)) && isFinite(ty(y)));
  if (!pts.length) return;
  let [x0, x1] = [Math.min(...pts.map((p) => tx(p[0]))), Math.max(...pts.map((p) => tx(p[0])))];
  let [y0, y1] = [Math.min(...pts.map((p) => ty(p[1]))), Math.max(...pts.map((p) => ty(p[1])))];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) y1 = y0 + 1;
  const sx = (v) => pad + ((tx(v) - x0) / (x1 - x0)) * (W - 2 * pad);
  const sy = (v) => H - pad - ((ty(v) - y0) / (y1 - y0)) * (H - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  const fmt = (v, log) => (log ? (10 ** v).toPrecision(2) : v.toPrecision(3));
  ctx.fillText(fmt(x0, logX), pad, H - pad + 14);
  ctx.fillText(fmt(x1, logX), W - pad - 30, H - pad + 14);
  ctx.fillText(fmt(y0, logY), 2, H - pad);
  ctx.fillText(fmt(y1, logY), 2, pad + 4);

  series.forEach((s, i) => {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    ctx.fillText(s.label, W - pad - 120, pad + 14 + 14 * i);
    if (bars) {
      for (const [x, y] of s.points) ctx.fillRect(sx(x), sy(y), 3, H - pad - sy(y));
      return;
    }
    ctx.beginPath();
    s.points.forEach(([x, y], j) => (j ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
  });
}

function histogram(xs, bins, lo, hi) {
  const counts = new Array(bins).fill(0);
  for (const x of xs) {
    const b = Math.floor(((x - lo) / (hi - lo)) * bins);
    if (b >= 0 && b < bins) counts[b] += 1;
  }
  return counts.map((c, i) => [lo + ((i + 0.5) * (hi - lo)) / bins, c]);
}

function run(id, body) {
  const box = document.getElementById(id);
  const out = box.querySelector(".out");
  box.querySelector("button").onclick = () => {
    out.classList.remove("err");
    out.textContent = "running...";
    setTimeout(() => {
      try {
        const res = JSON.parse(body(box));
        if (res.error) throw new Error(res.error);
        draw[id](box, res, out);
      } catch (e) {
        out.classList.add("err");
        out.textContent = String(e.message ?? e);
      }
    }, 0);
  };
}

const draw = {
  cmp(box, r, out) {
    const show = (s) => (s.mean_bits == null ? "undefined" : `${s.mean_bits.toFixed(4)} ± ${s.sd_bits.toFixed(4)}`);
    out.textContent =
      `true divergence  ${r.truth_bits.toFixed(4)} bits\n` +
      `corrected        ${show(r.corrected)}  (undefined runs: ${r.corrected.undefined})\n` +
      `plug-in          ${show(r.plugin)}`;
    const all = [...r.corrected.estimates_bits, ...r.plugin.estimates_bits, r.truth_bits];
    const lo = Math.min(...all), hi = Math.max(...all) + 1e-9;
    plot(box.querySelector("canvas"), [
      { label: "corrected", color: "#1565c0", points: histogram(r.corrected.estimates_bits, 60, lo, hi) },
      { label: "plug-in", color: "#c62828", points: histogram(r.plugin.estimates_bits, 60, lo, hi) },
    ], { bars: true });
  },
  scale(box, r, out) {
    out.textContent = r.map((p) => `k=${p.k}  uniform ${p.uniform.toFixed(1)}  spike ${p.spike.toFixed(1)}`).join("\n");
    plot(box.querySelector("canvas"), [
      { label: "uniform q", color: "#1565c0", points: r.map((p) => [p.k, p.uniform]) },
      { label: "spike q", color: "#c62828", points: r.map((p) => [p.k, p.spike]) },
    ], { logX: true, logY: true });
  },
  fail(box, r, out) {
    out.textContent = r.map((p) => `n=${p.n}  corrected ${p.corrected.toFixed(3)}  plug-in ${p.plugin.toFixed(3)}`).join("\n");
    plot(box.querySelector("canvas"), [
      { label: "corrected", color: "#1565c0", points: r.map((p) => [p.n, p.corrected]) },
      { label: "plug-in", color: "#c62828", points: r.map((p) => [p.n, p.plugin]) },
    ], { logX: true });
  },
};

await init();
run("cmp", (b) => compare_estimators(num(b, "k"), val(b, "p"), val(b, "q"), num(b, "alpha"), big(b, "n"), num(b, "trials"), big(b, "seed")));
run("scale", (b) => lower_bound_scaling(num(b, "lo"), num(b, "hi"), num(b, "alpha"), num(b, "c")));
run("fail", (b) => failure_curve(num(b, "k"), val(b, "p"), val(b, "q"), num(b, "alpha"), num(b, "delta"),
  big(b, "lo"), big(b, "hi"), num(b, "trials"), big(b, "seed")));
