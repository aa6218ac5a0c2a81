import init, { sector_curve, sweep_sector, wall_profile } from "./pkg/corner_balayage_web.js";

const COLORS = ["#1f5fa8", "#c0392b", "#27ae60", "#8e44ad"];

function params(section) {
  const out = {};
  for (const input of section.querySelectorAll("input")) out[input.name] = Number(input.value);
  return out;
}

function report(section, text, isError = false) {
  const el = section.querySelector(".out");
  el.textContent = text;
  el.classList.toggle("err", isError);
}

function call(section, fn) {
  const data = JSON.parse(fn());
  if (data.error) {
    report(section, data.error, true);
    return null;
  }
  return data;
}

// Line/point plot with optional log axes. series: {xs, ys, color, points, label, err}
function plot(canvas, series, { logX = false, logY = false, xLabel = "", yLabel = "" } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, m = { l: 60, r: 12, t: 12, b: 36 };
  ctx.clearRect(0, 0, W, H);
  const tx = logX ? Math.log10 : (v) => v;
  const ty = logY ? Math.log10 : (v) => v;
  const ok = (x, y) => x != null && y != null && (!logX || x > 0) && (!logY || y > 0);
  let x0 = Infinity, x1 = -Infinity, y0 = Infinity, y1 = -Infinity;
  for (const s of series) {
    s.xs.forEach((x, i) => {
      if (!ok(x, s.ys[i])) return;
      x0 = Math.min(x0, tx(x)); x1 = Math.max(x1, tx(x));
      y0 = Math.min(y0, ty(s.ys[i])); y1 = Math.max(y1, ty(s.ys[i]));
    });
  }
  if (!isFinite(x0)) return;
  if (!logY) y0 = Math.min(y0, 0);
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) y1 = y0 + 1;
  const px = (x) => m.l + ((tx(x) - x0) / (x1 - x0)) * (W - m.l - m.r);
  const py = (y) => H - m.b - ((ty(y) - y0) / (y1 - y0)) * (H - m.t - m.b);

  ctx.strokeStyle = "#999"; ctx.fillStyle = "#444"; ctx.font = "11px sans-serif";
  ctx.strokeRect(m.l, m.t, W - m.l - m.r, H - m.t - m.b);
  for (let k = 0; k <= 4; k++) {
    const vx = x0 + ((x1 - x0) * k) / 4, vy = y0 + ((y1 - y0) * k) / 4;
    const sx = m.l + ((W - m.l - m.r) * k) / 4, sy = H - m.b - ((H - m.t - m.b) * k) / 4;
    ctx.fillText(logX ? `1e${vx.toFixed(1)}` : vx.toPrecision(2), sx - 14, H - m.b + 14);
    ctx.fillText(logY ? `1e${vy.toFixed(1)}` : vy.toPrecision(2), 4, sy + 4);
  }
  ctx.fillText(xLabel, W / 2, H - 4);
  ctx.save(); ctx.translate(12, H / 2); ctx.rotate(-Math.PI / 2); ctx.fillText(yLabel, 0, 0); ctx.restore();

  series.forEach((s, j) => {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.points) {
      s.xs.forEach((x, i) => {
        const y = s.ys[i];
        if (!ok(x, y)) return;
        ctx.beginPath(); ctx.arc(px(x), py(y), 3, 0, 2 * Math.PI); ctx.fill();
        if (s.err) {
          const lo = Math.max(y - 2 * s.err[i], logY ? y * 1e-3 : -Infinity);
          ctx.beginPath(); ctx.moveTo(px(x), py(lo)); ctx.lineTo(px(x), py(y + 2 * s.err[i])); ctx.stroke();
        }
      });
    } else {
      ctx.beginPath();
      let pen = false;
      s.xs.forEach((x, i) => {
        if (!ok(x, s.ys[i])) { pen = false; return; }
        pen ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]));
        pen = true;
      });
      ctx.stroke();
    }
    if (s.label) ctx.fillText(s.label, m.l + 8, m.t + 14 + 14 * j);
  });
}

// Equal-aspect drawing of a boundary polyline plus weighted points.
function drawShape(canvas, boundary, points = [], extra = () => {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 12;
  ctx.clearRect(0, 0, W, H);
  const xs = boundary.map((p) => p[0]), ys = boundary.map((p) => p[1]);
  const cx = (Math.min(...xs) + Math.max(...xs)) / 2, cy = (Math.min(...ys) + Math.max(...ys)) / 2;
  const span = Math.max(Math.max(...xs) - Math.min(...xs), Math.max(...ys) - Math.min(...ys)) || 1;
  const s = (Math.min(W, H) - 2 * pad) / span;
  const map = (p) => [W / 2 + (p[0] - cx) * s, H / 2 - (p[1] - cy) * s];
  ctx.strokeStyle = "#222";
  ctx.beginPath();
  boundary.forEach((p, i) => (i ? ctx.lineTo(...map(p)) : ctx.moveTo(...map(p))));
  ctx.stroke();
  const wmax = Math.max(...points.map((p) => p[2]), 0) || 1;
  for (const p of points) {
    ctx.fillStyle = `rgba(192, 57, 43, ${0.15 + 0.85 * Math.sqrt(p[2] / wmax)})`;
    const [x, y] = map(p);
    ctx.fillRect(x - 1.5, y - 1.5, 3, 3);
  }
  extra(ctx, map, s);
}

function runCurve() {
  const sec = document.getElementById("curve");
  const p = params(sec);
  const d = call(sec, () => sector_curve(p.alpha, p.b, p.eps, 120));
  if (!d) return;
  plot(sec.querySelector("canvas"), [
    { xs: d.r, ys: d.exact, color: COLORS[0], label: "exact ν(∂Ω ∩ B_r)" },
    { xs: d.r, ys: d.lower, color: COLORS[2], label: "lower envelope" },
    { xs: d.r, ys: d.upper, color: COLORS[1], label: "upper envelope" },
  ], { logX: true, logY: true, xLabel: "r", yLabel: "mass" });
  const env = d.lower.every((v) => v == null) ? " (exponent only: no closed-form envelope)" : "";
  report(sec, `regime ${d.regime}, exponent ${d.exponent.toFixed(4)}${env}`);
}

function runSweep() {
  const sec = document.getElementById("sweep");
  const p = params(sec);
  report(sec, "running…");
  setTimeout(() => {
    const t = performance.now();
    const d = call(sec, () => sweep_sector(p.alpha, p.b, p.samples, BigInt(p.seed)));
    if (!d) return;
    drawShape(sec.querySelector(".cloud"), d.boundary, d.exits);
    plot(sec.querySelector(".masses"), [
      { xs: d.r, ys: d.exact, color: COLORS[0], label: "exact series" },
      { xs: d.r, ys: d.mc, err: d.std_error, points: true, color: COLORS[1], label: "walk-on-spheres ± 2σ" },
    ], { logX: true, logY: true, xLabel: "r", yLabel: "ν(∂Ω ∩ B_r)" });
    const fit = d.fitted_exponent == null ? "n/a" : d.fitted_exponent.toFixed(3);
    report(sec, `total ${d.total.toFixed(4)}, n_eff ${d.n_effective.toFixed(0)}, fitted exponent ${fit}, ${(performance.now() - t).toFixed(0)} ms`);
  }, 10);
}

function runWall() {
  const sec = document.getElementById("wall");
  const p = params(sec);
  report(sec, "running…");
  setTimeout(() => {
    const d = call(sec, () => wall_profile(p.b, p.alpha, p.samples, p.bins, BigInt(p.seed)));
    if (!d) return;
    drawShape(sec.querySelector(".shape"), d.boundary, [], (ctx, map, s) => {
      ctx.strokeStyle = "#1f5fa8"; ctx.setLineDash([4, 4]);
      const [x, y] = map([0, 0]);
      ctx.beginPath(); ctx.arc(x, y, d.droplet_radius * s, 0, 2 * Math.PI); ctx.stroke();
      ctx.setLineDash([]);
    });
    plot(sec.querySelector(".profile"), [
      { xs: d.s, ys: d.density, err: d.std_error, points: true, color: COLORS[1], label: "dν/ds along the wall" },
    ], { xLabel: "arclength s", yLabel: "density" });
    const fit = d.edge_fit == null ? "n/a" : d.edge_fit.toFixed(3);
    report(sec, `wall mass ${d.total.toFixed(5)}, edge exponent ${d.edge_exponent.toFixed(3)} (fit ${fit})`);
  }, 10);
}

await init();
document.querySelector("#curve button").onclick = runCurve;
document.querySelector("#sweep button").onclick = runSweep;
document.querySelector("#wall button").onclick = runWall;
runCurve();
