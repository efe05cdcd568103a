import init, { Playback, follow_point, follow_distance, aggregate } from "./pkg/moba_tutor_wasm.js";

await init();

// Seeded match

const arena = document.getElementById("arena");
const ctx = arena.getContext("2d");
const tipList = document.getElementById("tips");
const status = document.getElementById("status");
const pauseBtn = document.getElementById("pause");
let match = null;
let running = false;

function draw(frame, size) {
  const k = arena.width / size;
  ctx.clearRect(0, 0, arena.width, arena.height);
  for (const u of frame.units) {
    if (!u.alive) continue;
    const x = u.x * k, y = u.y * k;
    ctx.fillStyle = u.blue ? "#2b6cd4" : "#c8402c";
    if (u.kind === "tower" || u.kind === "nexus") {
      const s = u.kind === "nexus" ? 16 : 11;
      ctx.fillRect(x - s / 2, y - s / 2, s, s);
    } else {
      const r = u.kind === "hero" ? 7 : 3;
      ctx.beginPath();
      ctx.arc(x, y, r, 0, 2 * Math.PI);
      ctx.fill();
      if (u.role) {
        ctx.lineWidth = 2;
        ctx.strokeStyle = u.role === "tutor" ? "#d9a400" : "#000";
        ctx.stroke();
      }
    }
    if (u.kind !== "minion") {
      ctx.fillStyle = "#333";
      ctx.fillRect(x - 9, y - 14, 18, 3);
      ctx.fillStyle = "#3c3";
      ctx.fillRect(x - 9, y - 14, 18 * u.hp, 3);
    }
  }
}

function frameLoop() {
  if (!match || !running) return;
  match.step(Number(document.getElementById("speed").value));
  const frame = JSON.parse(match.snapshot());
  draw(frame, match.map_size);
  for (const tip of frame.tips) {
    const li = document.createElement("li");
    li.textContent = `t${tip.tick} [${tip.rule}] ${tip.message}`;
    tipList.prepend(li);
  }
  const [k, d, a] = frame.novice_kda;
  status.textContent = `tick ${frame.tick}, novice ${k}/${d}/${a}`;
  if (frame.ended) {
    status.textContent += `, winner ${frame.winner ?? "none"}`;
    running = false;
    pauseBtn.disabled = true;
    return;
  }
  requestAnimationFrame(frameLoop);
}

document.getElementById("start").onclick = () => {
  try {
    match?.free();
    match = new Playback(Number(document.getElementById("seed").value), document.getElementById("condition").value);
  } catch (e) {
    status.innerHTML = `<span class="error">${e.message}</span>`;
    return;
  }
  tipList.replaceChildren();
  running = true;
  pauseBtn.disabled = false;
  pauseBtn.textContent = "pause";
  requestAnimationFrame(frameLoop);
};

pauseBtn.onclick = () => {
  running = !running;
  pauseBtn.textContent = running ? "pause" : "resume";
  if (running) requestAnimationFrame(frameLoop);
};

// Follow point

const follow = document.getElementById("follow");
const fctx = follow.getContext("2d");
const MAP = 600;
const fk = follow.width / MAP;
const spawn = { x: 25, y: 575 };
let partner = { x: 300, y: 300 };
let tutor = { x: 220, y: 380 };

function dot(p, color, r) {
  fctx.fillStyle = color;
  fctx.beginPath();
  fctx.arc(p.x * fk, p.y * fk, r, 0, 2 * Math.PI);
  fctx.fill();
}

function drawFollow() {
  const [fx, fy] = follow_point(partner.x, partner.y, tutor.x, tutor.y, spawn.x, spawn.y);
  fctx.clearRect(0, 0, follow.width, follow.height);
  fctx.strokeStyle = "#999";
  fctx.beginPath();
  fctx.arc(partner.x * fk, partner.y * fk, follow_distance() * fk, 0, 2 * Math.PI);
  fctx.stroke();
  dot(spawn, "#2b6cd4", 5);
  dot(partner, "#000", 5);
  dot(tutor, "#d9a400", 5);
  fctx.strokeStyle = "#c00";
  fctx.lineWidth = 2;
  fctx.beginPath();
  fctx.moveTo(fx * fk - 5, fy * fk - 5); fctx.lineTo(fx * fk + 5, fy * fk + 5);
  fctx.moveTo(fx * fk + 5, fy * fk - 5); fctx.lineTo(fx * fk - 5, fy * fk + 5);
  fctx.stroke();
  fctx.lineWidth = 1;
  document.getElementById("follow-out").textContent =
    `partner (${partner.x.toFixed(0)}, ${partner.y.toFixed(0)}), tutor (${tutor.x.toFixed(0)}, ${tutor.y.toFixed(0)}) -> follow point (${fx.toFixed(1)}, ${fy.toFixed(1)})`;
}

follow.onclick = (ev) => {
  const r = follow.getBoundingClientRect();
  const p = { x: (ev.clientX - r.left) / fk, y: (ev.clientY - r.top) / fk };
  if (ev.shiftKey) tutor = p; else partner = p;
  drawFollow();
};
drawFollow();

// KDA aggregate

document.getElementById("calc").onclick = () => {
  const out = document.getElementById("kda-out");
  try {
    const r = JSON.parse(aggregate(document.getElementById("lines").value));
    out.textContent = `KDAs ${r.kdas.map((v) => v.toFixed(3)).join(", ")}; mean ${r.mean.toFixed(6)}, stddev ${r.stddev.toFixed(6)}`;
  } catch (e) {
    out.innerHTML = `<span class="error">${e.message}</span>`;
  }
};
