import init, { check, flattenModel, countermodel } from "./pkg/kripke_web.js";

const examples = {
  separating: `model B
worlds w w' w''
le w w'
r w' w''
end
`,
  timeline: `model K
worlds m a e
le m a
le a e
end

model K'
worlds m a e
le m a
le a e
val m : p
val a : p
val e : p q
end

model K''
worlds a e
le a e
val e : q
end

reference K
succ K K'
succ K K''
`,
  pair: `model K
worlds m e
le m e
val e : q
end

model K'
worlds m e
le m e
val m : p
val e : p q
end

succ K K'
succ K' K'
`,
};

const $ = (id) => document.getElementById(id);
const SVG = "http://www.w3.org/2000/svg";

function el(name, attrs, text) {
  const e = document.createElementNS(SVG, name);
  for (const [k, v] of Object.entries(attrs)) e.setAttribute(k, v);
  if (text !== undefined) e.textContent = text;
  return e;
}

function layout(nodes) {
  const groups = [...new Set(nodes.map((n) => n.group))];
  const width = 700 / groups.length;
  const pos = [];
  for (const [gi, g] of groups.entries()) {
    const members = nodes.filter((n) => n.group === g);
    const byRank = new Map();
    for (const n of members) {
      if (!byRank.has(n.rank)) byRank.set(n.rank, []);
      byRank.get(n.rank).push(n);
    }
    for (const [rank, row] of byRank) {
      row.forEach((n, i) => {
        pos[n.id] = {
          x: gi * width + ((i + 1) * width) / (row.length + 1),
          y: 400 - rank * 90,
        };
      });
    }
  }
  return { groups, width, pos };
}

function draw(graph) {
  const svg = $("graph");
  svg.replaceChildren();
  const defs = el("defs", {});
  const marker = el("marker", { id: "arrow", viewBox: "0 0 10 10", refX: 22, refY: 5, markerWidth: 7, markerHeight: 7, orient: "auto" });
  marker.append(el("path", { d: "M0,0 L10,5 L0,10 z", fill: "#2563eb" }));
  defs.append(marker);
  svg.append(defs);
  const { groups, width, pos } = layout(graph.nodes);
  groups.forEach((g, i) => {
    if (g) svg.append(el("text", { x: i * width + width / 2, y: 24, "text-anchor": "middle", "font-weight": "bold" }, g));
  });
  for (const e of graph.edges) {
    const a = pos[e.from], b = pos[e.to];
    if (e.from === e.to) {
      svg.append(el("path", {
        d: `M${a.x - 8},${a.y - 14} C${a.x - 30},${a.y - 60} ${a.x + 30},${a.y - 60} ${a.x + 8},${a.y - 14}`,
        fill: "none", stroke: "#2563eb", "marker-end": "url(#arrow)",
      }));
      continue;
    }
    const modal = e.kind !== "le";
    const bend = modal ? 30 : 0;
    const mx = (a.x + b.x) / 2 + bend, my = (a.y + b.y) / 2 - bend / 2;
    svg.append(el("path", {
      d: `M${a.x},${a.y} Q${mx},${my} ${b.x},${b.y}`,
      fill: "none",
      stroke: modal ? "#2563eb" : "#999",
      "stroke-width": modal ? 1.5 : 2,
      "stroke-dasharray": e.kind === "succ" ? "5 3" : "",
      "marker-end": modal ? "url(#arrow)" : "",
    }));
  }
  for (const n of graph.nodes) {
    const p = pos[n.id];
    svg.append(el("circle", { cx: p.x, cy: p.y, r: 16, fill: n.value ? "#16a34a" : "#dc2626" }));
    svg.append(el("text", { x: p.x, y: p.y + 34, "text-anchor": "middle" }, n.label));
  }
}

function status(text, error = false) {
  $("status").textContent = text;
  $("status").className = error ? "error" : "";
}

function run(action) {
  try {
    action();
  } catch (e) {
    status(e.message ?? String(e), true);
  }
}

function onCheck() {
  const g = JSON.parse(check($("model").value, $("formula").value, $("logic").value));
  draw(g);
  status(`${g.logic}: ${g.formula}\nvalid in model: ${g.valid}`);
}

function onFlatten() {
  const r = JSON.parse(flattenModel($("model").value, $("formula").value));
  draw(r.graph);
  status(`flattened model is ${r.class}, evaluated with ${r.graph.logic}\n\n${r.text}`);
}

function onSearch() {
  const logic = $("logic").value || "ik";
  const r = JSON.parse(countermodel($("formula").value, logic, 3));
  if (!r.found) {
    $("graph").replaceChildren();
    status(`no ${logic} countermodel with at most 3 worlds (${r.examined} models examined)`);
    return;
  }
  $("model").value = r.text;
  draw(r.graph);
  status(`fails at ${r.locus} (${r.examined} models examined)`);
}

await init();
$("model").value = examples.separating;
$("example").addEventListener("change", (e) => {
  $("model").value = examples[e.target.value];
  run(onCheck);
});
$("check").addEventListener("click", () => run(onCheck));
$("flatten").addEventListener("click", () => run(onFlatten));
$("search").addEventListener("click", () => run(onSearch));
run(onCheck);
