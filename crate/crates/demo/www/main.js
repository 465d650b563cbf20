// Built with: wasm-pack build crates/demo --target web --out-dir www/pkg
import init, { okounkov_body_svg, dh_measure_plot, mu_k_convergence } from "./pkg/okounkov_demo.js";

function show(prefix, raw, describe) {
  const info = document.getElementById(`${prefix}-info`);
  const plot = document.getElementById(`${prefix}-plot`);
  const r = JSON.parse(raw);
  if (!r.ok) {
    info.className = "error";
    info.textContent = r.error;
    plot.innerHTML = "";
    return;
  }
  info.className = "";
  info.textContent = describe(r);
  plot.innerHTML = r.svg;
}

function wire(id, run) {
  const form = document.getElementById(id);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    run(new FormData(form));
  });
  run(new FormData(form));
}

await init();

wire("body-form", (f) =>
  show("body", okounkov_body_svg(+f.get("a"), +f.get("b"), f.get("flag"), +f.get("k")), (r) =>
    [
      `vertices: ${r.vertices.join(" ")}`,
      `volume ${r.volume}, 2! vol = ${r.normalized_volume}, (L^2) = ${r.self_intersection}`,
      `${r.sections} valuation vectors at this level (dots)`,
      `levels stable from k = ${r.stabilized_from ?? "-"}`,
    ].join("\n")));

wire("dh-form", (f) =>
  show("dh", dh_measure_plot(f.get("pieces")), (r) =>
    [
      `support [${r.range.join(", ")}], mass ${r.mass}, energy ${r.energy}`,
      ...r.atoms.map((a) => `atom ${a.mass} at ${a.at}`),
    ].join("\n")));

wire("bc-form", (f) =>
  show("bc", mu_k_convergence(+f.get("a"), +f.get("b"), f.get("pieces"), +f.get("kmax")), (r) =>
    r.rows.map((row) => `k = ${row.k}: sup |F_k - F_DH| = ${row.distance} (~${row.approx.toFixed(5)})`).join("\n")));
