// SVG choropleth rendering. Colors come verbatim from each feature's
// `fill` property; hovering a county shows its name and label via a
// <title> child. Re-rendering a new year marks counties whose fill
// changed with a `changed` class so the flips stand out.

import type { MapDocument, MapFeature } from "./api";

const SVG_NS = "http://www.w3.org/2000/svg";

interface Bounds {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

function boundsOf(features: MapFeature[]): Bounds {
  const bounds: Bounds = {
    minX: Infinity,
    minY: Infinity,
    maxX: -Infinity,
    maxY: -Infinity,
  };
  for (const feature of features) {
    for (const ring of feature.geometry.coordinates) {
      for (const [x, y] of ring) {
        bounds.minX = Math.min(bounds.minX, x);
        bounds.minY = Math.min(bounds.minY, y);
        bounds.maxX = Math.max(bounds.maxX, x);
        bounds.maxY = Math.max(bounds.maxY, y);
      }
    }
  }
  return bounds;
}

function pathData(feature: MapFeature, bounds: Bounds, size: number): string {
  const spanX = bounds.maxX - bounds.minX || 1;
  const spanY = bounds.maxY - bounds.minY || 1;
  const scale = size / Math.max(spanX, spanY);
  const parts: string[] = [];
  for (const ring of feature.geometry.coordinates) {
    ring.forEach(([lon, lat], i) => {
      const x = (lon - bounds.minX) * scale;
      const y = (bounds.maxY - lat) * scale; // flip: SVG y grows downward
      parts.push(`${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`);
    });
    parts.push("Z");
  }
  return parts.join(" ");
}

export function renderChoropleth(svg: SVGSVGElement, doc: MapDocument): void {
  const previousFills = new Map<string, string>();
  for (const node of Array.from(svg.querySelectorAll("path[data-key]"))) {
    previousFills.set(
      node.getAttribute("data-key") ?? "",
      node.getAttribute("fill") ?? "",
    );
  }
  svg.textContent = "";

  const size = 600;
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("data-year", String(doc.year));
  const bounds = boundsOf(doc.features);
  for (const feature of doc.features) {
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", pathData(feature, bounds, size));
    path.setAttribute("fill", feature.properties.fill);
    path.setAttribute("data-key", feature.properties.key);
    path.setAttribute("data-sprawl", feature.properties.sprawl);
    path.classList.add("county");
    const before = previousFills.get(feature.properties.key);
    if (before !== undefined && before !== feature.properties.fill) {
      path.classList.add("changed");
    }
    const title = document.createElementNS(SVG_NS, "title");
    const label =
      feature.properties.sprawl === "Y" ? "sprawl" : "no sprawl";
    title.textContent = `${feature.properties.name}: ${label}`;
    path.appendChild(title);
    svg.appendChild(path);
  }
}
