/** Scene-to-SVG rendering. Pure string building: the same scene and
 * viewport always produce byte-identical markup.
 */

import type { ZonesPayload } from "./types.js";
import { project, type Size, type Viewport } from "./map.js";
import type { OdScene } from "./scenes/od.js";
import type { ForecastScene } from "./scenes/forecast.js";

export function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

const fmt = (v: number): string => (Math.round(v * 100) / 100).toString();

export function zonePolygons(
  zones: ZonesPayload,
  viewport: Viewport,
  size: Size,
  fillFor: (zoneId: number) => string,
): string {
  const parts: string[] = [];
  for (const z of zones.zones) {
    const points = z.ring
      .map((v) => project(v, viewport, size))
      .map(([x, y]) => `${fmt(x)},${fmt(y)}`)
      .join(" ");
    parts.push(
      `<polygon points="${points}" fill="${esc(fillFor(z.zone_id))}" ` +
        `stroke="#666" stroke-width="0.5" data-zone="${z.zone_id}">` +
        `<title>${esc(z.name)}</title></polygon>`,
    );
  }
  return parts.join("");
}

export function odLines(scene: OdScene): string {
  return scene.lines
    .map(
      (l) =>
        `<line x1="${fmt(l.from[0])}" y1="${fmt(l.from[1])}" ` +
        `x2="${fmt(l.to[0])}" y2="${fmt(l.to[1])}" ` +
        `stroke="${l.outbound ? "#d9642c" : "#2c7bd9"}" ` +
        `stroke-width="${fmt(l.width)}" stroke-linecap="round" opacity="0.75" ` +
        `data-count="${l.count}"><title>${l.origin} -&gt; ${l.dest}: ${l.count}</title></line>`,
    )
    .join("");
}

export function mapSvg(
  zones: ZonesPayload,
  viewport: Viewport,
  size: Size,
  fillFor: (zoneId: number) => string,
  overlay = "",
): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${size.width}" height="${size.height}" ` +
    `viewBox="0 0 ${size.width} ${size.height}">` +
    `<rect width="${size.width}" height="${size.height}" fill="#f4f1ec"/>` +
    zonePolygons(zones, viewport, size, fillFor) +
    overlay +
    `</svg>`
  );
}

/** Bar/curve chart with the served prediction overlay. */
export function forecastChartSvg(scene: ForecastScene, size: Size): string {
  const pad = { left: 40, right: 12, top: 16, bottom: 28 };
  const w = size.width - pad.left - pad.right;
  const h = size.height - pad.top - pad.bottom;
  const peak = Math.max(
    1,
    ...scene.bars.map((b) => b.count),
    ...scene.overlay.map((o) => o.value),
  );
  const n = Math.max(scene.bars.length, scene.overlay.length, 1);
  const slot = w / n;
  const x = (period: number) => pad.left + (period - 1) * slot + slot / 2;
  const y = (value: number) => pad.top + h * (1 - value / peak);

  const parts: string[] = [];
  if (scene.mode === "bar") {
    for (const b of scene.bars) {
      const barW = slot * 0.6;
      parts.push(
        `<rect x="${fmt(x(b.period) - barW / 2)}" y="${fmt(y(b.count))}" ` +
          `width="${fmt(barW)}" height="${fmt(pad.top + h - y(b.count))}" ` +
          `fill="#7aa6c9" data-period="${b.period}" data-count="${b.count}"/>`,
      );
    }
  } else if (scene.bars.length > 0) {
    const pts = scene.bars.map((b) => `${fmt(x(b.period))},${fmt(y(b.count))}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="#7aa6c9" stroke-width="2"/>`,
    );
  }
  if (scene.overlay.length > 0) {
    const pts = scene.overlay.map((o) => `${fmt(x(o.period))},${fmt(y(o.value))}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="#c8401f" stroke-width="1.5" ` +
        `stroke-dasharray="4 3"/>`,
    );
    for (const o of scene.overlay) {
      parts.push(
        `<circle cx="${fmt(x(o.period))}" cy="${fmt(y(o.value))}" r="2.5" fill="#c8401f"/>` +
          `<text x="${fmt(x(o.period))}" y="${fmt(y(o.value) - 6)}" font-size="9" ` +
          `text-anchor="middle" fill="#8c2b12">${esc(o.label)}</text>`,
      );
    }
  }
  for (const b of scene.bars) {
    parts.push(
      `<text x="${fmt(x(b.period))}" y="${fmt(pad.top + h + 14)}" font-size="10" ` +
        `text-anchor="middle" fill="#444">${b.period}</text>`,
    );
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${size.width}" height="${size.height}" ` +
    `viewBox="0 0 ${size.width} ${size.height}">` +
    `<rect width="${size.width}" height="${size.height}" fill="#ffffff"/>` +
    parts.join("") +
    `</svg>`
  );
}
