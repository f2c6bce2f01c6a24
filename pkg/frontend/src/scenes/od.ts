/** OD view: flow lines between the hub and zone centroids.
 *
 * One line per nonzero hub pair, width strictly monotone in the served
 * count. Counts are drawn as labels verbatim; the only arithmetic here is
 * the pixel scale.
 */

import type { OdPayload, ZonesPayload } from "../types.js";
import { project, type Size, type Viewport } from "../map.js";

export const MIN_LINE_WIDTH = 1.5;
export const MAX_LINE_WIDTH = 10;

export interface OdLine {
  origin: number;
  dest: number;
  outbound: boolean;
  count: number;
  width: number;
  from: [number, number];
  to: [number, number];
}

export interface LegendStop {
  count: number;
  width: number;
}

export interface OdScene {
  kind: "od";
  lines: OdLine[];
  legend: LegendStop[];
  totalTrips: number;
  unassigned: number;
  conserved: boolean;
  placeholder: string | null;
}

export function widthForCount(count: number, maxCount: number): number {
  if (maxCount <= 0) return MIN_LINE_WIDTH;
  return MIN_LINE_WIDTH + (MAX_LINE_WIDTH - MIN_LINE_WIDTH) * (count / maxCount);
}

export function buildOdScene(
  od: OdPayload,
  zones: ZonesPayload,
  viewport: Viewport,
  size: Size,
): OdScene {
  const centroids = new Map<number, [number, number]>();
  for (const z of zones.zones) centroids.set(z.zone_id, z.centroid);

  const hub = od.hub_zone_id;
  const pairs = od.counts.filter(
    (p) => p.count > 0 && (p.origin === hub || p.dest === hub),
  );
  const maxCount = pairs.reduce((m, p) => Math.max(m, p.count), 0);

  const lines: OdLine[] = [];
  for (const p of pairs) {
    const from = centroids.get(p.origin);
    const to = centroids.get(p.dest);
    if (from === undefined || to === undefined) continue;
    lines.push({
      origin: p.origin,
      dest: p.dest,
      outbound: p.origin === hub,
      count: p.count,
      width: widthForCount(p.count, maxCount),
      from: project(from, viewport, size),
      to: project(to, viewport, size),
    });
  }

  const legend: LegendStop[] =
    maxCount > 0
      ? [
          { count: 1, width: widthForCount(1, maxCount) },
          { count: maxCount, width: widthForCount(maxCount, maxCount) },
        ]
      : [];

  return {
    kind: "od",
    lines,
    legend,
    totalTrips: od.total_trips,
    unassigned: od.unassigned,
    conserved: od.conserved,
    placeholder: lines.length === 0 ? "no data for this window" : null,
  };
}
