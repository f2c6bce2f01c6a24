/** 2D pan/zoom map projection.
 *
 * Plain equirectangular: degrees scale linearly to pixels, doubling per
 * zoom level. Everything is a pure function of (viewport, size), so a
 * given API response always draws the same picture.
 */

export interface Viewport {
  center: [number, number];
  zoom: number;
}

export interface Size {
  width: number;
  height: number;
}

export const MIN_ZOOM = 1;
export const MAX_ZOOM = 14;

export function pixelsPerDegree(zoom: number, size: Size): number {
  return (size.width / 360) * Math.pow(2, zoom);
}

export function project(
  lonLat: [number, number],
  viewport: Viewport,
  size: Size,
): [number, number] {
  const s = pixelsPerDegree(viewport.zoom, size);
  return [
    size.width / 2 + (lonLat[0] - viewport.center[0]) * s,
    size.height / 2 - (lonLat[1] - viewport.center[1]) * s,
  ];
}

export function unproject(
  xy: [number, number],
  viewport: Viewport,
  size: Size,
): [number, number] {
  const s = pixelsPerDegree(viewport.zoom, size);
  return [
    viewport.center[0] + (xy[0] - size.width / 2) / s,
    viewport.center[1] - (xy[1] - size.height / 2) / s,
  ];
}

export function pan(viewport: Viewport, dxPx: number, dyPx: number, size: Size): Viewport {
  const s = pixelsPerDegree(viewport.zoom, size);
  return {
    center: [viewport.center[0] - dxPx / s, viewport.center[1] + dyPx / s],
    zoom: viewport.zoom,
  };
}

export function zoomBy(viewport: Viewport, delta: number): Viewport {
  const zoom = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, viewport.zoom + delta));
  return { center: viewport.center, zoom };
}
