export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

/**
 * Source rectangles for the split view: the left half comes from one
 * image and the right half from the other, at identical coordinates, so
 * the seam is a straight comparison line.
 */
export function splitRects(width: number, height: number): { left: Rect; right: Rect } {
  const mid = Math.floor(width / 2);
  return {
    left: { x: 0, y: 0, w: mid, h: height },
    right: { x: mid, y: 0, w: width - mid, h: height },
  };
}
