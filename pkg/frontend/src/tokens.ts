/**
 * Monotonic request tokens: a response may only be displayed if it
 * belongs to the most recently issued request. This is what guarantees
 * the canvas never shows an image for a stale slider position.
 */
export class LatestGate {
  private latest = 0;

  issue(): number {
    return ++this.latest;
  }

  isCurrent(token: number): boolean {
    return token === this.latest;
  }

  /** Drop everything in flight (e.g. when a new image is uploaded). */
  invalidate(): void {
    this.latest++;
  }
}
