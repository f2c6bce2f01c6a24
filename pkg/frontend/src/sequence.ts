/** Per-view request ordering.
 *
 * Each view's in-flight requests get increasing tokens; a response may be
 * applied only if no newer response for that view has been applied yet.
 * Late arrivals of superseded requests are discarded, so the screen never
 * regresses to stale data.
 */

export class ViewSequencer {
  private issued = new Map<string, number>();
  private applied = new Map<string, number>();

  begin(view: string): number {
    const token = (this.issued.get(view) ?? 0) + 1;
    this.issued.set(view, token);
    return token;
  }

  shouldApply(view: string, token: number): boolean {
    const last = this.applied.get(view) ?? 0;
    if (token <= last) return false;
    this.applied.set(view, token);
    return true;
  }
}
