// Latest-wins request tracking: concurrent in-flight requests are allowed,
// but a response is applied only if no newer request was issued on the same
// channel, so stale answers never overwrite fresh ones.

export class LatestWins {
  private sequence = 0;

  next(): number {
    this.sequence += 1;
    return this.sequence;
  }

  isCurrent(id: number): boolean {
    return id === this.sequence;
  }
}
