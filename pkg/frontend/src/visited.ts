/**
 * The visited list: normalized keys of pages this browser has already
 * checked, with least-recently-used eviction.
 *
 * Cloaked pages abuse on the first visit, so a key already on the list
 * needs no recheck; keeping the list local also keeps browsing history
 * off the server. Persistence goes through a small async key/value
 * interface so the extension can back it with chrome.storage and tests
 * with a Map.
 */

export interface KeyValueStore {
  get(key: string): Promise<string | undefined>;
  set(key: string, value: string): Promise<void>;
}

const STORE_KEY = "cloakwatch.visited";

export class VisitedList {
  private entries = new Map<string, number>(); // key -> last visit, ms epoch

  constructor(
    private readonly capacity = 5000,
    private readonly store?: KeyValueStore,
  ) {
    if (capacity < 1) throw new Error("capacity must be >= 1");
  }

  /** Restore persisted entries; silently starts empty on bad data. */
  async load(): Promise<void> {
    if (!this.store) return;
    const raw = await this.store.get(STORE_KEY);
    if (!raw) return;
    try {
      const parsed: unknown = JSON.parse(raw);
      if (!Array.isArray(parsed)) return;
      this.entries = new Map();
      for (const entry of parsed) {
        if (
          Array.isArray(entry) &&
          typeof entry[0] === "string" &&
          typeof entry[1] === "number"
        ) {
          this.entries.set(entry[0], entry[1]);
        }
      }
    } catch {
      this.entries = new Map();
    }
  }

  has(key: string): boolean {
    return this.entries.has(key);
  }

  get size(): number {
    return this.entries.size;
  }

  async add(key: string, when: Date): Promise<void> {
    this.entries.delete(key); // move-to-end keeps Map in recency order
    this.entries.set(key, when.getTime());
    while (this.entries.size > this.capacity) {
      const oldest = this.entries.keys().next().value!;
      this.entries.delete(oldest);
    }
    if (this.store) {
      await this.store.set(STORE_KEY, JSON.stringify([...this.entries]));
    }
  }
}
