/** The slice of the extension API this client touches. */
interface ChromeStorageArea {
  get(keys: string[]): Promise<Record<string, unknown>>;
  set(items: Record<string, unknown>): Promise<void>;
}

declare const chrome:
  | {
      storage?: {
        local: ChromeStorageArea;
      };
    }
  | undefined;
