// Single configuration point: where the backend lives.

const STORAGE_KEY = "daa.baseUrl";
const DEFAULT_BASE = "http://127.0.0.1:8000";

export function getBaseUrl(): string {
  try {
    return window.localStorage.getItem(STORAGE_KEY) ?? DEFAULT_BASE;
  } catch {
    return DEFAULT_BASE;
  }
}

export function setBaseUrl(url: string): void {
  window.localStorage.setItem(STORAGE_KEY, url.replace(/\/+$/, ""));
}
