// Dismissible error toasts carrying the server's error code.

import { ApiError } from "./api.js";

export function showError(error: unknown): void {
  const host = document.getElementById("toasts");
  if (!host) {
    console.error(error);
    return;
  }
  const toast = document.createElement("div");
  toast.className = "toast";
  const code = error instanceof ApiError ? error.code : "client_error";
  const message = error instanceof Error ? error.message : String(error);
  toast.innerHTML = `<strong>${code}</strong> <span></span> <button class="toast-close">×</button>`;
  (toast.querySelector("span") as HTMLSpanElement).textContent = message;
  (toast.querySelector("button") as HTMLButtonElement).onclick = () => toast.remove();
  host.appendChild(toast);
  setTimeout(() => toast.remove(), 8000);
}

export async function guarded<T>(run: () => Promise<T>): Promise<T | undefined> {
  try {
    return await run();
  } catch (error) {
    showError(error);
    return undefined;
  }
}
