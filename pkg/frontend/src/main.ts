/**
 * Browser entry point.
 *
 * The API base URL is a single setting persisted in localStorage; empty
 * means same origin, which matches the service's /ui static mount.
 */

import { mount } from "./app.js";

const root = document.querySelector<HTMLDivElement>("#app");
if (!root) {
  throw new Error("Root element #app not found");
}

const params = new URLSearchParams(window.location.search);
const fromQuery = params.get("api");
if (fromQuery !== null) {
  window.localStorage.setItem("gloss.baseUrl", fromQuery);
}
const baseUrl = window.localStorage.getItem("gloss.baseUrl") ?? "";

mount(root, { baseUrl });
