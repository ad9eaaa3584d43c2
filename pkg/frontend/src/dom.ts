/**
 * Small DOM construction helpers shared by the views.
 */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const element = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    element.setAttribute(name, value);
  }
  for (const child of children) {
    element.append(child);
  }
  return element;
}

/** Transient error banner appended to the given container. */
export function toast(container: HTMLElement, message: string): void {
  const banner = el("div", { class: "toast", role: "alert" }, [message]);
  container.append(banner);
  setTimeout(() => banner.remove(), 6000);
}

export function clear(element: HTMLElement): void {
  while (element.firstChild) {
    element.removeChild(element.firstChild);
  }
}

export function option(value: string, label?: string): HTMLOptionElement {
  const opt = document.createElement("option");
  opt.value = value;
  opt.textContent = label ?? value;
  return opt;
}
