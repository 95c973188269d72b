// Tiny DOM builder; no framework, same as the rest of the client.

type Attrs = Record<string, string | boolean | ((event: Event) => void)>;
type Child = Node | string;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, ""), value);
    } else if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
    } else {
      node.setAttribute(key, value);
    }
  }
  node.append(...children);
  return node;
}

export function field(
  labelText: string,
  input: HTMLInputElement,
  errorId: string,
): HTMLElement {
  return el(
    "label",
    { class: "field" },
    el("span", {}, labelText),
    input,
    el("span", { class: "field-error", id: errorId }),
  );
}

export function setFieldError(root: HTMLElement, errorId: string, text: string): void {
  const span = root.querySelector<HTMLElement>(`#${errorId}`);
  if (span) span.textContent = text;
}

export function clearFieldErrors(root: HTMLElement): void {
  root.querySelectorAll<HTMLElement>(".field-error").forEach((span) => {
    span.textContent = "";
  });
}
