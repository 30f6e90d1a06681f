/** Dismissible error notices; no failed request disappears silently. */

export function showNotice(
  container: HTMLElement,
  kind: "error" | "info",
  message: string,
): void {
  const notice = document.createElement("div");
  notice.className = `notice notice-${kind}`;
  const text = document.createElement("span");
  text.textContent = message;
  const dismiss = document.createElement("button");
  dismiss.textContent = "dismiss";
  dismiss.className = "notice-dismiss";
  dismiss.addEventListener("click", () => notice.remove());
  notice.append(text, dismiss);
  container.appendChild(notice);
}
