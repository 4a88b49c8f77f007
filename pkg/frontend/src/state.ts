/** Session state shared by every view.
 *
 * Mirrors the server's one-way workflow: exploration until inference is
 * entered, then everything exploratory is disabled for good. The server
 * enforces this with HTTP 423; the client keeps its own flag so controls
 * grey out immediately and stay consistent if a locked response arrives
 * from a request that raced the transition.
 */

import { LockedError } from "./api";

export type Stage = "exploration" | "inference";

type Listener = (stage: Stage) => void;

export class SessionState {
  private stage: Stage = "exploration";
  private listeners: Listener[] = [];
  private controls: { disable(): void }[] = [];

  get current(): Stage {
    return this.stage;
  }

  get locked(): boolean {
    return this.stage === "inference";
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  /** Register an exploration control to be disabled on lockout. */
  registerExplorationControl(control: { disable(): void }): void {
    this.controls.push(control);
    if (this.locked) control.disable();
  }

  enterInference(): void {
    if (this.stage === "inference") return;
    this.stage = "inference";
    for (const c of this.controls) c.disable();
    for (const l of this.listeners) l(this.stage);
  }

  /** Route an API failure: a 423 means the session is locked server-side. */
  absorbError(err: unknown): void {
    if (err instanceof LockedError) this.enterInference();
  }
}

/** Disable plain form elements and mark any element as locked via CSS. */
export function disableable(el: HTMLElement): { disable(): void } {
  return {
    disable() {
      el.classList.add("locked");
      if (
        el instanceof HTMLButtonElement ||
        el instanceof HTMLInputElement ||
        el instanceof HTMLSelectElement
      ) {
        el.disabled = true;
      }
      el.setAttribute("aria-disabled", "true");
    },
  };
}
