// DOM painting for the panel. All decisions about *what* to show live in
// viewmodel.ts; this file just reflects the models into elements and keeps
// control enablement in sync with pending commands.

import { Mode } from './protocol.js';
import { isBusy, ViewState } from './store.js';
import { condensedView, frameworkView, rawView } from './viewmodel.js';

export interface PanelElements {
  banner: HTMLElement;
  raw: HTMLElement;
  condensedToken: HTMLElement;
  condensedProgress: HTMLElement;
  emojiStrip: HTMLElement;
  degradedBadge: HTMLElement;
  framework: HTMLElement;
  toasts: HTMLElement;
  panel: HTMLElement;
  modeButtons: Record<Mode, HTMLButtonElement>;
  captureButton: HTMLButtonElement;
  clearButton: HTMLButtonElement;
  pauseButton: HTMLButtonElement;
  resumeButton: HTMLButtonElement;
  speedSlider: HTMLInputElement;
  speedLabel: HTMLElement;
  historyList: HTMLElement;
}

export function render(state: ViewState, el: PanelElements): void {
  el.banner.hidden = state.connection === 'open';
  el.banner.textContent =
    state.connection === 'connecting' ? '连接中 / connecting…' : '连接断开，自动重连中 / reconnecting…';

  for (const [mode, button] of Object.entries(el.modeButtons) as [Mode, HTMLButtonElement][]) {
    button.classList.toggle('active', state.mode === mode);
    button.disabled = isBusy(state, 'set_mode');
  }
  el.raw.parentElement!.hidden = state.mode !== 'raw';
  el.condensedToken.closest('.view')!.toggleAttribute('hidden', state.mode !== 'condensed');
  el.framework.parentElement!.hidden = state.mode !== 'framework';

  renderRaw(state, el.raw);
  renderCondensed(state, el);
  renderFramework(state, el.framework);
  renderControls(state, el);
  renderToasts(state, el.toasts);
  renderHistory(state, el.historyList);
  applyAppearance(state, el.panel);
}

function renderRaw(state: ViewState, root: HTMLElement): void {
  root.replaceChildren(
    ...rawView(state).spans.map((span) => {
      const node = document.createElement('span');
      node.textContent = span.text;
      node.className = span.provisional ? 'segment provisional' : 'segment';
      return node;
    }),
  );
  root.scrollTop = root.scrollHeight;
}

function renderCondensed(state: ViewState, el: PanelElements): void {
  const view = condensedView(state);
  el.condensedToken.textContent = view.token ?? '·';
  el.condensedProgress.textContent = view.progress;
  el.degradedBadge.hidden = !view.degraded;
  el.emojiStrip.replaceChildren(
    ...view.emojis.map((glyph) => {
      const node = document.createElement('span');
      node.textContent = glyph;
      node.className = 'emoji';
      return node;
    }),
  );
}

function renderFramework(state: ViewState, root: HTMLElement): void {
  root.replaceChildren(
    ...frameworkView(state).rows.map((row) => {
      const tr = document.createElement('tr');
      const label = document.createElement('th');
      label.textContent = row.label;
      const value = document.createElement('td');
      value.textContent = row.value;
      value.className = row.present ? 'present' : 'absent';
      tr.append(label, value);
      return tr;
    }),
  );
}

function renderControls(state: ViewState, el: PanelElements): void {
  el.captureButton.textContent = state.capturing ? 'End Capture' : 'Start Capture';
  el.captureButton.disabled = isBusy(state, 'start_capture') || isBusy(state, 'stop_capture');
  el.clearButton.disabled = isBusy(state, 'clear');
  el.pauseButton.disabled = isBusy(state, 'pause_rsvp') || state.currentToken === null;
  el.resumeButton.disabled = isBusy(state, 'resume_rsvp');
  if (!isBusy(state, 'set_rsvp_rate') && document.activeElement !== el.speedSlider) {
    el.speedSlider.value = String(state.rsvpRate);
  }
  el.speedLabel.textContent = `${Math.round(state.rsvpRate)} tpm`;
}

function renderToasts(state: ViewState, root: HTMLElement): void {
  const recent = state.toasts.slice(-3);
  root.replaceChildren(
    ...recent.map((toast) => {
      const node = document.createElement('div');
      node.className = `toast ${toast.kind}`;
      node.textContent = toast.text;
      return node;
    }),
  );
}

function renderHistory(state: ViewState, root: HTMLElement): void {
  if (state.historyList === null) {
    return;
  }
  root.replaceChildren(
    ...state.historyList.map((entry) => {
      const item = document.createElement('li');
      const button = document.createElement('button');
      button.textContent = `${entry.record_id}`;
      button.dataset.recordId = entry.record_id;
      button.className = 'history-entry';
      item.append(button);
      return item;
    }),
  );
}

// Appearance preferences are opaque to the engine; the panel interprets
// the keys it knows: width/height (px), x/y (px offsets), opacity (0..1),
// background (plain | dark | comic).
function applyAppearance(state: ViewState, panel: HTMLElement): void {
  const prefs = state.appearance;
  const num = (key: string): number | null =>
    typeof prefs[key] === 'number' ? (prefs[key] as number) : null;
  const width = num('width');
  const height = num('height');
  const x = num('x');
  const y = num('y');
  const opacity = num('opacity');
  if (width !== null) panel.style.width = `${width}px`;
  if (height !== null) panel.style.height = `${height}px`;
  if (x !== null) panel.style.left = `${x}px`;
  if (y !== null) panel.style.top = `${y}px`;
  if (opacity !== null) panel.style.opacity = String(opacity);
  const background = typeof prefs.background === 'string' ? prefs.background : 'plain';
  panel.classList.remove('bg-plain', 'bg-dark', 'bg-comic');
  panel.classList.add(`bg-${['plain', 'dark', 'comic'].includes(background) ? background : 'plain'}`);
}
