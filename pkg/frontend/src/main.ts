// Panel bootstrap: connect to the gateway, reduce events into ViewState,
// paint on every change, and wire the controls.

import { Mode } from './protocol.js';
import { GatewayClient } from './socket.js';
import { applyEvent, initialState, setConnection, trackCommand } from './store.js';
import { PanelElements, render } from './views.js';

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function gatewayUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get('gateway') ?? 'ws://127.0.0.1:8765';
}

function main(): void {
  const el: PanelElements = {
    banner: byId('banner'),
    raw: byId('raw-text'),
    condensedToken: byId('rsvp-token'),
    condensedProgress: byId('rsvp-progress'),
    emojiStrip: byId('emoji-strip'),
    degradedBadge: byId('degraded-badge'),
    framework: byId('framework-rows'),
    toasts: byId('toasts'),
    panel: byId('panel'),
    modeButtons: {
      raw: byId<HTMLButtonElement>('mode-raw'),
      condensed: byId<HTMLButtonElement>('mode-condensed'),
      framework: byId<HTMLButtonElement>('mode-framework'),
    },
    captureButton: byId<HTMLButtonElement>('capture-toggle'),
    clearButton: byId<HTMLButtonElement>('clear-button'),
    pauseButton: byId<HTMLButtonElement>('pause-button'),
    resumeButton: byId<HTMLButtonElement>('resume-button'),
    speedSlider: byId<HTMLInputElement>('speed-slider'),
    speedLabel: byId('speed-label'),
    historyList: byId('history-list'),
  };

  const state = initialState();
  const repaint = () => render(state, el);

  const client = new GatewayClient({
    url: gatewayUrl(),
    onEvent: (event) => {
      applyEvent(state, event);
      repaint();
    },
    onStatus: (status) => {
      setConnection(state, status);
      repaint();
    },
  });

  const send = (kind: Parameters<GatewayClient['send']>[0], args: Record<string, unknown> = {}) => {
    try {
      const id = client.send(kind, args);
      trackCommand(state, id, kind);
    } catch (error) {
      state.toasts.push({ kind: 'error', text: String(error) });
    }
    repaint();
  };

  for (const mode of ['raw', 'condensed', 'framework'] as Mode[]) {
    el.modeButtons[mode].addEventListener('click', () => send('set_mode', { mode }));
  }
  el.captureButton.addEventListener('click', () => {
    send(state.capturing ? 'stop_capture' : 'start_capture');
  });
  el.clearButton.addEventListener('click', () => {
    if (window.confirm('清屏并重新开始? Clear all text and restart processing?')) {
      send('clear');
    }
  });
  el.pauseButton.addEventListener('click', () => send('pause_rsvp'));
  el.resumeButton.addEventListener('click', () => send('resume_rsvp'));
  el.speedSlider.addEventListener('change', () => {
    send('set_rsvp_rate', { rate: Number(el.speedSlider.value) });
  });

  for (const background of ['plain', 'dark', 'comic']) {
    byId<HTMLButtonElement>(`bg-${background}`).addEventListener('click', () => {
      send('set_appearance', { prefs: { background } });
    });
  }
  byId<HTMLInputElement>('opacity-slider').addEventListener('change', (event) => {
    const value = Number((event.target as HTMLInputElement).value);
    send('set_appearance', { prefs: { opacity: value } });
  });

  byId<HTMLButtonElement>('history-refresh').addEventListener('click', () => send('list_history'));
  el.historyList.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.recordId !== undefined) {
      send('load_history', { record_id: target.dataset.recordId });
    }
  });

  // Simple drag-to-move persisted through appearance prefs.
  let dragging: { startX: number; startY: number; left: number; top: number } | null = null;
  byId('panel-title').addEventListener('mousedown', (event) => {
    const rect = el.panel.getBoundingClientRect();
    dragging = { startX: event.clientX, startY: event.clientY, left: rect.left, top: rect.top };
  });
  window.addEventListener('mousemove', (event) => {
    if (dragging === null) return;
    el.panel.style.left = `${dragging.left + event.clientX - dragging.startX}px`;
    el.panel.style.top = `${dragging.top + event.clientY - dragging.startY}px`;
  });
  window.addEventListener('mouseup', (event) => {
    if (dragging === null) return;
    const x = dragging.left + event.clientX - dragging.startX;
    const y = dragging.top + event.clientY - dragging.startY;
    dragging = null;
    send('set_appearance', { prefs: { x, y } });
  });

  client.connect();
  repaint();
}

main();
