// Client-side session state: a pure reducer over gateway events.
//
// Snapshots are authoritative (content is rebuilt from them on connect,
// reconnect, and every ack); incremental events apply on top. The store
// mirrors the gateway's generation fence: a content event older than the
// current generation is never displayed — it is dropped and counted, so a
// violation is observable in tests.

import {
  CondensedPayload,
  ErrorPayload,
  FrameworkFields,
  HistoryEntry,
  HistoryPayload,
  Mode,
  RsvpTokenPayload,
  SegmentPayload,
  Snapshot,
  StatePayload,
  WireEvent,
} from './protocol.js';

export type ConnectionStatus = 'connecting' | 'open' | 'closed';

export interface Toast {
  kind: 'error' | 'info';
  text: string;
}

export interface ViewState {
  connection: ConnectionStatus;
  sessionId: string | null;
  capturing: boolean;
  mode: Mode;
  generation: number;
  lastSeq: number;
  rsvpRate: number;
  appearance: Record<string, unknown>;
  segments: Map<number, SegmentPayload>;
  condensed: CondensedPayload | null;
  currentToken: RsvpTokenPayload | null;
  framework: FrameworkFields | null;
  pending: Map<string, string>; // command id -> kind
  toasts: Toast[];
  historyList: HistoryEntry[] | null;
  historyRecord: Record<string, unknown> | null;
  fencedDrops: number;
}

export function initialState(): ViewState {
  return {
    connection: 'connecting',
    sessionId: null,
    capturing: false,
    mode: 'raw',
    generation: 0,
    lastSeq: 0,
    rsvpRate: 180,
    appearance: {},
    segments: new Map(),
    condensed: null,
    currentToken: null,
    framework: null,
    pending: new Map(),
    toasts: [],
    historyList: null,
    historyRecord: null,
    fencedDrops: 0,
  };
}

const CONTENT_KINDS = new Set(['segment', 'segment_revised', 'condensed', 'framework', 'rsvp_token']);

export function applyEvent(state: ViewState, event: WireEvent): ViewState {
  state.lastSeq = Math.max(state.lastSeq, event.seq);

  if (CONTENT_KINDS.has(event.kind) && event.generation < state.generation) {
    // Mirror of the server guarantee: stale content must never render.
    state.fencedDrops += 1;
    return state;
  }
  if (event.generation > state.generation) {
    // A newer generation means the session was cleared; drop local content
    // even if the explicit ack was missed.
    resetContent(state);
    state.generation = event.generation;
  }

  switch (event.kind) {
    case 'state':
      applySnapshot(state, event.payload as unknown as StatePayload);
      break;
    case 'segment':
    case 'segment_revised': {
      const segment = event.payload as unknown as SegmentPayload;
      state.segments.set(segment.seq, segment);
      break;
    }
    case 'condensed':
      state.condensed = event.payload as unknown as CondensedPayload;
      state.currentToken = null;
      break;
    case 'rsvp_token':
      state.currentToken = event.payload as unknown as RsvpTokenPayload;
      break;
    case 'framework':
      state.framework = (event.payload as unknown as { fields: FrameworkFields }).fields;
      break;
    case 'error': {
      const payload = event.payload as unknown as ErrorPayload;
      if (payload.ack_id !== undefined) {
        state.pending.delete(payload.ack_id);
      }
      state.toasts.push({ kind: 'error', text: `${payload.code}: ${payload.message}` });
      break;
    }
    case 'history': {
      const payload = event.payload as unknown as HistoryPayload;
      if (payload.ack_id !== undefined) {
        state.pending.delete(payload.ack_id);
      }
      if (payload.sessions !== undefined) {
        state.historyList = payload.sessions;
      }
      if (payload.record !== undefined) {
        state.historyRecord = payload.record;
      }
      break;
    }
  }
  return state;
}

function applySnapshot(state: ViewState, payload: StatePayload): void {
  const snapshot: Snapshot = payload.snapshot;
  if (payload.ack_id !== undefined) {
    state.pending.delete(payload.ack_id);
  }
  if (snapshot.generation > state.generation) {
    resetContent(state);
    state.generation = snapshot.generation;
  }
  state.sessionId = snapshot.session_id;
  state.capturing = snapshot.capturing;
  state.mode = snapshot.mode;
  state.rsvpRate = snapshot.rsvp_rate;
  state.appearance = snapshot.appearance;
  // Snapshots are authoritative for content.
  state.segments = new Map(snapshot.raw_tail.map((segment) => [segment.seq, segment]));
  state.condensed = snapshot.latest_condensed;
  state.framework = frameworkOrNull(snapshot.framework.fields);
  if (state.condensed === null) {
    state.currentToken = null;
  }
}

function frameworkOrNull(fields: FrameworkFields): FrameworkFields | null {
  return Object.values(fields).some((value) => value !== null) ? fields : null;
}

function resetContent(state: ViewState): void {
  state.segments = new Map();
  state.condensed = null;
  state.currentToken = null;
  state.framework = null;
}

export function setConnection(state: ViewState, status: ConnectionStatus): ViewState {
  state.connection = status;
  if (status !== 'open') {
    // Commands in flight when the socket drops will never be acked.
    state.pending.clear();
  }
  return state;
}

export function trackCommand(state: ViewState, id: string, kind: string): void {
  state.pending.set(id, kind);
}

export function isBusy(state: ViewState, kind: string): boolean {
  for (const pendingKind of state.pending.values()) {
    if (pendingKind === kind) {
      return true;
    }
  }
  return false;
}
