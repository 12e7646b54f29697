// Wire protocol types, mirroring the gateway's wire_schema.json (v1).
// One JSON object per websocket text message; unknown top-level fields are
// rejected by the server, so we only ever send these exact shapes.

export const WIRE_VERSION = 1;

export type EventKind =
  | 'segment'
  | 'segment_revised'
  | 'condensed'
  | 'framework'
  | 'rsvp_token'
  | 'state'
  | 'error'
  | 'history';

export type CommandKind =
  | 'start_capture'
  | 'stop_capture'
  | 'clear'
  | 'set_mode'
  | 'set_rsvp_rate'
  | 'set_appearance'
  | 'list_history'
  | 'load_history'
  | 'pause_rsvp'
  | 'resume_rsvp';

export type Mode = 'raw' | 'condensed' | 'framework';

export interface WireEvent {
  v: 1;
  seq: number;
  generation: number;
  kind: EventKind;
  at_ms: number;
  payload: Record<string, unknown>;
}

export interface SegmentPayload {
  seq: number;
  t_start_ms: number;
  t_end_ms: number;
  text: string;
  final: boolean;
}

export interface EmojiTag {
  meaning: string;
  symbol: string;
}

export interface CondensedPayload {
  tick_index: number;
  text: string;
  emojis: EmojiTag[];
  window_start_ms: number;
  window_end_ms: number;
  truncated: boolean;
  degraded: boolean;
}

export type FrameworkFields = Record<string, string | null>;

export interface FrameworkPayload {
  tick_index: number;
  fields: FrameworkFields;
}

export interface RsvpTokenPayload {
  text: string;
  index: number;
  count: number;
  tick_index: number;
  duration_ms: number;
}

export interface Snapshot {
  session_id: string;
  capturing: boolean;
  mode: Mode;
  generation: number;
  tick_index: number;
  rsvp_rate: number;
  appearance: Record<string, unknown>;
  stale_dropped: number;
  buffer_size: number;
  condensed_count: number;
  raw_tail: SegmentPayload[];
  latest_condensed: CondensedPayload | null;
  framework: { fields: FrameworkFields };
}

export interface StatePayload {
  ack_id?: string;
  snapshot: Snapshot;
}

export interface ErrorPayload {
  ack_id?: string;
  code: string;
  message: string;
}

export interface HistoryEntry {
  record_id: string;
  started_at: string;
}

export interface HistoryPayload {
  ack_id?: string;
  saved?: string;
  sessions?: HistoryEntry[];
  record?: Record<string, unknown>;
}

export interface WireCommand {
  v: 1;
  id: string;
  kind: CommandKind;
  args: Record<string, unknown>;
}

// Display order and labels for the ten framework fields.
export const FRAMEWORK_FIELDS: ReadonlyArray<[key: string, label: string]> = [
  ['product', 'Product'],
  ['category', 'Category'],
  ['promotional_policy', 'Promotional Policy'],
  ['free_shipping', 'Free Shipping'],
  ['seven_day_return', '7-Day No Reason Return'],
  ['price', 'Price'],
  ['after_sales', 'After-Sales Service'],
  ['product_description', 'Product Description'],
  ['user_experience', 'User Experience'],
  ['user_manual', 'User Manual'],
];

export function parseEvent(raw: string): WireEvent {
  const data = JSON.parse(raw) as WireEvent;
  if (data.v !== WIRE_VERSION) {
    throw new Error(`unsupported protocol version: ${String(data.v)}`);
  }
  return data;
}

export function encodeCommand(id: string, kind: CommandKind, args: Record<string, unknown>): string {
  const command: WireCommand = { v: WIRE_VERSION, id, kind, args };
  return JSON.stringify(command);
}
