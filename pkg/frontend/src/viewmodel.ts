// Pure render models for the three display modes: what each view shows,
// computed from ViewState with no DOM involved. The DOM layer only paints
// these, which keeps everything here testable against recorded sessions.

import { FRAMEWORK_FIELDS } from './protocol.js';
import { ViewState } from './store.js';

export interface RawSpan {
  text: string;
  provisional: boolean;
}

export interface RawView {
  spans: RawSpan[];
}

export interface CondensedView {
  token: string | null; // the single RSVP token on screen
  progress: string; // e.g. "3/12"
  emojis: string[]; // glyphs for the current tick's strip
  tickIndex: number | null;
  degraded: boolean;
}

export interface FrameworkRow {
  label: string;
  value: string;
  present: boolean;
}

export interface FrameworkView {
  rows: FrameworkRow[];
}

export const ABSENT_PLACEHOLDER = '—';

export function rawView(state: ViewState): RawView {
  const segments = [...state.segments.values()].sort(
    (a, b) => a.t_start_ms - b.t_start_ms || a.seq - b.seq,
  );
  return {
    spans: segments.map((segment) => ({ text: segment.text, provisional: !segment.final })),
  };
}

export function condensedView(state: ViewState): CondensedView {
  if (state.condensed === null) {
    return { token: null, progress: '', emojis: [], tickIndex: null, degraded: false };
  }
  const token = state.currentToken;
  return {
    token: token === null ? null : token.text,
    progress: token === null ? '' : `${token.index + 1}/${token.count}`,
    emojis: state.condensed.emojis.map((tag) => tag.symbol),
    tickIndex: state.condensed.tick_index,
    degraded: state.condensed.degraded,
  };
}

export function frameworkView(state: ViewState): FrameworkView {
  const fields = state.framework;
  return {
    rows: FRAMEWORK_FIELDS.map(([key, label]) => {
      const value = fields === null ? null : fields[key] ?? null;
      return {
        label,
        value: value === null ? ABSENT_PLACEHOLDER : value,
        present: value !== null,
      };
    }),
  };
}

export function allViewsEmpty(state: ViewState): boolean {
  return (
    rawView(state).spans.length === 0 &&
    condensedView(state).tickIndex === null &&
    frameworkView(state).rows.every((row) => !row.present)
  );
}
