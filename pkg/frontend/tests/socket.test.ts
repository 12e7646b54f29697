// GatewayClient behavior against a scripted fake socket.

import { describe, expect, it, vi } from 'vitest';

import { WireEvent } from '../src/protocol.js';
import { GatewayClient, SocketLike } from '../src/socket.js';

class FakeSocket implements SocketLike {
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;

  constructor(public url: string) {}

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.onclose?.();
  }

  deliver(event: Partial<WireEvent>): void {
    this.onmessage?.({ data: JSON.stringify({ v: 1, generation: 0, at_ms: 0, payload: {}, ...event }) });
  }
}

function harness() {
  const sockets: FakeSocket[] = [];
  const events: WireEvent[] = [];
  const statuses: string[] = [];
  const client = new GatewayClient({
    url: 'ws://test',
    onEvent: (event) => events.push(event),
    onStatus: (status) => statuses.push(status),
    socketFactory: (url) => {
      const socket = new FakeSocket(url);
      sockets.push(socket);
      return socket;
    },
    reconnectDelayMs: 1,
  });
  return { client, sockets, events, statuses };
}

describe('gateway client', () => {
  it('connects plain first, then resumes from the last seen seq', async () => {
    vi.useFakeTimers();
    try {
      const { client, sockets } = harness();
      client.connect();
      expect(sockets[0].url).toBe('ws://test');
      sockets[0].onopen?.();
      sockets[0].deliver({ seq: 17, kind: 'state', payload: { snapshot: {} } });
      sockets[0].close(); // dropped: schedule reconnect
      await vi.advanceTimersByTimeAsync(5);
      expect(sockets).toHaveLength(2);
      expect(sockets[1].url).toBe('ws://test/?resume_from=17');
    } finally {
      vi.useRealTimers();
    }
  });

  it('commands get fresh ids and the exact envelope', () => {
    const { client, sockets } = harness();
    client.connect();
    sockets[0].onopen?.();
    const first = client.send('set_mode', { mode: 'raw' });
    const second = client.send('clear');
    expect(first).not.toBe(second);
    expect(JSON.parse(sockets[0].sent[0])).toEqual({
      v: 1,
      id: first,
      kind: 'set_mode',
      args: { mode: 'raw' },
    });
    expect(JSON.parse(sockets[0].sent[1])).toEqual({ v: 1, id: second, kind: 'clear', args: {} });
  });

  it('close() by the user does not reconnect', async () => {
    vi.useFakeTimers();
    try {
      const { client, sockets } = harness();
      client.connect();
      sockets[0].onopen?.();
      client.close();
      await vi.advanceTimersByTimeAsync(50);
      expect(sockets).toHaveLength(1);
    } finally {
      vi.useRealTimers();
    }
  });

  it('sending while disconnected throws instead of silently dropping', () => {
    const { client, sockets } = harness();
    client.connect();
    sockets[0].close();
    expect(() => client.send('clear')).toThrow(/not connected/);
  });
});
