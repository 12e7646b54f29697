// Gateway connection: one full-duplex socket speaking the wire protocol,
// with automatic reconnect and seq-based resume. The socket constructor is
// injectable so tests can drive the client without a network.

import { CommandKind, encodeCommand, parseEvent, WireEvent } from './protocol.js';

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface GatewayClientOptions {
  url: string;
  onEvent: (event: WireEvent) => void;
  onStatus: (status: 'connecting' | 'open' | 'closed') => void;
  socketFactory?: SocketFactory;
  reconnectDelayMs?: number;
}

export class GatewayClient {
  private readonly options: GatewayClientOptions;
  private socket: SocketLike | null = null;
  private lastSeq = 0;
  private commandCounter = 0;
  private closedByUser = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(options: GatewayClientOptions) {
    this.options = options;
  }

  connect(): void {
    this.closedByUser = false;
    const factory: SocketFactory =
      this.options.socketFactory ?? ((url) => new WebSocket(url) as unknown as SocketLike);
    const url =
      this.lastSeq > 0
        ? `${this.options.url}/?resume_from=${this.lastSeq}`
        : this.options.url;
    this.options.onStatus('connecting');
    const socket = factory(url);
    this.socket = socket;
    socket.onopen = () => this.options.onStatus('open');
    socket.onmessage = (message) => {
      const event = parseEvent(String(message.data));
      this.lastSeq = Math.max(this.lastSeq, event.seq);
      this.options.onEvent(event);
    };
    socket.onclose = () => {
      this.options.onStatus('closed');
      this.socket = null;
      if (!this.closedByUser) {
        this.scheduleReconnect();
      }
    };
  }

  private scheduleReconnect(): void {
    if (this.reconnectTimer !== null) {
      return;
    }
    const delay = this.options.reconnectDelayMs ?? 1000;
    this.reconnectTimer = setTimeout(() => {
      this.reconnectTimer = null;
      this.connect();
    }, delay);
  }

  send(kind: CommandKind, args: Record<string, unknown> = {}): string {
    if (this.socket === null) {
      throw new Error('gateway not connected');
    }
    this.commandCounter += 1;
    const id = `c${this.commandCounter}`;
    this.socket.send(encodeCommand(id, kind, args));
    return id;
  }

  close(): void {
    this.closedByUser = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
  }
}
