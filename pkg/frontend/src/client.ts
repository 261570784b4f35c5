/**
 * Client SDK for the battle-server wire protocol: newline-delimited JSON
 * over TCP. The SDK performs no game logic — it transports action lines
 * and decodes payloads; all validation authority stays server-side.
 *
 * One session per connection for sequential use; open more connections
 * for more sessions.
 */

import * as net from "node:net";
import { DecodedImage, decodePng } from "./png.js";

export type Team = "P1" | "P2";
export type Mode = "PvE" | "PvP";

export interface UnitRecord {
  id: number;
  type: string;
  team: Team;
  label: string;
  pos: [number, number];
  grid: [number, number];
  attr: {
    damage: number;
    bonus_damage: number;
    bonus_vs: string | null;
    armor: number;
    range: number;
    speed: number;
    attributes: string[];
    flying: boolean;
  };
  status: {
    health: number;
    max_health: number;
    shields: number;
    max_shields: number;
    energy: number;
    max_energy: number;
    weapon_ready: boolean;
    effects: string[];
  };
}

export interface Annotation {
  p: [number, number];
  c: string;
  b: [number, number, number, number];
  tag: number;
}

export interface Observation {
  decisionStep: number;
  text: string;
  height: number;
  width: number;
  units: UnitRecord[];
  annotations: Annotation[];
  /** Decoded RGB frame; absent when the session disables images. */
  image?: DecodedImage;
}

export interface Rejection {
  team: Team;
  line: string;
  reason: string;
  detail: string;
}

export interface StepResult {
  observation: Observation;
  reward: number;
  done: boolean;
  outcome: string;
  rejections: Rejection[];
  applied: string[];
}

export interface CreateOptions {
  scenario: string;
  seed: number;
  mode?: Mode;
  team?: Team;
  includeImage?: boolean;
  stepDeadlineS?: number;
  render?: { height?: number; width?: number; show_grid?: boolean; show_tags?: boolean };
}

/** Server-reported failure, carrying the protocol error code. */
export class ProtocolError extends Error {
  constructor(public readonly code: string, message: string) {
    super(`${code}: ${message}`);
    this.name = "ProtocolError";
  }
}

export class SessionDoneError extends ProtocolError {
  constructor(message: string) {
    super("SESSION_DONE", message);
    this.name = "SessionDoneError";
  }
}

export class UnknownScenarioError extends ProtocolError {
  constructor(message: string) {
    super("UNKNOWN_SCENARIO", message);
    this.name = "UnknownScenarioError";
  }
}

export class ClientClosedError extends Error {
  constructor() {
    super("client connection is closed");
    this.name = "ClientClosedError";
  }
}

function raiseForCode(code: string, message: string): never {
  if (code === "SESSION_DONE") throw new SessionDoneError(message);
  if (code === "UNKNOWN_SCENARIO") throw new UnknownScenarioError(message);
  throw new ProtocolError(code, message);
}

interface Pending {
  resolve: (value: Record<string, unknown>) => void;
  reject: (error: Error) => void;
}

export class ArenaClient {
  private buffer = "";
  private pending: Pending[] = [];
  private closed = false;

  private constructor(private readonly socket: net.Socket) {
    socket.on("data", (chunk) => this.onData(chunk));
    socket.on("error", (err) => this.failAll(err));
    socket.on("close", () => this.failAll(new ClientClosedError()));
  }

  static connect(host: string, port: number, timeoutMs = 5000): Promise<ArenaClient> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port });
      const timer = setTimeout(() => {
        socket.destroy();
        reject(new Error(`connect timeout to ${host}:${port}`));
      }, timeoutMs);
      socket.once("connect", () => {
        clearTimeout(timer);
        socket.setNoDelay(true);
        resolve(new ArenaClient(socket));
      });
      socket.once("error", (err) => {
        clearTimeout(timer);
        reject(err);
      });
    });
  }

  private onData(chunk: Buffer): void {
    this.buffer += chunk.toString("utf-8");
    let index: number;
    while ((index = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, index);
      this.buffer = this.buffer.slice(index + 1);
      const waiter = this.pending.shift();
      if (!waiter) continue; // unsolicited line; protocol never sends these
      try {
        waiter.resolve(JSON.parse(line));
      } catch (err) {
        waiter.reject(err as Error);
      }
    }
  }

  private failAll(error: Error): void {
    this.closed = true;
    const waiters = this.pending;
    this.pending = [];
    for (const waiter of waiters) waiter.reject(error);
  }

  /** Send one request and await its (in-order) response. */
  request(message: Record<string, unknown>): Promise<Record<string, unknown>> {
    if (this.closed) return Promise.reject(new ClientClosedError());
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.socket.write(JSON.stringify(message) + "\n");
    }).then((response) => {
      const r = response as Record<string, unknown>;
      if (r.ok !== true) {
        raiseForCode(String(r.code ?? "INTERNAL"), String(r.message ?? ""));
      }
      return r;
    });
  }

  async listScenarios(): Promise<Array<{ id: string; mode: Mode; description: string }>> {
    const resp = await this.request({ op: "list_scenarios" });
    return resp.scenarios as Array<{ id: string; mode: Mode; description: string }>;
  }

  async create(options: CreateOptions): Promise<ClientSession> {
    const message: Record<string, unknown> = {
      op: "create",
      scenario: options.scenario,
      seed: options.seed,
      mode: options.mode ?? "PvE",
      team: options.team ?? "P1",
    };
    if (options.includeImage !== undefined) message.include_image = options.includeImage;
    if (options.stepDeadlineS !== undefined) message.step_deadline_s = options.stepDeadlineS;
    if (options.render !== undefined) message.render = options.render;
    const resp = await this.request(message);
    return new ClientSession(this, String(resp.session_id),
      (resp.team as Team) ?? "P1");
  }

  close(): void {
    this.closed = true;
    this.socket.destroy();
  }
}

function parseObservation(raw: Record<string, unknown>): Observation {
  const obs: Observation = {
    decisionStep: raw.decision_step as number,
    text: raw.text as string,
    height: raw.height as number,
    width: raw.width as number,
    units: raw.units as UnitRecord[],
    annotations: raw.annotations as Annotation[],
  };
  if (typeof raw.image === "string") {
    obs.image = decodePng(Buffer.from(raw.image, "base64"));
  }
  return obs;
}

export class ClientSession {
  public lastObservation: Observation | null = null;
  private closed = false;

  constructor(
    private readonly client: ArenaClient,
    public readonly sessionId: string,
    public readonly team: Team,
  ) {}

  private guard(): void {
    if (this.closed) throw new ClientClosedError();
  }

  async reset(): Promise<Observation> {
    this.guard();
    const resp = await this.client.request({
      op: "reset", session_id: this.sessionId, team: this.team,
    });
    this.lastObservation = parseObservation(resp.observation as Record<string, unknown>);
    return this.lastObservation;
  }

  async observe(): Promise<Observation> {
    this.guard();
    const resp = await this.client.request({
      op: "observe", session_id: this.sessionId, team: this.team,
    });
    this.lastObservation = parseObservation(resp.observation as Record<string, unknown>);
    return this.lastObservation;
  }

  /** Submit action lines; rejections come back as data, not exceptions. */
  async step(actions: string[]): Promise<StepResult> {
    this.guard();
    const resp = await this.client.request({
      op: "step", session_id: this.sessionId, team: this.team, actions,
    });
    this.lastObservation = parseObservation(resp.observation as Record<string, unknown>);
    return {
      observation: this.lastObservation,
      reward: resp.reward as number,
      done: resp.done as boolean,
      outcome: String(resp.outcome ?? ""),
      rejections: (resp.rejections as Rejection[]) ?? [],
      applied: (resp.applied as string[]) ?? [],
    };
  }

  async close(): Promise<void> {
    if (this.closed) return;
    this.closed = true;
    await this.client.request({ op: "close", session_id: this.sessionId });
  }
}
