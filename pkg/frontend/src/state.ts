// View state is a pure fold over stream messages: no client-side scheduling,
// no dedup, no position extrapolation. Reconnecting replays a state_sync and
// rebuilds an equivalent view.

import {
  LaneSnapshot,
  MetricsTiles,
  SegmentPlanView,
  SessionInfo,
  SpeechItem,
  StreamMessage,
  TickerEntry,
} from "./types.js";

export const TICKER_LIMIT = 200;
export const SPEECH_LIMIT = 100;

export interface ViewState {
  connected: boolean;
  session: SessionInfo | null;
  personas: string[];
  lanes: LaneSnapshot | null;
  segments: SegmentPlanView[];
  ticker: TickerEntry[];
  speech: SpeechItem[];
  metrics: MetricsTiles | null;
  gapsDropped: number;
  lastSeq: number;
}

export const initialState: ViewState = {
  connected: false,
  session: null,
  personas: [],
  lanes: null,
  segments: [],
  ticker: [],
  speech: [],
  metrics: null,
  gapsDropped: 0,
  lastSeq: 0,
};

function cap<T>(items: T[], limit: number): T[] {
  return items.length > limit ? items.slice(items.length - limit) : items;
}

export function reduce(state: ViewState, message: StreamMessage): ViewState {
  const seq = message.seq ?? state.lastSeq;
  switch (message.type) {
    case "state_sync": {
      const d = message.data;
      return {
        ...state,
        session: d.session,
        personas: d.personas ?? [],
        lanes: d.lanes,
        segments: d.segments ?? [],
        ticker: cap(
          (d.ticker ?? []).map((event: any) => ({ event, admitted_at: event.timestamp })),
          TICKER_LIMIT,
        ),
        speech: [],
        metrics: d.metrics,
        lastSeq: seq,
      };
    }
    case "lane_snapshot":
      return { ...state, lanes: message.data, lastSeq: seq };
    case "metrics":
      return { ...state, metrics: message.data, lastSeq: seq };
    case "segments":
      return {
        ...state,
        segments: message.data.plans,
        session: message.data.song ?? state.session,
        lastSeq: seq,
      };
    case "persona":
      return {
        ...state,
        session: state.session ? { ...state.session, persona: message.data.name } : state.session,
        lastSeq: seq,
      };
    case "event":
      return { ...state, ticker: cap([...state.ticker, message.data], TICKER_LIMIT), lastSeq: seq };
    case "speech":
      return { ...state, speech: cap([...state.speech, message.data], SPEECH_LIMIT), lastSeq: seq };
    case "session":
      return { ...state, session: message.data, lastSeq: seq };
    case "heartbeat":
      return state.session === null
        ? { ...state, session: emptySession(message.data.state), lastSeq: seq }
        : { ...state, lastSeq: seq };
    case "gap":
      return { ...state, gapsDropped: state.gapsDropped + message.data.dropped, lastSeq: seq };
    default:
      return state;
  }
}

export function setConnected(state: ViewState, connected: boolean): ViewState {
  return { ...state, connected };
}

function emptySession(state: SessionInfo["state"]): SessionInfo {
  return {
    session_id: null,
    state,
    persona: "",
    current_song: null,
    song_started_at: null,
    song_duration: null,
    clock_mode: "simulated",
    speed: 1,
    t: 0,
  };
}
