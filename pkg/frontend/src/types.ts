// Wire schemas for the gateway stream and control endpoints.

export interface SessionInfo {
  session_id: string | null;
  state: "Idle" | "Running" | "Stopped";
  persona: string;
  current_song: string | null;
  song_started_at: number | null;
  song_duration: number | null;
  clock_mode: string;
  speed: number;
  t: number;
}

export interface LaneAvail {
  k: number;
  avail: number;
}

export interface ActiveDanmaku {
  lane: number;
  x: number;
  width: number;
  text: string;
}

export interface LaneSnapshot {
  t: number;
  lanes: LaneAvail[];
  active: ActiveDanmaku[];
  drops: number;
}

export type SegmentState = "Pending" | "Inflight" | "Spoken" | "Skipped";

export interface SegmentPlanView {
  segment: string;
  state: SegmentState;
  trigger_time: number;
  window: [number, number];
}

export interface LiveEventWire {
  kind: "danmaku" | "gift" | "like" | "entrance";
  timestamp: number;
  user: string;
  content: string;
  count: number;
}

export interface MetricsTiles {
  drops: number;
  emitted: number;
  delivered: number;
  published: number;
  duplicate_rate: number;
  overlap_rate: number;
  fx_admitted: number;
  reactions: {
    fired_by_category: Record<string, number>;
    suppressed: number;
    no_match: number;
  };
}

export interface SpeechItem {
  t: number;
  source: string;
  text: string;
}

export interface StreamMessage {
  v: number;
  seq?: number;
  type:
    | "state_sync"
    | "lane_snapshot"
    | "metrics"
    | "segments"
    | "persona"
    | "event"
    | "speech"
    | "session"
    | "heartbeat"
    | "gap";
  data: any;
}

export interface TickerEntry {
  event: LiveEventWire;
  admitted_at: number;
  reaction?: string;
}
