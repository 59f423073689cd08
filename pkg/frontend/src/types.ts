// Wire types of the lab service. The panel holds no physics: every
// number shown on screen came out of one of these messages.

export interface CancellerCode {
  att: number;
  ps: number;
  caps: [number, number, number];
}

export interface SessionState {
  id: string;
  sample_rate_hz: number;
  carrier_hz: number;
  tx_power_dbm: number;
  wave: { kind: string; [k: string]: unknown };
  noise_floor_dbm: number;
  code: CancellerCode;
  rf_sic_db: number;
  seq: number;
  frame_rate_hz: number;
  frame_samples: number;
}

export interface Frame {
  seq: number;
  freqs_hz: number[];
  psd_dbm: number[];
  rf_sic_db: number;
  code: CancellerCode;
}

export interface CancellerAck {
  att: number;
  ps: number;
  caps: [number, number, number];
  rf_sic_db: number;
}

export interface TuneAck extends CancellerAck {
  evaluations: number;
  sweeps: number;
}

export interface BudgetReport {
  mode: string;
  tx_power_dbm: number;
  post_rf_dbm: number;
  post_digital_dbm: number;
  rf_sic_db: number;
  digital_sic_db: number;
  total_sic_db: number;
  noise_floor_dbm: number;
  canceller_code: { att: number; ps: number; caps: number[] };
  [k: string]: unknown;
}

export type KnobName = "att" | "ps" | "cap1" | "cap2" | "cap3";

export type KnobPatch = Partial<Record<"att" | "ps", number>> & {
  caps?: [number, number, number];
};
