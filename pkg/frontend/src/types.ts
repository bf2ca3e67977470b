// Shapes of the service's JSON bodies. The dashboard displays these fields
// as-is: it never derives energy numbers on its own.

export interface SensorInfo {
  sensor_id: string;
  kind: string;
  building_id: string;
  room: string | null;
  orientation_note: string | null;
  circuit: string;
}

export interface PinnedState {
  baseline_id: string;
  comparison_week: string;
  saving_week: string;
}

export interface BuildingInfo {
  building_id: string;
  timezone: string;
  name: string | null;
  holidays: string[];
  sensors: SensorInfo[];
  profile: unknown | null;
  baselines: string[];
  pinned: PinnedState | null;
  lux_zones: string[];
}

export interface DailyPoint {
  date: string;
  kwh: number | null;
  coverage: number;
  flags: string[];
}

export interface SubDayPoint {
  start: string;
  kwh: number | null;
}

export type EnergyPoint = DailyPoint | SubDayPoint;

export interface EnergyResponse {
  building_id: string;
  resolution: string;
  series: EnergyPoint[];
}

export interface LiveResponse {
  building_id: string;
  at: string;
  date: string;
  latest_power_w: number | null;
  latest_at: string | null;
  today_kwh: number | null;
  today_coverage: number;
  baseline_kwh_per_day: number | null;
}

export interface SeriesPoint {
  t: string;
  value: number | null;
}

export interface WasteIntervalInfo {
  building_id: string;
  zone: string;
  start: string;
  end: string;
  duration_hours: number;
  lux_threshold: number;
  usual_power_kw: number;
  minimal_power_kw: number;
  excess_power_kw: number;
  estimated_daily_savings_kwh: number;
  recurrence_count: number;
}

export interface WasteResponse {
  building_id: string;
  zone: string;
  date: string;
  lux_threshold: number;
  lights_on_floor_kw: number;
  minimal_power_kw: number | null;
  resolution_minutes: number;
  lux_series: SeriesPoint[];
  power_series: SeriesPoint[];
  intervals: WasteIntervalInfo[];
  total_estimated_savings_kwh: number;
}

export interface WeekInfo {
  building_id: string;
  week: string;
  dates: string[];
  daily: DailyPoint[];
  mean_kwh_per_day: number;
  flexible_kwh_per_day: number;
  baseline_id: string;
  baseline_kwh_per_day: number;
  day_set: string;
  below_baseline: boolean;
}

export interface InterventionResponse {
  comparison: WeekInfo;
  saving: WeekInfo;
  absolute_saving_kwh_per_day: number;
  reduction_fraction: number;
  reduction_display: string;
  notes: string;
}

export interface ProgressPointInfo {
  week: string;
  flexible_kwh_per_day: number | null;
  reduction_vs_comparison: number | null;
  group_tag: string | null;
  below_baseline: boolean;
  gap: boolean;
}

export interface ProgressResponse {
  building_id: string;
  comparison_week: string | null;
  baseline_id: string | null;
  points: ProgressPointInfo[];
}

export interface BaselineResponse {
  baseline_id: string;
  building_id: string;
  kwh_per_day: number;
  period: { start: string; end: string };
  day_set: string;
  member_days: Array<{ date: string; kwh: number; used_as: string }>;
  substitutions: Array<{ date: string; donor_dates: string[]; reason: string }>;
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}
