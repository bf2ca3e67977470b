// Marking an intervention while acting: set a start week, later an end
// week, then let the service evaluate the pair. The displayed reduction is
// the service's own presentation field; 422 reasons pass through verbatim,
// with a hint added when the missing piece is the step-2 baseline.

import { ApiRequestError, type ApiClient } from "./api.js";
import type { InterventionResponse } from "./types.js";

export interface MarkState {
  startWeek: string | null;
  endWeek: string | null;
}

export interface InterventionOutcome {
  result: InterventionResponse;
  display: string;
}

export class GuidedError extends Error {
  readonly serverError: string;
  readonly serverDetail: string;
  readonly hint: string | null;

  constructor(serverError: string, serverDetail: string, hint: string | null) {
    super(hint ? `${serverDetail} (${hint})` : serverDetail);
    this.serverError = serverError;
    this.serverDetail = serverDetail;
    this.hint = hint;
  }
}

const BASELINE_HINTS = new Set(["unknown_baseline", "missing_profile"]);

export function hintFor(errorCode: string): string | null {
  if (BASELINE_HINTS.has(errorCode)) {
    return "Establish the no-class baseline first (step 2) before marking an intervention.";
  }
  if (errorCode === "insufficient_coverage") {
    return "The marked week is missing metering data; pick a fully covered week.";
  }
  return null;
}

export function reductionText(result: InterventionResponse): string {
  return result.reduction_display;
}

export class InterventionFlow {
  private marks: MarkState = { startWeek: null, endWeek: null };

  constructor(
    private readonly api: ApiClient,
    private readonly building: string,
  ) {}

  get state(): MarkState {
    return { ...this.marks };
  }

  markStart(week: string): void {
    this.marks = { startWeek: week, endWeek: null };
  }

  markEnd(week: string): void {
    if (this.marks.startWeek === null) {
      throw new Error("mark the start of the intervention first");
    }
    this.marks = { ...this.marks, endWeek: week };
  }

  reset(): void {
    this.marks = { startWeek: null, endWeek: null };
  }

  async submit(
    comparisonWeek: string,
    options: { baselineId?: string; notes?: string } = {},
  ): Promise<InterventionOutcome> {
    if (this.marks.endWeek === null) {
      throw new Error("mark the end of the intervention before evaluating");
    }
    try {
      const result = await this.api.markIntervention(this.building, {
        baseline_id: options.baselineId,
        comparison: { week: comparisonWeek },
        saving: { week: this.marks.endWeek },
        notes: options.notes ?? "",
      });
      return { result, display: reductionText(result) };
    } catch (error) {
      if (error instanceof ApiRequestError) {
        throw new GuidedError(error.body.error, error.body.detail, hintFor(error.body.error));
      }
      throw error;
    }
  }
}
