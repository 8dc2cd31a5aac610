import { ApiError, type Client, type CutRecord, type Label } from './api.js';

export type CutState = 'unlabeled' | Label;

export type CutView = {
  column: number;
  state: CutState;
  selected: boolean;
};

// Only cuts that survived the heuristic filters accept labels; the service
// answers 409 for anything else, so the view is built from these alone.
export function candidateCuts(cuts: CutRecord[]): CutRecord[] {
  return cuts.filter((c) => c.status === 'heuristic_valid');
}

// Labeling session for one word. Selection is an index into the sorted
// column list, so exactly one cut is selected whenever any cuts exist.
export class WordView {
  readonly wordId: string;
  readonly columns: number[];
  private states: Map<number, CutState>;
  private selection: number;
  private inFlight: Set<number>;

  constructor(wordId: string, cuts: CutRecord[]) {
    this.wordId = wordId;
    const sorted = [...cuts].sort((a, b) => a.column - b.column);
    this.columns = sorted.map((c) => c.column);
    this.states = new Map(sorted.map((c) => [c.column, c.label ?? 'unlabeled']));
    this.selection = this.columns.length > 0 ? 0 : -1;
    this.inFlight = new Set();
  }

  get selectedColumn(): number | null {
    if (this.selection < 0) return null;
    return this.columns[this.selection] ?? null;
  }

  cuts(): CutView[] {
    return this.columns.map((column, i) => ({
      column,
      state: this.stateOf(column),
      selected: i === this.selection,
    }));
  }

  stateOf(column: number): CutState {
    const state = this.states.get(column);
    if (state === undefined) {
      throw new Error(`column ${column} is not a cut of word ${this.wordId}`);
    }
    return state;
  }

  // Clamps at the ends rather than wrapping; annotators scan left to right.
  moveSelection(delta: number): void {
    if (this.selection < 0) return;
    const next = this.selection + delta;
    this.selection = Math.max(0, Math.min(this.columns.length - 1, next));
  }

  selectColumn(column: number): void {
    const i = this.columns.indexOf(column);
    if (i >= 0) this.selection = i;
  }

  // Returns the previous state so a failed request can roll back.
  setState(column: number, next: CutState): CutState {
    const prev = this.stateOf(column);
    this.states.set(column, next);
    return prev;
  }

  labeledCount(): number {
    let n = 0;
    for (const state of this.states.values()) {
      if (state !== 'unlabeled') n += 1;
    }
    return n;
  }

  beginMutation(column: number): boolean {
    if (this.inFlight.has(column)) return false;
    this.inFlight.add(column);
    return true;
  }

  endMutation(column: number): void {
    this.inFlight.delete(column);
  }
}

export type ToastFn = (message: string) => void;

type LabelClient = Pick<Client, 'putLabel' | 'deleteLabel'>;

// Optimistic label write: flip the view immediately, roll back if the
// service rejects it. At most one mutation per cut is in flight.
export async function pushLabel(
  view: WordView,
  client: LabelClient,
  next: CutState,
  toast: ToastFn,
): Promise<boolean> {
  const column = view.selectedColumn;
  if (column === null) return false;
  if (view.stateOf(column) === next) return false;
  if (!view.beginMutation(column)) return false;

  const prev = view.setState(column, next);
  try {
    if (next === 'unlabeled') {
      await client.deleteLabel(view.wordId, column);
    } else {
      await client.putLabel(view.wordId, column, next);
    }
    return true;
  } catch (err) {
    view.setState(column, prev);
    toast(describeError(err));
    return false;
  } finally {
    view.endMutation(column);
  }
}

export function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return `server rejected the change (${err.status}): ${err.message}`;
  }
  if (err instanceof Error) {
    return err.message;
  }
  return String(err);
}
