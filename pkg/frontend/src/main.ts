import { Client, type WordSummary } from './api.js';
import { columnAt, drawWord, scaleFor } from './canvas.js';
import { actionFor, type Action } from './keyboard.js';
import { candidateCuts, describeError, pushLabel, WordView, type CutState } from './state.js';

const client = new Client();

let words: WordSummary[] = [];
let current = -1;
let view: WordView | null = null;
let image: ImageBitmap | null = null;
let scale = 4;
let toastTimer: number | undefined;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const wordList = el<HTMLElement>('words');
const canvas = el<HTMLCanvasElement>('word-canvas');
const statusLine = el<HTMLElement>('status');
const toastBox = el<HTMLElement>('toast');
const exportButton = el<HTMLButtonElement>('export');

function toast(message: string): void {
  toastBox.textContent = message;
  toastBox.classList.add('show');
  if (toastTimer !== undefined) window.clearTimeout(toastTimer);
  toastTimer = window.setTimeout(() => toastBox.classList.remove('show'), 4000);
}

function renderWordList(): void {
  wordList.replaceChildren();
  words.forEach((word, i) => {
    const row = document.createElement('button');
    row.className = 'word-row' + (i === current ? ' active' : '');
    const done = word.labeled_count >= word.cut_count && word.cut_count > 0;
    row.textContent = `${word.word_id}  ${word.labeled_count}/${word.cut_count}${done ? ' ✓' : ''}`;
    row.addEventListener('click', () => void openWord(i));
    wordList.appendChild(row);
  });
}

function render(): void {
  renderWordList();
  if (!view) {
    statusLine.textContent = 'no word loaded';
    return;
  }
  drawWord(canvas, image, view.cuts(), scale);
  const column = view.selectedColumn;
  const state = column === null ? '-' : view.stateOf(column);
  statusLine.textContent =
    column === null
      ? `${view.wordId}: no candidate cuts`
      : `${view.wordId}  cut at column ${column}: ${state}  (${view.labeledCount()}/${view.columns.length} labeled)`;
}

async function openWord(index: number): Promise<void> {
  if (words.length === 0) return;
  current = ((index % words.length) + words.length) % words.length;
  const word = words[current];
  if (!word) return;
  try {
    const [cuts, blob] = await Promise.all([
      client.getCuts(word.word_id),
      client.getImage(word.word_id),
    ]);
    image = await createImageBitmap(blob);
    const pane = canvas.parentElement as HTMLElement;
    scale = scaleFor(image.width, image.height, pane.clientWidth - 32, 420);
    view = new WordView(word.word_id, candidateCuts(cuts));
  } catch (err) {
    toast(describeError(err));
    return;
  }
  render();
}

async function applyLabel(next: CutState): Promise<void> {
  if (!view || current < 0) return;
  await pushLabel(view, client, next, toast);
  const word = words[current];
  if (word) word.labeled_count = view.labeledCount();
  render();
}

async function handleAction(action: Action): Promise<void> {
  if (!view) return;
  switch (action) {
    case 'prev-cut':
      view.moveSelection(-1);
      render();
      break;
    case 'next-cut':
      view.moveSelection(1);
      render();
      break;
    case 'label-valid':
      await applyLabel('valid');
      break;
    case 'label-invalid':
      await applyLabel('invalid');
      break;
    case 'unlabel':
      await applyLabel('unlabeled');
      break;
    case 'next-word':
      await openWord(current + 1);
      break;
  }
}

document.addEventListener('keydown', (event) => {
  if (event.altKey || event.ctrlKey || event.metaKey) return;
  const action = actionFor(event.key);
  if (!action) return;
  event.preventDefault();
  void handleAction(action);
});

canvas.addEventListener('click', (event) => {
  if (!view) return;
  const rect = canvas.getBoundingClientRect();
  const column = columnAt(event.clientX - rect.left, scale, view.columns);
  if (column === null) return;
  view.selectColumn(column);
  render();
});

exportButton.addEventListener('click', () => {
  void (async () => {
    try {
      const result = await client.exportLabels();
      toast(`${result.rows} rows exported to ${result.path}`);
    } catch (err) {
      toast(describeError(err));
    }
  })();
});

async function boot(): Promise<void> {
  try {
    words = await client.listWords();
  } catch (err) {
    statusLine.textContent = describeError(err);
    return;
  }
  if (words.length === 0) {
    statusLine.textContent = 'corpus is empty';
    return;
  }
  await openWord(0);
}

void boot();
