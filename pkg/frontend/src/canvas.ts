import type { CutState, CutView } from './state.js';

export const STATE_COLORS: Record<CutState, string> = {
  unlabeled: '#8a8f98',
  valid: '#2e9e4f',
  invalid: '#d64545',
};

export type LineSpec = {
  column: number;
  color: string;
  width: number;
  selected: boolean;
};

// Pure layer between state and the 2d context so rendering rules are testable.
export function lineSpecs(cuts: CutView[]): LineSpec[] {
  return cuts.map((cut) => ({
    column: cut.column,
    color: STATE_COLORS[cut.state],
    width: cut.selected ? 3 : 1,
    selected: cut.selected,
  }));
}

// Words are small (tens of pixels tall); pick a zoom that fills the pane
// without smoothing away the strokes.
export function scaleFor(imageWidth: number, imageHeight: number, maxWidth: number, maxHeight: number): number {
  if (imageWidth <= 0 || imageHeight <= 0) return 1;
  const fit = Math.min(maxWidth / imageWidth, maxHeight / imageHeight);
  return Math.max(1, Math.floor(fit));
}

export function columnAt(offsetX: number, scale: number, columns: number[]): number | null {
  if (columns.length === 0) return null;
  const x = offsetX / scale;
  let best = columns[0] as number;
  for (const column of columns) {
    if (Math.abs(column - x) < Math.abs(best - x)) best = column;
  }
  return best;
}

export function drawWord(
  canvas: HTMLCanvasElement,
  image: ImageBitmap | null,
  cuts: CutView[],
  scale: number,
): void {
  const ctx = canvas.getContext('2d');
  if (!ctx) return;

  if (image) {
    canvas.width = image.width * scale;
    canvas.height = image.height * scale;
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(image, 0, 0, canvas.width, canvas.height);
  } else {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
  }

  for (const spec of lineSpecs(cuts)) {
    const x = (spec.column + 0.5) * scale;
    if (spec.selected) {
      ctx.fillStyle = 'rgba(66, 133, 244, 0.18)';
      ctx.fillRect(x - 4 * scale, 0, 8 * scale, canvas.height);
    }
    ctx.strokeStyle = spec.color;
    ctx.lineWidth = spec.width;
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, canvas.height);
    ctx.stroke();
  }
}
