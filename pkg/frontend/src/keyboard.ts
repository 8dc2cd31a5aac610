export type Action =
  | 'prev-cut'
  | 'next-cut'
  | 'label-valid'
  | 'label-invalid'
  | 'unlabel'
  | 'next-word';

export function actionFor(key: string): Action | null {
  switch (key) {
    case 'ArrowLeft':
      return 'prev-cut';
    case 'ArrowRight':
      return 'next-cut';
    case 'v':
    case 'V':
      return 'label-valid';
    case 'x':
    case 'X':
      return 'label-invalid';
    case 'u':
    case 'U':
      return 'unlabel';
    case 'n':
    case 'N':
      return 'next-word';
    default:
      return null;
  }
}
