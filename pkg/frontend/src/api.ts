export type Label = 'valid' | 'invalid';

export type WordSummary = {
  word_id: string;
  width: number;
  height: number;
  cut_count: number;
  labeled_count: number;
};

export type CutRecord = {
  column: number;
  status: string;
  crossing_count: number;
  label: Label | null;
};

export type ExportResult = { rows: number; path: string };

export class ApiError extends Error {
  status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

// Thin typed wrapper over the labeling service. The fetch function is
// injectable so tests can run without a server.
export class Client {
  private base: string;
  private fetchFn: FetchLike;

  constructor(base = '', fetchFn?: FetchLike) {
    this.base = base.replace(/\/+$/, '');
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const res = await this.fetchFn(this.base + path, init);
    if (!res.ok) {
      throw new ApiError(res.status, await errorMessage(res));
    }
    return res;
  }

  async listWords(): Promise<WordSummary[]> {
    const res = await this.request('/api/words');
    return res.json();
  }

  async getCuts(wordId: string): Promise<CutRecord[]> {
    const res = await this.request(`/api/words/${encodeURIComponent(wordId)}/cuts`);
    return res.json();
  }

  // The service sends PGM by default; ask for PNG so the browser can decode it.
  async getImage(wordId: string): Promise<Blob> {
    const res = await this.request(`/api/words/${encodeURIComponent(wordId)}/image`, {
      headers: { Accept: 'image/png' },
    });
    return res.blob();
  }

  async putLabel(wordId: string, column: number, label: Label): Promise<void> {
    await this.request(`/api/words/${encodeURIComponent(wordId)}/cuts/${column}`, {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ label }),
    });
  }

  async deleteLabel(wordId: string, column: number): Promise<void> {
    await this.request(`/api/words/${encodeURIComponent(wordId)}/cuts/${column}`, {
      method: 'DELETE',
    });
  }

  async exportLabels(): Promise<ExportResult> {
    const res = await this.request('/api/export', { method: 'POST' });
    return res.json();
  }
}

async function errorMessage(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (body && typeof body.error === 'string') {
      return body.error;
    }
  } catch {
    // non-JSON error body
  }
  return `HTTP ${res.status}`;
}
