/** Typed client for the engine's REST surface. */

export interface ImportParameter {
  type: string;
  name: string;
}

export interface ExportParameter {
  type: string;
  name: string;
  value: string;
}

export interface WorkitemInstance {
  exportParameters: ExportParameter[];
  href: string;
}

export interface WorkitemGroup {
  elementId: string;
  name: string;
  importParameters: ImportParameter[];
  instances: WorkitemInstance[];
}

export interface InstanceState {
  "process-identifier": string;
  href: string;
  workitems: WorkitemGroup[];
  services: WorkitemGroup[];
}

export interface ModelRef {
  name: string;
  hash: string;
}

export interface ModelDetail extends ModelRef {
  mode: string;
  bpmn: string;
  dictionary: {
    contracts: { enums?: Record<string, string[]> }[];
  };
}

export interface Receipt {
  status: "accepted" | "rejected";
  reason: string | null;
  gasUsed: number;
  blockNumber: number;
}

export interface PanelNotification {
  kind: string;
  block: number;
  logIndex: number;
  seq: number;
  address?: string;
  parent?: string;
  worklist?: string;
  workitemId?: number;
  task?: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class EngineApi {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      const text = await response.text();
      throw new ApiError(response.status, text || response.statusText);
    }
    return (await response.json()) as T;
  }

  models(): Promise<ModelRef[]> {
    return this.request("GET", "/models");
  }

  modelDetail(hash: string): Promise<ModelDetail> {
    return this.request("GET", `/models/${hash}`);
  }

  instances(hash: string): Promise<string[]> {
    return this.request("GET", `/models/${hash}/instances`);
  }

  createInstance(hash: string): Promise<{ address: string; href: string }> {
    return this.request("POST", `/models/${hash}`);
  }

  state(href: string): Promise<InstanceState> {
    return this.request("GET", href);
  }

  /** PUT to a work-item or service-task href with the form values. */
  checkin(href: string, values: Record<string, unknown>): Promise<Receipt> {
    return this.request("PUT", href, { values });
  }

  notifications(afterSeq: number): Promise<PanelNotification[]> {
    return this.request("GET", `/notifications?after=${afterSeq}`);
  }

  /** Enum member lists merged across the model's contracts. */
  async enumsFor(hash: string): Promise<Record<string, string[]>> {
    const detail = await this.modelDetail(hash);
    const merged: Record<string, string[]> = {};
    for (const contract of detail.dictionary.contracts) {
      Object.assign(merged, contract.enums ?? {});
    }
    return merged;
  }
}
