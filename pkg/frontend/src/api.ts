/**
 * Typed client for the income-sharing service.
 *
 * Every call resolves to a discriminated outcome instead of throwing:
 * `ok` with the parsed payload, `error` with the service's ApiError shape
 * (httpStatus, code, detail, path, optional violations), or `network` when
 * the request never reached the service.  Rational values arrive either as
 * JSON numbers or as "numerator/denominator" strings; the client passes them
 * through untouched — no sharing arithmetic happens on this side.
 */

export type RationalToken = number | string;

export interface ApiError {
  httpStatus: number;
  code: string;
  detail: string;
  path?: string;
  violations?: { code: string; path: string; message: string }[];
}

export interface Receipt {
  sequence: number;
  blockHash: string;
}

export interface ParticipantView {
  kind: "supplier" | "platform" | "financial-service" | "it-service";
  label: string;
  providerId: string;
  node?: { i: number; k: number; m: number };
}

export interface PayoutLineView {
  participant: ParticipantView;
  reimbursement: RationalToken;
  alignment: RationalToken;
  profitShare: RationalToken;
  total: RationalToken;
  roundedTotal: RationalToken;
}

export interface SharingResultView {
  scheme: "RS" | "PS";
  costPolicy: string;
  grossIncome: RationalToken;
  totalIncome: RationalToken;
  levelIncomes: Record<string, RationalToken>;
  groupShares: Record<string, RationalToken>;
  alignmentTotal: RationalToken;
  serviceCharges: RationalToken;
  profitChain: RationalToken;
  lossFlag: boolean;
  payouts: PayoutLineView[];
}

export interface SupplyView {
  m: number;
  supplierData: { supplierName: string; supplierId: string };
  economicProfile: { cf: RationalToken; cv: RationalToken; additionalData: Record<string, RationalToken> };
  productionProfile: { q: RationalToken; tp: RationalToken };
}

export interface ResourceView {
  k: number;
  resourceName: string;
  g: RationalToken;
  BOM: RationalToken;
  supplyList: SupplyView[];
}

export interface ChainView {
  requestId: number;
  originator: string;
  p: RationalToken;
  d: number;
  levs: number;
  ress: number;
  sups: number;
  levels: { i: number; resources: ResourceView[] }[];
  serviceLevel: {
    financialServices: {
      serviceName: string; uri: string; providerId: string;
      invested: RationalToken; ratio: RationalToken;
    }[];
    itServices: {
      serviceName: string; uri: string; providerId: string;
      access: string; cost: RationalToken;
    }[];
  };
  sharingOptions: {
    scheme: string;
    costPolicy: string;
    platformQuota?: RationalToken;
    originatorNode?: { i: number; k: number; m: number };
  };
}

export interface RequestView {
  phase: "OPEN" | "SEALED" | "COMPUTED";
  chain: ChainView;
  result: SharingResultView | null;
}

export type Outcome<T> =
  | { kind: "ok"; data: T }
  | { kind: "error"; error: ApiError }
  | { kind: "network"; message: string };

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<Outcome<T>> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (failure) {
      return { kind: "network", message: failure instanceof Error ? failure.message : String(failure) };
    }
    let payload: unknown;
    try {
      payload = await response.json();
    } catch {
      payload = { httpStatus: response.status, code: "BAD_RESPONSE", detail: "non-JSON response" };
    }
    if (!response.ok) {
      return { kind: "error", error: payload as ApiError };
    }
    return { kind: "ok", data: payload as T };
  }

  createRequest(body: object): Promise<Outcome<Receipt>> {
    return this.call("POST", "/requests", body);
  }

  setOptions(requestId: number, body: object): Promise<Outcome<Receipt>> {
    return this.call("POST", `/requests/${requestId}/options`, body);
  }

  addResource(requestId: number, i: number, k: number, body: object): Promise<Outcome<Receipt>> {
    return this.call("POST", `/requests/${requestId}/levels/${i}/resources/${k}`, body);
  }

  addSupply(requestId: number, i: number, k: number, body: object): Promise<Outcome<Receipt>> {
    return this.call("POST", `/requests/${requestId}/levels/${i}/resources/${k}/supplies`, body);
  }

  addFinancialService(requestId: number, body: object): Promise<Outcome<Receipt>> {
    return this.call("POST", `/requests/${requestId}/services/financial`, body);
  }

  addItService(requestId: number, body: object): Promise<Outcome<Receipt>> {
    return this.call("POST", `/requests/${requestId}/services/it`, body);
  }

  seal(requestId: number): Promise<Outcome<Receipt>> {
    return this.call("POST", `/requests/${requestId}/seal`, {});
  }

  run(requestId: number): Promise<Outcome<Receipt>> {
    return this.call("POST", `/requests/${requestId}/run`, {});
  }

  getRequest(requestId: number): Promise<Outcome<RequestView>> {
    return this.call("GET", `/requests/${requestId}`);
  }

  getResult(requestId: number): Promise<Outcome<SharingResultView>> {
    return this.call("GET", `/requests/${requestId}/result`);
  }

  integrity(): Promise<Outcome<{ ok: boolean; blocks: number; stateHash: string }>> {
    return this.call("GET", "/ledger/integrity");
  }
}
