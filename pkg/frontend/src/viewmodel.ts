/** Panel state: page model derivation, submissions, notification routing.
 *
 * All process logic stays server-side; the panel only renders the last
 * fetched state body and mutates through work-item/service PUTs.
 */

import type {
  EngineApi,
  ExportParameter,
  InstanceState,
  PanelNotification,
  Receipt,
  WorkitemGroup,
} from "./api.js";
import { fieldsFor, validateValues, type FormField } from "./forms.js";

export interface TaskCard {
  elementId: string;
  name: string;
  kind: "workitem" | "service";
  href: string;
  exports: ExportParameter[];
  fields: FormField[];
}

export interface Banner {
  tone: "success" | "error" | "info";
  text: string;
}

export interface PageModel {
  cards: TaskCard[];
  placeholder?: string;
  schemaError?: string;
}

function isParamList(value: unknown, withValue: boolean): boolean {
  return Array.isArray(value) && value.every((p) =>
    p !== null && typeof p === "object"
    && typeof (p as Record<string, unknown>).type === "string"
    && typeof (p as Record<string, unknown>).name === "string"
    && (!withValue || typeof (p as Record<string, unknown>).value === "string"));
}

function isGroupList(value: unknown): value is WorkitemGroup[] {
  if (!Array.isArray(value)) return false;
  return value.every((group) => {
    if (group === null || typeof group !== "object") return false;
    const g = group as Record<string, unknown>;
    return typeof g.elementId === "string" && typeof g.name === "string"
      && isParamList(g.importParameters, false)
      && Array.isArray(g.instances)
      && (g.instances as unknown[]).every((item) =>
        item !== null && typeof item === "object"
        && typeof (item as Record<string, unknown>).href === "string"
        && isParamList((item as Record<string, unknown>).exportParameters, true));
  });
}

export function checkStateShape(body: unknown): body is InstanceState {
  if (body === null || typeof body !== "object") return false;
  const b = body as Record<string, unknown>;
  return typeof b["process-identifier"] === "string"
    && typeof b.href === "string"
    && isGroupList(b.workitems)
    && isGroupList(b.services);
}

/** One card per started work-item instance: name, export values, and a form
 * generated from the import parameters. */
export function renderState(
  body: unknown,
  enums: Record<string, string[]> = {},
): PageModel {
  if (!checkStateShape(body)) {
    return { cards: [], schemaError: "state body does not match the expected shape" };
  }
  const cards: TaskCard[] = [];
  const collect = (groups: WorkitemGroup[], kind: "workitem" | "service") => {
    for (const group of groups) {
      const fields = fieldsFor(group.importParameters, enums);
      for (const item of group.instances) {
        cards.push({
          elementId: group.elementId,
          name: group.name,
          kind,
          href: item.href,
          exports: item.exportParameters,
          fields,
        });
      }
    }
  };
  collect(body.workitems, "workitem");
  collect(body.services, "service");
  if (cards.length === 0) {
    return { cards, placeholder: "no pending tasks" };
  }
  return { cards };
}

const HREF_RESOURCE = /^\/(worklists|services)\/([^/]+)\//;

export class PanelController {
  page: PageModel = { cards: [], placeholder: "no instance selected" };
  banners: Banner[] = [];
  refreshes = 0;

  private enums: Record<string, string[]> = {};
  private selectedHref: string | null = null;
  private selectedAddress: string | null = null;
  private knownResources = new Set<string>();
  private knownInstances = new Set<string>();
  private seenNotifications = new Set<string>();
  private listeners = new Set<() => void>();

  constructor(private readonly api: EngineApi) {}

  onChange(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private changed(): void {
    for (const listener of this.listeners) listener();
  }

  async selectModel(hash: string): Promise<void> {
    this.enums = await this.api.enumsFor(hash);
  }

  async selectInstance(address: string): Promise<void> {
    this.selectedAddress = address;
    this.selectedHref = `/processes/${address}`;
    this.knownInstances = new Set([address]);
    await this.refresh();
  }

  async refresh(): Promise<void> {
    if (this.selectedHref === null) return;
    const body = await this.api.state(this.selectedHref);
    this.page = renderState(body, this.enums);
    this.refreshes += 1;
    this.knownResources = new Set();
    if (!this.page.schemaError) {
      for (const card of this.page.cards) {
        const match = HREF_RESOURCE.exec(card.href);
        if (match) this.knownResources.add(match[2]!);
      }
    }
    this.changed();
  }

  /** Validate, PUT, then re-fetch on success; on rejection show the reason
   * and leave the rendered state untouched. */
  async submit(card: TaskCard, raw: Record<string, unknown>): Promise<Receipt | null> {
    const validated = validateValues(card.fields, raw);
    if (!validated.ok) {
      this.banners = validated.errors.map((e) => ({
        tone: "error" as const,
        text: e.message,
      }));
      this.changed();
      return null;
    }
    const receipt = await this.api.checkin(card.href, validated.values);
    if (receipt.status === "accepted") {
      this.banners = [{ tone: "success", text: `${card.name} completed` }];
      await this.refresh();
    } else {
      const reason = receipt.reason ?? "rejected";
      const friendly = reason.includes("AlreadyCompleted")
        ? `${card.name} was already completed elsewhere`
        : reason;
      this.banners = [{ tone: "error", text: `${card.name} rejected: ${friendly}` }];
      this.changed();
    }
    return receipt;
  }

  /** Notification intake: refreshes at most once per batch, only when an
   * event touches the selected instance tree; duplicates are dropped by
   * (block, logIndex). */
  async onNotifications(batch: PanelNotification[]): Promise<void> {
    let affected = false;
    for (const n of batch) {
      const key = `${n.block}:${n.logIndex}`;
      if (this.seenNotifications.has(key)) continue;
      this.seenNotifications.add(key);
      affected = this.routeNotification(n) || affected;
    }
    if (affected) await this.refresh();
  }

  private routeNotification(n: PanelNotification): boolean {
    if (this.selectedAddress === null) return false;
    if (n.kind === "InstanceCreated") {
      if (n.parent !== undefined && this.knownInstances.has(n.parent)) {
        if (n.address !== undefined) this.knownInstances.add(n.address);
        return true;
      }
      return false;
    }
    if (n.kind === "WorkitemRequested" || n.kind === "WorkitemCompleted") {
      return n.worklist !== undefined && this.knownResources.has(n.worklist);
    }
    return false;
  }
}
