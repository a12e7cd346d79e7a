import type { BrokerInfo, GatewayClient, VoInfo } from "./api.js";
import type { PortalSession } from "./session.js";

// Everything a page needs to render and clean up after itself.
export interface PageContext {
  doc: Document;
  api: GatewayClient;
  session: PortalSession;
  vos: VoInfo[];
  brokers: BrokerInfo[];
  navigate(hash: string): void;
}

export type Cleanup = () => void;
export type Page = (container: HTMLElement, ctx: PageContext) => Cleanup;
