// Browser entry point: wire boot() to the real document and window.

import { GatewayClient } from "./api.js";
import { boot } from "./main.js";

void boot(document, new GatewayClient(""), window.sessionStorage, window);
