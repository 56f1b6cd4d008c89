/** Browser bootstrap: wires the app to the live document. */

import { initApp } from "./main.js";

initApp(document);
