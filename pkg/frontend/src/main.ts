import { createApp } from "./app.js";
import { createClient } from "./client.js";

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app element");
createApp(root, createClient()).route();
