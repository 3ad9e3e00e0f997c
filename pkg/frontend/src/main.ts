import { bootstrap } from "./ui.js";

const root = document.getElementById("app");
if (root) bootstrap(root);
