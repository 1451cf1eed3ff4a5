import { App } from "./app.js";

const root = document.getElementById("palm-root");
if (root) {
  const app = new App(root);
  void app.init();
}
