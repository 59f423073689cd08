import "./style.css";
import { startApp } from "./app";

window.addEventListener("load", () => {
  const root = document.getElementById("app");
  if (root) void startApp(root);
});
