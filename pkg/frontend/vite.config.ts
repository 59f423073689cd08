import { defineConfig } from "vitest/config";

// Served by the lab service under /ui; dev mode proxies API calls to a
// locally running `fd-lab serve`.
export default defineConfig({
  base: "/ui/",
  build: { outDir: "dist" },
  server: {
    proxy: {
      "/sessions": {
        target: "http://127.0.0.1:8000",
        ws: true,
      },
      "/healthz": "http://127.0.0.1:8000",
    },
  },
  test: {
    environment: "node",
  },
});
