import { defineConfig } from "vitest/config";

// The build is served by the API service under /ui; relative asset paths
// keep it working from any mount point. `vite dev` proxies API calls to a
// locally running service instead.
export default defineConfig({
  base: "./",
  build: { outDir: "dist" },
  server: {
    proxy: Object.fromEntries(
      ["datasets", "embeddings", "selections", "explanations", "health"].map(
        (prefix) => [`/${prefix}`, "http://127.0.0.1:8000"],
      ),
    ),
  },
  test: {
    environment: "node",
    testTimeout: 180_000,
  },
});
