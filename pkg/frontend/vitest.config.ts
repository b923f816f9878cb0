import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    testTimeout: 120_000,
    hookTimeout: 60_000,
    // The UI loop suite talks to a live server process; keep files serial
    // so socket timing is not starved by the fixture-heavy unit suites.
    fileParallelism: false,
  },
});
