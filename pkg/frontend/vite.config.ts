/// <reference types="vitest" />
import { defineConfig } from "vite";

export default defineConfig({
  server: { port: 5173 },
  test: {
    environment: "node",
    include: ["test/**/*.test.ts"],
    // the live-service test spawns the Python server and waits for it
    testTimeout: 180_000,
    hookTimeout: 180_000,
  },
});
