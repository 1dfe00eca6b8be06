import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // review_loop.test.ts boots the real Python service.
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
