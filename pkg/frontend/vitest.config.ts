import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    environmentOptions: {
      happyDOM: {
        url: "http://localhost/",
        settings: {
          fetch: { disableSameOriginPolicy: true },
        },
      },
    },
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
