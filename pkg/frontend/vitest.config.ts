import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['tests/**/*.test.ts'],
    // the e2e spec boots the Python service and waits for the port
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
