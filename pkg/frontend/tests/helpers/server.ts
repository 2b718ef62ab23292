/** Spawn a real uccx service (plus one mock prediction run) for tests. */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface TestServer {
  base: string;
  runId: string;
  stop(): void;
}

export async function startServer(): Promise<TestServer> {
  const work = mkdtempSync(join(tmpdir(), "uccx-ui-"));
  const runsRoot = join(work, "runs");
  const runId = "ui-run";

  const extract = spawnSync(
    "python3",
    ["-m", "uccx.cli", "extract",
      "--runs-root", runsRoot, "--run-id", runId],
    { encoding: "utf-8" },
  );
  if (extract.status !== 0) {
    throw new Error(`extract failed: ${extract.stderr}`);
  }

  const port = 18000 + Math.floor(Math.random() * 20000);
  const base = `http://127.0.0.1:${port}`;
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "uccx.cli", "serve",
      "--port", String(port),
      "--data-dir", join(work, "data"),
      "--runs-root", runsRoot],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  let stderr = "";
  child.stderr?.on("data", (chunk: Buffer) => {
    stderr += chunk.toString();
  });

  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const resp = await fetch(`${base}/api/scenarios`);
      if (resp.ok) break;
    } catch {
      // not listening yet
    }
    if (child.exitCode !== null) {
      throw new Error(`server exited early: ${stderr}`);
    }
    if (Date.now() > deadline) {
      child.kill();
      throw new Error(`server never became ready: ${stderr}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }

  return {
    base,
    runId,
    stop() {
      child.kill();
      rmSync(work, { recursive: true, force: true });
    },
  };
}
