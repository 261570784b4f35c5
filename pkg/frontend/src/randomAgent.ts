/**
 * Runnable example: a random agent plays one PvE episode over the wire.
 *
 *   node dist/randomAgent.js [host] [port] [scenario] [seed]
 *
 * Start the server first:  microarena serve --port 7464
 */

import { ArenaClient, Observation } from "./client.js";

function randomActions(obs: Observation, team: string): string[] {
  const mine = obs.units.filter((u) => u.team === team);
  const enemies = obs.units.filter((u) => u.team !== team);
  const lines: string[] = [];
  for (const unit of mine) {
    if (enemies.length > 0 && Math.random() < 0.5) {
      const target = enemies[Math.floor(Math.random() * enemies.length)];
      lines.push(`Attack ${unit.id} ${target.id}`);
    } else {
      const x = 1 + Math.floor(Math.random() * 10);
      const y = 1 + Math.floor(Math.random() * 10);
      lines.push(`Move ${unit.id} ${x} ${y}`);
    }
  }
  return lines;
}

async function main(): Promise<void> {
  const host = process.argv[2] ?? "127.0.0.1";
  const port = Number(process.argv[3] ?? 7464);
  const scenario = process.argv[4] ?? "3m";
  const seed = Number(process.argv[5] ?? Math.floor(Math.random() * 1e6));

  const client = await ArenaClient.connect(host, port);
  const session = await client.create({ scenario, seed, mode: "PvE", team: "P1" });
  console.log(`session ${session.sessionId} on ${scenario} (seed ${seed})`);

  let obs = await session.reset();
  console.log(`reset: ${obs.units.length} units, frame ${obs.width}x${obs.height}`);

  let steps = 0;
  for (;;) {
    const result = await session.step(randomActions(obs, session.team));
    obs = result.observation;
    steps += 1;
    if (result.rejections.length > 0 && steps % 25 === 0) {
      console.log(`  step ${steps}: ${result.rejections.length} rejected lines`);
    }
    if (result.done) {
      console.log(`done after ${steps} steps: ${result.outcome}, reward ${result.reward}`);
      break;
    }
  }

  await session.close();
  client.close();
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
