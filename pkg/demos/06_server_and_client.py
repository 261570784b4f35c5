"""Talk to the battle server over its newline-delimited JSON protocol with
nothing but a socket: create a session, reset, step until done.

Run:  python demos/06_server_and_client.py
"""

import base64
import json
import socket

from microarena.server import ArenaServer, ServerConfig

server = ArenaServer(ServerConfig(port=0))
server.start_background()
print(f"server listening on 127.0.0.1:{server.port}")

sock = socket.create_connection(("127.0.0.1", server.port))
wire = sock.makefile("rwb")


def request(message):
    wire.write(json.dumps(message).encode() + b"\n")
    wire.flush()
    return json.loads(wire.readline())


created = request({"op": "create", "scenario": "3m", "seed": 11,
                   "mode": "PvE", "team": "P1",
                   "render": {"height": 256, "width": 256}})
sid = created["session_id"]
print(f"session {sid} on {created['scenario']} (seed {created['seed']})")

obs = request({"op": "reset", "session_id": sid})["observation"]
png = base64.b64decode(obs["image"])
print(f"reset: {len(obs['units'])} units, frame {obs['height']}x{obs['width']} "
      f"({len(png)} PNG bytes)")

my_uids = [u["id"] for u in obs["units"] if u["team"] == "P1"]
enemy = [u["id"] for u in obs["units"] if u["team"] == "P2"][0]
step = 0
while True:
    resp = request({"op": "step", "session_id": sid, "team": "P1",
                    "actions": [f"Attack {uid} {enemy}" for uid in my_uids],
                    "include_image": False})
    step += 1
    if resp["rejections"]:
        # the focus target died; re-acquire from the fresh observation
        living = [u["id"] for u in resp["observation"]["units"]
                  if u["team"] == "P2"]
        if living:
            enemy = living[0]
    if resp["done"]:
        print(f"done after {step} steps: {resp['outcome']}, "
              f"reward {resp['reward']}")
        break

request({"op": "close", "session_id": sid})
sock.close()
server.stop()
