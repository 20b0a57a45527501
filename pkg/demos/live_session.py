"""Full live round trip: server + sensor simulator + a scripted reader.

Spins up the session server in-process, streams the demo scenario to the
sensor port at 10x speed, and plays the reader over the WebSocket
protocol exactly like the browser UI would: hello, hover the "yes,
please." choice, turn south, hover Bob's line, then breathe.

Run: python3 demos/live_session.py
"""

import asyncio
import json
import socket
from pathlib import Path

import websockets

from vif import SessionConfig, parse_script
from vif.server import SessionServer
from vif.session import Hello, Hover, Yaw, encode_client_message
from vif.simulator import generate_lines, load_scenario

CORPUS = Path(__file__).parent.parent / "corpus"
SPEED = 10.0


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


async def feed_sensors(port: int, reader_ready: asyncio.Event) -> None:
    await reader_ready.wait()  # the story starts when the reader connects
    lines = generate_lines(load_scenario(CORPUS / "demo_scenario.jsonl"), seed=1)
    _, writer = await asyncio.open_connection("127.0.0.1", port)
    start = asyncio.get_running_loop().time()
    for line in lines:
        t = json.loads(line)["t"] / 1000.0 / SPEED
        delay = t - (asyncio.get_running_loop().time() - start)
        if delay > 0:
            await asyncio.sleep(delay)
        writer.write(line.encode() + b"\n")
        await writer.drain()
    writer.close()


async def scripted_reader(port: int, reader_ready: asyncio.Event) -> None:
    plan = [  # (session seconds, message) mirroring corpus/demo_inputs.jsonl
        (3.0, Hover("s4")),
        (6.0, Yaw(180.0)),
        (8.0, Hover("s10")),
    ]
    async with websockets.connect(f"ws://127.0.0.1:{port}") as ws:
        await ws.send(encode_client_message(Hello(1)))
        reader_ready.set()
        start = asyncio.get_running_loop().time()
        plan_iter = iter(plan)
        pending = next(plan_iter, None)
        while True:
            if pending is not None:
                elapsed = (asyncio.get_running_loop().time() - start) * SPEED
                if elapsed >= pending[0]:
                    await ws.send(encode_client_message(pending[1]))
                    pending = next(plan_iter, None)
            try:
                raw = await asyncio.wait_for(ws.recv(), timeout=0.05)
            except asyncio.TimeoutError:
                continue
            msg = json.loads(raw)
            if msg["type"] == "scene":
                print(f"scene: {msg['section']['id']} (night={msg['day']['night']})")
                if msg["section"]["id"] == "heart":
                    print("reached the last section; demo complete")
                    return
            elif msg["type"] == "event" and msg["event"]["ev"] != "bio":
                print(f"event: {msg['event']}")


async def main() -> None:
    story, _ = parse_script((CORPUS / "figure7.vif").read_text("utf-8"))
    server = SessionServer(
        story,
        SessionConfig(),
        client_port=free_port(),
        sensor_port=free_port(),
        tick_ms=5,
    )
    task = asyncio.create_task(server.run())
    await server.started.wait()
    reader_ready = asyncio.Event()

    async def accelerate():
        # run the session clock SPEED times faster by rewinding t0 steadily,
        # anchored after the reader connects (which resets session time zero)
        await reader_ready.wait()
        while not server.session_started:  # hello not yet processed
            await asyncio.sleep(0.005)
        base = server._t0
        start_real = asyncio.get_running_loop().time()
        while True:
            elapsed = asyncio.get_running_loop().time() - start_real
            server._t0 = base - elapsed * (SPEED - 1.0)
            await asyncio.sleep(0.005)

    accel = asyncio.create_task(accelerate())
    try:
        await asyncio.gather(
            feed_sensors(server.sensor_port, reader_ready),
            scripted_reader(server.client_port, reader_ready),
        )
    finally:
        accel.cancel()
        task.cancel()


if __name__ == "__main__":
    asyncio.run(main())
