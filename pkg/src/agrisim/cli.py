"""Command-line entry point.

    agrisim run   --scenario s.json --out t.log [--seed N]
    agrisim serve --port 8080 --ingest-port 7070 --store ./data [--replay t.log]
    agrisim edge  --scenario s.json --ingest HOST:PORT --api URL
    agrisim power --line 115 --ratio 3 --reg 7805

Exit codes: 0 success, 1 runtime failure, 2 invalid invocation or config.
Every failure prints a single machine-parsable line to stderr in the form
``ERROR <field>: <message>``.
"""

from __future__ import annotations

import argparse
import dataclasses
import errno
import json
import logging
import os
import socket
import sys
import threading
import time
import urllib.error
import urllib.request

from . import power, sensors
from .controller import (
    ConfigError,
    EdgeConfig,
    NodeState,
    Override,
    run_scenario,
    scenario_from_dict,
    step_node,
)
from .flow import FlowCalib
from .server import AgrisimServer
from .service import DecisionService
from .wire import serialize_record

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _fail(field: str, message: str, code: int) -> int:
    print(f"ERROR {field}: {message}", file=sys.stderr)
    return code


def _load_scenario(path: str, seed_override: int | None):
    if not os.path.exists(path):
        raise ConfigError("scenario", f"scenario file not found: {path}")
    try:
        obj = json.loads(open(path, encoding="utf-8").read())
    except json.JSONDecodeError as exc:
        raise ConfigError("scenario", f"scenario file is not valid JSON: {exc}") from exc
    cfg = scenario_from_dict(obj)
    if seed_override is not None:
        cfg = dataclasses.replace(cfg, seed=seed_override)
    return cfg


def cmd_run(args) -> int:
    try:
        cfg = _load_scenario(args.scenario, args.seed)
    except ConfigError as exc:
        return _fail(exc.field, str(exc), EXIT_USAGE)
    records = run_scenario(cfg)
    # One write of complete lines only: a reader never sees a partial line.
    text = "".join(serialize_record(r) + "\n" for r in records)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        return _fail("out", f"cannot write log: {exc}", EXIT_USAGE)
    duty = sum(r.pump for r in records) / len(records) if records else 0.0
    vol = records[-1].vol_ml if records else 0.0
    print(f"records={len(records)} total_volume_ml={vol:.2f} pump_duty={duty:.3f}")
    return EXIT_OK


def cmd_serve(args) -> int:
    if args.store is not None:
        parent = os.path.dirname(os.path.abspath(args.store)) or "."
        probe = args.store if os.path.isdir(args.store) else parent
        if not os.access(probe, os.W_OK):
            return _fail("store", f"store directory not writable: {args.store}", EXIT_USAGE)
    try:
        service = DecisionService(
            store_dir=args.store,
            staleness_s=args.staleness_s,
            pump_rate_ml_per_min=args.pump_rate,
            plot_capacity_ml_per_moisture_pct=args.plot_capacity,
            fsync_every=args.fsync_every,
        )
    except (OSError, ValueError) as exc:
        return _fail("store", f"cannot open store: {exc}", EXIT_USAGE)
    if args.replay:
        if not os.path.exists(args.replay):
            service.close()
            return _fail("replay", f"replay file not found: {args.replay}", EXIT_USAGE)
        n = service.replay_file(args.replay)
        print(f"replayed {n} records from {args.replay}")
    try:
        server = AgrisimServer(
            service,
            http_port=args.port,
            ingest_port=args.ingest_port,
            host=args.host,
            console_dir=args.console,
        )
    except OSError as exc:
        service.close()
        if exc.errno == errno.EADDRINUSE:
            return _fail("port", f"port busy: {exc}", EXIT_RUNTIME)
        return _fail("port", f"cannot bind: {exc}", EXIT_RUNTIME)
    server.start()
    print(f"http on {args.host}:{server.http_port}  ingest on {args.host}:{server.ingest_port}")
    stop = threading.Event()
    # Explicit handlers: a backgrounded child may inherit SIGINT as ignored,
    # and SIGTERM should flush the store just like an interrupt does.
    import signal as _signal

    for signum in (_signal.SIGINT, _signal.SIGTERM):
        _signal.signal(signum, lambda *_: stop.set())
    try:
        stop.wait()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return EXIT_OK


def _fetch_override(api: str, node: str, t_now: float) -> Override | None:
    try:
        with urllib.request.urlopen(f"{api}/api/override?node={node}", timeout=2) as resp:
            status = json.loads(resp.read().decode("utf-8"))
    except (urllib.error.URLError, json.JSONDecodeError, OSError):
        return None  # service unreachable: keep running autonomously
    if status.get("state") in ("on", "off") and status.get("ttl_remaining_s", 0) > 0:
        return Override(kind=status["state"], until_s=t_now + float(status["ttl_remaining_s"]))
    return None


def cmd_edge(args) -> int:
    """Live edge node: real-time ticks, override pickup, telemetry streaming."""
    try:
        cfg = _load_scenario(args.scenario, args.seed)
    except ConfigError as exc:
        return _fail(exc.field, str(exc), EXIT_USAGE)
    host, _, port = args.ingest.partition(":")
    try:
        sock = socket.create_connection((host, int(port)), timeout=5)
    except (OSError, ValueError) as exc:
        return _fail("ingest", f"cannot connect to ingest {args.ingest}: {exc}", EXIT_RUNTIME)
    edge = EdgeConfig(
        node=cfg.node,
        pump_rate_ml_per_min=cfg.pump_rate_ml_per_min,
        flow=FlowCalib(noise_frac=0.10 if cfg.noise else 0.0),
    )
    import random

    rng = random.Random(cfg.seed)
    pol = cfg.policy
    env = cfg.initial
    state = NodeState()
    t0 = time.time()
    tick = pol.tick_s / max(args.speed, 1e-9)
    sent = 0
    try:
        while time.time() - t0 < cfg.duration_s * tick / pol.tick_s:
            now = time.time()
            elapsed = (now - t0) / tick * pol.tick_s
            env = sensors.env_step(
                env,
                cfg.dynamics,
                pol.tick_s,
                state.pump.on,
                cfg.rain_at(min(elapsed, cfg.duration_s)),
                cfg.light_profile.lux_at(elapsed),
            )
            if args.api:
                pin = _fetch_override(args.api.rstrip("/"), cfg.node, now)
                state = dataclasses.replace(
                    state, pump=dataclasses.replace(state.pump, override=pin)
                )
            rec, _, state = step_node(now, env, state, pol, edge, rng)
            sock.sendall((serialize_record(rec) + "\n").encode("utf-8"))
            sent += 1
            time.sleep(max(0.0, tick - (time.time() - now)))
    except (KeyboardInterrupt, BrokenPipeError, OSError):
        pass
    finally:
        sock.close()
    print(f"edge {cfg.node}: sent {sent} records")
    return EXIT_OK


def cmd_power(args) -> int:
    try:
        spec = power.PowerChainSpec(
            line_v=args.line, turns_ratio=args.ratio, regulator_code=args.reg
        )
    except power.UnknownRegulator as exc:
        return _fail("reg", str(exc), EXIT_USAGE)
    except ValueError as exc:
        field = "line" if "line_v" in str(exc) else "ratio"
        return _fail(field, str(exc), EXIT_USAGE)
    print(power.chain_report(spec), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agrisim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a deterministic scenario and write its telemetry log")
    p_run.add_argument("--scenario", required=True, help="scenario JSON file")
    p_run.add_argument("--out", required=True, help="telemetry log path to write")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario's seed")
    p_run.set_defaults(func=cmd_run)

    p_serve = sub.add_parser("serve", help="start the decision service (ingest + HTTP API)")
    p_serve.add_argument("--port", type=int, default=8080, help="HTTP API port")
    p_serve.add_argument("--ingest-port", type=int, default=7070, help="TCP ingest port")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--store", default=None, help="persistence directory")
    p_serve.add_argument("--replay", default=None, help="telemetry log to preload")
    p_serve.add_argument("--staleness-s", type=float, default=300.0)
    p_serve.add_argument("--pump-rate", type=float, default=135.0)
    p_serve.add_argument("--plot-capacity", type=float, default=40.0, help="mL per moisture percent")
    p_serve.add_argument("--fsync-every", type=int, default=1)
    p_serve.add_argument("--console", default=None, help="static console files to serve at /")
    p_serve.set_defaults(func=cmd_serve)

    p_edge = sub.add_parser("edge", help="run a live edge node against a running service")
    p_edge.add_argument("--scenario", required=True)
    p_edge.add_argument("--ingest", required=True, help="service ingest address HOST:PORT")
    p_edge.add_argument("--api", default=None, help="service API base URL for override pickup")
    p_edge.add_argument("--seed", type=int, default=None)
    p_edge.add_argument("--speed", type=float, default=1.0, help="time acceleration factor")
    p_edge.set_defaults(func=cmd_edge)

    p_power = sub.add_parser("power", help="power-supply chain report")
    p_power.add_argument("--line", type=float, required=True, help="AC line voltage")
    p_power.add_argument("--ratio", type=float, required=True, help="transformer turns ratio")
    p_power.add_argument("--reg", type=int, default=7805, help="78xx regulator code")
    p_power.set_defaults(func=cmd_power)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("AGRISIM_LOG", "WARNING"))
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
