import argparse
import json
import logging
import sys
from typing import List, Optional

from event_geoloc.exception import ConfigError, GeolocError
from event_geoloc.run import (
    apply_overrides,
    cmd_ablation,
    cmd_detect,
    cmd_eval,
    cmd_gazetteer_validate,
    cmd_geolocate,
    cmd_pipeline,
    load_config,
)

logger = logging.getLogger(__name__)

COMMANDS = ["detect", "geolocate", "eval", "pipeline", "ablation", "gazetteer-validate"]


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="event-geoloc",
        description="Detect social events in a message stream and geolocate each of them.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=str, required=True, help="Path to the JSON pipeline config")
    parser.add_argument("--seed", type=int, help="Overrides the config seed")
    parser.add_argument("--jobs", type=int, help="Number of events to geolocate in parallel")
    parser.add_argument("--no-fit", action="store_true", help="Disable pseudo-toponym generation")
    parser.add_argument("--no-hist", action="store_true", help="Disable noise-toponym filtering")
    parser.add_argument(
        "--ablation",
        type=str,
        choices=["gtop", "gtop--"],
        help="gtop runs the full method; gtop-- disables both filtering and pseudo-toponyms",
    )
    parser.add_argument("--match-depth", type=int, help="Hierarchy levels compared when filtering")
    parser.add_argument("--output", type=str, help="Output directory (overrides output_dir)")
    parser.add_argument("--clusters", type=str, help="Clusters JSONL to geolocate")
    parser.add_argument("--locations", type=str, help="Locations JSONL to evaluate")
    parser.add_argument("--truth", type=str, help="Truth JSONL of {event_id, lat, lon}")
    parser.add_argument("--thresholds", type=float, nargs="+", help="ACC thresholds in km")
    parser.add_argument("--dump-graph", type=str, help="Directory to write the graph edge lists to")
    parser.add_argument(
        "--log-level",
        type=str,
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )
    return parser.parse_args(argv)


def configure_logging(level: str) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(level)


def run_command(args: argparse.Namespace) -> None:
    config = apply_overrides(
        load_config(args.config),
        seed=args.seed,
        jobs=args.jobs,
        no_fit=args.no_fit,
        no_hist=args.no_hist,
        ablation=args.ablation,
        match_depth=args.match_depth,
        output=args.output,
    )
    if args.thresholds is not None and any(d <= 0 for d in args.thresholds):
        raise ConfigError("--thresholds must be positive")
    if args.command == "detect":
        cmd_detect(config, dump_graph=args.dump_graph)
    elif args.command == "geolocate":
        cmd_geolocate(config, clusters_path=args.clusters)
    elif args.command == "eval":
        cmd_eval(config, locations_path=args.locations, truth_path=args.truth, thresholds=args.thresholds)
    elif args.command == "pipeline":
        cmd_pipeline(config, dump_graph=args.dump_graph)
    elif args.command == "ablation":
        cmd_ablation(config, clusters_path=args.clusters, truth_path=args.truth, thresholds=args.thresholds)
    elif args.command == "gazetteer-validate":
        cmd_gazetteer_validate(config)
    else:
        raise ValueError(f"Unknown command: {args.command}")


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    configure_logging(args.log_level)
    try:
        run_command(args)
    except GeolocError as e:
        print(json.dumps({"error": str(e), "exit_code": e.exit_code}), file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception("unexpected failure")
        print(json.dumps({"error": f"internal: {e}", "exit_code": 4}), file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
