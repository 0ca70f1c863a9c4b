import json
import logging
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError
from termcolor import colored

from event_geoloc.eval.metrics import evaluate, truths_from_messages
from event_geoloc.exception import ConfigError, InputError
from event_geoloc.gazetteer.base import Gazetteer, GazetteerReport, load_gazetteer, validate_gazetteer
from event_geoloc.gazetteer.geocoder import build_service
from event_geoloc.geoloc.locate import geolocate_clusters
from event_geoloc.geoloc.output import write_geojson, write_locations_jsonl, write_unlocatable
from event_geoloc.graph.hetero import build_hetero_graph, dump_hetero_edges
from event_geoloc.graph.message_graph import build_message_graph
from event_geoloc.graph.projection import dump_adjacency
from event_geoloc.hypdet.checkpoint import save_checkpoint
from event_geoloc.hypdet.detect import classification_accuracy, detect_events
from event_geoloc.hypdet.train import TrainResult, train
from event_geoloc.ingest.dataset import load_dataset
from event_geoloc.ingest.tokenizer import tokenize_messages
from event_geoloc.io import atomic_write, write_json, write_jsonl
from event_geoloc.types import (
    EvalReport,
    EventClusterSet,
    EventLocation,
    GeoPoint,
    Message,
    PipelineConfig,
    UnlocatableEvent,
)

logger = logging.getLogger(__name__)

CLUSTERS_FILE = "clusters.jsonl"
MODEL_FILE = "model.npz"
LOSS_FILE = "loss_history.csv"
LOCATIONS_FILE = "locations.jsonl"
GEOJSON_FILE = "locations.geojson"
UNLOCATABLE_FILE = "unlocatable.jsonl"
TRUTH_FILE = "truth.jsonl"
REPORT_FILE = "report.json"
ABLATION_FILE = "ablation_report.json"

ABLATION_VARIANTS = ("gtop", "gtop--")

PATH_FIELDS = ("dataset_path", "gazetteer_path", "output_dir", "geocode_cache_path")


def format_validation_error(e: ValidationError) -> str:
    return "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())


def load_config(path: str) -> PipelineConfig:
    """Reads a JSON config; relative paths are taken relative to the config file."""
    if not os.path.exists(path):
        raise ConfigError(f"not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {path}: line {e.lineno}: {e.msg}")
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    base = os.path.dirname(os.path.abspath(path))
    for field in PATH_FIELDS:
        value = raw.get(field)
        if isinstance(value, str) and not os.path.isabs(value):
            raw[field] = os.path.join(base, value)
    raw.setdefault("output_dir", os.path.join(base, "results"))
    try:
        config = PipelineConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(format_validation_error(e))
    return with_seed(config, config.seed)


def with_seed(config: PipelineConfig, seed: int) -> PipelineConfig:
    return config.model_copy(
        update={"seed": seed, "train": config.train.model_copy(update={"seed": seed})}
    )


def apply_overrides(
    config: PipelineConfig,
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
    no_fit: bool = False,
    no_hist: bool = False,
    ablation: Optional[str] = None,
    match_depth: Optional[int] = None,
    output: Optional[str] = None,
) -> PipelineConfig:
    """Command-line flags win over config values."""
    if seed is not None:
        config = with_seed(config, seed)
    updates: Dict[str, object] = {}
    if jobs is not None:
        if jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {jobs}")
        updates["jobs"] = jobs
    if output is not None:
        updates["output_dir"] = output
    geoloc_updates: Dict[str, object] = {}
    if ablation == "gtop":
        geoloc_updates.update(enable_fit=True, enable_hist=True)
    elif ablation == "gtop--":
        geoloc_updates.update(enable_fit=False, enable_hist=False)
    if no_fit:
        geoloc_updates["enable_fit"] = False
    if no_hist:
        geoloc_updates["enable_hist"] = False
    if match_depth is not None:
        geoloc_updates["match_depth"] = match_depth
    if geoloc_updates:
        try:
            updates["geoloc"] = config.geoloc.model_validate(
                {**config.geoloc.model_dump(), **geoloc_updates}
            )
        except ValidationError as e:
            raise ConfigError(format_validation_error(e))
    return config.model_copy(update=updates)


def output_path(config: PipelineConfig, name: str) -> str:
    return os.path.join(config.output_dir, name)


def load_inputs(config: PipelineConfig) -> Tuple[List[Message], Gazetteer]:
    gazetteer = load_gazetteer(config.gazetteer_path, address_separator=config.geoloc.fit_separator)
    messages = load_dataset(config.dataset_path, config.dataset_format)
    return tokenize_messages(messages, gazetteer), gazetteer


@dataclass(eq=False)
class DetectOutcome:
    clusters: EventClusterSet
    training: TrainResult
    accuracy: Optional[float]


def write_clusters(path: str, clusters: EventClusterSet) -> None:
    write_jsonl(
        path,
        ({"event_id": event_id, "message_ids": clusters.clusters[event_id]} for event_id in sorted(clusters.clusters)),
    )


def read_clusters(path: str) -> EventClusterSet:
    if not os.path.exists(path):
        raise InputError(f"not found: {path}", component="clusters")
    clusters: Dict[str, List[str]] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
                event_id, message_ids = str(record["event_id"]), [str(i) for i in record["message_ids"]]
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise InputError(f"line {line}: invalid cluster record: {e}", component="clusters")
            if event_id in clusters:
                raise InputError(f"line {line}: duplicate event id {event_id}", component="clusters")
            clusters[event_id] = message_ids
    try:
        return EventClusterSet(clusters=clusters)
    except ValidationError as e:
        raise InputError(e.errors()[0]["msg"], component="clusters")


def write_loss_history(path: str, history: Sequence[float]) -> None:
    with atomic_write(path) as f:
        f.write("epoch,loss\n")
        for epoch, loss in enumerate(history):
            f.write(f"{epoch},{loss!r}\n")


def cmd_detect(config: PipelineConfig, dump_graph: Optional[str] = None) -> DetectOutcome:
    messages, gazetteer = load_inputs(config)
    hetero = build_hetero_graph(messages, config.feature, gazetteer)
    graph = build_message_graph(messages, config.feature, gazetteer, hetero=hetero)
    logger.info("message graph: %d nodes, %d edges", graph.num_nodes, graph.adjacency.nnz // 2)
    if dump_graph is not None:
        os.makedirs(dump_graph, exist_ok=True)
        dump_hetero_edges(hetero, os.path.join(dump_graph, "hetero_edges.tsv"))
        dump_adjacency(graph.adjacency, os.path.join(dump_graph, "adjacency.tsv"))

    labels = {m.id: m.event_label for m in messages if m.event_label is not None}
    training = train(graph, labels, config.train, config.hyperbolic)
    clusters = detect_events(messages, graph, training.params)
    trained_on = set(training.train_ids)
    held_out = {i: label for i, label in labels.items() if i not in trained_on}
    accuracy = classification_accuracy(clusters, held_out) if held_out else None

    write_clusters(output_path(config, CLUSTERS_FILE), clusters)
    save_checkpoint(output_path(config, MODEL_FILE), training.params)
    write_loss_history(output_path(config, LOSS_FILE), training.loss_history)
    logger.info("wrote %d clusters to %s", len(clusters.clusters), output_path(config, CLUSTERS_FILE))
    return DetectOutcome(clusters=clusters, training=training, accuracy=accuracy)


def cmd_geolocate(
    config: PipelineConfig, clusters_path: Optional[str] = None
) -> Tuple[List[EventLocation], List[UnlocatableEvent]]:
    messages, gazetteer = load_inputs(config)
    clusters = read_clusters(clusters_path or output_path(config, CLUSTERS_FILE))
    service = build_service(gazetteer, config.remote_geocoder, config.geocode_cache_path)
    locations, unlocatable = geolocate_clusters(
        clusters, messages, gazetteer, config.geoloc, geocoder=service, jobs=config.jobs
    )
    write_locations_jsonl(output_path(config, LOCATIONS_FILE), locations)
    write_geojson(output_path(config, GEOJSON_FILE), locations)
    write_unlocatable(output_path(config, UNLOCATABLE_FILE), unlocatable)
    return locations, unlocatable


def read_points(path: str, component: str) -> Dict[str, GeoPoint]:
    """event_id -> point from a JSONL file of {"event_id", "lat", "lon", ...} records."""
    if not os.path.exists(path):
        raise InputError(f"not found: {path}", component=component)
    points: Dict[str, GeoPoint] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
                points[str(record["event_id"])] = GeoPoint(lat=record["lat"], lon=record["lon"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise InputError(f"line {line}: invalid record: {e}".splitlines()[0], component=component)
    return points


def write_truths(path: str, truths: Dict[str, GeoPoint]) -> None:
    write_jsonl(
        path,
        ({"event_id": event_id, "lat": p.lat, "lon": p.lon} for event_id, p in sorted(truths.items())),
    )


def cmd_eval(
    config: PipelineConfig,
    locations_path: Optional[str] = None,
    truth_path: Optional[str] = None,
    thresholds: Optional[Sequence[float]] = None,
    display: bool = True,
) -> EvalReport:
    if truth_path is None:
        truth_path = output_path(config, TRUTH_FILE)
        messages = load_dataset(config.dataset_path, config.dataset_format)
        write_truths(truth_path, truths_from_messages(messages))
    estimates = read_points(locations_path or output_path(config, LOCATIONS_FILE), "locations")
    truths = read_points(truth_path, "truth")
    report = evaluate(estimates, truths, thresholds or config.eval_thresholds_km)
    write_json(output_path(config, REPORT_FILE), report)
    if display:
        display_metrics(report)
    return report


def cmd_pipeline(config: PipelineConfig, dump_graph: Optional[str] = None) -> EvalReport:
    outcome = cmd_detect(config, dump_graph=dump_graph)
    if outcome.accuracy is not None:
        print(colored(f"Held-out detection accuracy: {outcome.accuracy:.4f}", "cyan"))
    cmd_geolocate(config)
    return cmd_eval(config)


def cmd_ablation(
    config: PipelineConfig,
    clusters_path: Optional[str] = None,
    truth_path: Optional[str] = None,
    thresholds: Optional[Sequence[float]] = None,
) -> Dict[str, EvalReport]:
    """Geolocates the same clusters with and without filtering and pseudo-toponyms.

    Each variant writes its usual outputs under `<output_dir>/<variant>`; both reports
    land side by side in `<output_dir>/ablation_report.json`.
    """
    clusters_path = clusters_path or output_path(config, CLUSTERS_FILE)
    reports: Dict[str, EvalReport] = {}
    for variant in ABLATION_VARIANTS:
        variant_config = apply_overrides(config, ablation=variant, output=output_path(config, variant))
        cmd_geolocate(variant_config, clusters_path=clusters_path)
        reports[variant] = cmd_eval(variant_config, truth_path=truth_path, thresholds=thresholds, display=False)
    write_json(
        output_path(config, ABLATION_FILE),
        {variant: report.model_dump() for variant, report in reports.items()},
    )
    display_ablation(reports)
    return reports


def cmd_gazetteer_validate(config: PipelineConfig) -> GazetteerReport:
    report = validate_gazetteer(config.gazetteer_path)
    print(report.model_dump_json(indent=2))
    return report


def display_metrics(report: EvalReport) -> None:
    located = report.n_events - report.n_unlocatable
    print(colored(f"Events: {report.n_events} ({located} located, {report.n_unlocatable} unlocatable)", "cyan"))
    print(f"Mean error:   {report.mean_km:.2f} km")
    print(f"Median error: {report.median_km:.2f} km")
    print("ACC@d")
    for d, acc in report.acc.items():
        color = "green" if acc >= 0.5 else "yellow" if acc > 0 else "red"
        print(f"  d={d:>6} km: " + colored(f"{acc * 100:.2f}%", color))


def display_ablation(reports: Dict[str, EvalReport]) -> None:
    thresholds = list(next(iter(reports.values())).acc)
    header = f"{'variant':<8} {'mean km':>10} {'median km':>10}" + "".join(f" {'ACC@' + d:>9}" for d in thresholds)
    print(colored(header, "cyan"))
    for variant, report in reports.items():
        accs = "".join(f" {report.acc[d] * 100:>8.2f}%" for d in thresholds)
        print(f"{variant:<8} {report.mean_km:>10.2f} {report.median_km:>10.2f}{accs}")
