from dataclasses import dataclass
from typing import Generic, Optional, TypeVar

T = TypeVar("T")


class GeolocError(Exception):
    exit_code = 4
    component = "internal"

    def __init__(self, short_message: str, component: Optional[str] = None) -> None:
        if component is not None:
            self.component = component
        self.short_message = short_message
        super().__init__(f"{self.component}: {short_message}")


class InputError(GeolocError):
    exit_code = 2
    component = "input"


class DatasetError(InputError):
    component = "dataset"

    def __init__(self, short_message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            short_message = f"line {line}: {short_message}"
        super().__init__(short_message)


class GazetteerError(InputError):
    component = "gazetteer"

    def __init__(self, short_message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            short_message = f"line {line}: {short_message}"
        super().__init__(short_message)


class ConfigError(InputError):
    component = "config"


class CheckpointError(InputError):
    component = "checkpoint"


class EvaluationMismatchError(GeolocError):
    exit_code = 3
    component = "eval"


class TrainingError(GeolocError):
    component = "train"

    def __init__(self, short_message: str, epoch: Optional[int] = None) -> None:
        self.epoch = epoch
        if epoch is not None:
            short_message = f"epoch {epoch}: {short_message}"
        super().__init__(short_message)


class GeocoderError(GeolocError):
    component = "geocoder"


class UnlocatableClusterError(GeolocError):
    component = "geoloc"

    def __init__(self, event_id: str, reason: str) -> None:
        self.event_id = event_id
        self.reason = reason
        super().__init__(f"event {event_id} is unlocatable: {reason}")


@dataclass
class Result(Generic[T]):
    value: Optional[T]
    error: Optional[GeolocError]
