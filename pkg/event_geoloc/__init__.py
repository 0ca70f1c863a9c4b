from event_geoloc.exception import GeolocError as GeolocError
from event_geoloc.types import EventLocation as EventLocation
from event_geoloc.types import Message as Message
from event_geoloc.types import PipelineConfig as PipelineConfig
