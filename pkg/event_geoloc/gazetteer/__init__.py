from event_geoloc.gazetteer.base import Gazetteer as Gazetteer
from event_geoloc.gazetteer.base import GazetteerReport as GazetteerReport
from event_geoloc.gazetteer.base import load_gazetteer as load_gazetteer
from event_geoloc.gazetteer.base import resolve as resolve
from event_geoloc.gazetteer.base import validate_gazetteer as validate_gazetteer
from event_geoloc.gazetteer.cache import GeocodeCache as GeocodeCache
from event_geoloc.gazetteer.extract import GazetteerExtractor as GazetteerExtractor
from event_geoloc.gazetteer.extract import ToponymExtractor as ToponymExtractor
from event_geoloc.gazetteer.extract import extract_toponyms as extract_toponyms
from event_geoloc.gazetteer.geocoder import Geocoder as Geocoder
from event_geoloc.gazetteer.geocoder import GeocodingService as GeocodingService
from event_geoloc.gazetteer.geocoder import HTTPGeocoder as HTTPGeocoder
from event_geoloc.gazetteer.geocoder import build_service as build_service
from event_geoloc.gazetteer.geocoder import geocode as geocode
