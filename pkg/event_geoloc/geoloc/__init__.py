from event_geoloc.geoloc.centroid import centroid as centroid
from event_geoloc.geoloc.centroid import kmeans_centroid as kmeans_centroid
from event_geoloc.geoloc.chain import build_chain as build_chain
from event_geoloc.geoloc.chain import hist_filter as hist_filter
from event_geoloc.geoloc.fit import fit_generate as fit_generate
from event_geoloc.geoloc.locate import geolocate_clusters as geolocate_clusters
from event_geoloc.geoloc.locate import geolocate_event as geolocate_event
from event_geoloc.geoloc.output import write_geojson as write_geojson
from event_geoloc.geoloc.output import write_locations_jsonl as write_locations_jsonl
from event_geoloc.geoloc.output import write_unlocatable as write_unlocatable
