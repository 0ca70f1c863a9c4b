from event_geoloc.eval.metrics import acc_at as acc_at
from event_geoloc.eval.metrics import error_stats as error_stats
from event_geoloc.eval.metrics import evaluate as evaluate
from event_geoloc.eval.metrics import haversine as haversine
from event_geoloc.eval.metrics import truths_from_messages as truths_from_messages
