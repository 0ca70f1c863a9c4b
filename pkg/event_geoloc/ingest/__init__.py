from event_geoloc.ingest.dataset import load_dataset as load_dataset
from event_geoloc.ingest.dataset import write_dataset as write_dataset
from event_geoloc.ingest.oledate import ole_date as ole_date
from event_geoloc.ingest.tokenizer import GazetteerTokenizer as GazetteerTokenizer
from event_geoloc.ingest.tokenizer import Tokenizer as Tokenizer
from event_geoloc.ingest.tokenizer import tokenize as tokenize
from event_geoloc.ingest.tokenizer import tokenize_messages as tokenize_messages
