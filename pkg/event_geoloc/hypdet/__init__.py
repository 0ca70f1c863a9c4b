from event_geoloc.hypdet.checkpoint import load_checkpoint as load_checkpoint
from event_geoloc.hypdet.checkpoint import save_checkpoint as save_checkpoint
from event_geoloc.hypdet.detect import classification_accuracy as classification_accuracy
from event_geoloc.hypdet.detect import detect_events as detect_events
from event_geoloc.hypdet.manifold import exp_map as exp_map
from event_geoloc.hypdet.manifold import log_map as log_map
from event_geoloc.hypdet.model import ModelParams as ModelParams
from event_geoloc.hypdet.model import decode_classify as decode_classify
from event_geoloc.hypdet.model import encode as encode
from event_geoloc.hypdet.model import init_params as init_params
from event_geoloc.hypdet.train import TrainResult as TrainResult
from event_geoloc.hypdet.train import loss_and_grads as loss_and_grads
from event_geoloc.hypdet.train import train as train
