from event_geoloc.graph.features import embed_text as embed_text
from event_geoloc.graph.features import initial_features as initial_features
from event_geoloc.graph.hetero import HeteroGraph as HeteroGraph
from event_geoloc.graph.hetero import build_hetero_graph as build_hetero_graph
from event_geoloc.graph.hetero import dump_hetero_edges as dump_hetero_edges
from event_geoloc.graph.message_graph import MessageGraph as MessageGraph
from event_geoloc.graph.message_graph import build_message_graph as build_message_graph
from event_geoloc.graph.projection import dump_adjacency as dump_adjacency
from event_geoloc.graph.projection import project_homogeneous as project_homogeneous
