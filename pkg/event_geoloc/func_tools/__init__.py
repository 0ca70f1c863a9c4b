from event_geoloc.func_tools.map import map as map
