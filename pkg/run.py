import sys

from event_geoloc.cli import main

if __name__ == "__main__":
    sys.exit(main())
