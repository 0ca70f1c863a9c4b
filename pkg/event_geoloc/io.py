import contextlib
import json
import os
import tempfile
from typing import IO, Any, Iterable, Iterator

from pydantic import BaseModel


@contextlib.contextmanager
def atomic_write(path: str, mode: str = "w") -> Iterator[IO[Any]]:
    """Write to a temporary file next to `path`, then rename it over `path`.

    Readers never observe a half-written file; on error the target is left untouched.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=f".{os.path.basename(path)}.", suffix=".tmp")
    encoding = None if "b" in mode else "utf-8"
    try:
        with os.fdopen(fd, mode, encoding=encoding) as f:
            yield f
        os.replace(tmp_path, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.remove(tmp_path)
        raise


def dumps_record(record: Any) -> str:
    if isinstance(record, BaseModel):
        return record.model_dump_json(exclude_none=True)
    return json.dumps(record, ensure_ascii=False, sort_keys=True)


def write_jsonl(path: str, records: Iterable[Any]) -> None:
    with atomic_write(path) as f:
        for record in records:
            f.write(dumps_record(record) + "\n")


def write_json(path: str, payload: Any) -> None:
    with atomic_write(path) as f:
        if isinstance(payload, BaseModel):
            f.write(payload.model_dump_json(indent=2))
        else:
            json.dump(payload, f, indent=2, ensure_ascii=False, sort_keys=True)
        f.write("\n")
