import os
import sys
import threading
from typing import Optional


lock: threading.Lock = threading.Lock()


def log(msg: str, *, newline: bool = True, document: Optional[int] = None) -> None:
    # One flushed write per line, labelled with its batch document.
    prefix = "" if document is None else f"[document {document}] "
    with lock:
        sys.stderr.write(prefix + msg + (os.linesep if newline else ""))
        sys.stderr.flush()


def warn(msg: str, *, document: Optional[int] = None) -> None:
    log(f"WARNING: {msg}", document=document)
