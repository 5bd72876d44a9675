import datetime
import json
import os
import sys
import uuid

from dotenv import load_dotenv

load_dotenv()


class RunLogger:
    """
    Structured run events for the CLI and scripts.

    Sink priority: MongoDB (MONGO_URI) -> JSON-lines file (GTI_ASYM_EVENT_LOG)
    -> disabled. A failing sink never breaks the computation it records.
    """

    def __init__(self, mongo_uri: str = None, event_log: str = None, quiet: bool = True):
        self.uri = mongo_uri if mongo_uri is not None else os.getenv("MONGO_URI")
        self.path = event_log if event_log is not None else os.getenv("GTI_ASYM_EVENT_LOG")
        self.collection = None
        self.sink = "disabled"

        if self.uri:
            try:
                import pymongo

                self.client = pymongo.MongoClient(self.uri, serverSelectionTimeoutMS=3000)
                self.db = self.client["gti_asym"]
                self.collection = self.db["run_events"]

                # Ensure TTL index (7 days)
                self.collection.create_index("ts", expireAfterSeconds=7 * 24 * 3600)
                self.collection.create_index("event")
                self.collection.create_index("status")
                self.sink = "mongo"
                return
            except Exception as e:
                print(f"[RunLogger] ⚠️ Mongo sink init failed: {e}", file=sys.stderr)
                self.collection = None

        if self.path:
            self.sink = "file"
        elif not quiet:
            print("[RunLogger] ⚠️ Run events disabled: neither MONGO_URI nor GTI_ASYM_EVENT_LOG set.", file=sys.stderr)

    @property
    def enabled(self) -> bool:
        return self.sink != "disabled"

    def log_event(self, event_type: str, status: str, duration_ms: float = 0,
                  error_type: str = None, meta: dict = None):
        if not self.enabled:
            return

        entry = {
            "ts": datetime.datetime.now(datetime.timezone.utc),
            "event": event_type,
            "status": status,
            "duration_ms": duration_ms,
            "error_type": error_type,
            "meta": meta or {},
            "correlation_id": str(uuid.uuid4()),
        }
        try:
            if self.sink == "mongo":
                self.collection.insert_one(entry)
            else:
                entry["ts"] = entry["ts"].isoformat()
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, default=str) + "\n")
        except Exception as e:
            print(f"[RunLogger] Failed to log event: {e}", file=sys.stderr)

    def read_events(self, limit=50, status=None, event_type=None) -> list:
        """Most recent events first, optionally filtered."""
        if self.sink == "mongo":
            query = {}
            if status:
                query["status"] = status
            if event_type:
                query["event"] = event_type
            try:
                cursor = self.collection.find(query, {"_id": 0}).sort("ts", -1).limit(limit)
                return list(cursor)
            except Exception:
                return []

        if self.sink != "file" or not os.path.exists(self.path):
            return []
        events = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    e = json.loads(line)
                except json.JSONDecodeError:
                    continue
                if status and e.get("status") != status:
                    continue
                if event_type and e.get("event") != event_type:
                    continue
                events.append(e)
        events.reverse()
        return events[:limit]

    def summary(self) -> dict:
        """Per-event counts, mean duration and failures over the events still held by the sink."""
        breakdown = {}
        for e in self.read_events(limit=10 ** 6):
            row = breakdown.setdefault(e["event"], {"count": 0, "total_ms": 0.0, "errors": 0})
            row["count"] += 1
            row["total_ms"] += e.get("duration_ms") or 0
            if e.get("status") == "fail":
                row["errors"] += 1
        return {
            evt: {"count": r["count"], "avg_ms": round(r["total_ms"] / r["count"], 1), "errors": r["errors"]}
            for evt, r in breakdown.items()
        }
