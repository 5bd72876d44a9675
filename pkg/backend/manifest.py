"""
Run manifest written as '#'-prefixed header lines at the top of every CLI
output file, so that each data file says how it was produced.
"""

import datetime
import json
from dataclasses import dataclass, field
from typing import Optional

TOOL_NAME = "gti-asym"
TOOL_VERSION = "1.0.0"


@dataclass
class RunManifest:
    command: str
    parameters: dict = field(default_factory=dict)
    tool_version: str = TOOL_VERSION
    coefficient_table_order: Optional[int] = None
    timestamp: Optional[str] = None

    @classmethod
    def create(cls, command: str, parameters: dict, coefficient_table_order: int = None,
               reproducible: bool = False):
        ts = None if reproducible else datetime.datetime.now(datetime.timezone.utc).isoformat()
        return cls(command, dict(parameters), TOOL_VERSION, coefficient_table_order, ts)

    def header_lines(self):
        lines = [
            f"# tool: {TOOL_NAME} {self.tool_version}",
            f"# command: {self.command}",
            f"# parameters: {json.dumps(self.parameters, sort_keys=True, default=str)}",
        ]
        if self.coefficient_table_order is not None:
            lines.append(f"# coefficient_table_order: {self.coefficient_table_order}")
        if self.timestamp:
            lines.append(f"# timestamp: {self.timestamp}")
        return lines

    def header(self) -> str:
        return "\n".join(self.header_lines()) + "\n"


def read_manifest(text: str) -> RunManifest:
    """Parse the header block back; stops at the first line not starting with '#'."""
    values = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition(":")
        values[key.strip()] = value.strip()
    if "command" not in values:
        raise ValueError("no manifest header found")
    version = values.get("tool", f"{TOOL_NAME} {TOOL_VERSION}").split()[-1]
    order = values.get("coefficient_table_order")
    return RunManifest(
        command=values["command"],
        parameters=json.loads(values.get("parameters", "{}")),
        tool_version=version,
        coefficient_table_order=int(order) if order else None,
        timestamp=values.get("timestamp"),
    )
