"""Generate the continuous-delivery glue: a hosted-CI workflow that runs
simulate -> mine -> upload on every push, plus a make-rule fragment.

Generation is template-driven and deterministic: the same config always
produces the same bytes, and the simulator invocation stays a template
slot that this package never executes itself.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TextIO

import yaml

from .errors import InvalidConfig

_SAFE_ARTIFACT = re.compile(r"^[A-Za-z0-9._-]+$")

DEFAULT_SIMULATOR = "iverilog{flags} -o {top}.vvp -s {top} {files} && vvp {top}.vvp"

_REQUIRED_FIELDS = ("design", "testbench", "top", "image", "artifact")


@dataclass(frozen=True)
class PipelineConfig:
    design: tuple[str, ...]
    testbench: tuple[str, ...]
    top: str
    image: str
    artifact: str
    simulator: str = DEFAULT_SIMULATOR
    sampling: str = "every-timestamp"
    systemverilog: bool = False

    @property
    def vcd_file(self) -> str:
        return f"{self.top}.vcd"

    @property
    def spec_file(self) -> str:
        return f"{self.artifact}.spec"


def _as_file_list(value, field: str) -> tuple[str, ...]:
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list) or not value or not all(isinstance(x, str) and x for x in value):
        raise InvalidConfig(f"field {field!r} must be a non-empty file list")
    return tuple(value)


def _sampling_flags(sampling: str) -> str:
    if sampling == "every-timestamp":
        return ""
    mode, sep, clock = sampling.partition(":")
    if mode not in ("rising", "falling") or not sep or not clock:
        raise InvalidConfig(
            f"field 'sampling' must be 'every-timestamp', 'rising:CLOCK' or "
            f"'falling:CLOCK', got {sampling!r}"
        )
    return f" --clock {clock} --edge {mode}"


def load_config(source) -> PipelineConfig:
    """Load and validate a pipeline config (YAML text, stream, or dict)."""
    data = source if isinstance(source, dict) else yaml.safe_load(source)
    if not isinstance(data, dict):
        raise InvalidConfig("config must be a mapping")
    for field in _REQUIRED_FIELDS:
        if field not in data:
            raise InvalidConfig(f"missing required field {field!r}")
    design = _as_file_list(data["design"], "design")
    testbench = _as_file_list(data["testbench"], "testbench")
    top = data["top"]
    if not isinstance(top, str) or not top:
        raise InvalidConfig("field 'top' must be a non-empty module name")
    image = data["image"]
    if not isinstance(image, str) or not image:
        raise InvalidConfig("field 'image' must be a container image reference")
    artifact = data["artifact"]
    if not isinstance(artifact, str) or not _SAFE_ARTIFACT.match(artifact or ""):
        raise InvalidConfig("field 'artifact' must be a non-empty filesystem-safe name")
    config = PipelineConfig(
        design=design,
        testbench=testbench,
        top=top,
        image=image,
        artifact=artifact,
        simulator=data.get("simulator", DEFAULT_SIMULATOR),
        sampling=data.get("sampling", "every-timestamp"),
        systemverilog=bool(data.get("systemverilog", False)),
    )
    _sampling_flags(config.sampling)    # validates
    if not isinstance(config.simulator, str) or not config.simulator:
        raise InvalidConfig("field 'simulator' must be a command template")
    return config


def _mine_command(config: PipelineConfig) -> str:
    return (
        f"wavespec mine {config.vcd_file} -o {config.spec_file}"
        f"{_sampling_flags(config.sampling)}"
    )


def emit_workflow(config: PipelineConfig, sink: TextIO) -> None:
    """Emit the push-triggered workflow: checkout, test, build, deploy."""
    text = f"""name: {config.artifact}
on: push
jobs:
  spec:
    runs-on: ubuntu-latest
    container: {config.image}
    steps:
      - uses: actions/checkout@v4
      - name: test
        run: make {config.vcd_file}
      - name: build
        run: {_mine_command(config)}
      - name: deploy
        uses: actions/upload-artifact@v4
        with:
          name: {config.artifact}
          path: {config.spec_file}
"""
    sink.write(text)


def emit_make_fragment(config: PipelineConfig, sink: TextIO) -> None:
    """Emit the two make rules: VCD via the simulator template, then the spec."""
    files = " ".join(config.design + config.testbench)
    flags = " -g2012" if config.systemverilog else ""
    try:
        simulate = config.simulator.format(
            flags=flags, top=config.top, files=files, vcd=config.vcd_file
        )
    except (KeyError, IndexError) as exc:
        raise InvalidConfig(f"field 'simulator' has an unknown template slot: {exc}") from exc
    text = (
        f"{config.vcd_file}: {files}\n"
        f"\t{simulate}\n"
        f"{config.spec_file}: {config.vcd_file}\n"
        f"\t{_mine_command(config)}\n"
    )
    sink.write(text)
