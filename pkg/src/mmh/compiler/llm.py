"""Two-stage prompting backend: instruction -> step list -> NavScript."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from string import Template
from typing import Protocol, Sequence

from ..errors import CompileError, ExtractionError
from ..navscript import ParseError, parse_source, validate
from .steps import NoMatch, parse_instruction_rules, steps_to_navscript

PROMPT_NAMES = (
    "parse_stage",
    "refine_stage",
    "codegen_stage",
    "codegen_refine",
    "repair",
    "fence_reminder",
    "navscript_api",
)

SUCCESS = "Success"
BACKEND_LLM = "llm"
BACKEND_LLM_NO_PARSER = "llm-direct"
BACKEND_RULES = "rules"


class Chat(Protocol):
    def chat(self, messages: Sequence) -> str: ...


def load_prompt(name: str) -> str:
    if name not in PROMPT_NAMES:
        raise KeyError(f"unknown prompt {name!r}")
    return (resources.files("mmh.compiler") / "prompts" / f"{name}.txt").read_text(encoding="utf-8")


def load_prompts() -> dict[str, str]:
    return {name: load_prompt(name) for name in PROMPT_NAMES}


def default_api_spec() -> str:
    return load_prompt("navscript_api")


@dataclass
class CompilationRecord:
    source: str
    backend: str
    steps_text: str = ""
    navscript: str = ""
    status: str = ""
    attempts: int = 0
    transcript: list[dict] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.status == SUCCESS:
            parse_source(self.navscript)

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "backend": self.backend,
            "steps_text": self.steps_text,
            "navscript": self.navscript,
            "status": self.status,
            "attempts": self.attempts,
            "errors": list(self.errors),
        }


_FENCE = re.compile(r"```[^\n`]*\n(.*?)(?:```|\Z)", re.S)


def extract_fenced(reply: str) -> str | None:
    """Body of the first fenced block. An unterminated fence at the end of the
    reply (a truncated answer) yields whatever was received."""
    m = _FENCE.search(reply)
    return m.group(1) if m else None


def _check(program_text: str) -> str | None:
    """Error text for a program that does not compile, else None."""
    try:
        program = parse_source(program_text)
    except ParseError as exc:
        return f"ParseError: {exc}"
    errors = validate(program)
    if errors:
        return "SemanticError: " + "; ".join(str(e) for e in errors)
    return None


def _with_record(exc: Exception, record: CompilationRecord) -> Exception:
    exc.record = record
    return exc


def _two_round(client: Chat, first: str, second: str) -> list[dict]:
    """Thought round followed by a refine round; returns the whole conversation."""
    messages = [{"role": "user", "content": first}]
    messages.append({"role": "assistant", "content": client.chat(messages)})
    messages.append({"role": "user", "content": second})
    messages.append({"role": "assistant", "content": client.chat(messages)})
    return messages


def _follow_up(client: Chat, conversation: list[dict], text: str) -> str:
    conversation.append({"role": "user", "content": text})
    reply = client.chat(conversation)
    conversation.append({"role": "assistant", "content": reply})
    return reply


def compile_with_llm(
    text: str,
    api_spec: str | None,
    client: Chat,
    use_parser: bool = True,
    prompts: dict[str, str] | None = None,
) -> CompilationRecord:
    """Compile an instruction through a chat-completion service.

    Stage one asks for a step list (thought, then refined answer); stage two
    asks for a fenced NavScript block given the language reference and the
    steps. A reply without a fence is re-requested once; a program that does
    not compile gets one repair round with the error text.
    """
    p = load_prompts() if prompts is None else {**load_prompts(), **prompts}
    api_spec = p["navscript_api"] if api_spec is None else api_spec
    record = CompilationRecord(source=text, backend=BACKEND_LLM if use_parser else BACKEND_LLM_NO_PARSER)

    if use_parser:
        parse_conv = _two_round(client, Template(p["parse_stage"]).safe_substitute(instruction=text), p["refine_stage"])
        record.transcript.extend(parse_conv)
        steps_text = parse_conv[-1]["content"]
    else:
        steps_text = text
    record.steps_text = steps_text

    codegen = Template(p["codegen_stage"]).safe_substitute(api_spec=api_spec, steps=steps_text)
    conv = _two_round(client, codegen, p["codegen_refine"])
    program = extract_fenced(conv[-1]["content"])
    if program is None:
        program = extract_fenced(_follow_up(client, conv, p["fence_reminder"]))
        if program is None:
            record.transcript.extend(conv)
            record.status = "ExtractionError"
            raise _with_record(ExtractionError("no fenced code block in the reply after one reminder"), record)

    record.attempts = 1
    error = _check(program)
    if error is not None:
        record.errors.append(error)
        repair = Template(p["repair"]).safe_substitute(error=error, program=program.rstrip("\n"))
        repaired = extract_fenced(_follow_up(client, conv, repair))
        record.attempts = 2
        error = "no fenced code block in the repair reply" if repaired is None else _check(repaired)
        if error is not None:
            record.errors.append(error)
            record.transcript.extend(conv)
            record.navscript = repaired or program
            record.status = "CompileError"
            raise _with_record(CompileError(f"program still fails after repair: {error}"), record)
        program = repaired

    record.transcript.extend(conv)
    record.navscript = program if program.endswith("\n") else program + "\n"
    record.status = SUCCESS
    parse_source(record.navscript)
    return record


def compile_with_rules(text: str) -> CompilationRecord:
    """Controlled-English backend; status is ``NoMatch`` when a sentence is not covered."""
    steps = parse_instruction_rules(text)
    if isinstance(steps, NoMatch):
        return CompilationRecord(source=text, backend=BACKEND_RULES, status="NoMatch", errors=[f"no rule matches: {steps.sentence!r}"])
    return CompilationRecord(
        source=text,
        backend=BACKEND_RULES,
        steps_text=steps.to_text(),
        navscript=steps_to_navscript(steps),
        status=SUCCESS,
        attempts=1,
    )
