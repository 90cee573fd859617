"""Instruction compilation: controlled-English rules and a chat-completion backend."""

from .client import ChatClient, LlmClientConfig, chat_request
from .llm import CompilationRecord, compile_with_llm, compile_with_rules, default_api_spec, extract_fenced, load_prompt
from .steps import NoMatch, Step, StepList, parse_instruction_rules, split_sentences, steps_to_navscript

__all__ = [
    "ChatClient", "LlmClientConfig", "chat_request", "CompilationRecord", "compile_with_llm",
    "default_api_spec", "extract_fenced", "load_prompt", "NoMatch", "Step", "StepList",
    "compile_with_rules", "parse_instruction_rules", "split_sentences", "steps_to_navscript",
]
