"""Action-language domains, logic programs and scenario files."""

from .parser import (
    parse_atom, parse_domain, parse_literal, parse_program, parse_scenario, check_safety,
)
from .pretty import domain_to_text, program_to_text, scenario_to_text
from .syntax import *  # noqa: F401,F403
from .syntax import LangError
