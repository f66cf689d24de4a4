"""Chat-turn routing: is this message a table-discovery request, and if so,
which search mode does it imply?

The default router is rule-based and pure: a discovery lexicon detects the
intent, mode words pick the search mode, and the whole message becomes the
condition text. When a chat-completion endpoint is configured it is asked
for structured output with a fixed prompt; any timeout, non-200 or
unparseable reply falls back to the rules, so the router never fails hard.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass

from .tables import QueryMode

logger = logging.getLogger(__name__)

_DISCOVERY_RE = re.compile(
    r"\b(find|search|retrieve|discover|locate|unionable|joinable)\b|tables? (containing|about|with|related)",
    re.IGNORECASE,
)
_ANALYSIS_RE = re.compile(
    r"\b(mean|average|sum|count|median|max|min|plot|chart|histogram|correlation|analy[sz]e|compute|describe)\b"
    r"|what'?s\b|what is\b",
    re.IGNORECASE,
)
_UNION_RE = re.compile(r"\bunion(able|ed)?\b|\bappend\b|\bextend (my|the) table\b", re.IGNORECASE)
_JOIN_RE = re.compile(r"\bjoin(able|ed)?\b|\bmerge\b", re.IGNORECASE)
_KEY_COLUMN_RE = re.compile(r"(?:on|using|via)\s+(?:the\s+)?(?:key\s+)?column\s+['\"]?(\w+)", re.IGNORECASE)

ROUTER_PROMPT = """You classify a user message for a table search assistant.
Reply with ONLY a JSON object, no prose:
{"intent": "discovery" | "analysis" | "other",
 "mode": "nl_only" | "nlc_union" | "nlc_join" | null,
 "condition": string | null,
 "key_column": string | null}
"discovery" means the user wants to find/search tables in a repository.
"analysis" means the user asks about data already in their workspace.
The condition is the user's requirement restated as search text."""


@dataclass
class LlmConfig:
    endpoint: str
    api_key: str | None = None
    model: str = "default"
    timeout: float = 10.0


@dataclass
class ExtractedQuery:
    mode: QueryMode
    condition: str
    key_column: str | None = None


@dataclass
class AssistantTurn:
    text: str
    detected_intent: str  # discovery | analysis | other
    extracted: ExtractedQuery | None
    reply: str


def _rule_based(text: str) -> AssistantTurn:
    stripped = text.strip()
    if _DISCOVERY_RE.search(stripped):
        if _UNION_RE.search(stripped):
            mode = QueryMode.UNION
        elif _JOIN_RE.search(stripped):
            mode = QueryMode.JOIN
        else:
            mode = QueryMode.NL_ONLY
        key = None
        key_match = _KEY_COLUMN_RE.search(stripped)
        if key_match:
            key = key_match.group(1)
        extracted = ExtractedQuery(mode=mode, condition=stripped, key_column=key)
        return AssistantTurn(
            text=text,
            detected_intent="discovery",
            extracted=extracted,
            reply=f"Searching the pool ({mode.value}) for: {stripped}",
        )
    if _ANALYSIS_RE.search(stripped):
        return AssistantTurn(
            text=text,
            detected_intent="analysis",
            extracted=None,
            reply="That looks like an analysis question about your current table; "
            "this assistant only routes discovery requests. Try the processing panel.",
        )
    return AssistantTurn(
        text=text,
        detected_intent="other",
        extracted=None,
        reply="I can search the table pool for you. Try: 'Find unionable tables containing ...'",
    )


def _parse_llm_reply(text: str, content: str) -> AssistantTurn:
    obj = json.loads(content)
    intent = obj["intent"]
    if intent not in ("discovery", "analysis", "other"):
        raise ValueError(f"bad intent {intent!r}")
    extracted = None
    if intent == "discovery":
        extracted = ExtractedQuery(
            mode=QueryMode(obj["mode"]),
            condition=str(obj.get("condition") or text),
            key_column=obj.get("key_column"),
        )
    reply = (
        f"Searching the pool ({extracted.mode.value}) for: {extracted.condition}"
        if extracted
        else "Routed without a search."
    )
    return AssistantTurn(text=text, detected_intent=intent, extracted=extracted, reply=reply)


def route_intent(text: str, llm_config: LlmConfig | None = None, transport=None) -> AssistantTurn:
    """Classify one chat message; LLM-backed when configured, rules otherwise."""
    if llm_config is None:
        return _rule_based(text)
    try:
        import httpx

        headers = {}
        if llm_config.api_key:
            headers["Authorization"] = f"Bearer {llm_config.api_key}"
        with httpx.Client(transport=transport, timeout=llm_config.timeout) as client:
            resp = client.post(
                llm_config.endpoint,
                headers=headers,
                json={
                    "model": llm_config.model,
                    "messages": [
                        {"role": "system", "content": ROUTER_PROMPT},
                        {"role": "user", "content": text},
                    ],
                },
            )
        if resp.status_code != 200:
            raise ValueError(f"endpoint returned {resp.status_code}")
        content = resp.json()["choices"][0]["message"]["content"]
        return _parse_llm_reply(text, content)
    except Exception as exc:
        logger.warning("LLM router failed (%s); using rule-based fallback", exc)
        return _rule_based(text)
