import re

from framecue.kfm.mapping import Keyword

# A clause runs to ? ! , ; or a sentence-ending period (not the one in "Mr." etc.)
_CLAUSE_END = r"(?=[?!,;]|(?<!\bMr)(?<!\bMrs)(?<!\bMs)(?<!\bDr)\.(?=\s|$)|$)"

_TEMPORAL = re.compile(r"\b(?i:after|before)\s+(?P<clause>.+?)" + _CLAUSE_END)
_BETWEEN = re.compile(r"\b(?i:between)\s+(?P<first>.+?)\s+and\s+(?P<second>.+?)" + _CLAUSE_END)
_QUOTED = (re.compile(r'"(?P<quoted>[^"]+)"'), re.compile(r"“(?P<quoted>[^”]+)”"))


class RuleExtractor:
    """Pattern-based keyword extractor.

    Captures the clause after "after"/"before", both ends of "between X and Y",
    and quoted phrases. Returns [] when nothing matches. Every keyword carries
    the exact span it was cut from.
    """

    name = "rule"

    def extract(self, question: str, dataset_profile: str = "generic") -> list[Keyword]:
        found: list[tuple[int, int]] = []
        for match in _BETWEEN.finditer(question):
            found += [match.span("first"), match.span("second")]
        for match in _TEMPORAL.finditer(question):
            found.append(match.span("clause"))
        for pattern in _QUOTED:
            for match in pattern.finditer(question):
                found.append(match.span("quoted"))

        keywords: list[Keyword] = []
        seen: set[str] = set()
        for start, end in sorted(found):
            text = question[start:end].rstrip()
            if not text.strip() or text in seen:
                continue
            seen.add(text)
            keywords.append(Keyword(text=text, span=(start, start + len(text))))
        return keywords
