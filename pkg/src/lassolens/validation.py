"""Parse explanations and check every numeric claim against the profile.

An explanation is split into a summary plus bullet lines; feature mentions
are found by normalized name matching (underscores, hyphens and spaces are
equivalent, unit suffixes like "_mm" may be dropped) and by unique keyword
phrases taken from the per-feature descriptions, so a paraphrase like
"bill depth" can still hit "culmen_depth_mm". Numbers next to a mention
become claims: "537 vs 223" pairs, percentages, currency values, ranges.

Verdicts: a claim is verified when its values match the corresponding
profile statistics (means within a relative tolerance with a 0.5 absolute
floor, proportions within two percentage points), contradicted when it is
kind-classified and matches nothing, and unverifiable otherwise. Numbers
with no matchable feature become hallucination candidates. Qualitative
phrases carry no numbers and therefore produce no claims at all; they are
deliberately left to the human reader.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ArityError, ValidationMismatchError
from .ingestion import DatasetContext
from .llm import Explanation
from .stats import CategoricalSummary, ContrastProfile, NumericalSummary

VERIFIED = "verified"
CONTRADICTED = "contradicted"
UNVERIFIABLE = "unverifiable"

MEAN_LIKE = "mean-like"
PROPORTION = "proportion"
RANGE = "range"
UNCLASSIFIED = "unclassified"

DEFAULT_TOP_K = 5
DEFAULT_REL_TOL = 0.02
PROPORTION_TOL_PP = 2.0
_ABS_FLOOR = 0.5

_BULLET_RE = re.compile(r"^\s*(?:[-*•]\s+|\d+[.)]\s+)")
_BOLD_RE = re.compile(r"\*\*([^*\n]+)\*\*")
_NUMBER_RE = re.compile(
    r"(?<![\w.])"
    r"(?:[≈~]\s?)?[€$£]?"
    r"(?P<sign>--|−|-)?"
    r"(?P<digits>\d[\d,]*(?:\.\d+)?)"
    r"(?P<mult>[kKM](?![a-zA-Z]))?"
    r"(?P<pct>\s?%)?"
)
_PAIR_GAP_RE = re.compile(r"\bvs\.?\b|\bversus\b|\bcompared\s+(?:to|with)\b", re.I)
_RANGE_DASH_RE = re.compile(r"^\s*[–—-]\s*$")
_MEAN_WORDS = ("mean", "average", "avg")
_RANGE_WORDS = ("range", "min", "max", "minimum", "maximum", "between")
_SOFT_WORDS = ("median", "std", "deviation", "ks")

_UNIT_TOKENS = {"g", "kg", "mm", "cm", "m", "s", "sec", "ms", "eur", "usd", "pct"}
_STOPWORDS = {
    "the", "and", "for", "with", "from", "that", "this", "are", "was", "has",
    "have", "per", "each", "its", "their", "not", "all", "any", "one", "two",
    "value", "values", "number", "total", "count", "whether", "does", "did",
    "how", "many", "between", "into", "about", "over", "under", "more",
    "less", "than", "when", "where", "who", "also", "only", "including",
    "customer", "customers", "row", "rows", "dataset", "column", "feature",
}


@dataclass
class ParsedExplanation:
    summary: str
    bullets: list[str]
    bold_terms: list[str]
    word_count: int
    format_ok: bool
    segments: list[tuple[str, int]] = field(default_factory=list)  # (text, offset)


def parse_explanation(raw_text: str) -> ParsedExplanation:
    """Split markdown-ish structure; never fails, malformed text just sets
    format_ok to False."""
    bullets: list[str] = []
    summary_lines: list[str] = []
    segments: list[tuple[str, int]] = []

    offset = 0
    for line in raw_text.splitlines(keepends=True):
        stripped = line.rstrip("\n")
        if stripped.strip():
            marker = _BULLET_RE.match(stripped)
            if marker:
                body = stripped[marker.end():]
                bullets.append(body)
                segments.append((body, offset + marker.end()))
            else:
                summary_lines.append(stripped.strip())
                segments.append((stripped, offset))
        offset += len(line)

    word_count = len(raw_text.split())
    return ParsedExplanation(
        summary=" ".join(summary_lines),
        bullets=bullets,
        bold_terms=_BOLD_RE.findall(raw_text),
        word_count=word_count,
        format_ok=3 <= len(bullets) <= 5 and word_count < 200,
        segments=segments,
    )


@dataclass
class NumericClaim:
    feature: str  # matched feature name, or the unmatched token
    matched: bool
    values: tuple[float, ...]  # one or two numbers
    claim_kind: str
    span: tuple[int, int]  # character offsets into raw_text
    text: str
    is_percent: bool = False


def _normalize(name: str) -> str:
    return re.sub(r"[\s_\-]+", " ", name.strip().lower())


def _alias_pattern(phrase: str) -> re.Pattern:
    # markdown emphasis may sit inside a phrase: "no **housing** loan"
    tokens = [re.escape(t) for t in phrase.split(" ")]
    return re.compile(r"\b" + r"[\s_\-*`]+".join(tokens) + r"\b", re.I)


def _name_aliases(feature: str) -> list[str]:
    base = _normalize(feature)
    aliases = [base]
    tokens = base.split(" ")
    if len(tokens) >= 2 and tokens[-1] in _UNIT_TOKENS:
        aliases.append(" ".join(tokens[:-1]))
    return aliases


def _description_phrases(description: str) -> set[str]:
    words = [w for w in re.findall(r"[a-z]+", description.lower())]
    phrases: set[str] = set()
    for n in (2, 3):
        for i in range(len(words) - n + 1):
            gram = words[i : i + n]
            if gram[0] in _STOPWORDS or gram[-1] in _STOPWORDS:
                continue
            phrases.add(" ".join(gram))
    for w in words:
        if len(w) >= 4 and w not in _STOPWORDS:
            phrases.add(w)
    return phrases


def build_feature_matchers(
    features: list[str], context: DatasetContext | None = None
) -> list[tuple[re.Pattern, str]]:
    """Compiled (pattern, feature) matchers, longest phrases first.

    Description keywords are only used when they identify exactly one
    feature; ambiguous words match nothing rather than guessing.
    """
    alias_map: dict[str, set[str]] = {}
    for feature in features:
        for alias in _name_aliases(feature):
            alias_map.setdefault(alias, set()).add(feature)

    name_aliases = set(alias_map)
    if context is not None:
        keyword_claims: dict[str, set[str]] = {}
        for feature in features:
            description = context.per_feature.get(feature, "")
            for phrase in _description_phrases(description):
                keyword_claims.setdefault(phrase, set()).add(feature)
        for phrase, owners in keyword_claims.items():
            if len(owners) == 1 and phrase not in name_aliases:
                alias_map.setdefault(phrase, set()).update(owners)

    matchers = []
    for alias, owners in alias_map.items():
        if len(owners) != 1:
            continue
        matchers.append((_alias_pattern(alias), next(iter(owners)), len(alias)))
    matchers.sort(key=lambda m: -m[2])
    return [(pattern, feature) for pattern, feature, _ in matchers]


def _find_mentions(
    text: str, matchers: list[tuple[re.Pattern, str]]
) -> list[tuple[int, int, str]]:
    found: list[tuple[int, int, str]] = []
    for pattern, feature in matchers:
        for match in pattern.finditer(text):
            span = (match.start(), match.end())
            if any(s < span[1] and span[0] < e for s, e, _ in found):
                continue  # longer aliases were matched first
            found.append((span[0], span[1], feature))
    found.sort()
    return found


def _parse_number(match: re.Match) -> tuple[float, bool]:
    value = float(match.group("digits").replace(",", ""))
    if match.group("sign"):
        value = -value
    mult = match.group("mult")
    if mult in ("k", "K"):
        value *= 1e3
    elif mult == "M":
        value *= 1e6
    return value, match.group("pct") is not None


def _group_numbers(text: str):
    """Yield (values, span, is_percent, is_range) groups of 1-2 numbers."""
    matches = list(_NUMBER_RE.finditer(text))
    i = 0
    while i < len(matches):
        current = matches[i]
        if i + 1 < len(matches):
            nxt = matches[i + 1]
            gap = text[current.end() : nxt.start()]
            v1, p1 = _parse_number(current)
            v2, p2 = _parse_number(nxt)
            if _RANGE_DASH_RE.fullmatch(gap) or gap.strip().lower() == "to":
                yield (v1, v2), (current.start(), nxt.end()), p1 or p2, True
                i += 2
                continue
            if len(gap) <= 40 and _PAIR_GAP_RE.search(gap):
                yield (v1, v2), (current.start(), nxt.end()), p1 or p2, False
                i += 2
                continue
        value, pct = _parse_number(current)
        yield (value,), (current.start(), current.end()), pct, False
        i += 1


def _classify(window: str, is_percent: bool, is_range: bool, pair: bool) -> str:
    window = window.lower()
    if any(w in window for w in _SOFT_WORDS):
        return UNCLASSIFIED
    if is_percent or "percent" in window or "proportion" in window:
        return PROPORTION
    if is_range or any(re.search(rf"\b{w}\b", window) for w in _RANGE_WORDS):
        return RANGE
    if pair or any(w in window for w in _MEAN_WORDS):
        return MEAN_LIKE
    return UNCLASSIFIED


def _token_before(text: str, position: int) -> str:
    words = re.findall(r"[A-Za-z_][A-Za-z_\-]*", text[:position])
    skip = {"is", "was", "of", "the", "at", "mean", "average", "averages",
            "vs", "a", "an", "in", "to", "and", "with", "than", "about",
            "are", "have", "has", "around", "roughly"}
    for word in reversed(words):
        if word.lower() not in skip:
            return word
    return "unknown"


def _unmatched_token(text: str, start: int) -> str:
    """Best hallucination candidate for a number with no feature mention:
    the nearest bold term, else the nearest preceding content word."""
    bolds = [(m.start(), m.group(1).strip()) for m in _BOLD_RE.finditer(text)]
    preceding = [term for pos, term in bolds if pos <= start]
    if preceding:
        return preceding[-1]
    if bolds:
        return bolds[0][1]
    return _token_before(text, start)


def extract_claims(
    parsed: ParsedExplanation,
    features: list[str],
    context: DatasetContext | None = None,
) -> list[NumericClaim]:
    matchers = build_feature_matchers(features, context)
    claims: list[NumericClaim] = []

    for text, offset in parsed.segments:
        mentions = _find_mentions(text, matchers)
        for values, (start, end), is_percent, is_range in _group_numbers(text):
            preceding = [m for m in mentions if m[0] <= start]
            following = [m for m in mentions if m[0] > start]
            if preceding:
                feature = preceding[-1][2]
                matched = True
            elif following:
                feature = following[0][2]
                matched = True
            else:
                feature = _unmatched_token(text, start)
                matched = False
            window = text[max(0, start - 40) : min(len(text), end + 15)]
            kind = _classify(window, is_percent, is_range, pair=len(values) == 2)
            claims.append(
                NumericClaim(
                    feature=feature,
                    matched=matched,
                    values=tuple(float(v) for v in values),
                    claim_kind=kind,
                    span=(offset + start, offset + end),
                    text=text[start:end],
                    is_percent=is_percent,
                )
            )
    return claims


def mentioned_features(
    parsed: ParsedExplanation,
    features: list[str],
    context: DatasetContext | None = None,
) -> set[str]:
    matchers = build_feature_matchers(features, context)
    found: set[str] = set()
    for text, _ in parsed.segments:
        found.update(feature for _, _, feature in _find_mentions(text, matchers))
    return found


def _close(value: float, truth: float, tol_rel: float) -> bool:
    return abs(value - truth) <= max(tol_rel * abs(truth), _ABS_FLOOR)


def _close_strict(value: float, truth: float, tol_rel: float) -> bool:
    return abs(value - truth) <= tol_rel * abs(truth)


def _percent_scales(value: float) -> list[float]:
    # "57%" arrives as 57; "0.57 proportion" arrives as 0.57
    return [value, value * 100.0] if abs(value) <= 1.0 else [value]


@dataclass
class ClaimVerdict:
    claim: NumericClaim
    verdict: str
    expected: str = ""

    def to_dict(self) -> dict:
        return {
            "feature": self.claim.feature,
            "matched": self.claim.matched,
            "values": list(self.claim.values),
            "claim_kind": self.claim.claim_kind,
            "span": list(self.claim.span),
            "text": self.claim.text,
            "verdict": self.verdict,
            "expected": self.expected,
        }


def _judge_numerical(
    claim: NumericClaim, summary: NumericalSummary, tol_rel: float
) -> ClaimVerdict:
    sel, rest = summary.selected, summary.rest
    if summary.insufficient or sel.mean is None or rest.mean is None:
        return ClaimVerdict(claim, UNVERIFIABLE, "insufficient data on one side")

    expected = f"mean {sel.mean:.6g} (selected) vs {rest.mean:.6g} (rest)"
    values = claim.values
    kind = claim.claim_kind

    if len(values) == 2:
        x, y = values
        if kind == RANGE:
            lo, hi = min(x, y), max(x, y)
            tol = max(tol_rel * max(abs(lo), abs(hi)), _ABS_FLOOR)
            means_in = any(
                lo - tol <= m <= hi + tol for m in (sel.mean, rest.mean)
            )
            minmax = any(
                _close(lo, side.min, tol_rel) and _close(hi, side.max, tol_rel)
                for side in (sel, rest)
            )
            if means_in or minmax:
                return ClaimVerdict(claim, VERIFIED, expected)
            return ClaimVerdict(claim, CONTRADICTED, expected)
        if kind in (MEAN_LIKE, UNCLASSIFIED):
            straight = _close(x, sel.mean, tol_rel) and _close(y, rest.mean, tol_rel)
            flipped = _close(x, rest.mean, tol_rel) and _close(y, sel.mean, tol_rel)
            if straight or flipped:
                return ClaimVerdict(claim, VERIFIED, expected)
            return ClaimVerdict(claim, CONTRADICTED, expected)
        # proportion pair against a numerical feature: nothing to check
        return ClaimVerdict(claim, UNVERIFIABLE, "no proportion ground truth")

    (x,) = values
    if kind == MEAN_LIKE:
        if _close(x, sel.mean, tol_rel) or _close(x, rest.mean, tol_rel):
            return ClaimVerdict(claim, VERIFIED, expected)
        return ClaimVerdict(claim, CONTRADICTED, expected)
    if kind == RANGE:
        anchors = [v for side in (sel, rest) for v in (side.min, side.max)]
        if any(_close(x, a, tol_rel) for a in anchors):
            return ClaimVerdict(claim, VERIFIED, expected)
        return ClaimVerdict(claim, CONTRADICTED, expected)
    if kind == PROPORTION:
        return ClaimVerdict(claim, UNVERIFIABLE, "no proportion ground truth")
    # unclassified single number: verify against any statistic, strictly
    anchors = [
        v
        for side in (sel, rest)
        for v in (side.mean, side.min, side.max, side.std)
        if v is not None
    ]
    if summary.ks is not None:
        anchors.append(summary.ks)
    if any(_close_strict(x, a, tol_rel) for a in anchors):
        return ClaimVerdict(claim, VERIFIED, expected)
    return ClaimVerdict(claim, UNVERIFIABLE, expected)


def _judge_categorical(
    claim: NumericClaim, summary: CategoricalSummary, tol_rel: float
) -> ClaimVerdict:
    if summary.insufficient:
        return ClaimVerdict(claim, UNVERIFIABLE, "insufficient data on one side")

    sel_pct = {c: 100.0 * p for c, p in summary.proportions("selected").items()}
    rest_pct = {c: 100.0 * p for c, p in summary.proportions("rest").items()}
    top = max(sel_pct, key=lambda c: (sel_pct[c], c))
    expected = (
        f"shares e.g. {top}: {sel_pct[top]:.1f}% (selected) "
        f"vs {rest_pct[top]:.1f}% (rest)"
    )
    values = claim.values
    kind = claim.claim_kind

    def share_match(x: float, y: float) -> bool:
        for c in summary.ordering:
            for a, b in ((sel_pct[c], rest_pct[c]), (rest_pct[c], sel_pct[c])):
                for xs in _percent_scales(x):
                    for ys in _percent_scales(y):
                        if (
                            abs(xs - a) <= PROPORTION_TOL_PP
                            and abs(ys - b) <= PROPORTION_TOL_PP
                        ):
                            return True
        return False

    def count_match(x: float, y: float) -> bool:
        return any(
            (
                _close(x, summary.selected_counts[c], tol_rel)
                and _close(y, summary.rest_counts[c], tol_rel)
            )
            or (
                _close(x, summary.rest_counts[c], tol_rel)
                and _close(y, summary.selected_counts[c], tol_rel)
            )
            for c in summary.ordering
        )

    if len(values) == 2:
        x, y = values
        if kind == RANGE:
            lo, hi = min(x, y), max(x, y)
            shares = list(sel_pct.values()) + list(rest_pct.values())
            in_range = any(
                lo - PROPORTION_TOL_PP <= s <= hi + PROPORTION_TOL_PP
                for s in shares
            )
            return ClaimVerdict(claim, VERIFIED if in_range else UNVERIFIABLE, expected)
        if share_match(x, y) or count_match(x, y):
            return ClaimVerdict(claim, VERIFIED, expected)
        if kind == UNCLASSIFIED:
            return ClaimVerdict(claim, UNVERIFIABLE, expected)
        return ClaimVerdict(claim, CONTRADICTED, expected)

    (x,) = values
    all_shares = list(sel_pct.values()) + list(rest_pct.values())
    share_hit = any(
        abs(xs - s) <= PROPORTION_TOL_PP
        for s in all_shares
        for xs in _percent_scales(x)
    )
    count_hit = any(
        _close(x, c, tol_rel)
        for counts in (summary.selected_counts, summary.rest_counts)
        for c in counts.values()
    )
    if kind == PROPORTION:
        if share_hit:
            return ClaimVerdict(claim, VERIFIED, expected)
        return ClaimVerdict(claim, CONTRADICTED, expected)
    if kind in (MEAN_LIKE, RANGE):
        if share_hit or count_hit:
            return ClaimVerdict(claim, VERIFIED, expected)
        return ClaimVerdict(claim, CONTRADICTED, expected)
    if share_hit or count_hit:
        return ClaimVerdict(claim, VERIFIED, expected)
    return ClaimVerdict(claim, UNVERIFIABLE, expected)


@dataclass
class ConsistencyMetrics:
    trials: int
    jaccard: float
    features_in_all: list[str]
    features_missing_somewhere: list[str]
    value_consistency: dict[str, bool]
    all_values_consistent: bool

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "jaccard": self.jaccard,
            "features_in_all": self.features_in_all,
            "features_missing_somewhere": self.features_missing_somewhere,
            "value_consistency": self.value_consistency,
            "all_values_consistent": self.all_values_consistent,
        }


@dataclass
class ValidationReport:
    verdicts: list[ClaimVerdict]
    mention_precision: float
    mention_recall: float
    mentioned: list[str]
    top_features: list[str]
    hallucinated_features: list[str]
    format_ok: bool
    word_count: int
    bullet_count: int
    trial_consistency: ConsistencyMetrics | None = None

    def count(self, verdict: str) -> int:
        return sum(1 for v in self.verdicts if v.verdict == verdict)

    def to_dict(self) -> dict:
        return {
            "claims": [v.to_dict() for v in self.verdicts],
            "verified": self.count(VERIFIED),
            "contradicted": self.count(CONTRADICTED),
            "unverifiable": self.count(UNVERIFIABLE),
            "mention_precision": self.mention_precision,
            "mention_recall": self.mention_recall,
            "mentioned": self.mentioned,
            "top_features": self.top_features,
            "hallucinated_features": self.hallucinated_features,
            "format_ok": self.format_ok,
            "word_count": self.word_count,
            "bullet_count": self.bullet_count,
            "trial_consistency": (
                self.trial_consistency.to_dict() if self.trial_consistency else None
            ),
        }


def validate(
    explanation: Explanation,
    profile: ContrastProfile,
    k: int = DEFAULT_TOP_K,
    tol_rel: float = DEFAULT_REL_TOL,
    context: DatasetContext | None = None,
) -> ValidationReport:
    if explanation.mask_id and explanation.mask_id != profile.mask_id:
        raise ValidationMismatchError(
            f"explanation was generated for mask {explanation.mask_id!r}, "
            f"profile is for {profile.mask_id!r}"
        )

    parsed = parse_explanation(explanation.raw_text)
    features = [s.feature for s in profile.summaries]
    claims = extract_claims(parsed, features, context)
    mentioned = mentioned_features(parsed, features, context)

    verdicts: list[ClaimVerdict] = []
    hallucinated: list[str] = []
    for claim in claims:
        if not claim.matched:
            if claim.feature not in hallucinated:
                hallucinated.append(claim.feature)
            verdicts.append(
                ClaimVerdict(claim, UNVERIFIABLE, "no matching dataset feature")
            )
            continue
        summary = profile.summary_for(claim.feature)
        if isinstance(summary, NumericalSummary):
            verdicts.append(_judge_numerical(claim, summary, tol_rel))
        else:
            verdicts.append(_judge_categorical(claim, summary, tol_rel))

    ranked_with_ks = [
        name for name in profile.ranking if profile.summary_for(name).ks is not None
    ]
    top = ranked_with_ks[: max(k, 0)]
    hits = mentioned & set(top)
    precision = len(hits) / len(mentioned) if mentioned else 0.0
    recall = len(hits) / len(top) if top else 0.0

    return ValidationReport(
        verdicts=verdicts,
        mention_precision=precision,
        mention_recall=recall,
        mentioned=sorted(mentioned),
        top_features=top,
        hallucinated_features=hallucinated,
        format_ok=parsed.format_ok,
        word_count=parsed.word_count,
        bullet_count=len(parsed.bullets),
    )


def trial_consistency(
    explanations: list[Explanation],
    profile: ContrastProfile,
    context: DatasetContext | None = None,
    tol_rel: float = DEFAULT_REL_TOL,
) -> ConsistencyMetrics:
    """Agreement of feature mentions and claim values across repeat trials."""
    if len(explanations) < 2:
        raise ArityError(
            f"consistency needs at least 2 explanations, got {len(explanations)}"
        )

    features = [s.feature for s in profile.summaries]
    per_trial_mentions: list[set[str]] = []
    per_trial_values: list[dict[str, tuple[float, ...]]] = []
    for explanation in explanations:
        parsed = parse_explanation(explanation.raw_text)
        per_trial_mentions.append(mentioned_features(parsed, features, context))
        first_values: dict[str, tuple[float, ...]] = {}
        for claim in extract_claims(parsed, features, context):
            if claim.matched and claim.feature not in first_values:
                first_values[claim.feature] = claim.values
        per_trial_values.append(first_values)

    union = set().union(*per_trial_mentions)
    intersection = set(per_trial_mentions[0]).intersection(*per_trial_mentions[1:])
    jaccard = len(intersection) / len(union) if union else 1.0

    value_consistency: dict[str, bool] = {}
    for feature in sorted(union):
        observed = [v[feature] for v in per_trial_values if feature in v]
        if len(observed) < 2:
            continue
        first = observed[0]
        agree = all(
            len(other) == len(first)
            and all(_close(a, b, tol_rel) for a, b in zip(first, other))
            for other in observed[1:]
        )
        value_consistency[feature] = agree

    return ConsistencyMetrics(
        trials=len(explanations),
        jaccard=jaccard,
        features_in_all=sorted(intersection),
        features_missing_somewhere=sorted(union - intersection),
        value_consistency=value_consistency,
        all_values_consistent=all(value_consistency.values())
        if value_consistency
        else True,
    )


def report_to_text(report: ValidationReport) -> str:
    """Human-readable verdict table for the CLI bench output."""
    lines = [
        f"format_ok={report.format_ok} bullets={report.bullet_count} "
        f"words={report.word_count}",
        f"claims: verified={report.count(VERIFIED)} "
        f"contradicted={report.count(CONTRADICTED)} "
        f"unverifiable={report.count(UNVERIFIABLE)}",
        f"mention precision={report.mention_precision:.2f} "
        f"recall={report.mention_recall:.2f} (top: {', '.join(report.top_features)})",
    ]
    if report.hallucinated_features:
        lines.append("hallucinated: " + ", ".join(report.hallucinated_features))
    for v in report.verdicts:
        values = " vs ".join(f"{x:g}" for x in v.claim.values)
        lines.append(
            f"  [{v.verdict:12s}] {v.claim.feature}: {values} "
            f"({v.claim.claim_kind}) expected {v.expected}"
        )
    if report.trial_consistency is not None:
        tc = report.trial_consistency
        lines.append(
            f"consistency over {tc.trials} trials: jaccard={tc.jaccard:.2f} "
            f"values_consistent={tc.all_values_consistent}"
        )
    return "\n".join(lines)
