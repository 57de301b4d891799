"""Built-in deterministic tagger and dependency parser.

A fallback for environments without a pretrained parser: regex
tokenization with character offsets, coarse POS tags from a closed-class
lexicon plus suffix rules, and verb-rooted attachment heuristics that
always produce a single-rooted acyclic tree.  Tags and labels are opaque
vocabulary items downstream, so the scheme only has to be consistent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:[-'][A-Za-z0-9]+)*|[^\sA-Za-z0-9]")

DETERMINERS = {"the", "a", "an", "this", "that", "these", "those", "its", "our",
               "their", "his", "her", "each", "every", "some", "any", "no",
               "both", "all", "such"}
PRONOUNS = {"we", "i", "you", "he", "she", "it", "they", "them", "us", "one",
            "which", "who", "what"}
AUXILIARIES = {"is", "are", "was", "were", "be", "been", "being", "am",
               "may", "might", "can", "could", "will", "would", "shall",
               "should", "must", "do", "does", "did", "have", "has", "had"}
ADPOSITIONS = {"of", "in", "on", "at", "to", "for", "with", "by", "from",
               "as", "into", "onto", "over", "under", "between", "among",
               "through", "during", "against", "without", "within", "via",
               "about", "across", "after", "before", "upon", "toward",
               "towards", "per"}
CONJUNCTIONS = {"and", "or", "but", "nor", "so", "yet", "if", "because",
                "while", "although", "whereas", "since", "when", "than",
                "that", "whether"}
ADVERBS = {"not", "also", "very", "often", "however", "thus", "therefore",
           "thereby", "then", "here", "there", "only", "further", "moreover",
           "well", "more", "most", "less", "least", "rather"}
COMMON_VERBS = {"use", "uses", "used", "show", "shows", "shown", "present",
                "presents", "presented", "propose", "proposes", "proposed",
                "describe", "describes", "described", "improve", "improves",
                "improved", "offer", "offers", "offered", "provide",
                "provides", "provided", "contain", "contains", "contained",
                "apply", "applies", "applied", "develop", "develops",
                "developed", "evaluate", "evaluates", "evaluated", "achieve",
                "achieves", "achieved", "introduce", "introduces",
                "introduced", "report", "reports", "reported", "compare",
                "compares", "compared", "find", "finds", "found", "make",
                "makes", "made", "give", "gives", "given", "take", "takes",
                "taken", "yield", "yields", "yielded", "obtain", "obtains",
                "obtained", "perform", "performs", "performed", "look",
                "looks", "looked", "covers", "cover", "covered", "allow",
                "allows", "allowed", "require", "requires", "required",
                "outperform", "outperforms", "outperformed", "consider",
                "considers", "considered", "investigate", "investigates",
                "investigated", "demonstrate", "demonstrates", "demonstrated",
                "explore", "explores", "explored", "train", "trained",
                "trains", "learn", "learns", "learned", "predict", "predicts",
                "predicted", "extract", "extracts", "extracted", "classify",
                "classifies", "classified", "parse", "parses", "parsed",
                "employ", "employs", "employed", "exhibit", "exhibits",
                "exhibited", "comprise", "comprises", "comprised", "rival",
                "rivals", "rivaled", "match", "matches", "matched", "boost",
                "boosts", "boosted", "concern", "concerns", "concerned",
                "discuss", "discusses", "discussed", "display", "displays",
                "displayed"}

_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ance", "ence",
                  "ism", "ist", "ics", "ology", "ure", "ice", "ices", "ysis")
_ADJ_SUFFIXES = ("al", "ive", "ous", "ful", "less", "able", "ible", "ic",
                 "ar", "ant", "ent", "ary")
_VERB_SUFFIXES = ("ize", "izes", "ized", "ise", "ises", "ised", "ify",
                  "ifies", "ified", "ate", "ates", "ated")


@dataclass(frozen=True)
class Token:
    form: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    return [Token(m.group(0), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


def split_sentences(tokens: list[Token]) -> list[list[Token]]:
    """Sentence boundary after . ! ? unless the next token is lowercase."""
    sentences = []
    current: list[Token] = []
    for i, tok in enumerate(tokens):
        current.append(tok)
        if tok.form in (".", "!", "?"):
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt is None or not nxt.form[:1].islower():
                sentences.append(current)
                current = []
    if current:
        sentences.append(current)
    return sentences


def tag(tokens: list[Token]) -> list[str]:
    tags = []
    for i, tok in enumerate(tokens):
        form = tok.form
        low = form.lower()
        if not form[:1].isalnum():
            tags.append("PUNCT")
        elif form[0].isdigit():
            tags.append("NUM")
        elif low in DETERMINERS:
            tags.append("DET")
        elif low in PRONOUNS:
            tags.append("PRON")
        elif low in AUXILIARIES:
            tags.append("AUX")
        elif low in ADPOSITIONS:
            tags.append("ADP")
        elif low in CONJUNCTIONS:
            tags.append("CONJ")
        elif low in ADVERBS or low.endswith("ly"):
            tags.append("ADV")
        elif low in COMMON_VERBS:
            tags.append("VERB")
        elif low.endswith(_VERB_SUFFIXES):
            tags.append("VERB")
        elif low.endswith(_NOUN_SUFFIXES):
            tags.append("NOUN")
        elif low.endswith(_ADJ_SUFFIXES):
            tags.append("ADJ")
        elif low.endswith("ing") or low.endswith("ed"):
            tags.append("VERB")
        elif tags and tags[-1] == "AUX":
            tags.append("VERB")
        else:
            tags.append("NOUN")
    return tags


def _pick_root(tags: list[str]) -> int:
    for i, t in enumerate(tags):
        if t == "VERB":
            return i
    # copular clause: predicate adjective/noun right after an auxiliary
    for i in range(1, len(tags)):
        if tags[i - 1] == "AUX" and tags[i] in ("ADJ", "NOUN", "NUM"):
            return i
    for i, t in enumerate(tags):
        if t not in ("PUNCT",):
            return i
    return 0


def _next_nominal(tags, start, root):
    for j in range(start, len(tags)):
        if j != root and tags[j] in ("NOUN", "PRON", "NUM"):
            return j
        if tags[j] == "PUNCT" and j > start:
            break
    return None


def _prev_attachment_site(tags, start):
    for j in range(start - 1, -1, -1):
        if tags[j] in ("VERB", "NOUN", "PRON", "ADJ"):
            return j
    return None


def parse(tags: list[str]) -> tuple[list[int], list[str]]:
    """Heads (0 = root, else 1-based) and labels for one tagged sentence.

    Attachment is deterministic: modifiers go to the next nominal, noun
    runs chain forward into their last member, subjects precede the root
    predicate, objects follow it, and prepositions mediate their own
    objects.  Every non-root token attaches to a different token and all
    chains terminate at the root, so the result is always a tree.
    """
    n = len(tags)
    root = _pick_root(tags)
    heads = [0] * n
    labels = ["dep"] * n
    labels[root] = "root"

    for i in range(n):
        if i == root:
            continue
        t = tags[i]
        if t == "PUNCT":
            heads[i], labels[i] = root + 1, "punct"
        elif t == "DET":
            j = _next_nominal(tags, i + 1, root)
            target = j if j is not None else root
            heads[i], labels[i] = target + 1, "det"
        elif t in ("ADJ", "NUM"):
            j = _next_nominal(tags, i + 1, root)
            if j is not None:
                heads[i], labels[i] = j + 1, "amod" if t == "ADJ" else "nummod"
            else:
                heads[i], labels[i] = root + 1, "amod"
        elif t == "AUX":
            heads[i], labels[i] = root + 1, "aux"
        elif t == "ADV":
            heads[i], labels[i] = root + 1, "advmod"
        elif t == "CONJ":
            heads[i], labels[i] = root + 1, "cc"
        elif t == "ADP":
            j = _prev_attachment_site(tags, i)
            target = j if j is not None and j != i else root
            heads[i], labels[i] = target + 1, "prep"
        elif t in ("NOUN", "PRON", "VERB"):
            if t != "VERB" and i + 1 < n and tags[i + 1] in ("NOUN", "PRON") and i + 1 != root:
                heads[i], labels[i] = i + 2, "compound"   # noun run chains forward
                continue
            prev_adp = None
            for j in range(i - 1, -1, -1):
                if tags[j] == "ADP":
                    prev_adp = j
                    break
                if tags[j] in ("VERB", "NOUN", "PRON", "PUNCT") or j == root:
                    break
            if prev_adp is not None:
                heads[i], labels[i] = prev_adp + 1, "pobj"
            elif i < root:
                heads[i], labels[i] = root + 1, "nsubj"
            else:
                heads[i], labels[i] = root + 1, "dobj"
        else:
            heads[i], labels[i] = root + 1, "dep"

    # safety net: rare rule interactions can close a cycle off the root
    # path; break each one by reattaching the revisited node to the root
    heads[root] = 0
    reaches_root = {root}
    for i in range(n):
        on_path: list[int] = []
        node = i
        while node not in reaches_root:
            if node in on_path:
                heads[node] = root + 1
                labels[node] = "dep"
                break
            on_path.append(node)
            node = heads[node] - 1
        reaches_root.update(on_path)
    return heads, labels
