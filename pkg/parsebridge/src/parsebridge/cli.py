"""Command line: parse abstract files into token-aligned parse files."""

from __future__ import annotations

import argparse
import sys

from .abstracts import read_abstracts
from .backends import select_backend
from .records import format_records, validate_parse_file


def parse_documents(in_path, out_path, errors_path=None, backend="auto"):
    """Parse every document; returns (records, [(doc id, error)]).

    Documents whose parse fails are skipped and listed in the error
    sidecar; the remaining documents are still written in input order.
    """
    label, parse_fn = select_backend(backend)
    docs = read_abstracts(in_path)
    records = []
    failures = []
    for doc in docs:
        try:
            recs = parse_fn(doc)
            if not recs and doc.text.strip():
                raise RuntimeError("produced no sentences for nonempty text")
            records.extend(recs)
        except Exception as err:
            failures.append((doc.id, f"{type(err).__name__}: {err}"))
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(format_records(records))
    if errors_path:
        with open(errors_path, "w", encoding="utf-8") as fh:
            for doc_id, message in failures:
                fh.write(f"{doc_id}\t{message}\n")
    return label, records, failures


def build_parser():
    parser = argparse.ArgumentParser(
        prog="parsebridge",
        description="Dependency-parse abstract files into the token-aligned "
        "parse format, one record per sentence.",
    )
    parser.add_argument("--in", dest="in_path", required=True,
                        help="abstract file (XML-like markup)")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="parse file to write")
    parser.add_argument("--errors", dest="errors_path",
                        help="sidecar listing skipped documents")
    parser.add_argument("--backend", default="auto",
                        choices=("auto", "spacy", "builtin"),
                        help="parser backend (auto prefers spaCy when usable)")
    parser.add_argument("--validate", action="store_true",
                        help="validate the emitted file and report violations")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    label, records, failures = parse_documents(
        args.in_path, args.out_path, args.errors_path, args.backend
    )
    print(f"backend {label}: wrote {len(records)} sentence records -> {args.out_path}")
    for doc_id, message in failures:
        print(f"skipped {doc_id}: {message}", file=sys.stderr)
    if args.validate:
        report = validate_parse_file(args.out_path)
        status = "pass" if report.ok else "FAIL"
        print(f"validation {status}: {report.n_records} records, "
              f"{len(report.violations)} violations")
        for v in report.violations:
            print(" ", v, file=sys.stderr)
        if not report.ok:
            return 2
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
