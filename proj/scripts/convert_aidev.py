#!/usr/bin/env python3
"""Convert an AIDev release to the agentprint NDJSON input schema.

Expects three tables in --data-dir, each as <name>.parquet or <name>.csv:

  pull_request        id, agent, title, body, created_at
  pr_commits          pr_id, sha, message, author
  pr_commit_details   pr_id, sha, filename, status, additions, deletions, patch

The default table names match the AIDev-pop subset; override them with
--prs/--commits/--details. Per-file rows from several commits of one PR are
merged: additions and deletions are summed, patches are concatenated in
commit order and the status of the first commit that touched the file wins.

Output: one JSON object per line,
  {"id", "agent", "title", "body", "created_at", "commits": [...], "files": [...]}
"""

import argparse
import json
import math
import pathlib
import sys

import pandas as pd

AGENT_NAMES = {
    "openai_codex": "OpenAICodex",
    "openai codex": "OpenAICodex",
    "codex": "OpenAICodex",
    "copilot": "Copilot",
    "github copilot": "Copilot",
    "devin": "Devin",
    "cursor": "Cursor",
    "claude_code": "ClaudeCode",
    "claude code": "ClaudeCode",
}

# GitHub file statuses outside the four the schema knows.
STATUS_NAMES = {"copied": "added", "changed": "modified", "unchanged": "modified"}


def read_table(data_dir, name):
    for suffix, reader in ((".parquet", pd.read_parquet), (".csv", pd.read_csv)):
        path = data_dir / (name + suffix)
        if path.exists():
            return reader(path)
    sys.exit(f"error: no {name}.parquet or {name}.csv in {data_dir}")


def text_or_none(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return str(value)


def count(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return 0
    return int(value)


def rfc3339(value):
    ts = pd.Timestamp(value)
    if ts.tzinfo is None:
        ts = ts.tz_localize("UTC")
    return ts.tz_convert("UTC").strftime("%Y-%m-%dT%H:%M:%SZ")


def agent_name(value):
    key = str(value).strip().lower()
    return AGENT_NAMES.get(key, str(value))


def convert(prs, commits, details):
    commit_order = {}
    commits_by_pr = {}
    for row in commits.itertuples(index=False):
        pr = row.pr_id
        commits_by_pr.setdefault(pr, []).append(
            {"message": text_or_none(row.message) or "", "author": text_or_none(getattr(row, "author", None)) or ""}
        )
        commit_order[(pr, row.sha)] = len(commits_by_pr[pr])

    files_by_pr = {}
    for row in details.itertuples(index=False):
        pr = row.pr_id
        if not isinstance(row.filename, str) or not row.filename:
            continue
        files = files_by_pr.setdefault(pr, {})
        order = commit_order.get((pr, row.sha), math.inf)
        entry = files.get(row.filename)
        status = str(row.status).lower() if text_or_none(row.status) else "modified"
        status = STATUS_NAMES.get(status, status)
        patch = text_or_none(row.patch)
        if entry is None:
            files[row.filename] = entry = {"order": order, "op": status, "additions": 0, "deletions": 0, "patches": []}
        elif order < entry["order"]:
            entry["order"], entry["op"] = order, status
        entry["additions"] += count(row.additions)
        entry["deletions"] += count(row.deletions)
        if patch:
            entry["patches"].append((order, patch))

    for pr in prs.itertuples(index=False):
        files = []
        for path, f in files_by_pr.get(pr.id, {}).items():
            patches = [p for _, p in sorted(f["patches"], key=lambda t: t[0])]
            files.append({
                "path": path,
                "op": f["op"],
                "additions": f["additions"],
                "deletions": f["deletions"],
                "patch": "\n".join(patches) if patches else None,
            })
        yield {
            "id": str(pr.id),
            "agent": agent_name(pr.agent),
            "title": text_or_none(pr.title) or "",
            "body": text_or_none(pr.body),
            "created_at": rfc3339(pr.created_at),
            "commits": commits_by_pr.get(pr.id, []),
            "files": files,
        }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--data-dir", required=True, type=pathlib.Path)
    parser.add_argument("--out", required=True, type=pathlib.Path)
    parser.add_argument("--prs", default="pull_request")
    parser.add_argument("--commits", default="pr_commits")
    parser.add_argument("--details", default="pr_commit_details")
    args = parser.parse_args(argv)

    prs = read_table(args.data_dir, args.prs)
    commits = read_table(args.data_dir, args.commits)
    details = read_table(args.data_dir, args.details)
    n = 0
    with open(args.out, "w", encoding="utf-8") as out:
        for record in convert(prs, commits, details):
            out.write(json.dumps(record, ensure_ascii=False) + "\n")
            n += 1
    print(f"wrote {n} records to {args.out}")


if __name__ == "__main__":
    main()
