// Word-level diff between an original step and its simplification,
// used for the reviewer's side-by-side view. Classification is by
// longest common subsequence over word tokens; when the DP table ties,
// we take the deletion first, so output is deterministic.

export type DiffOp = "same" | "delete" | "insert";

export type DiffSpan = {
  op: DiffOp;
  text: string;
};

export function tokenize(text: string): string[] {
  return text.split(/\s+/).filter((w) => w.length > 0);
}

// suffix[i][j] = LCS length of before[i:] and after[j:]
function suffixTable(before: string[], after: string[]): number[][] {
  const n = before.length;
  const m = after.length;
  const table: number[][] = [];
  for (let i = 0; i <= n; i += 1) {
    table.push(new Array<number>(m + 1).fill(0));
  }
  for (let i = n - 1; i >= 0; i -= 1) {
    for (let j = m - 1; j >= 0; j -= 1) {
      if (before[i] === after[j]) {
        table[i][j] = table[i + 1][j + 1] + 1;
      } else {
        table[i][j] = Math.max(table[i + 1][j], table[i][j + 1]);
      }
    }
  }
  return table;
}

export function diffWords(before: string, after: string): DiffSpan[] {
  const a = tokenize(before);
  const b = tokenize(after);
  const table = suffixTable(a, b);

  const ops: { op: DiffOp; word: string }[] = [];
  let i = 0;
  let j = 0;
  while (i < a.length && j < b.length) {
    if (a[i] === b[j]) {
      ops.push({ op: "same", word: a[i] });
      i += 1;
      j += 1;
    } else if (table[i + 1][j] >= table[i][j + 1]) {
      ops.push({ op: "delete", word: a[i] });
      i += 1;
    } else {
      ops.push({ op: "insert", word: b[j] });
      j += 1;
    }
  }
  while (i < a.length) {
    ops.push({ op: "delete", word: a[i] });
    i += 1;
  }
  while (j < b.length) {
    ops.push({ op: "insert", word: b[j] });
    j += 1;
  }

  // Merge runs of the same op into spans.
  const spans: DiffSpan[] = [];
  for (const { op, word } of ops) {
    const last = spans[spans.length - 1];
    if (last !== undefined && last.op === op) {
      last.text += ` ${word}`;
    } else {
      spans.push({ op, text: word });
    }
  }
  return spans;
}

export type DiffStats = {
  same: number;
  deleted: number;
  inserted: number;
};

export function diffStats(spans: DiffSpan[]): DiffStats {
  const stats: DiffStats = { same: 0, deleted: 0, inserted: 0 };
  for (const span of spans) {
    const count = tokenize(span.text).length;
    if (span.op === "same") stats.same += count;
    else if (span.op === "delete") stats.deleted += count;
    else stats.inserted += count;
  }
  return stats;
}
