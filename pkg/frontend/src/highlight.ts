// Document model for color-coded fact highlights.
//
// The UI never recomputes spans: highlights derive purely from the
// report, and stripping the markup must reproduce the passage exactly.

import type { ReportJson, SentenceJson, VerdictJson } from './types.js';

export type HighlightClass =
  | 'hl-strong'        // StronglySupported (green)
  | 'hl-likely'        // LikelySupported (yellow-green)
  | 'hl-questionable'  // Questionable with refuting evidence (red)
  | 'hl-unattributed'; // Questionable with no evidence at all

export interface Segment {
  text: string;
  verdict: VerdictJson | null;
  colorClass: HighlightClass | null;
  sentenceIndex: number | null; // null for text between sentences
  verdictIndex: number | null;
}

export function colorClassFor(verdict: VerdictJson): HighlightClass {
  switch (verdict.label) {
    case 'StronglySupported':
      return 'hl-strong';
    case 'LikelySupported':
      return 'hl-likely';
    default:
      return verdict.evidence.length === 0 ? 'hl-unattributed' : 'hl-questionable';
  }
}

function sentenceSegments(
  sentence: SentenceJson,
  sentenceIndex: number,
  warn: (message: string) => void,
): Segment[] {
  // Span offsets count Unicode scalar values, not UTF-16 code units, so
  // slicing must go through a code-point array.
  const chars = Array.from(sentence.text);
  const slice = (a: number, b: number) => chars.slice(a, b).join('');
  const ordered = sentence.verdicts
    .map((verdict, verdictIndex) => ({ verdict, verdictIndex }))
    .sort((a, b) => a.verdict.span.start - b.verdict.span.start);
  const segments: Segment[] = [];
  let cursor = 0;
  for (const { verdict, verdictIndex } of ordered) {
    const { start, end } = verdict.span;
    if (start < cursor || end > chars.length) {
      // malformed report: render what came first, keep the text intact
      warn(`skipping overlapping or out-of-range span [${start}, ${end})`);
      continue;
    }
    if (start > cursor) {
      segments.push({
        text: slice(cursor, start),
        verdict: null, colorClass: null, sentenceIndex, verdictIndex: null,
      });
    }
    segments.push({
      text: slice(start, end),
      verdict,
      colorClass: colorClassFor(verdict),
      sentenceIndex,
      verdictIndex,
    });
    cursor = end;
  }
  if (cursor < chars.length) {
    segments.push({
      text: slice(cursor, chars.length),
      verdict: null, colorClass: null, sentenceIndex, verdictIndex: null,
    });
  }
  return segments;
}

/**
 * Flatten a report into ordered segments over the whole passage,
 * including the text between sentences, so that concatenating
 * segment texts reproduces the passage byte for byte.
 */
export function renderHighlights(
  report: ReportJson,
  warn: (message: string) => void = (m) => console.warn(m),
): Segment[] {
  const segments: Segment[] = [];
  let cursor = 0;
  report.sentences.forEach((sentence, sentenceIndex) => {
    const at = report.passage.indexOf(sentence.text, cursor);
    if (at < 0) {
      warn(`sentence ${sentenceIndex} not found in passage; rendering it verbatim`);
      segments.push(...sentenceSegments(sentence, sentenceIndex, warn));
      return;
    }
    if (at > cursor) {
      segments.push({
        text: report.passage.slice(cursor, at),
        verdict: null, colorClass: null, sentenceIndex: null, verdictIndex: null,
      });
    }
    segments.push(...sentenceSegments(sentence, sentenceIndex, warn));
    cursor = at + sentence.text.length;
  });
  if (cursor < report.passage.length) {
    segments.push({
      text: report.passage.slice(cursor),
      verdict: null, colorClass: null, sentenceIndex: null, verdictIndex: null,
    });
  }
  return segments;
}

export function plainText(segments: Segment[]): string {
  return segments.map((s) => s.text).join('');
}
