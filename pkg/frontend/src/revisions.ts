// Revise button state and the revision panel model.

import type { ReportJson, ReviseResponseJson, RevisionProposalJson } from './types.js';

export interface ReviseButtonState {
  enabled: boolean;
  tooltip: string | null;
}

export function reviseButtonState(report: ReportJson | null): ReviseButtonState {
  if (!report) {
    return { enabled: false, tooltip: 'Run a check first.' };
  }
  const questionable = report.sentences.some((s) =>
    s.verdicts.some((v) => v.label === 'Questionable'));
  return questionable
    ? { enabled: true, tooltip: null }
    : { enabled: false, tooltip: 'Nothing to revise: no questionable facts.' };
}

export interface DiffParts {
  prefix: string;
  removed: string;
  added: string;
  suffix: string;
}

/** Common-affix diff that isolates the substituted object text. */
export function revisionDiff(original: string, revised: string): DiffParts {
  let prefixLength = 0;
  const maxPrefix = Math.min(original.length, revised.length);
  while (prefixLength < maxPrefix
    && original[prefixLength] === revised[prefixLength]) {
    prefixLength += 1;
  }
  let suffixLength = 0;
  while (suffixLength < maxPrefix - prefixLength
    && original[original.length - 1 - suffixLength] === revised[revised.length - 1 - suffixLength]) {
    suffixLength += 1;
  }
  return {
    prefix: original.slice(0, prefixLength),
    removed: original.slice(prefixLength, original.length - suffixLength),
    added: revised.slice(prefixLength, revised.length - suffixLength),
    suffix: original.slice(original.length - suffixLength),
  };
}

export interface RevisionCard {
  sentence: string;
  proposal: RevisionProposalJson;
  diff: DiffParts;
}

export interface RevisionPanelModel {
  cards: RevisionCard[];
  notes: string[];
}

export function revisionPanel(response: ReviseResponseJson): RevisionPanelModel {
  const cards: RevisionCard[] = [];
  const notes: string[] = [];
  for (const sentence of response.sentences) {
    for (const proposal of sentence.revisions) {
      cards.push({
        sentence: sentence.text,
        proposal,
        diff: revisionDiff(proposal.original, proposal.revised),
      });
    }
    if (sentence.note) {
      notes.push(`${sentence.text} — ${sentence.note}`);
    } else if (sentence.no_candidate.length > 0) {
      notes.push(`${sentence.text} — no retrieved value to revise towards.`);
    }
  }
  if (cards.length === 0 && notes.length === 0) {
    notes.push('Nothing to revise.');
  }
  return { cards, notes };
}
