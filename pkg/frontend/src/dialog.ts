// Evidence dialog model for a clicked fact highlight.

import type { ClassifiedEvidenceJson, VerdictJson } from './types.js';
import { tripleText } from './types.js';

export interface DialogEvidenceItem {
  origin: 'KG' | 'Web';
  value: string;
  evidenceText: string;
  badge: 'Supporting' | 'NotSupporting';
  judge: 'Deterministic' | 'Llm';
  sourceLink: string | null;
  passage: string | null;
}

export interface DialogModel {
  claimText: string;
  label: string;
  question: string;
  items: DialogEvidenceItem[]; // KG items first, then web in rank order
  emptyMessage: string | null;
}

function toItem(e: ClassifiedEvidenceJson): DialogEvidenceItem {
  return {
    origin: e.evidence.origin,
    value: e.evidence.object,
    evidenceText: tripleText(e.evidence),
    badge: e.classification,
    judge: e.judge,
    sourceLink: e.evidence.web_hit ? e.evidence.web_hit.source_link : null,
    passage: e.evidence.web_hit ? e.evidence.web_hit.passage : null,
  };
}

export function evidenceDialog(verdict: VerdictJson): DialogModel {
  const kg = verdict.evidence.filter((e) => e.evidence.origin === 'KG');
  const web = verdict.evidence.filter((e) => e.evidence.origin === 'Web');
  const items = [...kg, ...web].map(toItem);
  return {
    claimText: tripleText(verdict.triple),
    label: verdict.label,
    question: verdict.question,
    items,
    emptyMessage: items.length === 0
      ? 'No evidence was retrieved for this fact.'
      : null,
  };
}
