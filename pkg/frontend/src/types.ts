// Wire types mirroring the service's canonical JSON.

export type VerdictLabel = 'StronglySupported' | 'LikelySupported' | 'Questionable';

export interface TripleJson {
  subject: string;
  predicate: string;
  predicate_id: string | null;
  predicate_attr: string | null;
  object: string;
}

export interface WebHitJson {
  passage: string;
  short_answer: string;
  source_link: string;
}

export interface EvidenceTripleJson extends TripleJson {
  origin: 'KG' | 'Web';
  web_hit: WebHitJson | null;
}

export interface ClassifiedEvidenceJson {
  evidence: EvidenceTripleJson;
  classification: 'Supporting' | 'NotSupporting';
  judge: 'Deterministic' | 'Llm';
}

export interface SpanJson {
  start: number;
  end: number;
}

export interface VerdictJson {
  triple: TripleJson;
  label: VerdictLabel;
  span: SpanJson;
  evidence: ClassifiedEvidenceJson[];
  question: string;
}

export interface SentenceJson {
  text: string;
  verdicts: VerdictJson[];
}

export interface ReportJson {
  passage: string;
  sentences: SentenceJson[];
  provenance: string;
  extraction_diagnostics: Record<string, number>;
  verification_diagnostics: Record<string, number>;
  incomplete: boolean;
}

export interface RevisionProposalJson {
  original: string;
  revised: string;
  src: TripleJson;
  dest: EvidenceTripleJson;
  checks: { drops_src: boolean; adds_dest: boolean; preserves_others: boolean };
}

export interface ReviseSentenceJson {
  text: string;
  revisions: RevisionProposalJson[];
  no_candidate: TripleJson[];
  failed: { triple: TripleJson; error: string }[];
  rejected: number;
  note?: string;
}

export interface ReviseResponseJson {
  sentences: ReviseSentenceJson[];
}

export function tripleText(t: TripleJson): string {
  const parts = t.predicate_id !== null
    ? [t.subject, t.predicate, t.predicate_id, t.predicate_attr ?? '', t.object]
    : [t.subject, t.predicate, t.object];
  return `(${parts.join('; ')})`;
}
