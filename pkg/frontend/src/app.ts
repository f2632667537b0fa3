// DOM wiring for the two views. All verification logic lives on the
// server; this file only renders service responses.

import { ServiceClient, ApiError } from './api.js';
import { renderHighlights, type Segment } from './highlight.js';
import { evidenceDialog } from './dialog.js';
import { reviseButtonState, revisionPanel } from './revisions.js';
import type { ReportJson } from './types.js';

type ViewName = 'llm' | 'playground';

interface ViewState {
  report: ReportJson | null;
  pending: boolean;
}

const state: Record<ViewName, ViewState> = {
  llm: { report: null, pending: false },
  playground: { report: null, pending: false },
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function baseUrl(): string {
  const input = el<HTMLInputElement>('service-url');
  return input.value.replace(/\/+$/, '');
}

function client(): ServiceClient {
  return new ServiceClient(baseUrl());
}

function setStatus(view: ViewName, message: string, isError = false) {
  const node = el(`${view}-status`);
  node.textContent = message;
  node.classList.toggle('error', isError);
}

function renderReport(view: ViewName, report: ReportJson) {
  const panel = el(`${view}-verification`);
  panel.textContent = '';
  const segments = renderHighlights(report);
  for (const segment of segments) {
    if (!segment.verdict || !segment.colorClass) {
      panel.appendChild(document.createTextNode(segment.text));
      continue;
    }
    const mark = document.createElement('mark');
    mark.className = segment.colorClass;
    mark.textContent = segment.text;
    mark.tabIndex = 0;
    const verdict = segment.verdict;
    mark.addEventListener('click', () => openDialog(verdictTitle(segments, segment), verdict));
    panel.appendChild(mark);
  }
  if (report.incomplete) {
    const note = document.createElement('p');
    note.className = 'muted';
    note.textContent = 'Partial result: the verification budget ran out.';
    panel.appendChild(note);
  }
  syncReviseButton(view);
}

function verdictTitle(_segments: Segment[], segment: Segment): string {
  return segment.text;
}

function openDialog(surface: string, verdict: NonNullable<Segment['verdict']>) {
  const model = evidenceDialog(verdict);
  el('dialog-title').textContent = `"${surface}" — ${model.label}`;
  el('dialog-claim').textContent = model.claimText;
  el('dialog-question').textContent = model.question;
  const list = el('dialog-evidence');
  list.textContent = '';
  if (model.emptyMessage) {
    const li = document.createElement('li');
    li.className = 'muted';
    li.textContent = model.emptyMessage;
    list.appendChild(li);
  }
  for (const item of model.items) {
    const li = document.createElement('li');
    const badge = document.createElement('span');
    badge.className = item.badge === 'Supporting' ? 'badge supporting' : 'badge refuting';
    badge.textContent = `${item.badge} · ${item.origin}`;
    li.appendChild(badge);
    li.appendChild(document.createTextNode(` ${item.evidenceText}`));
    if (item.sourceLink) {
      const a = document.createElement('a');
      a.href = item.sourceLink;
      a.target = '_blank';
      a.rel = 'noopener';
      a.textContent = 'source';
      li.appendChild(document.createTextNode(' — '));
      li.appendChild(a);
    }
    if (item.passage) {
      const quote = document.createElement('blockquote');
      quote.textContent = item.passage;
      li.appendChild(quote);
    }
    list.appendChild(li);
  }
  el<HTMLDialogElement>('evidence-dialog').showModal();
}

function syncReviseButton(view: ViewName) {
  const button = el<HTMLButtonElement>(`${view}-revise`);
  const buttonState = reviseButtonState(state[view].report);
  button.disabled = !buttonState.enabled || state[view].pending;
  button.title = buttonState.tooltip ?? '';
}

function setPending(view: ViewName, pending: boolean) {
  state[view].pending = pending;
  for (const suffix of ['check', 'revise']) {
    el<HTMLButtonElement>(`${view}-${suffix}`).disabled = pending;
  }
  if (view === 'llm') {
    el<HTMLButtonElement>('llm-ask').disabled = pending;
  }
  if (!pending) syncReviseButton(view);
}

async function runCheck(view: ViewName, text: string) {
  if (!text.trim()) {
    setStatus(view, 'Nothing to check: the text is empty.', true);
    return;
  }
  setPending(view, true);
  setStatus(view, 'Checking…');
  try {
    const report = await client().verify(text);
    state[view].report = report;
    renderReport(view, report);
    const n = report.sentences.reduce((sum, s) => sum + s.verdicts.length, 0);
    setStatus(view, `${n} fact(s) checked.`);
  } catch (err) {
    state[view].report = null;
    setStatus(view, describeError(err), true);
  } finally {
    setPending(view, false);
  }
}

async function runRevise(view: ViewName) {
  const report = state[view].report;
  if (!report) return;
  setPending(view, true);
  setStatus(view, 'Revising…');
  try {
    const response = await client().revise(report);
    const model = revisionPanel(response);
    const panel = el(`${view}-revisions`);
    panel.textContent = '';
    for (const card of model.cards) {
      const div = document.createElement('div');
      div.className = 'revision-card';
      const original = document.createElement('p');
      original.append(
        document.createTextNode(card.diff.prefix),
        strike(card.diff.removed),
        document.createTextNode(card.diff.suffix),
      );
      const revised = document.createElement('p');
      revised.append(
        document.createTextNode(card.diff.prefix),
        ins(card.diff.added),
        document.createTextNode(card.diff.suffix),
      );
      const use = document.createElement('button');
      use.textContent = 'Use this revision';
      use.addEventListener('click', () => {
        selectRevision(view, card.proposal.revised);
        panel.querySelectorAll('.revision-card').forEach((c) => c.classList.remove('chosen'));
        div.classList.add('chosen');
      });
      div.append(original, revised, use);
      panel.appendChild(div);
    }
    for (const note of model.notes) {
      const p = document.createElement('p');
      p.className = 'muted';
      p.textContent = note;
      panel.appendChild(p);
    }
    setStatus(view, model.cards.length
      ? `${model.cards.length} revision alternative(s).`
      : 'No applicable revision.');
  } catch (err) {
    if (err instanceof ApiError && err.status === 422) {
      setStatus(view, 'Nothing to revise: no questionable facts.');
    } else {
      setStatus(view, describeError(err), true);
    }
  } finally {
    setPending(view, false);
  }
}

function strike(text: string): HTMLElement {
  const node = document.createElement('del');
  node.textContent = text;
  return node;
}

function ins(text: string): HTMLElement {
  const node = document.createElement('ins');
  node.textContent = text;
  return node;
}

function selectRevision(view: ViewName, revised: string) {
  el(`${view}-selected-revision`).textContent = revised;
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return err.retriable
      ? `Service error (${err.status || 'network'}): ${err.message} — try again.`
      : `Request failed (${err.status}): ${err.message}`;
  }
  return `Unexpected error: ${err}`;
}

async function askLlm() {
  const query = el<HTMLInputElement>('llm-query').value;
  if (!query.trim()) {
    setStatus('llm', 'Type a question first.', true);
    return;
  }
  setPending('llm', true);
  setStatus('llm', 'Asking the model…');
  try {
    const answer = await client().ask(query);
    el('llm-response').textContent = answer.response_text;
    setStatus('llm', 'Response received; hit Start Checking to verify it.');
  } catch (err) {
    setStatus('llm', describeError(err), true);
  } finally {
    setPending('llm', false);
  }
}

async function loadSampleQueries() {
  let samples = ['How old is Taylor Swift?'];
  try {
    const response = await fetch('./sample_queries.json');
    if (response.ok) samples = await response.json();
  } catch {
    // static file missing: keep the default chip
  }
  const bar = el('sample-queries');
  for (const sample of samples) {
    const chip = document.createElement('button');
    chip.className = 'chip';
    chip.textContent = sample;
    chip.addEventListener('click', () => {
      el<HTMLInputElement>('llm-query').value = sample;
    });
    bar.appendChild(chip);
  }
}

function switchView(view: ViewName) {
  for (const name of ['llm', 'playground'] as ViewName[]) {
    el(`view-${name}`).hidden = name !== view;
    el(`tab-${name}`).classList.toggle('active', name === view);
  }
}

export function init() {
  el('tab-llm').addEventListener('click', () => switchView('llm'));
  el('tab-playground').addEventListener('click', () => switchView('playground'));
  el('llm-ask').addEventListener('click', () => void askLlm());
  el('llm-check').addEventListener('click', () =>
    void runCheck('llm', el('llm-response').textContent ?? ''));
  el('llm-revise').addEventListener('click', () => void runRevise('llm'));
  el('playground-check').addEventListener('click', () =>
    void runCheck('playground', el<HTMLTextAreaElement>('playground-text').value));
  el('playground-revise').addEventListener('click', () => void runRevise('playground'));
  el('dialog-close').addEventListener('click', () =>
    el<HTMLDialogElement>('evidence-dialog').close());
  syncReviseButton('llm');
  syncReviseButton('playground');
  void loadSampleQueries();
  void client().health().then((ok) => {
    if (!ok) setStatus('llm', `Service not reachable at ${baseUrl()}.`, true);
  });
}

if (typeof document !== 'undefined' && document.getElementById('tab-llm')) {
  init();
}
