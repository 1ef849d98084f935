#!/usr/bin/env node
// Text-mode SMT-LIB v2 front end for the WebAssembly build of Z3.
//
// Reads commands from stdin and prints exactly one answer line per
// (check-sat), mirroring the behaviour of `z3 -in`:
//
//   sat | unsat | unknown | (error "...")
//
// (reset) clears all accumulated commands, (exit) terminates.  Because the
// wasm API keeps parser state alive inside a context, every (check-sat)
// replays the accumulated script into a fresh context; at the scale of one
// verification condition per query this costs less than a millisecond of
// overhead and keeps queries perfectly isolated.
//
// The per-query time budget is read from INVFORGE_BUDGET_MS (milliseconds,
// default 10000) and mapped to Z3's internal soft timeout, so a hard query
// answers `unknown` instead of hanging.

'use strict';

const path = require('path');
const { init } = require(path.join(__dirname, 'node_modules', 'z3-solver'));

const budgetMs = (() => {
  const v = parseInt(process.env.INVFORGE_BUDGET_MS || '10000', 10);
  return Number.isFinite(v) && v > 0 ? v : 10000;
})();

// Splits an incoming character stream into top-level s-expressions /
// atoms.  Understands "..." string literals, |...| quoted symbols and
// ; line comments.
class SexprScanner {
  constructor() {
    this.depth = 0;
    this.buf = '';
    this.mode = 'normal'; // normal | string | qsymbol | comment
    this.items = [];
  }

  feed(chunk) {
    for (const ch of chunk) {
      if (this.mode === 'comment') {
        if (ch === '\n') this.mode = 'normal';
        continue;
      }
      if (this.mode === 'string') {
        this.buf += ch;
        if (ch === '"') this.mode = 'normal';
        continue;
      }
      if (this.mode === 'qsymbol') {
        this.buf += ch;
        if (ch === '|') this.mode = 'normal';
        continue;
      }
      switch (ch) {
        case ';':
          this.mode = 'comment';
          break;
        case '"':
          this.mode = 'string';
          this.buf += ch;
          break;
        case '|':
          this.mode = 'qsymbol';
          this.buf += ch;
          break;
        case '(':
          this.depth += 1;
          this.buf += ch;
          break;
        case ')':
          this.depth -= 1;
          this.buf += ch;
          if (this.depth <= 0) {
            this.items.push(this.buf.trim());
            this.buf = '';
            this.depth = 0;
          }
          break;
        default:
          if (/\s/.test(ch) && this.depth === 0) {
            if (this.buf.trim().length) {
              this.items.push(this.buf.trim());
              this.buf = '';
            }
          } else {
            this.buf += ch;
          }
      }
    }
    const out = this.items;
    this.items = [];
    return out;
  }
}

function headSymbol(cmd) {
  const m = /^\(\s*([a-zA-Z-]+)/.exec(cmd);
  return m ? m[1] : cmd;
}

(async () => {
  const { Z3 } = await init();
  Z3.global_param_set('timeout', String(budgetMs));

  let pending = [];

  async function answer(script) {
    const cfg = Z3.mk_config();
    const ctx = Z3.mk_context(cfg);
    let out;
    try {
      out = await Z3.eval_smtlib2_string(ctx, script);
    } catch (e) {
      out = `(error "${String(e).replace(/["\\\n]/g, ' ')}")`;
    } finally {
      try { Z3.del_context(ctx); } catch (_) { /* already gone */ }
    }
    const lines = String(out).split('\n').map((l) => l.trim()).filter((l) => l.length);
    for (let i = lines.length - 1; i >= 0; i--) {
      if (lines[i] === 'sat' || lines[i] === 'unsat' || lines[i] === 'unknown') {
        return lines[i];
      }
    }
    const err = lines.find((l) => l.startsWith('(error')) || '(error "no answer")';
    if (process.env.INVFORGE_Z3_DEBUG) {
      try {
        require('fs').appendFileSync(
          process.env.INVFORGE_Z3_DEBUG,
          '=== ' + err + '\n' + script + '\n=== end\n');
      } catch (_) { /* diagnostics only */ }
    }
    return err.replace(/\n/g, ' ');
  }

  const scanner = new SexprScanner();
  process.stdin.setEncoding('utf8');

  for await (const chunk of process.stdin) {
    for (const cmd of scanner.feed(chunk)) {
      const head = headSymbol(cmd);
      if (head === 'exit') {
        process.exit(0);
      } else if (head === 'reset') {
        pending = [];
      } else if (head === 'check-sat') {
        // The wasm eval occasionally misparses a well-formed script (the
        // reported error column drifts between runs).  Queries are
        // deterministic and side-effect free, so an (error ...) answer is
        // retried in a fresh context before being reported.
        const script = pending.join('\n') + '\n(check-sat)\n';
        let verdict = await answer(script);
        for (let attempt = 0; verdict.startsWith('(error') && attempt < 3; attempt++) {
          verdict = await answer(script);
        }
        process.stdout.write(verdict + '\n');
      } else {
        pending.push(cmd);
      }
    }
  }
  process.exit(0);
})().catch((e) => {
  process.stderr.write('fatal: ' + String(e) + '\n');
  process.exit(1);
});
