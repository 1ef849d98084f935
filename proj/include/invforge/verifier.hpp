#ifndef INVFORGE_VERIFIER_HPP
#define INVFORGE_VERIFIER_HPP

// Candidate checking: instrument the procedure with a candidate declared as
// an invariant of all its loops, discharge each instance's initiation and
// consecution obligations through the solver, and iterate the fixpoint that
// removes every failing instance and re-checks the rest.  A candidate counts
// as verified iff at least one instance survives with all obligations valid.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <invforge/analysis.hpp>
#include <invforge/ast.hpp>
#include <invforge/error.hpp>
#include <invforge/smtlib.hpp>
#include <invforge/solver.hpp>
#include <invforge/typecheck.hpp>
#include <invforge/weakening.hpp>
#include <invforge/wp.hpp>

namespace invforge {

// A candidate attached to every loop of the procedure.  `typed` is the
// candidate formula as type-checked in the procedure's scope.
struct InstrumentedProcedure {
  Candidate candidate;
  ExprPtr typed;
  std::set<std::string> instances;
};

struct InstrumentOutcome {
  bool ok = false;
  std::string diagnostic;
  InstrumentedProcedure ip;
};

inline InstrumentOutcome instrument(const Program& prog, const ProcedureDecl& proc,
                                    const Candidate& cand) {
  InstrumentOutcome out;
  try {
    out.ip.typed = check_in_proc(prog, proc, cand.formula);
  } catch (const Error& e) {
    out.diagnostic = e.what();
    return out;
  }
  out.ok = true;
  out.ip.candidate = cand;
  for (const LoopInfo& l : all_loops(prog, proc)) out.ip.instances.insert(l.id);
  return out;
}

struct VcResult {
  VerificationCondition vc;
  Verdict verdict;
};

struct FixpointRound {
  std::vector<std::string> instances;  // carrying the candidate this round
  std::vector<VcResult> checks;        // loop order, initiation then consecution
  std::vector<std::string> removed;
};

enum class CandidateStatus { Verified, Rejected, Unknown, Error, Discarded };

inline const char* status_name(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::Verified: return "verified";
    case CandidateStatus::Rejected: return "rejected";
    case CandidateStatus::Unknown: return "unknown";
    case CandidateStatus::Error: return "error";
    default: return "discarded";
  }
}

struct CandidateResult {
  Candidate candidate;
  CandidateStatus status = CandidateStatus::Rejected;
  std::string diagnostic;
  std::set<std::string> surviving;
  std::vector<FixpointRound> rounds;
  double wall_seconds = 0.0;
  bool assumed_support = false;  // verified only with other invariants assumed
};

struct InferenceReport {
  std::string file;
  std::string procedure;
  HeuristicLevel level;
  size_t candidate_count = 0;
  std::vector<CandidateResult> candidates;  // candidate order
  double wall_seconds = 0.0;

  std::vector<size_t> with_status(CandidateStatus s) const {
    std::vector<size_t> idx;
    for (size_t i = 0; i < candidates.size(); ++i)
      if (candidates[i].status == s) idx.push_back(i);
    return idx;
  }
};

struct VerifyOptions {
  std::string solver_path;
  std::chrono::milliseconds budget{10000};
  int jobs = 1;
  bool assume_verified = false;
  std::string keep_scripts_dir;  // empty = do not keep scripts
};

// Writes emitted scripts to a directory for audit, one file per obligation.
class ScriptSink {
 public:
  ScriptSink(std::string dir, std::string proc) : dir_(std::move(dir)), proc_(std::move(proc)) {
    std::filesystem::create_directories(dir_);
  }

  void write(size_t cand_idx, int round, const VerificationCondition& vc,
             const std::string& script) const {
    std::string name = proc_;
    name += "-c" + std::to_string(cand_idx);
    name += "-r" + std::to_string(round);
    name += '-';
    for (char c : vc.loop_id) name += (c == '#' || c == '.' || c == '/') ? '_' : c;
    name += '-';
    name += vc.obligation;
    name += ".smt2";
    std::ofstream out(std::filesystem::path(dir_) / name);
    out << script;
  }

 private:
  std::string dir_;
  std::string proc_;
};

// Runs the remove-failing-instances fixpoint for one candidate.  Returns
// whether any obligation came back Unknown along the way; final survivors
// and the per-round log land in `res`.
inline bool run_fixpoint(const Program& prog, const ProcedureDecl& proc,
                         const std::vector<LoopInfo>& loops, const ExprPtr& cand,
                         const HeadFacts& extra, Solver& solver, CandidateResult* res,
                         const ScriptSink* sink = nullptr, size_t cand_idx = 0) {
  res->rounds.clear();
  res->surviving.clear();
  std::set<std::string> instances;
  for (const LoopInfo& l : loops) instances.insert(l.id);
  bool saw_unknown = false;
  int round_no = 0;
  while (!instances.empty()) {
    HeadFacts facts = declared_facts(loops);
    for (const auto& [id, fs] : extra)
      for (const ExprPtr& f : fs) facts[id].push_back(f);
    for (const std::string& id : instances) facts[id].push_back(cand);
    VcGen gen(prog, proc, facts);

    FixpointRound round;
    round.instances.assign(instances.begin(), instances.end());
    std::set<std::string> removed;
    for (const LoopInfo& l : loops) {
      if (!instances.count(l.id)) continue;
      VerificationCondition vcs[2] = {gen.initiation(l, cand), gen.consecution(l, cand)};
      for (VerificationCondition& vc : vcs) {
        std::string script = emit_smtlib(vc, prog, proc);
        if (sink) sink->write(cand_idx, round_no, vc, script);
        Verdict v = solver.check_script(script);
        if (v.kind == VerdictKind::Unknown) saw_unknown = true;
        if (v.kind != VerdictKind::Valid) removed.insert(l.id);
        round.checks.push_back({std::move(vc), v});
      }
    }
    round.removed.assign(removed.begin(), removed.end());
    res->rounds.push_back(std::move(round));
    ++round_no;
    if (removed.empty()) {
      res->surviving = instances;
      break;
    }
    for (const std::string& id : removed) instances.erase(id);
  }
  return saw_unknown;
}

namespace detail {

inline void check_one(const Program& prog, const ProcedureDecl& proc,
                      const std::vector<LoopInfo>& loops, const Candidate& cand,
                      const HeadFacts& extra, Solver& solver, CandidateResult* res,
                      const ScriptSink* sink, size_t cand_idx, bool support_pass) {
  auto t0 = std::chrono::steady_clock::now();
  InstrumentOutcome ins = instrument(prog, proc, cand);
  if (!ins.ok) {
    res->status = CandidateStatus::Discarded;
    res->diagnostic = ins.diagnostic;
  } else {
    try {
      bool saw_unknown =
          run_fixpoint(prog, proc, loops, ins.ip.typed, extra, solver, res, sink, cand_idx);
      if (!res->surviving.empty()) {
        res->status = CandidateStatus::Verified;
        res->assumed_support = support_pass;
      } else {
        res->status = saw_unknown ? CandidateStatus::Unknown : CandidateStatus::Rejected;
      }
    } catch (const SolverError& e) {
      res->status = CandidateStatus::Error;
      res->diagnostic = e.what();
    }
  }
  res->wall_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void check_many(const Program& prog, const ProcedureDecl& proc,
                       const std::vector<LoopInfo>& loops, const VerifyOptions& opts,
                       VerdictCache* cache, const std::vector<size_t>& todo,
                       const HeadFacts& extra, InferenceReport* rep,
                       const ScriptSink* sink, bool support_pass) {
  std::atomic<size_t> next{0};
  auto worker = [&] {
    Solver solver(opts.solver_path, opts.budget, cache);
    for (;;) {
      size_t k = next.fetch_add(1);
      if (k >= todo.size()) break;
      size_t i = todo[k];
      check_one(prog, proc, loops, rep->candidates[i].candidate, extra, solver,
                &rep->candidates[i], sink, i, support_pass);
    }
  };
  int jobs = std::max(1, opts.jobs);
  if (jobs == 1 || todo.size() <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

}  // namespace detail

inline InferenceReport infer(const Program& prog, const ProcedureDecl& proc,
                             const HeuristicLevel& level, const VerifyOptions& opts,
                             VerdictCache* cache = nullptr, const std::string& file = "") {
  auto t0 = std::chrono::steady_clock::now();
  InferenceReport rep;
  rep.file = file;
  rep.procedure = proc.name;
  rep.level = level;

  std::vector<Candidate> cands = generate_candidates(prog, proc, level);
  rep.candidate_count = cands.size();
  rep.candidates.resize(cands.size());
  for (size_t i = 0; i < cands.size(); ++i) rep.candidates[i].candidate = cands[i];

  const std::vector<LoopInfo> loops = all_loops(prog, proc);
  VerdictCache local_cache;
  if (!cache) cache = &local_cache;
  std::unique_ptr<ScriptSink> sink;
  if (!opts.keep_scripts_dir.empty())
    sink = std::make_unique<ScriptSink>(opts.keep_scripts_dir, proc.name);

  std::vector<size_t> all(cands.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  detail::check_many(prog, proc, loops, opts, cache, all, {}, &rep, sink.get(), false);

  if (opts.assume_verified) {
    // Re-run the near misses with every verified invariant assumed at the
    // loops where it survived.
    HeadFacts support;
    std::vector<size_t> todo;
    for (size_t i = 0; i < rep.candidates.size(); ++i) {
      const CandidateResult& r = rep.candidates[i];
      if (r.status == CandidateStatus::Verified) {
        ExprPtr typed = check_in_proc(prog, proc, r.candidate.formula);
        for (const std::string& id : r.surviving) support[id].push_back(typed);
      } else if (r.status == CandidateStatus::Rejected ||
                 r.status == CandidateStatus::Unknown) {
        todo.push_back(i);
      }
    }
    if (!support.empty() && !todo.empty())
      detail::check_many(prog, proc, loops, opts, cache, todo, support, &rep, sink.get(), true);
  }

  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// Inductiveness check for the invariants already declared in the source:
// per loop, initiation and consecution of the declared conjunction, with the
// other loops' declared invariants assumed at their heads.
struct DeclaredCheck {
  std::string loop_id;
  ExprPtr formula;
  std::vector<VcResult> checks;
  bool ok = true;
};

inline std::vector<DeclaredCheck> check_declared(const Program& prog,
                                                 const ProcedureDecl& proc,
                                                 Solver& solver) {
  std::vector<LoopInfo> loops = all_loops(prog, proc);
  VcGen gen(prog, proc, declared_facts(loops));
  std::vector<DeclaredCheck> out;
  for (const LoopInfo& l : loops) {
    if (l.invariants.empty()) continue;
    DeclaredCheck dc;
    dc.loop_id = l.id;
    dc.formula = mk_conj(l.invariants);
    VerificationCondition vcs[2] = {gen.initiation(l, dc.formula),
                                    gen.consecution(l, dc.formula)};
    for (VerificationCondition& vc : vcs) {
      Verdict v = solver.check_script(emit_smtlib(vc, prog, proc));
      dc.ok = dc.ok && v.kind == VerdictKind::Valid;
      dc.checks.push_back({std::move(vc), v});
    }
    out.push_back(std::move(dc));
  }
  return out;
}

}  // namespace invforge

#endif  // INVFORGE_VERIFIER_HPP
