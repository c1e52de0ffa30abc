// fchi: constructions, verification, reduction certificates and exact search from the command line.
//
// Exit status: 0 pass, 1 usage or IO error, 2 mathematical counterexample (or replay divergence).

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fchi/fchi.hpp"

using namespace fchi;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kCounterexample = 2;

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

std::int64_t default_budget() {
  if (const char* env = std::getenv("FCHI_SEARCH_BUDGET")) {
    try {
      return std::stoll(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "FCHI_SEARCH_BUDGET is not an integer");
    }
  }
  return SearchConfig{}.node_budget;
}

struct ConstructOpts {
  int r = 0;
  std::string out;
};

int cmd_construct(const ConstructOpts& o) {
  ColoringFile f;
  f.coloring = binary_coloring(o.r);
  f.metadata = Json{{"construction", "binary"}, {"r", o.r}};
  emit(o.out, to_json_text(Json(f)));
  return kOk;
}

struct VerifyPqOpts {
  int p = 0, q = 0;
  std::string file;
};

int cmd_verify_pq(const VerifyPqOpts& o) {
  auto f = load_coloring(o.file);
  auto v = is_chromatic_pq_coloring(f.coloring, o.p, o.q);
  if (v.holds) {
    std::cout << Json{{"result", "pass"}, {"p", o.p}, {"q", o.q}}.dump() << "\n";
    return kOk;
  }
  std::cout << Json{{"result", "counterexample"},
                    {"p", o.p},
                    {"q", o.q},
                    {"colors", v.witness_colors},
                    {"chi", v.witness_chi}}
                   .dump()
            << "\n";
  return kCounterexample;
}

int cmd_verify_sparsity(const std::string& profile_path) {
  auto f = load_profile_file(profile_path);
  try {
    auto v = classify_colors(f.coloring, f.vertices, f.profile);
    Json colors = Json::array();
    for (const auto& w : v.witnesses)
      colors.push_back(Json{{"color", w.color}, {"lo", w.lo}, {"hi", w.hi}, {"mode", to_string(w.mode)}});
    std::cout << Json{{"result", "pass"}, {"colors", colors}}.dump() << "\n";
    return kOk;
  } catch (const SparsityViolatedError& e) {
    const auto& w = e.witness();
    Json out{{"result", "counterexample"}, {"color", w.color}, {"lo", w.lo}, {"hi", w.hi}};
    if (w.counterexample)
      out["pair"] = Json{bits_of(w.counterexample->v1.mask()), bits_of(w.counterexample->v2.mask())};
    std::cout << out.dump() << "\n";
    return kCounterexample;
  }
}

struct ReduceOpts {
  int q = 3;
  std::string params_file;
  bool paper = false;
  std::string path = "general";
  std::string eps0 = "1/12";
  int R = 8;
  int gamma_base = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string coloring;
  bool quiet = false;
};

EngineParams reduce_params(const ReduceOpts& o, const ColoredCompleteGraph& c) {
  if (!o.params_file.empty()) {
    auto p = from_json_text<EngineParams>(read_text_file(o.params_file));
    if (p.q != o.q) throw Error(ErrorCode::InvalidArgument, "params file is for q = " + std::to_string(p.q));
    return validate_manual(p);
  }
  const Rational eps0 = parse_rational(o.eps0);
  EngineParams p = o.path == "q3" ? q3_params(c.r(), c.n(), eps0, o.R) : paper_params(o.q, c.r(), c.n(), eps0, o.R);
  p.gamma_base = o.gamma_base;
  return p;
}

int cmd_reduce(const ReduceOpts& o) {
  auto f = load_coloring(o.coloring);
  const auto& c = f.coloring;
  if (o.path == "q3" && o.q != 3) throw Error(ErrorCode::InvalidArgument, "--path q3 needs --q 3");
  auto params = reduce_params(o, c);
  RunOptions opts;
  opts.cfg.dense.seed = o.seed;
  auto trace = run_reduction(c, o.q, params, opts);
  auto file = make_certificate_file(c, params, trace, o.seed);
  const std::string out = o.out.empty() ? o.coloring + ".cert.json" : o.out;
  write_text_file(out, to_json_text(Json(file)));

  if (!o.quiet) {
    std::cout << "q " << o.q << "  n " << c.n() << "  r " << c.r() << "  eps " << to_string(params.eps)
              << (params.eps_clamped ? " (clamped)" : "") << "  path " << to_string(params.path) << "\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      const auto& s = trace.steps[i];
      std::cout << "step " << i << "  " << to_string(s.kind) << "  |V| " << popcount(s.input_set) << " -> "
                << popcount(s.surviving_set) << "  bound " << s.declared_bound;
      if (!s.floors.empty()) std::cout << "  floors " << s.floors.size();
      if (s.kind == StepKind::base_case) std::cout << "  threshold " << s.halt_bound;
      std::cout << "\n";
    }
    std::cout << "outcome " << to_string(trace.outcome) << "  certificate " << out << "\n";
  }
  if (trace.outcome == RunOutcome::violation) {
    const auto& w = *trace.steps.back().violation;
    std::cout << Json{{"result", "counterexample"},
                      {"colors", w.colors},
                      {"chi", w.chi},
                      {"vertices", bits_of(w.vertices)}}
                     .dump()
              << "\n";
    return kCounterexample;
  }
  return kOk;
}

struct SearchOpts {
  std::string kind;
  int r = 0, p = 0, q = 0, n_max = 0;
  std::optional<std::int64_t> budget;
  double time_limit = 600.0;
  int workers = 1;
  std::string out;
  std::string witness_out;
};

int cmd_search(const SearchOpts& o) {
  SearchConfig cfg;
  cfg.node_budget = o.budget ? *o.budget : default_budget();
  cfg.time_limit_seconds = o.time_limit;
  cfg.workers = o.workers;
  SearchResult res;
  try {
    res = o.kind == "F" ? compute_F(o.r, o.p, o.q, o.n_max, cfg) : compute_F_chi(o.r, o.p, o.q, o.n_max, cfg);
  } catch (const SearchBudgetExceeded& e) {
    res = e.partial();
  }
  Json j = res;
  if (res.extremal_witness && !o.witness_out.empty()) {
    ColoringFile w;
    w.coloring = *res.extremal_witness;
    w.metadata = Json{{"search", o.kind}, {"r", o.r}, {"p", o.p}, {"q", o.q}};
    write_text_file(o.witness_out, to_json_text(Json(w)));
    j["witness"] = o.witness_out;
  } else {
    j["witness"] = nullptr;
  }
  emit(o.out, to_json_text(j));
  return kOk;
}

int cmd_replay(const std::string& cert_path, const std::string& coloring_path) {
  auto cert = load_certificate(cert_path);
  auto f = load_coloring(coloring_path);
  if (input_digest(f.coloring, cert.params) != cert.replay_digest) {
    std::cerr << "digest mismatch: certificate was issued for other inputs\n";
    return kFail;
  }
  ReplayConfig rc;
  rc.seed = cert.seed;
  auto rep = replay_trace(f.coloring, cert.params, cert.trace.steps, rc);
  if (!rep.ok()) {
    const auto& i = rep.issues.front();
    std::cout << "divergence at step " << i.step << ": " << i.check << (i.detail.empty() ? "" : " (" + i.detail + ")")
              << "\n";
    return kCounterexample;
  }
  std::cout << "ok  steps " << cert.trace.steps.size() << "  checks " << rep.checks;
  if (rep.sampled) std::cout << "  sampled " << rep.sampled;
  std::cout << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fchi: chromatic Ramsey constructions, reduction certificates and exact search"};
  app.require_subcommand(1);

  ConstructOpts con;
  auto* construct = app.add_subcommand("construct", "write a coloring file");
  auto* binary = construct->add_subcommand("binary", "the 2^r-vertex binary digit coloring");
  construct->require_subcommand(1);
  binary->add_option("--r", con.r, "number of colors (<= 6)")->required();
  binary->add_option("-o,--out", con.out, "output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "check a coloring property");
  verify->require_subcommand(1);
  VerifyPqOpts vpq;
  auto* pq = verify->add_subcommand("chromatic-pq", "every (q-1)-union has chromatic number <= p-1");
  pq->add_option("--p", vpq.p)->required();
  pq->add_option("--q", vpq.q)->required();
  pq->add_option("file", vpq.file, "coloring file")->required();
  std::string profile_path;
  auto* sparsity = verify->add_subcommand("sparsity", "re-verify the sparsity claims of a profile");
  sparsity->add_option("--profile", profile_path, "profile file")->required();

  ReduceOpts red;
  auto* reduce = app.add_subcommand("reduce", "run the reduction and write a certificate");
  reduce->add_option("--q", red.q)->required();
  auto* params_opt = reduce->add_option("--params", red.params_file, "manual EngineParams JSON");
  reduce->add_flag("--paper-params", red.paper, "derive parameters from r and n (default)")->excludes(params_opt);
  reduce->add_option("--path", red.path, "general or q3")->check(CLI::IsMember({"general", "q3"}));
  reduce->add_option("--eps0", red.eps0, "upper clamp for eps");
  reduce->add_option("--R", red.R, "base-case palette threshold");
  reduce->add_option("--gamma", red.gamma_base, "base-case clique size (0 = derive)");
  reduce->add_option("--seed", red.seed);
  reduce->add_option("-o,--out", red.out, "certificate file (default <coloring>.cert.json)");
  reduce->add_flag("--quiet", red.quiet);
  reduce->add_option("coloring", red.coloring)->required();

  SearchOpts so;
  auto* search = app.add_subcommand("search", "exact F / F_chi by exhaustive search");
  search->add_option("--kind", so.kind)->required()->check(CLI::IsMember({"F", "Fchi"}));
  search->add_option("--r", so.r)->required();
  search->add_option("--p", so.p)->required();
  search->add_option("--q", so.q)->required();
  search->add_option("--n-max", so.n_max)->required();
  search->add_option("--budget", so.budget, "node budget (default $FCHI_SEARCH_BUDGET)");
  search->add_option("--time-limit", so.time_limit, "seconds");
  search->add_option("--workers", so.workers);
  search->add_option("-o,--out", so.out, "result file (default stdout)");
  search->add_option("--witness-out", so.witness_out, "write the extremal coloring here");

  std::string rep_cert, rep_coloring;
  auto* replay = app.add_subcommand("replay", "independently re-check a certificate");
  replay->add_option("certificate", rep_cert)->required();
  replay->add_option("coloring", rep_coloring)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kFail;
  }

  try {
    if (*binary) return cmd_construct(con);
    if (*pq) return cmd_verify_pq(vpq);
    if (*sparsity) return cmd_verify_sparsity(profile_path);
    if (*reduce) return cmd_reduce(red);
    if (*search) return cmd_search(so);
    if (*replay) return cmd_replay(rep_cert, rep_coloring);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kFail;
}
