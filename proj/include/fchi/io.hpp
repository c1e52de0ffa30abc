#pragma once

// JSON file formats: colorings, certificates, sparsity profiles and search results.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "fchi/engine/run.hpp"
#include "fchi/search.hpp"

namespace fchi {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

namespace io_detail {

template <typename E, std::size_t N>
E enum_from(const Json& j, const E (&values)[N], const char* what) {
  const auto s = j.get<std::string>();
  for (E v : values)
    if (s == to_string(v)) return v;
  throw Error(ErrorCode::Parse, std::string("unknown ") + what + " '" + s + "'");
}

inline const StepKind kStepKinds[] = {StepKind::q3_case1,     StepKind::q3_case2,  StepKind::not_balanced,
                                      StepKind::balanced,     StepKind::base_case, StepKind::precondition_violation};
inline const CheckMode kCheckModes[] = {CheckMode::exact, CheckMode::sampled, CheckMode::informational};
inline const SparsityVariant kVariants[] = {SparsityVariant::interval, SparsityVariant::lower_only};
inline const ParamSource kSources[] = {ParamSource::paper_formula, ParamSource::manual};
inline const EnginePath kPaths[] = {EnginePath::q3, EnginePath::general};
inline const RunOutcome kOutcomes[] = {RunOutcome::halt, RunOutcome::violation, RunOutcome::inconclusive};

inline Json mask_json(Mask m) { return bits_of(m); }

inline Mask mask_from(const Json& j) {
  Mask m = 0;
  for (const auto& v : j) {
    int id = v.get<int>();
    if (id < 0 || id >= kMaxVertices) throw Error(ErrorCode::Parse, "vertex id out of range");
    if (m & bit(id)) throw Error(ErrorCode::Parse, "repeated vertex id");
    m |= bit(id);
  }
  return m;
}

inline Json rational_json(const Rational& x) { return fchi::to_string(x); }
inline Rational rational_from(const Json& j) { return parse_rational(j.get<std::string>()); }

}  // namespace io_detail

// --- engine records --------------------------------------------------------------------------------

inline void to_json(Json& j, const EngineParams& p) {
  j = Json{{"q", p.q},
           {"r", p.r},
           {"n", p.n},
           {"eps", io_detail::rational_json(p.eps)},
           {"log_alpha", p.log_alpha},
           {"log_beta", p.log_beta},
           {"log_delta", p.log_delta},
           {"z", io_detail::rational_json(p.z)},
           {"y", p.y},
           {"log_gamma", p.log_gamma},
           {"source", to_string(p.source)},
           {"path", to_string(p.path)},
           {"R", p.R},
           {"gamma_base", p.gamma_base},
           {"eps_formula", p.eps_formula},
           {"eps_clamped", p.eps_clamped},
           {"beta_floored", p.beta_floored}};
}

inline void from_json(const Json& j, EngineParams& p) {
  p.q = j.at("q").get<int>();
  p.r = j.at("r").get<int>();
  p.n = j.at("n").get<int>();
  p.eps = io_detail::rational_from(j.at("eps"));
  p.log_alpha = j.at("log_alpha").get<std::vector<double>>();
  p.log_beta = j.at("log_beta").get<double>();
  p.log_delta = j.value("log_delta", 0.0);
  p.z = j.contains("z") ? io_detail::rational_from(j.at("z")) : Rational(1);
  p.y = j.value("y", 0.0);
  p.source = j.contains("source") ? io_detail::enum_from(j.at("source"), io_detail::kSources, "source")
                                  : ParamSource::manual;
  p.path = j.contains("path") ? io_detail::enum_from(j.at("path"), io_detail::kPaths, "path") : EnginePath::general;
  p.R = j.value("R", 8);
  p.gamma_base = j.value("gamma_base", 0);
  p.eps_formula = j.value("eps_formula", 0.0);
  p.eps_clamped = j.value("eps_clamped", false);
  p.beta_floored = j.value("beta_floored", false);
  if (j.contains("log_gamma")) {
    p.log_gamma = j.at("log_gamma").get<std::vector<double>>();
  } else {
    detail::fill_gammas(p);
  }
}

inline void to_json(Json& j, const RestrictionProfile& p) {
  j = Json{{"q", p.q},
           {"r_vec", p.r_vec},
           {"x_vec", p.x_vec},
           {"eps", io_detail::rational_json(p.eps)},
           {"classes", p.classes},
           {"variant", to_string(p.variant)}};
}

inline void from_json(const Json& j, RestrictionProfile& p) {
  p.q = j.at("q").get<int>();
  p.classes = j.at("classes").get<std::vector<ColorSet>>();
  p.x_vec = j.at("x_vec").get<std::vector<double>>();
  p.eps = io_detail::rational_from(j.at("eps"));
  p.variant = j.contains("variant") ? io_detail::enum_from(j.at("variant"), io_detail::kVariants, "variant")
                                    : SparsityVariant::interval;
  if (j.contains("r_vec")) {
    p.r_vec = j.at("r_vec").get<std::vector<int>>();
  } else {
    p.rebuild_r_vec();
  }
}

inline void to_json(Json& j, const GuaranteeCheck& c) {
  j = Json{{"claim", c.claim}, {"pass", c.pass}, {"mode", to_string(c.mode)}, {"detail", c.detail}};
}

inline void from_json(const Json& j, GuaranteeCheck& c) {
  c.claim = j.at("claim").get<std::string>();
  c.pass = j.at("pass").get<bool>();
  c.mode = io_detail::enum_from(j.at("mode"), io_detail::kCheckModes, "check mode");
  c.detail = j.value("detail", std::string{});
}

inline void to_json(Json& j, const FloorEvent& f) { j = Json{{"quantity", f.quantity}, {"log_value", f.log_value}}; }

inline void from_json(const Json& j, FloorEvent& f) {
  f.quantity = j.at("quantity").get<std::string>();
  f.log_value = j.at("log_value").get<double>();
}

inline void to_json(Json& j, const ViolationWitness& w) {
  j = Json{{"colors", w.colors}, {"chi", w.chi}, {"vertices", io_detail::mask_json(w.vertices)}};
}

inline void from_json(const Json& j, ViolationWitness& w) {
  w.colors = j.at("colors").get<ColorSet>();
  w.chi = j.at("chi").get<int>();
  w.vertices = io_detail::mask_from(j.at("vertices"));
}

inline void to_json(Json& j, const SparsityClaim& s) {
  j = Json{{"color", s.color}, {"class", s.cls}, {"lo", s.lo}, {"hi", s.hi}, {"mode", to_string(s.mode)}};
}

inline void from_json(const Json& j, SparsityClaim& s) {
  s.color = j.at("color").get<ColorId>();
  s.cls = j.at("class").get<int>();
  s.lo = j.at("lo").get<int>();
  s.hi = j.at("hi").get<int>();
  s.mode = io_detail::enum_from(j.at("mode"), io_detail::kCheckModes, "check mode");
}

inline void to_json(Json& j, const LevelPair& p) {
  j = Json{{"a", io_detail::mask_json(p.a)}, {"b", io_detail::mask_json(p.b)}, {"parent", p.parent}};
}

inline void from_json(const Json& j, LevelPair& p) {
  p.a = io_detail::mask_from(j.at("a"));
  p.b = io_detail::mask_from(j.at("b"));
  p.parent = j.at("parent").get<int>();
}

inline void to_json(Json& j, const Level& l) {
  j = Json{{"color", l.color},
           {"pairs", l.pairs},
           {"raw_volume", l.raw_volume},
           {"mode", to_string(l.mode)}};
}

inline void from_json(const Json& j, Level& l) {
  l.color = j.at("color").get<ColorId>();
  l.pairs = j.at("pairs").get<std::vector<LevelPair>>();
  l.raw_volume = j.at("raw_volume").get<std::vector<std::int64_t>>();
  l.mode = io_detail::enum_from(j.at("mode"), io_detail::kCheckModes, "check mode");
}

inline void to_json(Json& j, const LevelStructure& ls) {
  j = Json{{"q", ls.q},
           {"eps", io_detail::rational_json(ls.eps)},
           {"root", io_detail::mask_json(ls.root)},
           {"colors", ls.colors},
           {"levels", ls.levels}};
}

inline void from_json(const Json& j, LevelStructure& ls) {
  ls.q = j.at("q").get<int>();
  ls.eps = io_detail::rational_from(j.at("eps"));
  ls.root = io_detail::mask_from(j.at("root"));
  ls.colors = j.at("colors").get<std::vector<ColorId>>();
  ls.levels = j.at("levels").get<std::vector<Level>>();
}

inline void to_json(Json& j, const ReductionCertificate& c) {
  Json pairs = Json::array();
  for (auto [a, b] : c.dense_pairs) pairs.push_back(Json{io_detail::mask_json(a), io_detail::mask_json(b)});
  j = Json{{"kind", to_string(c.kind)},
           {"level", c.level},
           {"input_set", io_detail::mask_json(c.input_set)},
           {"surviving_set", io_detail::mask_json(c.surviving_set)},
           {"input_profile", c.input_profile},
           {"output_profile", c.output_profile},
           {"declared_bound", c.declared_bound},
           {"log_bound_factor", c.log_bound_factor},
           {"checks", c.checks},
           {"floors", c.floors},
           {"removed_colors", c.removed_colors},
           {"sparsity_claims", c.sparsity_claims},
           {"violation", c.violation ? Json(*c.violation) : Json(nullptr)},
           {"levels", c.levels ? Json(*c.levels) : Json(nullptr)},
           {"dense_pairs", pairs},
           {"notes", c.notes},
           {"halt_bound", c.halt_bound}};
}

inline void from_json(const Json& j, ReductionCertificate& c) {
  c.kind = io_detail::enum_from(j.at("kind"), io_detail::kStepKinds, "step kind");
  c.level = j.at("level").get<int>();
  c.input_set = io_detail::mask_from(j.at("input_set"));
  c.surviving_set = io_detail::mask_from(j.at("surviving_set"));
  c.input_profile = j.at("input_profile").get<RestrictionProfile>();
  c.output_profile = j.at("output_profile").get<RestrictionProfile>();
  c.declared_bound = j.at("declared_bound").get<std::int64_t>();
  c.log_bound_factor = j.at("log_bound_factor").get<double>();
  c.checks = j.at("checks").get<std::vector<GuaranteeCheck>>();
  c.floors = j.at("floors").get<std::vector<FloorEvent>>();
  c.removed_colors = j.at("removed_colors").get<ColorSet>();
  c.sparsity_claims = j.at("sparsity_claims").get<std::vector<SparsityClaim>>();
  c.violation.reset();
  if (!j.at("violation").is_null()) c.violation = j.at("violation").get<ViolationWitness>();
  c.levels.reset();
  if (!j.at("levels").is_null()) c.levels = j.at("levels").get<LevelStructure>();
  c.dense_pairs.clear();
  for (const auto& pr : j.at("dense_pairs"))
    c.dense_pairs.emplace_back(io_detail::mask_from(pr.at(0)), io_detail::mask_from(pr.at(1)));
  c.notes = j.at("notes").get<std::map<std::string, std::string>>();
  c.halt_bound = j.at("halt_bound").get<std::int64_t>();
}

inline void to_json(Json& j, const ReductionTrace& t) {
  j = Json{{"n0", t.n0},
           {"outcome", to_string(t.outcome)},
           {"log_chain_bound", t.log_chain_bound},
           {"chain_holds", t.chain_holds},
           {"steps", t.steps}};
}

inline void from_json(const Json& j, ReductionTrace& t) {
  t.n0 = j.at("n0").get<int>();
  t.outcome = io_detail::enum_from(j.at("outcome"), io_detail::kOutcomes, "outcome");
  t.log_chain_bound = j.at("log_chain_bound").get<double>();
  t.chain_holds = j.at("chain_holds").get<bool>();
  t.steps = j.at("steps").get<std::vector<ReductionCertificate>>();
}

// --- files -----------------------------------------------------------------------------------------

struct ColoringFile {
  int format_version = kFormatVersion;
  ColoredCompleteGraph coloring;
  Json metadata = Json::object();

  friend bool operator==(const ColoringFile&, const ColoringFile&) = default;
};

/// The coloring without metadata; digests are taken over this form.
inline Json canonical_coloring_json(const ColoredCompleteGraph& c) {
  Json edges = Json::array();
  for (int u = 0; u < c.n(); ++u)
    for (int v = u + 1; v < c.n(); ++v) edges.push_back(Json{u, v, c.color_of(u, v)});
  return Json{{"format_version", kFormatVersion}, {"n", c.n()}, {"r", c.r()}, {"edges", edges}};
}

inline void to_json(Json& j, const ColoringFile& f) {
  j = canonical_coloring_json(f.coloring);
  j["format_version"] = f.format_version;
  j["metadata"] = f.metadata;
}

inline void from_json(const Json& j, ColoringFile& f) {
  f.format_version = j.at("format_version").get<int>();
  if (f.format_version != kFormatVersion)
    throw Error(ErrorCode::Parse, "unsupported format_version " + std::to_string(f.format_version));
  const int n = j.at("n").get<int>();
  const int r = j.at("r").get<int>();
  std::vector<std::tuple<int, int, int>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3) throw Error(ErrorCode::Parse, "edge entries are [u, v, color]");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>(), e[2].get<int>());
  }
  f.coloring = ColoredCompleteGraph::from_edges(n, r, edges);
  f.metadata = j.value("metadata", Json::object());
}

inline void to_json(Json& j, const SearchResult& s) {
  j = Json{{"kind", to_string(s.kind)},
           {"r", s.r},
           {"p", s.p},
           {"q", s.q},
           {"value", s.value ? Json(*s.value) : Json(nullptr)},
           {"unknown_above", s.value ? Json(nullptr) : Json(s.unknown_above)},
           {"nodes_expanded", s.nodes_expanded},
           {"wall_time", s.wall_time}};
}

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string input_digest(const ColoredCompleteGraph& c, const EngineParams& p) {
  return fnv1a_hex(canonical_coloring_json(c).dump() + "\n" + Json(p).dump());
}

struct CertificateFile {
  int format_version = kFormatVersion;
  ReductionTrace trace;
  EngineParams params;
  std::string replay_digest;
  std::uint64_t seed = 1;
};

inline void to_json(Json& j, const CertificateFile& f) {
  j = Json{{"format_version", f.format_version},
           {"params", f.params},
           {"replay_digest", f.replay_digest},
           {"seed", f.seed},
           {"trace", f.trace}};
}

inline void from_json(const Json& j, CertificateFile& f) {
  f.format_version = j.at("format_version").get<int>();
  if (f.format_version != kFormatVersion)
    throw Error(ErrorCode::Parse, "unsupported format_version " + std::to_string(f.format_version));
  f.params = j.at("params").get<EngineParams>();
  f.replay_digest = j.at("replay_digest").get<std::string>();
  f.seed = j.value("seed", std::uint64_t{1});
  f.trace = j.at("trace").get<ReductionTrace>();
}

inline CertificateFile make_certificate_file(const ColoredCompleteGraph& c, const EngineParams& p,
                                             ReductionTrace trace, std::uint64_t seed = 1) {
  CertificateFile f;
  f.seed = seed;
  f.params = p;
  f.trace = std::move(trace);
  f.replay_digest = input_digest(c, p);
  return f;
}

// --- text and disk ---------------------------------------------------------------------------------

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

/// Converts a parsed document, mapping schema errors onto ErrorCode::Parse.
template <typename T>
T from_json_text(const std::string& text) {
  Json j = parse_json(text);
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

namespace io_detail {

inline void pretty(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth) + 1, ' ');
  const std::string close(static_cast<std::size_t>(depth), ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad + Json(it.key()).dump() + ": ";
      pretty(it.value(), depth + 1, out);
    }
    out += "\n" + close + "}";
  } else if (j.is_array() && !j.empty()) {
    bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
    if (flat) {
      out += j.dump();
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      pretty(j[i], depth + 1, out);
    }
    out += "\n" + close + "]";
  } else {
    out += j.dump();
  }
}

}  // namespace io_detail

/// Indented JSON with scalar arrays kept on one line.
inline std::string to_json_text(const Json& j) {
  std::string out;
  io_detail::pretty(j, 0, out);
  return out + "\n";
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

inline ColoringFile load_coloring(const std::string& path) { return from_json_text<ColoringFile>(read_text_file(path)); }

inline CertificateFile load_certificate(const std::string& path) {
  return from_json_text<CertificateFile>(read_text_file(path));
}

/// Input of `verify sparsity`: a coloring (inline, or a path relative to the profile file), an optional
/// vertex subset and the profile to check.
struct ProfileFile {
  int format_version = kFormatVersion;
  ColoredCompleteGraph coloring;
  Mask vertices = 0;
  RestrictionProfile profile;
};

inline ProfileFile load_profile_file(const std::string& path) {
  Json j = parse_json(read_text_file(path));
  ProfileFile f;
  try {
    f.format_version = j.at("format_version").get<int>();
    if (f.format_version != kFormatVersion)
      throw Error(ErrorCode::Parse, "unsupported format_version " + std::to_string(f.format_version));
    const Json& col = j.at("coloring");
    if (col.is_string()) {
      auto base = std::filesystem::path(path).parent_path();
      f.coloring = load_coloring((base / col.get<std::string>()).string()).coloring;
    } else {
      f.coloring = col.get<ColoringFile>().coloring;
    }
    f.vertices = j.contains("vertices") ? io_detail::mask_from(j.at("vertices")) : low_mask(f.coloring.n());
    if (f.vertices & ~low_mask(f.coloring.n())) throw Error(ErrorCode::Parse, "vertex outside the coloring");
    f.profile = j.at("profile").get<RestrictionProfile>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  return f;
}

}  // namespace fchi
