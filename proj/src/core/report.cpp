#include "snumlab/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "snumlab/diagonal_ops.hpp"
#include "snumlab/error.hpp"
#include "snumlab/rate_fit.hpp"
#include "snumlab/rates_nuclearity.hpp"
#include "snumlab/sequence_spaces.hpp"
#include "snumlab/weight_lattice.hpp"

namespace snumlab {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// configuration

namespace {

struct ConfigReader {
  std::string origin;

  [[noreturn]] void fail_at(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    const YAML::Mark m = node.Mark();
    std::ostringstream os;
    os << origin;
    if (m.line >= 0) os << ':' << m.line + 1 << ':' << m.column + 1;
    os << ": " << field << ": " << msg;
    fail(ErrorCode::config, os.str());
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail_at(node, field, "expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail_at(node, field, "cannot read value '" + node.Scalar() + "'");
    }
  }

  std::vector<std::string> list(const YAML::Node& node, const std::string& field, bool exponent) const {
    std::vector<std::string> out;
    auto take = [&](const YAML::Node& item) {
      const std::string text = scalar<std::string>(item, field);
      try {
        if (exponent) (void)Exponent::parse(text);
        else (void)parse_rational(text);
      } catch (const Error& e) {
        fail_at(item, field, e.what());
      }
      out.push_back(text);
    };
    if (node.IsSequence()) {
      for (const auto& item : node) take(item);
    } else {
      take(node);
    }
    if (out.empty()) fail_at(node, field, "grid must be nonempty");
    return out;
  }

  DyadicRange range(const YAML::Node& node, const std::string& field) const {
    if (!node.IsMap()) fail_at(node, field, "expected {from, to}");
    check_keys(node, field, {"from", "to"});
    DyadicRange r{scalar<int>(node["from"], field + ".from"), scalar<int>(node["to"], field + ".to")};
    if (r.to < r.from) fail_at(node, field, "range must be ascending");
    if (r.from < 0 || r.to > 62) fail_at(node, field, "log2 range must lie in [0, 62]");
    return r;
  }

  std::vector<int> gamma(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence()) fail_at(node, field, "expected a list of block dimensions");
    std::vector<int> g;
    for (const auto& item : node) g.push_back(scalar<int>(item, field));
    try {
      (void)BlockIndex::make(g);
    } catch (const Error& e) {
      fail_at(node, field, e.what());
    }
    return g;
  }

  void check_keys(const YAML::Node& node, const std::string& section, std::set<std::string> allowed) const {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail_at(kv.first, section.empty() ? key : section + "." + key, "unknown field");
    }
  }
};

}  // namespace

SweepConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(ErrorCode::config, origin + ":" + std::to_string(e.mark.line + 1) + ":" +
                                std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  const ConfigReader rd{origin};
  SweepConfig c;
  if (root.IsNull()) return c;
  if (!root.IsMap()) rd.fail_at(root, "<root>", "expected a mapping");
  rd.check_keys(root, "", {"gamma", "gammas", "grid", "diag", "k_grid", "lattice", "equiv", "nuclear",
                           "tolerance", "threads"});

  if (root["gamma"]) c.gammas.push_back(rd.gamma(root["gamma"], "gamma"));
  if (const auto gs = root["gammas"]) {
    if (!gs.IsSequence()) rd.fail_at(gs, "gammas", "expected a list of block indices");
    for (const auto& g : gs) c.gammas.push_back(rd.gamma(g, "gammas"));
  }
  if (const auto g = root["grid"]) {
    rd.check_keys(g, "grid", {"s1", "s2", "p1", "p2", "q1", "q2"});
    auto& e = c.grid;
    if (g["s1"]) e.s1 = rd.list(g["s1"], "grid.s1", false);
    if (g["s2"]) e.s2 = rd.list(g["s2"], "grid.s2", false);
    if (g["p1"]) e.p1 = rd.list(g["p1"], "grid.p1", true);
    if (g["p2"]) e.p2 = rd.list(g["p2"], "grid.p2", true);
    if (g["q1"]) e.q1 = rd.list(g["q1"], "grid.q1", true);
    if (g["q2"]) e.q2 = rd.list(g["q2"], "grid.q2", true);
  }
  if (const auto g = root["diag"]) {
    rd.check_keys(g, "diag", {"alpha", "beta", "p1", "p2"});
    auto& e = c.diag;
    if (g["alpha"]) e.alpha = rd.list(g["alpha"], "diag.alpha", false);
    if (g["beta"]) e.beta = rd.list(g["beta"], "diag.beta", false);
    if (g["p1"]) e.p1 = rd.list(g["p1"], "diag.p1", true);
    if (g["p2"]) e.p2 = rd.list(g["p2"], "diag.p2", true);
  }
  if (root["k_grid"]) c.k_grid = rd.range(root["k_grid"], "k_grid");
  if (const auto g = root["lattice"]) {
    rd.check_keys(g, "lattice", {"box_radius", "threshold_log2", "write_table"});
    if (g["box_radius"]) c.lattice.box_radius = rd.scalar<std::int64_t>(g["box_radius"], "lattice.box_radius");
    if (c.lattice.box_radius < 1) rd.fail_at(g["box_radius"], "lattice.box_radius", "must be >= 1");
    if (g["threshold_log2"]) c.lattice.threshold_log2 = rd.range(g["threshold_log2"], "lattice.threshold_log2");
    if (g["write_table"]) c.lattice.write_table = rd.scalar<bool>(g["write_table"], "lattice.write_table");
  }
  if (const auto g = root["equiv"]) {
    rd.check_keys(g, "equiv", {"box_radius", "samples", "max_level", "max_entries"});
    if (const auto b = g["box_radius"]) {
      c.equiv.box_radius.clear();
      if (b.IsSequence())
        for (const auto& item : b) c.equiv.box_radius.push_back(rd.scalar<std::int64_t>(item, "equiv.box_radius"));
      else c.equiv.box_radius.push_back(rd.scalar<std::int64_t>(b, "equiv.box_radius"));
      if (c.equiv.box_radius.empty()) rd.fail_at(b, "equiv.box_radius", "grid must be nonempty");
      for (auto r : c.equiv.box_radius)
        if (r < 1) rd.fail_at(b, "equiv.box_radius", "must be >= 1");
    }
    if (g["samples"]) c.equiv.samples = rd.scalar<int>(g["samples"], "equiv.samples");
    if (g["max_level"]) c.equiv.max_level = rd.scalar<int>(g["max_level"], "equiv.max_level");
    if (g["max_entries"]) c.equiv.max_entries = rd.scalar<int>(g["max_entries"], "equiv.max_entries");
    if (c.equiv.samples < 1) rd.fail_at(g, "equiv.samples", "must be >= 1");
    if (c.equiv.max_level < 0) rd.fail_at(g, "equiv.max_level", "must be >= 0");
    if (c.equiv.max_entries < 1) rd.fail_at(g, "equiv.max_entries", "must be >= 1");
  }
  if (const auto g = root["nuclear"]) {
    rd.check_keys(g, "nuclear", {"terms"});
    if (g["terms"]) c.nuclear.terms = rd.scalar<std::uint64_t>(g["terms"], "nuclear.terms");
    if (c.nuclear.terms < 1 || c.nuclear.terms > (1u << 26)) rd.fail_at(g, "nuclear.terms", "must lie in [1, 2^26]");
  }
  if (const auto g = root["tolerance"]) {
    rd.check_keys(g, "tolerance", {"alpha", "beta"});
    if (g["alpha"]) c.tol_alpha = rd.scalar<double>(g["alpha"], "tolerance.alpha");
    if (g["beta"]) c.tol_beta = rd.scalar<double>(g["beta"], "tolerance.beta");
    if (!(c.tol_alpha > 0) || !(c.tol_beta > 0)) rd.fail_at(g, "tolerance", "tolerances must be positive");
  }
  if (root["threads"]) c.threads = rd.scalar<unsigned>(root["threads"], "threads");
  return c;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::config, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.filename().string());
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  if (text == "all") return OutputFormat::all;
  fail(ErrorCode::invalid_argument, "format must be csv, json or all");
}

// ---------------------------------------------------------------------------
// formatting

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json jnum(double v) { return std::isfinite(v) ? Json(v) : Json(num(v)); }

std::string gamma_str(const std::vector<int>& g) { return BlockIndex::make(g).str(); }

const char* code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::unsupported_boundary: return "unsupported_boundary";
    case ErrorCode::unsupported_endpoint: return "unsupported_endpoint";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
    case ErrorCode::degenerate: return "degenerate";
  }
  return "unknown";
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct PointResult {
  Json record = Json::object();
  std::vector<std::vector<std::string>> rows;  // main CSV rows
  std::vector<std::vector<std::string>> extra;  // secondary CSV rows
  bool failed = false;
};

void record_error(PointResult& r, const Error& e) {
  r.failed = true;
  r.record["status"] = "error";
  r.record["error"] = {{"code", code_name(e.code())}, {"message", e.what()}};
}

template <class F>
std::vector<PointResult> parallel_map(std::size_t n, unsigned threads, F work) {
  std::vector<PointResult> out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = work(i);
      } catch (const Error& e) {
        record_error(out[i], e);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

std::vector<std::uint64_t> dyadic(const DyadicRange& r) {
  std::vector<std::uint64_t> v;
  for (int j = r.from; j <= r.to; ++j) v.push_back(std::uint64_t{1} << j);
  return v;
}

Json fit_json(const RateFit& f) {
  return {{"alpha_hat", jnum(f.alpha_hat)}, {"beta_hat", jnum(f.beta_hat)}, {"r2", jnum(f.r2)},
          {"samples", f.samples}, {"k_min", jnum(f.k_min)}, {"k_max", jnum(f.k_max)},
          {"low_confidence", f.low_confidence}};
}

RateFit fit_profile(std::span<const std::uint64_t> ks, std::span<const double> values) {
  std::vector<RateSample> s;
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] >= 4) s.push_back({static_cast<double>(ks[i]), values[i]});
  return fit_rate_law(s);
}

EmbeddingParams make_params(const std::string& s1, const std::string& s2, const std::string& p1,
                            const std::string& p2, const std::string& q1, const std::string& q2) {
  EmbeddingParams p{parse_rational(s1), parse_rational(s2), Exponent::parse(p1),
                    Exponent::parse(p2), Exponent::parse(q1), Exponent::parse(q2)};
  p.validate();
  return p;
}

struct EmbeddingPoint {
  std::vector<int> gamma;
  std::string s1, s2, p1, p2, q1, q2;
};

std::vector<EmbeddingPoint> expand_embedding(const SweepConfig& c, bool with_q) {
  require(!c.gammas.empty(), ErrorCode::config, "config needs gamma or gammas");
  const auto& g = c.grid;
  const std::vector<std::string> one{"2"};
  std::vector<EmbeddingPoint> pts;
  for (const auto& gm : c.gammas)
    for (const auto& s1 : g.s1)
      for (const auto& s2 : g.s2)
        for (const auto& p1 : g.p1)
          for (const auto& p2 : g.p2)
            for (const auto& q1 : with_q ? g.q1 : one)
              for (const auto& q2 : with_q ? g.q2 : one) pts.push_back({gm, s1, s2, p1, p2, q1, q2});
  return pts;
}

Json point_json(const EmbeddingPoint& p, bool with_q) {
  Json j = {{"gamma", gamma_str(p.gamma)}, {"s1", p.s1}, {"s2", p.s2}, {"p1", p.p1}, {"p2", p.p2}};
  if (with_q) {
    j["q1"] = p.q1;
    j["q2"] = p.q2;
  }
  return j;
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return num(v.get<double>());
  return v.dump();
}

std::vector<std::string> row_from(const Json& rec, const std::vector<std::string>& cols) {
  std::vector<std::string> row;
  for (const auto& c : cols) row.push_back(rec.contains(c) ? csv_cell(rec[c]) : "");
  return row;
}

// ---------------------------------------------------------------------------
// commands

const std::vector<std::string> kRatesCols = {
    "gamma", "s1", "s2", "p1", "p2", "q1", "q2", "compact", "delta", "regime", "alpha_out", "beta_out",
    "alpha_hat", "beta_hat", "r2", "low_confidence", "alpha_ok", "beta_ok", "nuclear", "status"};

PointResult rates_point(const SweepConfig& c, const EmbeddingPoint& pt) {
  PointResult r;
  Json& rec = r.record;
  rec = point_json(pt, true);
  const BlockIndex gamma = BlockIndex::make(pt.gamma);
  const EmbeddingParams params = make_params(pt.s1, pt.s2, pt.p1, pt.p2, pt.q1, pt.q2);
  const DerivedExponents ex = derive_exponents(params, gamma);
  const bool compact = is_compact_embedding(params, gamma);
  const NuclearityWitness nw = is_nuclear_embedding(gamma, params);
  rec["compact"] = compact;
  rec["delta"] = ex.delta.str();
  rec["nuclear"] = nw.verdict;
  rec["nuclear_witness"] = {{"smoothness_per_dim", nw.smoothness_per_dim.str()},
                            {"gap", nw.gap.str()},
                            {"inv_gamma1", nw.inv_gamma1.str()}};
  for (const char* k : {"regime", "alpha_out", "beta_out", "alpha_hat", "beta_hat", "r2", "low_confidence",
                        "alpha_ok", "beta_ok"})
    rec[k] = nullptr;
  if (!compact) {
    rec["status"] = "not_compact";
    r.rows.push_back(row_from(rec, kRatesCols));
    return r;
  }
  try {
    const RateLaw law = embedding_rate(gamma, params);
    rec["regime"] = to_string(law.regime);
    rec["alpha_out"] = law.alpha_out.str();
    rec["beta_out"] = law.beta_out.str();
    const Rational alpha = (gamma.gamma1() - 1) * ex.inv_p;
    const DecaySequence seq = DecaySequence::make(alpha, (gamma.n() - 1) * alpha);
    const auto ks = dyadic(c.k_grid);
    const auto bounds = block_split_profile(seq, params.p1, params.p2, ks);
    const RateFit fit = fit_profile(ks, bounds);
    rec["alpha_hat"] = jnum(fit.alpha_hat);
    rec["beta_hat"] = jnum(fit.beta_hat);
    rec["r2"] = jnum(fit.r2);
    rec["low_confidence"] = fit.low_confidence;
    rec["alpha_ok"] = std::abs(fit.alpha_hat - to_double(law.alpha_out)) <= c.tol_alpha;
    rec["beta_ok"] = std::abs(fit.beta_hat - to_double(law.beta_out)) <= c.tol_beta;
    rec["fit"] = fit_json(fit);
    rec["status"] = "ok";
  } catch (const Error& e) {
    record_error(r, e);
  }
  r.rows.push_back(row_from(rec, kRatesCols));
  return r;
}

struct DiagPoint {
  std::string alpha, beta, p1, p2;
};

const std::vector<std::string> kDiagCols = {"alpha", "beta", "p1", "p2", "regime", "alpha_out", "beta_out",
                                            "alpha_hat", "beta_hat", "r2", "low_confidence", "alpha_ok",
                                            "beta_ok", "status"};

PointResult diag_point(const SweepConfig& c, const DiagPoint& pt, std::size_t index) {
  PointResult r;
  Json& rec = r.record;
  rec = {{"alpha", pt.alpha}, {"beta", pt.beta}, {"p1", pt.p1}, {"p2", pt.p2}};
  for (const char* k : {"regime", "alpha_out", "beta_out", "alpha_hat", "beta_hat", "r2", "low_confidence",
                        "alpha_ok", "beta_ok"})
    rec[k] = nullptr;
  try {
    const Rational alpha = parse_rational(pt.alpha), beta = parse_rational(pt.beta);
    const Exponent p1 = Exponent::parse(pt.p1), p2 = Exponent::parse(pt.p2);
    const RateLaw law = rate_envelope_diag(alpha, beta, p1, p2);
    rec["regime"] = to_string(law.regime);
    rec["alpha_out"] = law.alpha_out.str();
    rec["beta_out"] = law.beta_out.str();
    const DecaySequence seq = DecaySequence::make(alpha, beta);
    const auto ks = dyadic(c.k_grid);
    const auto upper = block_split_profile(seq, p1, p2, ks);
    Json profile = Json::array();
    for (std::size_t i = 0; i < ks.size(); ++i) {
      Json lower = nullptr;
      try {
        lower = jnum(section_lower_bound(seq, p1, p2, ks[i]).value);
      } catch (const Error&) {
      }
      profile.push_back({{"K", ks[i]}, {"upper", jnum(upper[i])}, {"lower", lower}});
      r.extra.push_back({std::to_string(index), std::to_string(ks[i]), num(upper[i]), csv_cell(lower)});
    }
    const RateFit fit = fit_profile(ks, upper);
    rec["alpha_hat"] = jnum(fit.alpha_hat);
    rec["beta_hat"] = jnum(fit.beta_hat);
    rec["r2"] = jnum(fit.r2);
    rec["low_confidence"] = fit.low_confidence;
    rec["alpha_ok"] = std::abs(fit.alpha_hat - to_double(law.alpha_out)) <= c.tol_alpha;
    rec["beta_ok"] = std::abs(fit.beta_hat - to_double(law.beta_out)) <= c.tol_beta;
    rec["fit"] = fit_json(fit);
    rec["profile"] = std::move(profile);
    rec["status"] = "ok";
  } catch (const Error& e) {
    record_error(r, e);
  }
  r.rows.push_back(row_from(rec, kDiagCols));
  return r;
}

PointResult lattice_point(const SweepConfig& c, const std::vector<int>& g, const std::filesystem::path& out_dir,
                          std::vector<std::string>& table_files) {
  PointResult r;
  Json& rec = r.record;
  const BlockIndex gamma = BlockIndex::make(g);
  rec["gamma"] = gamma.str();
  rec["box_radius"] = c.lattice.box_radius;
  const CubeWeightTable table = CubeWeightTable::build(gamma, c.lattice.box_radius);
  rec["points"] = table.size();
  rec["reliable_weight"] = table.reliable_weight_exact().str();
  rec["reliable_count"] = table.reliable_count();

  std::vector<double> xs, reliable_xs;
  for (int j = c.lattice.threshold_log2.from; j <= c.lattice.threshold_log2.to; ++j) {
    xs.push_back(std::exp2(j));
    if (xs.back() <= table.reliable_weight()) reliable_xs.push_back(xs.back());
  }
  const auto table_counts = counting_profile(table, reliable_xs);
  const int g1 = gamma.gamma1(), n = gamma.n();
  const double growth = 1.0 / (g1 - 1);
  Json counts = Json::array();
  std::vector<RateSample> samples;
  bool agree = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const std::uint64_t exact = count_weight_level_set(gamma, x);
    Json tc = nullptr;
    if (i < table_counts.size()) {
      tc = table_counts[i];
      agree = agree && table_counts[i] == exact;
    }
    const double lx = std::log2(x);
    const Json normalized = lx > 0 ? jnum(exact / (std::pow(x, growth) * std::pow(lx, n - 1))) : Json(nullptr);
    counts.push_back({{"threshold", jnum(x)}, {"count", exact}, {"table_count", tc}, {"normalized", normalized}});
    r.rows.push_back({gamma.str(), num(x), std::to_string(exact), csv_cell(tc), csv_cell(normalized)});
    if (x >= 4 && exact > 0) samples.push_back({x, static_cast<double>(exact)});
  }
  rec["growth_exponent_predicted"] = jnum(growth);
  rec["log_exponent_predicted"] = n - 1;
  rec["table_agrees"] = agree;
  rec["counts"] = std::move(counts);
  try {
    const RateFit fit = fit_rate_law(samples);
    rec["growth_exponent_hat"] = jnum(-fit.alpha_hat);
    rec["log_exponent_hat"] = jnum(fit.beta_hat);
    rec["fit"] = fit_json(fit);
  } catch (const Error& e) {
    rec["fit"] = nullptr;
    rec["fit_error"] = e.what();
  }
  if (c.lattice.write_table) {
    std::string name = "lattice_table_";
    for (std::size_t i = 0; i < g.size(); ++i) name += (i ? "_" : "") + std::to_string(g[i]);
    name += ".csv";
    std::ofstream os(out_dir / name, std::ios::binary);
    require(static_cast<bool>(os), ErrorCode::io, "cannot write " + name);
    table.write_csv(os);
    table_files.push_back(name);
  }
  rec["status"] = "ok";
  return r;
}

const std::vector<std::string> kNuclearCols = {
    "gamma", "s1", "s2", "p1", "p2", "nuclear", "smoothness_per_dim", "gap", "inv_gamma1", "delta", "t",
    "series_exponent", "log_exponent", "series_verdict", "boundary", "partial_sum", "total_lower",
    "total_upper", "agree", "status"};

PointResult nuclear_point(const SweepConfig& c, const EmbeddingPoint& pt) {
  PointResult r;
  Json& rec = r.record;
  rec = point_json(pt, false);
  const BlockIndex gamma = BlockIndex::make(pt.gamma);
  const EmbeddingParams params = make_params(pt.s1, pt.s2, pt.p1, pt.p2, "2", "2");
  const NuclearityWitness w = is_nuclear_embedding(gamma, params);
  const DerivedExponents ex = derive_exponents(params, gamma);
  rec["nuclear"] = w.verdict;
  rec["smoothness_per_dim"] = w.smoothness_per_dim.str();
  rec["gap"] = w.gap.str();
  rec["inv_gamma1"] = w.inv_gamma1.str();
  rec["delta"] = ex.delta.str();
  bool series_ok = false;
  if (params.p1 < params.p2) {
    const SeriesDiagnostic d = nuclearity_series_diagnostic(gamma, params.p1, params.p2, c.nuclear.terms);
    rec["t"] = d.t.str();
    rec["series_exponent"] = d.exponent ? Json(d.exponent->str()) : Json(nullptr);
    rec["log_exponent"] = d.log_exponent.str();
    rec["series_verdict"] = to_string(d.verdict);
    rec["boundary"] = d.boundary;
    rec["partial_sum"] = jnum(d.partial_sums.back());
    rec["total_lower"] = jnum(d.total.lower);
    rec["total_upper"] = jnum(d.total.upper);
    Json dy = Json::array();
    for (std::size_t i = 1; i + 1 <= d.partial_sums.size(); i *= 2) dy.push_back(jnum(d.partial_sums[i - 1]));
    rec["partial_sums_dyadic"] = std::move(dy);
    rec["note"] = d.note;
    series_ok = d.verdict == SeriesVerdict::convergent;
  } else {
    for (const char* k : {"t", "series_exponent", "log_exponent", "series_verdict", "boundary", "partial_sum",
                          "total_lower", "total_upper"})
      rec[k] = nullptr;
    rec["note"] = "p1 >= p2: criterion gap is not positive";
  }
  rec["agree"] = w.verdict == (series_ok && ex.delta > 0);
  rec["status"] = "ok";
  r.rows.push_back(row_from(rec, kNuclearCols));
  return r;
}

const std::vector<std::string> kEquivCols = {"gamma", "s1", "s2", "p1", "p2", "q1", "q2", "box_radius",
                                             "reliable_count", "samples", "ratio_min", "ratio_max", "window",
                                             "status"};

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::io, "cannot write " + path.string());
  os << body;
  require(static_cast<bool>(os), ErrorCode::io, "write failed for " + path.string());
}

std::string csv_text(const Table& t) {
  std::string s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    s += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return s;
}

}  // namespace

RunSummary run_command(const std::string& command, const SweepConfig& c, const std::filesystem::path& out_dir,
                       std::uint64_t seed, OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec, ErrorCode::io, "cannot create " + out_dir.string());

  std::vector<PointResult> results;
  Table main, extra;
  std::string extra_name;
  std::vector<std::string> table_files;
  Json summary = Json::object();

  if (command == "rates") {
    const auto pts = expand_embedding(c, true);
    results = parallel_map(pts.size(), c.threads, [&](std::size_t i) { return rates_point(c, pts[i]); });
    main.header = kRatesCols;
  } else if (command == "diag") {
    const auto& g = c.diag;
    require(!g.alpha.empty() && !g.p1.empty() && !g.p2.empty(), ErrorCode::config,
            "diag needs diag.alpha, diag.p1 and diag.p2");
    std::vector<DiagPoint> pts;
    for (const auto& a : g.alpha)
      for (const auto& b : g.beta)
        for (const auto& p1 : g.p1)
          for (const auto& p2 : g.p2) pts.push_back({a, b, p1, p2});
    results = parallel_map(pts.size(), c.threads, [&](std::size_t i) { return diag_point(c, pts[i], i); });
    main.header = kDiagCols;
    extra.header = {"point", "K", "upper", "lower"};
    extra_name = "diag_profile.csv";
  } else if (command == "lattice") {
    require(!c.gammas.empty(), ErrorCode::config, "config needs gamma or gammas");
    // Tables are large; build them one at a time.
    results = parallel_map(c.gammas.size(), 1,
                           [&](std::size_t i) { return lattice_point(c, c.gammas[i], out_dir, table_files); });
    main.header = {"gamma", "threshold", "count", "table_count", "normalized"};
  } else if (command == "nuclear") {
    const auto pts = expand_embedding(c, false);
    results = parallel_map(pts.size(), c.threads, [&](std::size_t i) { return nuclear_point(c, pts[i]); });
    main.header = kNuclearCols;
  } else if (command == "equiv") {
    const auto pts = expand_embedding(c, true);
    std::map<std::pair<std::vector<int>, std::int64_t>, std::shared_ptr<const CubeWeightTable>> tables;
    for (const auto& pt : pts)
      for (auto radius : c.equiv.box_radius) tables[{pt.gamma, radius}] = nullptr;
    results.resize(pts.size());
    for (auto& [key, tab] : tables) {
      try {
        tab = std::make_shared<const CubeWeightTable>(CubeWeightTable::build(BlockIndex::make(key.first), key.second));
      } catch (const Error&) {
      }
    }
    results = parallel_map(pts.size(), c.threads, [&](std::size_t i) {
      PointResult r;
      const auto& pt = pts[i];
      r.record = point_json(pt, true);
      const BlockIndex gamma = BlockIndex::make(pt.gamma);
      const EmbeddingParams params = make_params(pt.s1, pt.s2, pt.p1, pt.p2, pt.q1, pt.q2);
      Json windows = Json::array();
      double first = 0, last = 0;
      for (auto radius : c.equiv.box_radius) {
        Json w = {{"box_radius", radius}};
        Json row = r.record;
        row["box_radius"] = radius;
        const auto& tab = tables.at({pt.gamma, radius});
        try {
          require(tab != nullptr, ErrorCode::capacity, "table for box radius " + std::to_string(radius) + " exceeds capacity");
          const auto lambdas = random_level_sequences(*tab, static_cast<std::size_t>(c.equiv.samples),
                                                      c.equiv.max_level, c.equiv.max_entries, seed);
          double lo = std::numeric_limits<double>::infinity(), hi = 0;
          for (const auto& l : lambdas) {
            const double q = reindex_equivalence_ratio(l, params, gamma, *tab).ratio;
            lo = std::min(lo, q);
            hi = std::max(hi, q);
          }
          w["reliable_count"] = tab->reliable_count();
          w["samples"] = lambdas.size();
          w["ratio_min"] = jnum(lo);
          w["ratio_max"] = jnum(hi);
          w["window"] = jnum(hi / lo);
          if (first == 0) first = hi / lo;
          last = hi / lo;
          row.update(w);
          row["status"] = "ok";
        } catch (const Error& e) {
          r.failed = true;
          w["status"] = "error";
          w["error"] = {{"code", code_name(e.code())}, {"message", e.what()}};
          row["status"] = "error";
        }
        r.rows.push_back(row_from(row, kEquivCols));
        windows.push_back(std::move(w));
      }
      r.record["windows"] = std::move(windows);
      r.record["window_growth"] = first > 0 && last > 0 ? jnum(last / first) : Json(nullptr);
      r.record["status"] = r.failed ? "error" : "ok";
      return r;
    });
    main.header = kEquivCols;
  } else {
    fail(ErrorCode::invalid_argument, "unknown command '" + command + "'");
  }

  RunSummary s;
  s.points = results.size();
  Json records = Json::array();
  for (auto& r : results) {
    if (r.failed) ++s.failures;
    for (auto& row : r.rows) main.rows.push_back(std::move(row));
    for (auto& row : r.extra) extra.rows.push_back(std::move(row));
    records.push_back(std::move(r.record));
  }
  if (s.failures > 0) s.exit_code = s.failures == s.points ? 3 : 4;

  if (format != OutputFormat::json) {
    write_file(out_dir / (command + ".csv"), csv_text(main));
    s.files.push_back(command + ".csv");
    if (!extra_name.empty()) {
      write_file(out_dir / extra_name, csv_text(extra));
      s.files.push_back(extra_name);
    }
  }
  if (format != OutputFormat::csv) {
    Json doc = {{"schema", "snumlab/1"}, {"command", command}, {"seed", seed},
                {"points", s.points},    {"failures", s.failures}, {"records", std::move(records)}};
    write_file(out_dir / (command + ".json"), doc.dump(2) + "\n");
    s.files.push_back(command + ".json");
  }
  for (auto& f : table_files) s.files.push_back(f);
  return s;
}

}  // namespace snumlab
