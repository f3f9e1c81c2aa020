// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snumlab/core_params.hpp"
#include "snumlab/diagonal_ops.hpp"
#include "snumlab/error.hpp"
#include "snumlab/rate_fit.hpp"
#include "snumlab/rates_nuclearity.hpp"
#include "snumlab/sequence_spaces.hpp"
#include "snumlab/weight_lattice.hpp"

using namespace snumlab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int g_failures = 0;

void run(int id, const char* title, double budget_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.check(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0) v.check(secs < budget_s, "runtime " + std::to_string(secs) + " s over budget");
  if (!v.pass) ++g_failures;
  std::printf("%s %2d  %-44s %7.2fs %s\n", v.pass ? "PASS" : "FAIL", id, title, secs, v.detail.str().c_str());
  std::fflush(stdout);
}

Exponent E(const char* s) { return Exponent::parse(s); }
Rational R(const char* s) { return parse_rational(s); }

std::vector<std::uint64_t> dyadic(int from, int to) {
  std::vector<std::uint64_t> v;
  for (int j = from; j <= to; ++j) v.push_back(std::uint64_t{1} << j);
  return v;
}

RateFit fit(const std::vector<std::uint64_t>& ks, const std::vector<double>& vs) {
  std::vector<RateSample> s;
  for (std::size_t i = 0; i < ks.size(); ++i) s.push_back({static_cast<double>(ks[i]), vs[i]});
  return fit_rate_law(s);
}

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------------------

void criterion1(Verdict& v) {
  const Exponent inf = Exponent::infinity(), one = Exponent::finite(1);
  for (std::uint64_t k = 1; k <= 8; ++k) {
    const auto r = approx_finite_id(inf, one, 8, k);
    v.check(r.value == static_cast<double>(9 - k) && r.status == BoundStatus::exact,
            "a_" + std::to_string(k) + " != " + std::to_string(9 - k));
  }
  for (std::uint64_t k = 9; k <= 16; ++k) v.check(approx_finite_id(inf, one, 8, k).value == 0, "a_k != 0 for k > N");

  std::mt19937_64 rng(101);
  const char* ps[] = {"1", "5/4", "4/3", "3/2", "2", "3", "4", "6", "inf"};
  int cases = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Exponent p1 = E(ps[rng() % 9]), p2 = E(ps[rng() % 9]);
    if (!(p2 < p1)) continue;
    const std::uint64_t N = 1 + rng() % 64;
    std::vector<double> a;
    for (std::uint64_t k = 1; k <= N; ++k) a.push_back(approx_finite_id(p1, p2, N, k).value);
    v.check(nonincreasing(a), "monotonicity");
    v.check(a.back() == 1.0, "a_N = 1");
    const double expect = std::pow(static_cast<double>(N), to_double(p2.reciprocal() - p1.reciprocal()));
    v.check(std::abs(a.front() - expect) <= 1e-12 * expect, "a_1 = N^(1/p2 - 1/p1)");
    ++cases;
  }
  v.detail << "N=8 table exact; " << cases << " random (p1>p2, N<=64) cases";
}

void criterion2(Verdict& v) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int n = 50;
  double worst = 0;
  for (int s = 0; s < 50; ++s) {
    std::vector<double> sigma(n);
    if (s % 2 == 0) {
      for (auto& x : sigma) x = 1e-3 + U(rng);
      std::sort(sigma.begin(), sigma.end(), std::greater<>());
    } else {
      const Rational alpha = Rational(1 + static_cast<int>(rng() % 16), 8);
      const Rational beta = Rational(static_cast<int>(rng() % 8), 4);
      const DecaySequence seq = DecaySequence::make(alpha, beta);
      for (int i = 0; i < n; ++i) sigma[i] = seq(i + 1);
      for (int i = 0; i < n; ++i)
        v.check(approx_diag_same_p(seq, static_cast<std::uint64_t>(i + 1)) == sigma[i], "power-log sequence mismatch");
    }
    v.check(nonincreasing(sigma), "generated sequence not nonincreasing");
    // Explicit diagonal matrix with the entries scattered by a permutation.
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> scattered(n);
    for (int i = 0; i < n; ++i) {
      D(i, i) = sigma[perm[i]];
      scattered[i] = sigma[perm[i]];
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(D).singularValues();
    for (int k = 0; k < n; ++k) {
      worst = std::max(worst, std::abs(sv(k) - sigma[k]));
      v.check(approx_diag_same_p(scattered, static_cast<std::uint64_t>(k + 1)) == sigma[k], "approx_diag_same_p");
    }
  }
  v.check(worst <= 1e-10, "singular values");
  v.detail << "max |s_k - sigma_k| = " << worst;
}

void criterion3(Verdict& v) {
  const BlockIndex gamma = BlockIndex::make({2, 2});
  const CubeWeightTable table = CubeWeightTable::build(gamma, std::int64_t{1} << 11);
  // Inside the reliable range the table's profile must match the exact count.
  std::vector<double> inside;
  for (int j = 0; std::exp2(j) <= table.reliable_weight(); ++j) inside.push_back(std::exp2(j));
  const auto tab = counting_profile(table, inside);
  for (std::size_t i = 0; i < inside.size(); ++i)
    v.check(tab[i] == count_weight_level_set(gamma, inside[i]), "table count differs from exact count");

  double lo = 1e300, hi = 0;
  std::vector<RateSample> samples;
  std::ostringstream ratios;
  for (int L = 4; L <= 9; ++L) {
    const double x = std::exp2(2 * L);
    const auto c = static_cast<double>(count_weight_level_set(gamma, x));
    const double q = c / (x * L);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    samples.push_back({x, c});
    ratios << fmt("%.3f", q) << (L < 9 ? "," : "");
  }
  const RateFit f = fit_rate_law(samples);
  const double slope = -f.alpha_hat;
  v.check(hi / lo <= 4, "bracket c2/c1 > 4");
  v.check(std::abs(slope - 1) <= 0.05, "slope");
  v.detail << "count/(X L)=[" << ratios.str() << "] c2/c1=" << fmt("%.3f", hi / lo)
           << " slope=" << fmt("%.4f", slope) << " (log term " << fmt("%.2f", f.beta_hat)
           << ", plain log-log " << fmt("%.3f", loglog_slope(samples)) << ") table exact to w<="
           << table.reliable_weight();
}

struct RegimeCase {
  const char *label, *p1, *p2, *alpha;
  double target, tol;
};

void criterion4(Verdict& v) {
  const auto ks = dyadic(6, 18);
  const RegimeCase cases[] = {{"a", "2", "2", "1", 1.0, 0.05},
                              {"b", "4/3", "4", "1/2", 0.75, 0.10},
                              {"c", "4/3", "4", "1/8", 0.25, 0.10}};
  for (const auto& c : cases) {
    const DecaySequence seq = DecaySequence::make(R(c.alpha), 0);
    const auto bounds = block_split_profile(seq, E(c.p1), E(c.p2), ks);
    const RateFit f = fit(ks, bounds);
    v.check(std::abs(f.alpha_hat - c.target) <= c.tol, std::string("(") + c.label + ") alpha_hat");
    v.detail << "(" << c.label << ") alpha_hat=" << fmt("%.4f", f.alpha_hat) << " beta_hat=" << fmt("%.3f", f.beta_hat)
             << "  ";
    if (std::string(c.label) == "a") {
      double worst = 0;
      for (std::size_t i = 0; i < ks.size(); ++i) worst = std::max(worst, bounds[i] / seq(static_cast<double>(ks[i])));
      v.check(worst <= 8, "(a) upper/sigma_K > 8");
      v.detail << "max upper/sigma_K=" << fmt("%.3f", worst) << "  ";
    }
  }
}

void criterion5(Verdict& v) {
  const auto ks = dyadic(6, 18);
  const DecaySequence seq = DecaySequence::make(1, 0);
  const Exponent two = E("2");
  const auto upper = block_split_profile(seq, two, two, ks);
  std::vector<double> lower, exact;
  double max_up = 0, min_low = 1e300;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    exact.push_back(approx_diag_same_p(seq, ks[i]));
    lower.push_back(section_lower_bound(seq, two, two, ks[i]).value);
    v.check(upper[i] >= exact[i], "upper bound below exact value");
    max_up = std::max(max_up, upper[i] / exact[i]);
    min_low = std::min(min_low, exact[i] / lower[i]);
  }
  v.check(max_up <= 8, "max upper/exact > 8");
  v.check(nonincreasing(upper), "upper not nonincreasing");
  v.check(nonincreasing(lower), "lower not nonincreasing");
  v.detail << "max upper/exact=" << fmt("%.3f", max_up) << " min exact/lower=" << fmt("%.3f", min_low);
}

void criterion6(Verdict& v) {
  {
    EmbeddingParams p{3, 0, E("4/3"), E("4"), E("2"), E("2")};
    const RateLaw law = embedding_rate(BlockIndex::make({2, 2}), p);
    v.check(law.alpha_out == R("3/4") && law.beta_out == R("1/2") && law.regime == Regime::B, "(2,2) law");
    v.detail << "(2,2): (" << law.alpha_out.str() << "," << law.beta_out.str() << ") " << to_string(law.regime);
  }
  // Radial spot checks: expected exponents written out by hand.
  struct Spot {
    int d;
    const char *s1, *p1, *p2, *alpha, *regime;
  };
  const Spot spots[] = {{4, "2", "2", "4", "3/4", "A"},   {4, "2", "5/4", "2", "9/10", "A"},
                        {3, "2", "4/3", "4", "5/4", "B"}, {2, "1", "7/4", "5/2", "1/5", "C"},
                        {5, "4", "6/5", "6", "3", "B"}};
  for (const auto& s : spots) {
    EmbeddingParams p{R(s.s1), 0, E(s.p1), E(s.p2), E("2"), E("2")};
    const RateLaw law = embedding_rate(BlockIndex::make({s.d}), p);
    v.check(law.alpha_out.str() == s.alpha && law.beta_out.str() == "0" && to_string(law.regime) == s.regime,
            std::string("radial d=") + std::to_string(s.d) + " p1=" + s.p1 + " p2=" + s.p2);
    v.detail << "; d=" << s.d << ":" << law.alpha_out.str() << to_string(law.regime);
  }
}

void criterion7(Verdict& v) {
  const std::vector<std::vector<int>> gammas = {{2, 2}, {3, 3}, {2, 3}, {4}};
  const char* pairs[][2] = {{"1", "2"},   {"4/3", "4"}, {"2", "6"}, {"1", "inf"}, {"5/4", "5"},
                            {"3/2", "3"}, {"2", "4"},   {"1", "4/3"}, {"6/5", "2"}, {"3", "inf"}};
  const Rational offsets[] = {0, Rational(1, 3), Rational(-1, 5), 1, 5};
  int points = 0, agree = 0, gap_boundary = 0, smooth_boundary = 0, positives = 0;
  for (const auto& g : gammas) {
    const BlockIndex gamma = BlockIndex::make(g);
    for (const auto& pr : pairs) {
      const Exponent p1 = E(pr[0]), p2 = E(pr[1]);
      const Rational gap = p1.reciprocal() - p2.reciprocal();
      const SeriesDiagnostic diag = nuclearity_series_diagnostic(gamma, p1, p2, 64);
      for (const auto& off : offsets) {
        EmbeddingParams p{gamma.d() * gap + off, 0, p1, p2, E("2"), E("2")};
        const NuclearityWitness w = is_nuclear_embedding(gamma, p);
        const bool delta_pos = derive_exponents(p, gamma).delta > 0;
        const bool expected = diag.verdict == SeriesVerdict::convergent && delta_pos;
        ++points;
        if (w.verdict == expected) ++agree;
        if (w.verdict) ++positives;
        if (gap == w.inv_gamma1) {
          ++gap_boundary;
          v.check(!w.verdict, "gap boundary verdict true");
        }
        if (off == 0) {
          ++smooth_boundary;
          v.check(!w.verdict, "smoothness boundary verdict true");
        }
      }
    }
  }
  v.check(points == 200 && agree == points, "disagreement");
  v.check(gap_boundary > 0 && smooth_boundary > 0 && positives > 0, "grid misses a case");
  v.detail << agree << "/" << points << " agree; " << gap_boundary << " gap-boundary, " << smooth_boundary
           << " smoothness-boundary, " << positives << " nuclear";
}

void criterion8(Verdict& v) {
  const Exponent two = E("2");
  const auto geo = tong_nuclear_norm(SequenceGenerator{{}, TailLaw::geometric(2.0, 0.5)}, two, two);
  v.check(geo.nuclear && geo.lower == 2.0 && geo.upper == 2.0, "geometric v != 2");

  const double truth = std::sqrt(std::pow(std::numbers::pi, 4) / 90);
  const auto pw = tong_nuclear_norm(SequenceGenerator{{}, TailLaw::power_log(1.0, 2, 0)}, E("4/3"), E("4"));
  v.check(pw.nuclear, "j^-2 not nuclear");
  v.check(pw.lower <= truth * (1 + 1e-14) && truth <= pw.upper * (1 + 1e-14), "bracket misses truth");
  v.check(std::abs(pw.lower - truth) <= 1e-6 && std::abs(pw.upper - truth) <= 1e-6, "bracket wider than 1e-6");

  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> U(0.01, 10.0);
  const char* r2s[] = {"1", "3/2", "2", "4", "inf"};
  int exact = 0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<double> tau(n);
    for (auto& x : tau) x = U(rng);
    const Exponent r2 = E(r2s[rng() % 5]);
    std::vector<std::vector<double>> cols(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) cols[j][j] = tau[j];
    if (tong_nuclear_norm(tau, Exponent::infinity(), r2) == linfty_source_nuclear_norm(cols, r2)) ++exact;
  }
  v.check(exact == 20, "l_inf-source cross-check");
  v.detail << "geometric=" << geo.lower << "; j^-2 bracket width " << fmt("%.2e", pw.upper - pw.lower)
           << ", |mid-truth|=" << fmt("%.2e", std::abs(0.5 * (pw.lower + pw.upper) - truth)) << "; " << exact
           << "/20 exact cross-checks";
}

void criterion9(Verdict& v) {
  const BlockIndex gamma = BlockIndex::make({2, 2});
  const EmbeddingParams p{3, 0, E("4/3"), E("4"), E("2"), E("2")};
  double windows[2];
  const std::int64_t radii[] = {std::int64_t{1} << 9, std::int64_t{1} << 10};
  for (int i = 0; i < 2; ++i) {
    const CubeWeightTable table = CubeWeightTable::build(gamma, radii[i]);
    const auto lambdas = random_level_sequences(table, 100, 2, 8, 909);
    double lo = 1e300, hi = 0;
    for (const auto& l : lambdas) {
      const double r = reindex_equivalence_ratio(l, p, gamma, table).ratio;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    windows[i] = hi / lo;
    v.detail << "R=2^" << (9 + i) << ": [" << fmt("%.4g", lo) << ", " << fmt("%.4g", hi) << "] max/min="
             << fmt("%.3f", windows[i]) << " (" << table.reliable_count() << " reliable ranks)  ";
    v.check(windows[i] <= 64, "window > 64");
  }
  const double growth = std::max(windows[1] / windows[0], windows[0] / windows[1]);
  v.check(growth <= 2, "window changed by more than 2x");
  v.detail << "change=" << fmt("%.3f", growth);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion10(Verdict& v, const fs::path& work) {
  const char* commands[] = {"rates", "diag", "lattice", "nuclear"};
  int files = 0;
  for (const char* cmd : commands) {
    const fs::path config = fs::path(SNUMLAB_CONFIGS) / (std::string(cmd) + ".yaml");
    fs::path out[2];
    for (int run = 0; run < 2; ++run) {
      out[run] = work / (std::string(cmd) + "_run" + std::to_string(run));
      fs::remove_all(out[run]);
      const std::string line = std::string("\"") + SNUMLAB_CLI + "\" " + cmd + " --config \"" + config.string() +
                               "\" --out \"" + out[run].string() + "\" --seed 7 2>/dev/null";
      const int rc = std::system(line.c_str());
      v.check(rc == 0, std::string(cmd) + " exit status " + std::to_string(rc));
    }
    std::vector<fs::path> names;
    for (const auto& e : fs::directory_iterator(out[0])) names.push_back(e.path().filename());
    v.check(!names.empty(), std::string(cmd) + " produced no reports");
    for (const auto& n : names) {
      v.check(fs::exists(out[1] / n) && slurp(out[0] / n) == slurp(out[1] / n),
              std::string(cmd) + "/" + n.string() + " differs");
      ++files;
    }
  }
  v.detail << files << " report files byte-identical across two runs";
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "snumlab_acceptance";
  fs::create_directories(work);

  run(1, "exact finite identity (p2 < p1)", 1, criterion1);
  run(2, "Hilbert oracle for same-p diagonals", 5, criterion2);
  run(3, "weighted cube counting law", 60, criterion3);
  run(4, "diagonal rate regimes", 60, criterion4);
  run(5, "upper/lower consistency", 0, criterion5);
  run(6, "embedding rate predictor", 0, criterion6);
  run(7, "nuclearity criterion vs series", 1, criterion7);
  run(8, "nuclear norms of diagonals", 0, criterion8);
  run(9, "reindexing equivalence windows", 30, criterion9);
  run(10, "CLI reports are deterministic", 0, [&](Verdict& v) { criterion10(v, work); });

  std::printf("%s: %d of 10 criteria failed\n", g_failures ? "FAIL" : "PASS", g_failures);
  return g_failures ? 1 : 0;
}
