#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cyclo/error.hpp"
#include "cyclo/harness.hpp"
#include "helpers.hpp"

using namespace cyclo;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("fit_exponential: exact exponentials") {
  const double e = std::numbers::e;
  std::vector<std::pair<double, double>> p{{1, e}, {2, e * e}};
  auto f = fit_exponential(p);
  CHECK(f.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.b == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.residual < 1e-18);

  std::vector<std::pair<double, double>> q{{1, 2}, {2, 4}, {3, 8}};
  f = fit_exponential(q);
  CHECK(f.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.b == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("fit_exponential: agrees with the normal equations on noisy data") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> noise(-0.3, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, double>> p;
    for (int x = 1; x <= 6; ++x) p.emplace_back(x, 3.0 * std::exp(0.8 * x + noise(rng)));
    // slope = (n Sxy - Sx Sy) / (n Sxx - Sx^2) on (x, ln y)
    double n = 6, sx = 0, sy = 0, sxy = 0, sxx = 0;
    for (auto [x, y] : p) {
      sx += x;
      sy += std::log(y);
      sxy += x * std::log(y);
      sxx += x * x;
    }
    double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double a = std::exp((sy - b * sx) / n);
    auto f = fit_exponential(p);
    CHECK(f.b == doctest::Approx(b).epsilon(1e-9));
    CHECK(f.a == doctest::Approx(a).epsilon(1e-9));
    CHECK(f.residual >= 0);
    CHECK(f.r_squared <= 1.0 + 1e-12);
  }
}

TEST_CASE("fit_exponential: a c880-like sweep has a positive exponent") {
  std::vector<std::pair<double, double>> p{{1, 67}, {2, 1601}, {3, 1903}, {5, 8.22e6}};
  CHECK(fit_exponential(p).b > 0);
}

TEST_CASE("fit_exponential and pearson errors") {
  std::vector<std::pair<double, double>> zero{{1, 1}, {2, 0}};
  std::vector<std::pair<double, double>> same_x{{2, 1}, {2, 5}};
  std::vector<std::pair<double, double>> single{{1, 1}};
  CHECK(code_of([&] { fit_exponential(zero); }) == ErrorCode::NonPositiveY);
  CHECK(code_of([&] { fit_exponential(same_x); }) == ErrorCode::DegenerateFit);
  CHECK(code_of([&] { fit_exponential(single); }) == ErrorCode::DegenerateFit);

  std::vector<double> x{1, 2, 3}, c{4, 4, 4}, shorter{1, 2};
  CHECK(code_of([&] { pearson(x, c); }) == ErrorCode::DegenerateFit);
  CHECK(code_of([&] { pearson(x, shorter); }) == ErrorCode::DegenerateFit);
}

TEST_CASE("pearson") {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> up{3, 5, 7, 9, 11}, down{10, 8, 6, 4, 2};
  CHECK(pearson(x, up) == doctest::Approx(1.0));
  CHECK(pearson(x, down) == doctest::Approx(-1.0));
  // Sxy = 8, Sxx = Syy = 10
  std::vector<double> y{1, 3, 2, 5, 4};
  CHECK(pearson(x, y) == doctest::Approx(0.8));
}

TEST_CASE("attack mode names") {
  CHECK_FALSE(parse_attack_mode("none"));
  auto sat = parse_attack_mode("sat");
  REQUIRE(sat);
  CHECK_FALSE(*sat);
  CHECK(**parse_attack_mode("cycsat1") == NcMode::StructuralPerFeedback);
  CHECK(**parse_attack_mode("cycsat1-allcycles") == NcMode::StructuralAllCycles);
  CHECK(**parse_attack_mode("cycsat1-singlecycle") == NcMode::StructuralPerFeedbackSingleCycle);
  CHECK(**parse_attack_mode("cycsat2") == NcMode::Sensitizable);
  CHECK(code_of([] { parse_attack_mode("appsat"); }) == ErrorCode::InvalidRecipe);
}

TEST_CASE("suite: matrix, failures, fits and report round trip") {
  SuiteConfig cfg;
  cfg.bench_files = {testing::bench_path("c432"), testing::bench_path("c17")};
  cfg.sweep = {1, 2, 3};
  cfg.seeds = {1, 2};
  cfg.attack_modes = {"none", "cycsat1"};
  cfg.attack.solver = SolverConfig{};
  cfg.jobs = 2;
  auto rep = run_suite(cfg);
  CHECK(rep.rows.size() == 2 * 3 * 2 * 2);
  for (const auto& r : rep.rows) {
    if (r.benchmark == "c17") {
      CHECK(r.lock_status == "InsufficientGates");
      CHECK(r.attack_status.empty());
      continue;
    }
    CHECK(r.lock_status == "ok");
    CHECK(r.added_gates == static_cast<std::size_t>(5 * r.micro_cycles + 1));
    CHECK(r.cycle_status == "Complete");
    CHECK(r.cycle_count > 0);
    if (r.attack_mode == "none") CHECK(r.attack_status.empty());
    else CHECK(r.attack_status == "Success");
  }
  REQUIRE(rep.fits.size() == 4);
  for (const auto& f : rep.fits) {
    if (f.benchmark == "c17") {
      CHECK_FALSE(f.fit);
    } else {
      REQUIRE(f.fit);
      CHECK(f.points == 3);
      CHECK(f.fit->b > 0);
    }
  }

  auto j = rep.to_json();
  CHECK(j["schema_version"] == 1);
  CHECK(ExperimentReport::from_json(j).to_json() == j);

  std::ostringstream csv;
  rep.write_csv(csv);
  std::istringstream lines(csv.str());
  std::size_t count = 0;
  for (std::string l; std::getline(lines, l);) ++count;
  CHECK(count == rep.rows.size() + 1);

  std::ostringstream table;
  rep.write_cycle_table(table);
  CHECK(table.str().rfind("benchmark\tscheme\tseed\tn_mc=1\tn_mc=2\tn_mc=3\n", 0) == 0);
  CHECK(table.str().find("c17\tsc\t1\tInsufficientGates") != std::string::npos);

  cfg.jobs = 1;
  auto again = run_suite(cfg);
  REQUIRE(again.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(again.rows[i].cycle_count == rep.rows[i].cycle_count);
    CHECK(again.rows[i].attack_status == rep.rows[i].attack_status);
    CHECK(again.rows[i].iterations == rep.rows[i].iterations);
  }
}

TEST_CASE("suite: unreadable benchmark throws before running") {
  SuiteConfig cfg;
  cfg.bench_files = {"/nonexistent/x.bench"};
  CHECK(code_of([&] { run_suite(cfg); }) == ErrorCode::IoError);
}
