#include <cmath>
#include <sstream>

#include <doctest.h>

#include "helpers.hpp"
#include "netspill/errors.hpp"
#include "netspill/spillover.hpp"

using namespace netspill;
using namespace netspill::spillover;

namespace {

struct Pair {
  std::shared_ptr<const Graph> host;
  std::shared_ptr<const Graph> reservoir;
};

Pair er_pair() {
  return {std::make_shared<const Graph>(gen_erdos_renyi_gnm(1000, 3255, 1)),
          std::make_shared<const Graph>(gen_erdos_renyi_gnm(1000, 3255, 2))};
}

EpidemicParams er_params(double beta12 = 0.02) {
  EpidemicParams p;
  p.beta22 = 0.15;
  p.beta12 = beta12;
  return p;
}

SweepOptions options(std::size_t realizations, Seed seed = 11) {
  SweepOptions o;
  o.realizations = realizations;
  o.master_seed = seed;
  return o;
}

std::string summary_text(const SweepResult& r) {
  std::ostringstream out;
  write_sweep_csv(out, r);
  write_summary_csv(out, r);
  write_transition_csv(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("spillover probability") {
  const std::vector<std::uint64_t> none{0, 0, 0, 0};
  const std::vector<std::uint64_t> all{3, 3, 3, 3};
  const std::vector<std::uint64_t> mixed{0, 1, 2, 3, 4, 5, 0, 0, 0, 0};
  CHECK(spillover_probability(none) == 0.0);
  CHECK(spillover_probability(all) == 1.0);
  CHECK(spillover_probability(mixed) == doctest::Approx(0.3));
  CHECK_THROWS_AS(spillover_probability(std::span<const std::uint64_t>{}), ParameterError);

  CHECK(clamp_size(2) == 0);
  CHECK(clamp_size(3) == 3);
  CHECK(clamp_size(0) == 0);
  CHECK(binomial_stderr(0.1, 2000) == doctest::Approx(std::sqrt(0.09 / 2000)));
}

TEST_CASE("transition detection") {
  const std::vector<double> grid{1.0, 2.0};
  CHECK(detect_transition(grid, std::vector<double>{0.0, 0.2}, 0.1) == doctest::Approx(1.5));
  CHECK_FALSE(detect_transition(grid, std::vector<double>{0.0, 0.05}, 0.1).has_value());
  CHECK(*detect_transition(grid, std::vector<double>{0.3, 0.5}, 0.1) == 1.0);
  CHECK(*detect_transition(grid, std::vector<double>{0.05, 0.1}, 0.1) == 2.0);
  const std::vector<double> longer{1.0, 2.0, 3.0, 4.0};
  CHECK(*detect_transition(longer, std::vector<double>{0.0, 0.05, 0.07, 0.25}, 0.1) ==
        doctest::Approx(3.0 + 0.03 / 0.18));
  CHECK_THROWS_AS(detect_transition(grid, std::vector<double>{0.1}, 0.1), ParameterError);
}

TEST_CASE("link sweep bookkeeping") {
  const auto pr = er_pair();
  const std::vector<double> zero{0.0};
  CHECK_THROWS_AS(sweep_links(pr.host, pr.reservoir, er_params(), zero, options(10)), ParameterError);

  const std::vector<double> grid{0.0000001, 0.0005, 0.002};
  const auto result = sweep_links(pr.host, pr.reservoir, er_params(), grid, options(400));
  CHECK(result.parameter == "link_fraction");
  REQUIRE(result.points.size() == 3);
  CHECK(result.points[0].links == 0);
  CHECK(result.points[0].probability == 0.0);
  CHECK(result.points[1].links == 500);
  CHECK(result.points[2].links == 2000);
  for (const auto& pt : result.points) {
    CHECK(pt.raw_sizes.size() == 400);
    CHECK(pt.probability >= 0.0);
    CHECK(pt.probability <= 1.0);
    CHECK(pt.standard_error == doctest::Approx(std::sqrt(pt.probability * (1 - pt.probability) / 400)));
    const auto clamped = pt.clamped_sizes();
    const auto positive = std::count_if(clamped.begin(), clamped.end(), [](auto s) { return s > 0; });
    CHECK(static_cast<double>(positive) / 400.0 == pt.probability);
    for (std::size_t k = 0; k < clamped.size(); ++k) CHECK((clamped[k] == 0) == (pt.raw_sizes[k] < 3));
  }
}

TEST_CASE("sweeps are deterministic and independent of the thread count") {
  const auto pr = er_pair();
  const std::vector<double> grid{0.0005, 0.0015};
  auto one = options(300);
  one.threads = 1;
  auto two = options(300);
  two.threads = 2;
  const auto a = sweep_links(pr.host, pr.reservoir, er_params(), grid, one);
  const auto b = sweep_links(pr.host, pr.reservoir, er_params(), grid, two);
  const auto c = sweep_links(pr.host, pr.reservoir, er_params(), grid, one);
  CHECK(summary_text(a) == summary_text(b));
  CHECK(summary_text(a) == summary_text(c));

  auto fixed = one;
  fixed.draw = CouplingDraw::fixed;
  const auto f1 = sweep_links(pr.host, pr.reservoir, er_params(), grid, fixed);
  const auto f2 = sweep_links(pr.host, pr.reservoir, er_params(), grid, fixed);
  CHECK(summary_text(f1) == summary_text(f2));
}

TEST_CASE("probability grows with the link fraction") {
  const auto pr = er_pair();
  const std::vector<double> grid{0.0001, 0.0006, 0.00135, 0.002, 0.003};
  const auto result = sweep_links(pr.host, pr.reservoir, er_params(), grid, options(2000));
  CHECK(result.points.front().probability < 0.05);
  CHECK(result.points.back().probability > 0.2);
  for (std::size_t k = 1; k < result.points.size(); ++k) {
    const auto& lo = result.points[k - 1];
    const auto& hi = result.points[k];
    CHECK(hi.probability >= lo.probability - 2.0 * std::hypot(lo.standard_error, hi.standard_error));
  }
  REQUIRE(result.critical.has_value());
  CHECK(*result.critical > 0.0001);
  CHECK(*result.critical < 0.003);
}

TEST_CASE("beta12 sweep") {
  const auto pr = er_pair();
  const std::vector<double> grid{0.0, 0.01, 0.03, 0.1};
  const auto result = sweep_beta12(pr.host, pr.reservoir, er_params(), grid, 1000, options(1000));
  CHECK(result.parameter == "beta12");
  CHECK(result.points[0].probability == 0.0);
  for (const auto& pt : result.points) CHECK(pt.links == 1000);
  for (std::size_t k = 1; k < result.points.size(); ++k) {
    const auto& lo = result.points[k - 1];
    const auto& hi = result.points[k];
    CHECK(hi.probability >= lo.probability - 2.0 * std::hypot(lo.standard_error, hi.standard_error));
  }
  const std::vector<double> negative{-0.1, 0.1};
  CHECK_THROWS_AS(sweep_beta12(pr.host, pr.reservoir, er_params(), negative, 1000, options(10)), ParameterError);
  const std::vector<double> grid1{0.1};
  CHECK_THROWS_AS(sweep_beta12(pr.host, pr.reservoir, er_params(), grid1, 1000001, options(10)), ParameterError);
}

TEST_CASE("hub mode uses only reservoir hubs") {
  auto host = std::make_shared<const Graph>(gen_barabasi_albert(1000, 3, 1));
  auto reservoir = std::make_shared<const Graph>(gen_barabasi_albert(1000, 3, 2));
  EpidemicParams p;
  p.beta22 = 0.1;
  p.beta12 = 0.02;
  auto o = options(500);
  o.mode = CouplingMode::hubs;
  const std::vector<double> grid{0.0002, 0.001};
  const auto hubs = sweep_links(host, reservoir, p, grid, o);
  o.mode = CouplingMode::random;
  const auto random = sweep_links(host, reservoir, p, grid, o);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double se = std::hypot(hubs.points[k].standard_error, random.points[k].standard_error);
    CHECK(hubs.points[k].probability >= random.points[k].probability - 2.0 * se);
  }
}

TEST_CASE("regime boundary bookkeeping") {
  const auto pr = er_pair();
  BoundaryOptions o;
  o.sweep = options(300);
  o.iterations = 6;
  const std::vector<double> single{0.002};
  const auto one = regime_boundary(pr.host, pr.reservoir, er_params(), single, o);
  REQUIRE(one.points.size() == 1);
  REQUIRE(one.points[0].beta12_critical.has_value());
  CHECK(one.constant == doctest::Approx(0.002 * *one.points[0].beta12_critical));
  CHECK(one.max_relative_deviation == 0.0);

  o.beta12_hi = 0.002;
  const auto none = regime_boundary(pr.host, pr.reservoir, er_params(), single, o);
  CHECK_FALSE(none.points[0].beta12_critical.has_value());
  CHECK_FALSE(none.points[0].error.empty());

  const std::vector<double> too_small{0.0005};
  CHECK_THROWS_AS(regime_boundary(pr.host, pr.reservoir, er_params(), too_small, o), ParameterError);

  std::ostringstream csv;
  write_boundary_csv(csv, one);
  CHECK(csv.str().rfind("fraction,beta12_critical,product\n", 0) == 0);
}

TEST_CASE("reservoir calibration") {
  auto g = std::make_shared<const Graph>(gen_erdos_renyi_gnm(50, 100, 3));
  CalibrationOptions o;
  o.target_lo = o.target_hi = 10.0;
  o.realizations = 50;
  const auto zero = calibrate_reservoir_rate(g, o);
  CHECK(zero.beta22 == 0.0);
  CHECK(zero.mean == 10.0);

  // with one and then four realizations the mean is a multiple of 1/4, never inside this window
  o.target_lo = 10.3;
  o.target_hi = 10.45;
  o.realizations = 1;
  try {
    calibrate_reservoir_rate(g, o);
    FAIL("expected CalibrationError");
  } catch (const CalibrationError& e) {
    CHECK(std::string(e.what()).find("trace") != std::string::npos);
  }

  o.target_lo = 60.0;
  o.target_hi = 70.0;
  CHECK_THROWS_AS(calibrate_reservoir_rate(g, o), ParameterError);

  auto er = std::make_shared<const Graph>(gen_erdos_renyi_gnm(1000, 3255, 2));
  CalibrationOptions options;
  options.realizations = 1000;
  options.master_seed = 5;
  const auto cal = calibrate_reservoir_rate(er, options);
  CHECK(cal.mean >= 51.0);
  CHECK(cal.mean <= 53.0);
  CHECK(cal.beta22 > 0.1);
  CHECK(cal.beta22 < 0.2);
  CHECK(mean_outbreak_size(er, cal.beta22, options) == cal.mean);
  std::ostringstream csv;
  write_calibration_csv(csv, cal);
  CHECK(csv.str().rfind("step,beta22,R,mean_ever_infected\n", 0) == 0);
}

TEST_CASE("minimal links") {
  const auto pr = er_pair();
  auto p = er_params(0.0);
  CHECK_FALSE(minimal_links(pr.host, pr.reservoir, p, options(200)).has_value());

  p.beta12 = 0.05;
  const auto found = minimal_links(pr.host, pr.reservoir, p, options(300));
  REQUIRE(found.has_value());
  const auto at = estimate_point(pr.host, pr.reservoir, p, *found, 0.0, options(300));
  CHECK(at.probability >= 0.1);
  if (*found > 1) {
    const auto below = estimate_point(pr.host, pr.reservoir, p, *found - 1, 0.0, options(300));
    CHECK(below.probability < 0.1);
  }
}

TEST_CASE("topology comparison output") {
  auto ring = std::make_shared<const Graph>(gen_watts_strogatz(200, 4, 0.0, 1));
  auto er = std::make_shared<const Graph>(gen_erdos_renyi_gnm(200, 400, 1));
  const std::vector<Topology> tops{{"lattice", ring, ring}, {"er", er, er}};
  TopologyOptions o;
  o.sweep = options(200);
  o.calibration.realizations = 200;
  o.calibration.target_lo = 20;
  o.calibration.target_hi = 22;
  o.beta12 = 0.05;
  const auto results = topology_threshold_links(tops, o);
  REQUIRE(results.size() == 2);
  for (const auto& r : results) {
    CHECK(r.calibration.mean >= 20.0);
    CHECK(r.calibration.mean <= 22.0);
  }
  std::ostringstream csv;
  write_topology_csv(csv, results);
  CHECK(csv.str().rfind("topology,beta22,mean_ever_infected,min_links\n", 0) == 0);
}
