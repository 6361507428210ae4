#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "contagion/ensemble.hpp"
#include "contagion/rng.hpp"

using namespace contagion;

namespace {

FinancialParams standard_params() {
  FinancialParams p;
  p.external_rate = 1.02;
  p.interbank_rate = 1.01;
  p.liquidity_ratio = 0.5;
  p.leverage_ratio = 0.03;
  p.shocked_rate = 0.0;
  return p;
}

ExperimentConfig small_er() {
  ExperimentConfig cfg;
  cfg.family = NetworkFamily::er;
  cfg.n = 60;
  cfg.z_values = {6.0};
  cfg.replicates = 40;
  cfg.params = standard_params();
  cfg.master_seed = 4242;
  return cfg;
}

}  // namespace

TEST_SUITE("experiment_config") {
  TEST_CASE("family names round trip") {
    CHECK(family_from_string("er") == NetworkFamily::er);
    CHECK(family_from_string("ba") == NetworkFamily::ba);
    CHECK(family_from_string("cayley") == NetworkFamily::cayley);
    CHECK_THROWS_AS(family_from_string("ring"), std::invalid_argument);
    CHECK(std::string(to_string(NetworkFamily::ba)) == "ba");
  }

  TEST_CASE("validation catches bad setups") {
    ExperimentConfig cfg = small_er();
    cfg.z_values.clear();
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);

    cfg = small_er();
    cfg.replicates = 0;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);

    cfg = small_er();
    cfg.z_values = {75.0};  // exceeds n-1
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);

    cfg = small_er();
    cfg.family = NetworkFamily::ba;
    cfg.z_values = {5.0};  // BA needs z = 2m even
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);

    cfg = small_er();
    cfg.shock_rule = ShockRule::fixed_node;
    cfg.fixed_shock_node = 60;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);

    cfg = small_er();
    cfg.threads = 0;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);
  }
}

TEST_SUITE("run_ensemble") {
  TEST_CASE("record layout and determinism across thread counts") {
    ExperimentConfig cfg = small_er();
    cfg.z_values = {4.0, 8.0};
    const EnsembleResult one = run_ensemble(cfg);

    cfg.threads = 4;
    const EnsembleResult four = run_ensemble(cfg);

    REQUIRE(one.records.size() == 80);
    REQUIRE(four.records.size() == 80);
    for (size_t i = 0; i < one.records.size(); ++i) {
      const ReplicateRecord& a = one.records[i];
      const ReplicateRecord& b = four.records[i];
      CHECK(a.z_index == static_cast<int>(i) / 40);
      CHECK(a.replicate == static_cast<int>(i) % 40);
      CHECK(a.seed == child_seed(cfg.master_seed, i));
      CHECK(a.seed == b.seed);
      CHECK(a.shocked_bank == b.shocked_bank);
      CHECK(a.failures == b.failures);
      CHECK(a.residual == b.residual);  // byte-identical, not merely close
      CHECK(a.converged);
    }
    for (size_t z = 0; z < 2; ++z) {
      CHECK(one.per_z[z].failures_mean == four.per_z[z].failures_mean);
      CHECK(one.per_z[z].failures_sem == four.per_z[z].failures_sem);
    }
  }

  TEST_CASE("summary statistics match the records") {
    const ExperimentConfig cfg = small_er();
    const EnsembleResult res = run_ensemble(cfg);
    REQUIRE(res.per_z.size() == 1);
    const ZSummary& s = res.per_z[0];

    double sum = 0.0;
    for (const ReplicateRecord& r : res.records) sum += r.failures;
    const double mean = sum / 40.0;
    CHECK(s.failures_mean == doctest::Approx(mean).epsilon(1e-12));

    double ss = 0.0;
    for (const ReplicateRecord& r : res.records)
      ss += (r.failures - mean) * (r.failures - mean);
    CHECK(s.failures_sem ==
          doctest::Approx(std::sqrt(ss / 39.0) / std::sqrt(40.0))
              .epsilon(1e-12));

    CHECK(s.z == 6.0);
    CHECK(s.replicates == 40);
    CHECK(s.exclusions == 0);
    CHECK(s.k1_star == doctest::Approx(10.222672064777328));
    REQUIRE(s.k2_star.has_value());
    CHECK(*s.k2_star == doctest::Approx(2.73615080996).epsilon(1e-9));
    // ER mean-field: z q with q the Poisson CDF below the critical degree
    CHECK(s.failures_mean_mf > 0.0);

    // histogram holds every replicate once
    CHECK(s.histogram.sum() == doctest::Approx(40.0));
  }

  TEST_CASE("shock rules pick the advertised banks") {
    ExperimentConfig cfg = small_er();
    cfg.shock_rule = ShockRule::fixed_node;
    cfg.fixed_shock_node = 17;
    const EnsembleResult fixed = run_ensemble(cfg);
    for (const ReplicateRecord& r : fixed.records)
      CHECK(r.shocked_bank == 17);

    cfg = small_er();
    cfg.shock_rule = ShockRule::uniform_random;
    const EnsembleResult uni = run_ensemble(cfg);
    std::set<int> seen;
    for (const ReplicateRecord& r : uni.records) {
      CHECK(r.shocked_degree > 0);  // isolated banks are never shocked
      seen.insert(r.shocked_bank);
    }
    CHECK(seen.size() > 5);  // genuinely varies across replicates
  }

  TEST_CASE("degree-weighted shocks hit hubs more often") {
    ExperimentConfig cfg;
    cfg.family = NetworkFamily::ba;
    cfg.n = 80;
    cfg.z_values = {4.0};  // m = 2
    cfg.replicates = 300;
    cfg.params = standard_params();
    cfg.master_seed = 99;

    cfg.shock_rule = ShockRule::degree_weighted;
    const EnsembleResult weighted = run_ensemble(cfg);
    cfg.shock_rule = ShockRule::uniform_random;
    const EnsembleResult uniform = run_ensemble(cfg);

    double deg_w = 0.0, deg_u = 0.0;
    for (const ReplicateRecord& r : weighted.records) deg_w += r.shocked_degree;
    for (const ReplicateRecord& r : uniform.records) deg_u += r.shocked_degree;
    CHECK(deg_w / 300.0 > deg_u / 300.0 + 1.0);
  }

  TEST_CASE("cayley family shocks the root of one fixed tree") {
    ExperimentConfig cfg;
    cfg.family = NetworkFamily::cayley;
    cfg.n = 53;  // k=4 tree of depth 3
    cfg.z_values = {4.0};
    cfg.replicates = 3;
    cfg.params = standard_params();
    cfg.shock_rule = ShockRule::fixed_node;
    cfg.fixed_shock_node = 0;

    const EnsembleResult res = run_ensemble(cfg);
    for (const ReplicateRecord& r : res.records) {
      CHECK(r.shocked_bank == 0);
      CHECK(r.shocked_degree == 4);
      CHECK(r.failures == 4);  // first shell exactly
    }
    CHECK(res.per_z[0].failures_mean == doctest::Approx(4.0));
    CHECK(res.per_z[0].failures_mean_mf == doctest::Approx(4.0));
  }

  TEST_CASE("directed BA with full reciprocity reproduces undirected runs") {
    ExperimentConfig cfg;
    cfg.family = NetworkFamily::ba;
    cfg.n = 70;
    cfg.z_values = {4.0};
    cfg.replicates = 20;
    cfg.params = standard_params();
    cfg.master_seed = 31;

    const EnsembleResult undirected = run_ensemble(cfg);
    cfg.directed = true;
    cfg.recip_prob = 1.0;
    const EnsembleResult directed = run_ensemble(cfg);
    for (size_t i = 0; i < undirected.records.size(); ++i) {
      CHECK(undirected.records[i].failures == directed.records[i].failures);
      CHECK(undirected.records[i].shocked_bank ==
            directed.records[i].shocked_bank);
    }
  }

  TEST_CASE("an almost-failing economy still counts its rare cascades") {
    // external margin chosen so the critical degree sits below 1: no
    // neighbour can be subcritical and every replicate ends with F = 0
    ExperimentConfig cfg = small_er();
    cfg.params.external_rate = 1.6;
    cfg.replicates = 30;
    const EnsembleResult res = run_ensemble(cfg);
    CHECK(res.per_z[0].k1_star < 1.0);
    CHECK(res.per_z[0].failures_mean == 0.0);
    CHECK(res.per_z[0].failures_mean_mf == 0.0);
    for (const ReplicateRecord& r : res.records) CHECK(r.failures == 0);
  }
}

TEST_SUITE("histograms_and_tables") {
  TEST_CASE("histogram counts and overflow pooling") {
    std::vector<ReplicateRecord> recs(6);
    recs[0].failures = 0;
    recs[1].failures = 2;
    recs[2].failures = 2;
    recs[3].failures = 3;
    recs[4].failures = 9;
    recs[5].failures = 40;
    const Eigen::VectorXd h = histogram(recs, 4);
    REQUIRE(h.size() == 6);  // F = 0..4 plus overflow
    CHECK(h(0) == doctest::Approx(1.0 / 6));
    CHECK(h(2) == doctest::Approx(2.0 / 6));
    CHECK(h(3) == doctest::Approx(1.0 / 6));
    CHECK(h(5) == doctest::Approx(2.0 / 6));  // 9 and 40 pool at the end
    CHECK(h.sum() == doctest::Approx(1.0));
  }

  TEST_CASE("non-converged replicates are excluded from the histogram") {
    std::vector<ReplicateRecord> recs(3);
    recs[0].failures = 1;
    recs[1].failures = 1;
    recs[2].converged = false;
    recs[2].failures = 0;
    const Eigen::VectorXd h = histogram(recs, 2);
    CHECK(h(1) == doctest::Approx(1.0));
    CHECK(h(0) == 0.0);
  }

  TEST_CASE("sweep rows follow the per-z summaries") {
    ExperimentConfig cfg = small_er();
    cfg.z_values = {4.0, 6.0, 8.0};
    const EnsembleResult res = run_ensemble(cfg);
    const std::vector<SweepRow> rows = sweep_z(res);
    REQUIRE(rows.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
      CHECK(rows[i].z == cfg.z_values[i]);
      CHECK(rows[i].failures_mean_emp == res.per_z[i].failures_mean);
      CHECK(rows[i].failures_mean_mf == res.per_z[i].failures_mean_mf);
      CHECK(rows[i].k1_star == res.per_z[i].k1_star);
    }

    std::ostringstream csv;
    write_sweep_csv(rows, csv);
    const std::string text = csv.str();
    CHECK(text.find("# contagion sweep v1") == 0);
    CHECK(text.find("z,F_mean_emp,F_sem,F_mean_mf,k1_star") !=
          std::string::npos);
    // one header comment, one column row, three data rows
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  }

  TEST_CASE("hist csv carries empirical and analytic columns") {
    ExperimentConfig cfg = small_er();
    cfg.replicates = 25;
    const EnsembleResult res = run_ensemble(cfg);
    const ZSummary& s = res.per_z[0];
    const DegreeDistribution dist = poisson_degree_distribution(6.0, 60);
    const FailureDistribution mf = failures_dist_mf(
        dist, s.k1_star, static_cast<int>(s.histogram.size()) - 1);

    std::ostringstream csv;
    write_hist_csv(s, mf, csv);
    const std::string text = csv.str();
    CHECK(text.find("# contagion hist v1") == 0);
    CHECK(text.find("F,count,p_emp,p_mf") != std::string::npos);

    // parse back: counts must sum to the replicate count
    std::istringstream in(text);
    std::string line;
    double count_sum = 0.0, p_emp_sum = 0.0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 'F') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      double f = 0, count = 0, p_emp = 0, p_mf = 0;
      row >> f >> count >> p_emp >> p_mf;
      count_sum += count;
      p_emp_sum += p_emp;
    }
    CHECK(count_sum == doctest::Approx(25.0));
    CHECK(p_emp_sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}
