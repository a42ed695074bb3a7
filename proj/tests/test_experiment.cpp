#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "zovr/experiment.hpp"

using namespace zovr;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("zovr_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

ExperimentConfig quick_config(const std::string& out) {
  std::istringstream in(
      "# small synthetic run\n"
      "problem = quadratic\n"
      "d1 = 4\n"
      "d2 = 3\n"
      "kappa = 2\n"
      "sigma = 0.05\n"
      "eps = 0.2\n"
      "budget = 10000\n");
  ExperimentConfig cfg = parse_config(in);
  cfg.output = out;
  return cfg;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

const char* kFixtureCsv =
    "iter,queries,phi,grad_phi_norm,delta_t,Delta_t\n"
    "0,100,2.5,1,,\n"
    "1,250,1.75,0.5,,\n"
    "2,400,0.9,0.25,0.1,\n";

}  // namespace

TEST(Config, ParsesKeysCommentsAndAliases) {
  std::istringstream in(
      "problem = dro   # inline comment\n"
      "\n"
      "data = x.libsvm\n"
      "algo = zo-sgdmsa\n"
      "profile = theory\n"
      "schedule = benchmark\n"
      "regime = finite\n"
      "minority = negative\n"
      "seed = 17\n"
      "out = t.csv\n"
      "timescale_ratio = inf\n"
      "alpha = 0.5\n");
  const ExperimentConfig cfg = parse_config(in);
  EXPECT_EQ(cfg.problem, "dro");
  EXPECT_EQ(cfg.data, "x.libsvm");
  EXPECT_EQ(cfg.algorithm, Algorithm::Sgdmsa);
  EXPECT_EQ(cfg.profile, Profile::Theory);
  EXPECT_EQ(cfg.schedule, Schedule::Benchmark);
  EXPECT_TRUE(cfg.finite_sum);
  EXPECT_EQ(cfg.minority, MinorityClass::Negative);
  EXPECT_EQ(cfg.seed, 17u);
  EXPECT_EQ(cfg.output, "t.csv");
  EXPECT_TRUE(std::isinf(cfg.timescale_ratio));
  EXPECT_EQ(cfg.overrides.at("alpha"), "0.5");
  EXPECT_EQ(algorithm_name(cfg.algorithm), "zo-sgdmsa");
}

TEST(Config, ErrorsNameTheLine) {
  auto message = [](const std::string& text) -> std::string {
    std::istringstream in(text);
    try {
      parse_config(in);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_EQ(message("eps = 0.1\nbogus = 1\n").rfind("line 2:", 0), 0u);
  EXPECT_EQ(message("no equals sign\n").rfind("line 1:", 0), 0u);
  EXPECT_EQ(message("d1 = ten\n").rfind("line 1:", 0), 0u);
  EXPECT_EQ(message("algorithm = zo-nope\n").rfind("line 1:", 0), 0u);
  EXPECT_EQ(message("snapshot_mode = huge\n").rfind("line 1:", 0), 0u);
  EXPECT_THROW(load_config("/nonexistent/zovr.cfg"), ConfigError);
}

TEST(Config, ValidationRejectsOutOfRangeValues) {
  ExperimentConfig cfg;
  cfg.eps = 1.0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = ExperimentConfig{};
  cfg.query_budget = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = ExperimentConfig{};
  cfg.eval_every = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  EXPECT_NO_THROW(validate(ExperimentConfig{}));
}

TEST(RunExperiment, WritesIncreasingTrace) {
  TempDir dir;
  for (const char* algo : {"zo-vrgda", "zo-isarah", "zo-sgda", "zo-sgdmsa"}) {
    ExperimentConfig cfg = quick_config(dir.file(std::string(algo) + ".csv"));
    set_config_value(cfg, "algorithm", algo);
    std::ostringstream log;
    const ExperimentOutcome o = run_experiment(cfg, log);
    ASSERT_EQ(o.exit_code, 0) << algo << ": " << log.str();
    EXPECT_LE(o.queries, 10000) << algo;
    const std::string text = slurp(cfg.output);
    EXPECT_EQ(text.substr(0, text.find('\n')), kTraceHeader);
    const auto rows = read_rows(cfg.output);
    ASSERT_GE(rows.size(), 1u) << algo;
    EXPECT_EQ(rows.size(), o.rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ASSERT_EQ(rows[i].size(), 6u);
      EXPECT_FALSE(rows[i][2].empty());
      if (i > 0) EXPECT_GT(std::stoll(rows[i][1]), std::stoll(rows[i - 1][1])) << algo;
    }
    EXPECT_TRUE(fs::exists(cfg.output + ".eval_queries"));
    EXPECT_NE(slurp(cfg.output + ".eval_queries").find("algorithm=" + std::string(algo)),
              std::string::npos);
  }
}

TEST(RunExperiment, SameSeedIsByteIdentical) {
  TempDir dir;
  ExperimentConfig a = quick_config(dir.file("a.csv"));
  ExperimentConfig b = quick_config(dir.file("b.csv"));
  ExperimentConfig c = quick_config(dir.file("c.csv"));
  c.seed = 99;
  std::ostringstream log;
  ASSERT_EQ(run_experiment(a, log).exit_code, 0);
  ASSERT_EQ(run_experiment(b, log).exit_code, 0);
  ASSERT_EQ(run_experiment(c, log).exit_code, 0);
  EXPECT_EQ(slurp(a.output), slurp(b.output));
  EXPECT_NE(slurp(a.output), slurp(c.output));
}

TEST(RunExperiment, TinyBudgetIsNeverExceeded) {
  TempDir dir;
  for (const char* algo : {"zo-vrgda", "zo-isarah", "zo-sgda", "zo-sgdmsa"}) {
    for (const char* budget : {"10", "5000"}) {
      ExperimentConfig cfg = quick_config(dir.file("t.csv"));
      set_config_value(cfg, "algorithm", algo);
      set_config_value(cfg, "budget", budget);
      std::ostringstream log;
      const ExperimentOutcome o = run_experiment(cfg, log);
      ASSERT_EQ(o.exit_code, 0) << algo << ": " << log.str();
      EXPECT_LE(o.queries, std::stoll(budget)) << algo;
    }
  }
}

TEST(RunExperiment, EvalEveryThinsRowsWithoutChangingThem) {
  TempDir dir;
  ExperimentConfig all = quick_config(dir.file("all.csv"));
  all.algorithm = Algorithm::Sgda;
  ExperimentConfig thin = all;
  thin.output = dir.file("thin.csv");
  thin.eval_every = 3;
  std::ostringstream log;
  ASSERT_EQ(run_experiment(all, log).exit_code, 0);
  ASSERT_EQ(run_experiment(thin, log).exit_code, 0);
  const auto a = read_rows(all.output);
  const auto t = read_rows(thin.output);
  ASSERT_GE(t.size(), 2u);
  for (const auto& row : t) EXPECT_EQ(row, a.at(std::stoul(row[0])));
}

TEST(RunExperiment, BadConfigExitsWithTwo) {
  TempDir dir;
  ExperimentConfig cfg = quick_config(dir.file("x.csv"));
  cfg.problem = "dro";
  cfg.data = dir.file("missing.libsvm");
  std::ostringstream log;
  EXPECT_EQ(run_experiment(cfg, log).exit_code, 2);
  EXPECT_FALSE(log.str().empty());

  write(dir.file("bad.libsvm"), "+1 1:1\n-1 2:x\n");
  cfg.data = dir.file("bad.libsvm");
  log.str("");
  EXPECT_EQ(run_experiment(cfg, log).exit_code, 2);
  EXPECT_NE(log.str().find("line 2"), std::string::npos);

  cfg = quick_config(dir.file("x.csv"));
  cfg.overrides["alpha"] = "-1";
  EXPECT_EQ(run_experiment(cfg, log).exit_code, 2);
}

TEST(RunExperiment, DroRunChargesEvaluationSeparately) {
  TempDir dir;
  write(dir.file("d.libsvm"),
        "+1 1:1 3:0.5\n-1 2:1\n-1 1:0.3 2:-0.7\n+1 3:1\n-1 1:-1 2:0.2 3:0.1\n");
  ExperimentConfig cfg;
  cfg.problem = "dro";
  cfg.data = dir.file("d.libsvm");
  cfg.schedule = Schedule::Benchmark;
  cfg.query_budget = 20000;
  cfg.output = dir.file("d.csv");
  std::ostringstream log;
  const ExperimentOutcome o = run_experiment(cfg, log);
  ASSERT_EQ(o.exit_code, 0) << log.str();
  EXPECT_EQ(o.eval_queries, static_cast<std::int64_t>(o.rows) * 5);
  EXPECT_LE(o.queries, 20000);
}

TEST(Compare, FixtureLookup) {
  std::istringstream a(kFixtureCsv);
  EXPECT_EQ(queries_to_target(a, 2.0), 250);
  std::istringstream b(kFixtureCsv);
  EXPECT_EQ(queries_to_target(b, 0.9), 400);
  std::istringstream c(kFixtureCsv);
  EXPECT_EQ(queries_to_target(c, 3.0), 100);
  std::istringstream d(kFixtureCsv);
  EXPECT_FALSE(queries_to_target(d, 0.5).has_value());
}

TEST(Compare, SchemaMismatch) {
  std::istringstream header("iter,queries,loss\n0,1,2\n");
  EXPECT_THROW(queries_to_target(header, 1.0), SchemaMismatch);
  std::istringstream fields("iter,queries,phi,grad_phi_norm,delta_t,Delta_t\n0,1,2\n");
  EXPECT_THROW(queries_to_target(fields, 1.0), SchemaMismatch);
  std::istringstream number("iter,queries,phi,grad_phi_norm,delta_t,Delta_t\n0,x,2,,,\n");
  EXPECT_THROW(queries_to_target(number, 1.0), SchemaMismatch);
  std::istringstream empty("");
  EXPECT_THROW(queries_to_target(empty, 1.0), SchemaMismatch);
}

TEST(Compare, MultipleFiles) {
  TempDir dir;
  write(dir.file("a.csv"), kFixtureCsv);
  write(dir.file("b.csv"), "iter,queries,phi,grad_phi_norm,delta_t,Delta_t\n0,10,5,,,\n");
  const auto rows = compare_traces({dir.file("a.csv"), dir.file("b.csv")}, 1.0);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].queries, 400);
  EXPECT_FALSE(rows[1].queries.has_value());
  EXPECT_THROW(compare_traces({dir.file("none.csv")}, 1.0), SchemaMismatch);
}

TEST(TraceRow, EmptyOptionalFields) {
  IterationRecord r;
  r.iter = 3;
  r.queries = 1200;
  r.phi = 0.25;
  EXPECT_EQ(format_trace_row(r), "3,1200,0.25,,,");
  r.Delta_t = 1e-7;
  EXPECT_EQ(format_trace_row(r), "3,1200,0.25,,,1e-07");
}
