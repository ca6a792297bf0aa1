// exsp: data generation, solvers, prox spot checks, grouping simulation and
// the oracle suite from the command line.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or invalid input,
// 3 precondition (e.g. locp on overlapping groups), 4 numerical failure.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "exsp/elasso.hpp"
#include "exsp/errors.hpp"
#include "exsp/esvm.hpp"
#include "exsp/groups.hpp"
#include "exsp/io.hpp"
#include "exsp/prox.hpp"
#include "exsp/rng.hpp"
#include "exsp/synth.hpp"
#include "exsp/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace exsp;

namespace {

constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;
constexpr int kPrecondition = 3;
constexpr int kNumerical = 4;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("EXSP_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring non-numeric EXSP_SEED\n";
    }
  }
  return 0;
}

// Collects what a run did; written once as <out>/manifest.json.
struct Run {
  std::string command;
  fs::path out = ".";
  json manifest = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  fs::path artifact(const std::string& name) {
    manifest["artifacts"].push_back(name);
    return out / name;
  }

  void write(int exit_code, const std::string& error = {}) {
    manifest["command"] = command;
    manifest["exit_code"] = exit_code;
    if (!error.empty()) manifest["error"] = error;
    manifest["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!manifest.contains("artifacts")) manifest["artifacts"] = json::array();
    std::error_code ec;
    fs::create_directories(out, ec);
    std::ofstream f(out / "manifest.json", std::ios::binary);
    if (f) f << manifest.dump(2) << '\n';
  }
};

struct SolverFlags {
  std::size_t max_iters = 100000;
  double rel_tol = 1e-8;
  std::string step = "backtracking";
  double gamma = 0.0;
  std::string momentum = "standard";

  void add_to(CLI::App* app) {
    app->add_option("--max-iters", max_iters, "Iteration limit")->check(CLI::PositiveNumber);
    app->add_option("--rel-tol", rel_tol, "Stop when ||dx|| / max(1, ||x||) <= rel-tol")
        ->check(CLI::PositiveNumber);
    app->add_option("--step", step, "Step rule")->check(CLI::IsMember({"backtracking", "fixed"}));
    app->add_option("--gamma", gamma, "Fixed step size; 0 uses 1/L")->check(CLI::NonNegativeNumber);
    app->add_option("--momentum", momentum, "Momentum recurrence")
        ->check(CLI::IsMember({"standard", "printed"}));
  }

  SolveConfig config() const {
    SolveConfig cfg;
    cfg.max_iters = max_iters;
    cfg.rel_tol = rel_tol;
    if (step == "fixed") cfg.step = FixedStep{gamma};
    cfg.momentum = momentum == "printed" ? MomentumRule::printed : MomentumRule::standard;
    return cfg;
  }

  json to_json() const {
    return {{"max_iters", max_iters}, {"rel_tol", rel_tol}, {"step", step},
            {"gamma", gamma},         {"momentum", momentum}};
  }
};

void write_history(Run& run, const SolveHistory& h) {
  std::ofstream f(run.artifact("history.csv"), std::ios::binary);
  write_history_csv(f, h);
}

// Row-per-sample CSV with the label in the last column -> (n x N matrix, labels).
std::pair<Matrix, Vector> load_samples(const fs::path& path) {
  const Matrix rows = read_matrix_csv(path);
  require(rows.cols() >= 2, "samples csv: need at least one feature and a label column");
  const std::size_t n = rows.cols() - 1;
  Matrix X(n, rows.rows());
  Vector labels(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    for (std::size_t f = 0; f < n; ++f) X(f, i) = rows(i, f);
    labels[i] = rows(i, n);
  }
  return {std::move(X), std::move(labels)};
}

void save_samples(const fs::path& path, const Matrix& X, std::span<const double> labels) {
  Matrix rows(X.cols(), X.rows() + 1);
  for (std::size_t i = 0; i < X.cols(); ++i) {
    for (std::size_t f = 0; f < X.rows(); ++f) rows(i, f) = X(f, i);
    rows(i, X.rows()) = labels[i];
  }
  write_matrix_csv(path, rows);
}

std::string format_vector(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s + "]";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exclusive-sparsity solvers, generators and oracle checks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  Run run;
  std::uint64_t seed = default_seed();
  std::string out_dir = ".";
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "PRNG seed (default: $EXSP_SEED or 0)");
    sub->add_option("--out", out_dir, "Output directory (manifest and artifacts)");
  };

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  gen->require_subcommand(1);
  std::size_t n = 0, N = 0, m = 0, k = 0, size_min = 0, size_max = 0, test_samples = 0;
  double sigma = 0.01, d = -1.0, target_error = 0.10;
  auto* gen_dis = gen->add_subcommand("elasso-disjoint", "Regression data, contiguous disjoint groups");
  auto* gen_ovl = gen->add_subcommand("elasso-overlap", "Regression data, random overlapping groups");
  auto* gen_svm = gen->add_subcommand("esvm", "Two-class data around a planted sparse classifier");
  for (auto* sub : {gen_dis, gen_ovl}) {
    sub->add_option("--n", n, "Features")->required()->check(CLI::PositiveNumber);
    sub->add_option("--N", N, "Samples")->required()->check(CLI::PositiveNumber);
    sub->add_option("--m", m, "Groups")->required()->check(CLI::PositiveNumber);
    sub->add_option("--sigma", sigma, "Noise level")->check(CLI::NonNegativeNumber);
    common(sub);
  }
  gen_dis->add_option("--k", k, "Nonzeros per group")->required();
  k = 4;
  gen_ovl->add_option("--k", k, "Nonzeros per group (default 4)");
  gen_ovl->add_option("--size-min", size_min, "Smallest group size")->required();
  gen_ovl->add_option("--size-max", size_max, "Largest group size")->required();
  gen_svm->add_option("--n", n, "Features")->required()->check(CLI::PositiveNumber);
  gen_svm->add_option("--m", m, "Samples and groups (even)")->required()->check(CLI::PositiveNumber);
  auto* d_opt = gen_svm->add_option("--d", d, "Margin scale; tuned when omitted");
  gen_svm->add_option("--target-error", target_error, "Error of w* that --d is tuned to")
      ->excludes(d_opt)
      ->check(CLI::Range(0.0, 0.5));
  gen_svm->add_option("--test-samples", test_samples, "Also write a test set of this size");
  common(gen_svm);

  // solve-elasso
  auto* se = app.add_subcommand("solve-elasso", "Solve 1/2||Xw-y||^2 + lambda/2 sum_g ||w_g||_1^2");
  std::string x_path, y_path, groups_path, solver = "pcp";
  double lambda = 0.0;
  SolverFlags flags;
  se->add_option("--X", x_path, "Design CSV, one row per sample")->required();
  se->add_option("--y", y_path, "Response CSV")->required();
  se->add_option("--groups", groups_path, "GroupSet JSON")->required();
  se->add_option("--lambda", lambda, "Penalty weight")->required()->check(CLI::PositiveNumber);
  se->add_option("--solver", solver, "pcp (any groups) or locp (disjoint)")
      ->check(CLI::IsMember({"pcp", "locp"}));
  flags.add_to(se);
  common(se);

  // solve-esvm
  auto* sv = app.add_subcommand("solve-esvm", "Train an exclusive SVM through its dual");
  std::string samples_path, test_path;
  std::size_t random_groups = 0;
  double alpha = 1.0, beta = 1.0, gap_tol = 1e-4;
  sv->add_option("--samples", samples_path, "Training CSV, one row per sample, label last")->required();
  auto* g_opt = sv->add_option("--groups", groups_path, "GroupSet JSON");
  sv->add_option("--random-groups", random_groups, "Use a random grouping into this many groups")
      ->excludes(g_opt);
  sv->add_option("--test", test_path, "Test CSV in the training format");
  sv->add_option("--alpha", alpha, "l2 weight")->check(CLI::PositiveNumber);
  sv->add_option("--beta", beta, "Exclusive weight")->check(CLI::PositiveNumber);
  sv->add_option("--gap-tol", gap_tol, "Stop when gap <= gap-tol (1 + |primal|)")
      ->check(CLI::PositiveNumber);
  flags.add_to(sv);
  common(sv);

  // prox
  auto* px = app.add_subcommand("prox", "Weighted cone projection of (a, b)");
  std::string cone, a_text;
  double b = 0.0, zeta = 1.0;
  px->add_option("cone", cone, "l1 or linf")->required()->check(CLI::IsMember({"l1", "linf"}));
  px->add_option("--a", a_text, "Comma-separated vector")->required();
  px->add_option("--b", b, "Scalar part")->required();
  px->add_option("--zeta", zeta, "Weight on the scalar part")->check(CLI::PositiveNumber);
  common(px);

  // grouping-sim
  auto* gs = app.add_subcommand("grouping-sim", "Monte-Carlo balance of the random grouping");
  std::size_t s_true = 0, trials = 1000;
  double t_dev = 0.5;
  gs->add_option("--n", n, "Features")->required()->check(CLI::PositiveNumber);
  gs->add_option("--s", s_true, "True features")->required()->check(CLI::PositiveNumber);
  gs->add_option("--m", m, "Groups")->required()->check(CLI::PositiveNumber);
  gs->add_option("--t", t_dev, "Deviation; bound is (1+t)/(1-t)")->check(CLI::Range(0.0, 0.999999));
  gs->add_option("--trials", trials, "Trials")->check(CLI::PositiveNumber);
  common(gs);

  // verify
  auto* vf = app.add_subcommand("verify", "Run the oracle suite");
  std::vector<std::string> only;
  vf->add_option("--only", only, "Restrict to modules")->delimiter(',');
  common(vf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  run.out = out_dir;
  run.manifest["seed"] = seed;
  int exit_code = 0;
  try {
    fs::create_directories(run.out);
    if (gen->parsed()) {
      if (gen_dis->parsed() || gen_ovl->parsed()) {
        const bool disjoint = gen_dis->parsed();
        run.command = disjoint ? "gen-data elasso-disjoint" : "gen-data elasso-overlap";
        json params = {{"n", n}, {"N", N}, {"m", m}, {"k_per_group", k}, {"sigma", sigma}};
        if (!disjoint) {
          params["size_min"] = size_min;
          params["size_max"] = size_max;
        }
        run.manifest["parameters"] = params;
        const ElassoDataset ds = disjoint
                                     ? gen_elasso_disjoint(n, N, m, k, sigma, seed)
                                     : gen_elasso_overlap(n, N, m, size_min, size_max, k, sigma, seed);
        write_matrix_csv(run.artifact("X.csv"), ds.X);
        write_vector_csv(run.artifact("y.csv"), ds.y);
        write_vector_csv(run.artifact("w_star.csv"), ds.w_star);
        write_groups_json(run.artifact("groups.json"), ds.groups);
        run.manifest["lambda_suggested"] = ds.lambda_suggested;
        run.manifest["solver_lambda"] = ds.solver_lambda();
        run.manifest["disjoint"] = ds.groups.is_disjoint();
      } else {
        run.command = "gen-data esvm";
        json params = {{"n", n}, {"m", m}, {"test_samples", test_samples}};
        if (d < 0.0 && d_opt->count() == 0) {
          const MarginTuning tuned = tune_margin_scale(n, m, target_error, seed);
          d = tuned.d;
          params["target_error"] = target_error;
          run.manifest["tuning"] = {{"holdout_error", tuned.holdout_error},
                                    {"analytic_error", tuned.analytic_error},
                                    {"holdout_size", tuned.holdout_size}};
        }
        params["d"] = d;
        run.manifest["parameters"] = params;
        run.manifest["d"] = d;
        const EsvmDataset ds = gen_esvm(n, m, d, seed);
        save_samples(run.artifact("train.csv"), ds.X, ds.labels);
        write_matrix_csv(run.artifact("X.csv"), ds.X);
        write_vector_csv(run.artifact("labels.csv"), ds.labels);
        write_vector_csv(run.artifact("w_star.csv"), ds.w_star);
        write_groups_json(run.artifact("groups.json"), ds.groups);
        if (test_samples > 0) {
          const LabeledSamples test = draw_esvm_samples(ds.w_star, d, test_samples, derive_seed(seed, 2));
          save_samples(run.artifact("test.csv"), test.X, test.labels);
        }
      }
    } else if (se->parsed()) {
      run.command = "solve-elasso";
      json params = flags.to_json();
      params.update({{"X", x_path}, {"y", y_path}, {"groups", groups_path}, {"lambda", lambda},
                     {"solver", solver}});
      run.manifest["parameters"] = params;
      const ElassoProblem p{read_matrix_csv(fs::path(x_path)), read_vector_csv(y_path),
                            read_groups_json(groups_path), lambda};
      SolveConfig cfg = flags.config();
      cfg.seed = seed;
      const ElassoResult res = solver == "locp" ? solve_fista_locp(p, cfg) : solve_fista_pcp(p, cfg);
      write_vector_csv(run.artifact("w.csv"), res.w);
      write_history(run, res.history);
      const double objective = elasso_objective(p, res.w);
      const json metrics = {{"objective", objective},
                            {"iterations", res.history.iterations},
                            {"termination", termination_name(res.history.reason)},
                            {"nonzeros", std::count_if(res.w.begin(), res.w.end(),
                                                       [](double v) { return v != 0.0; })}};
      write_text_file(run.artifact("metrics.json"), metrics.dump(2) + "\n");
      run.manifest["termination"] = termination_name(res.history.reason);
      run.manifest["final_objective"] = objective;
      std::cout << "objective " << format_double(objective) << " after " << res.history.iterations
                << " iterations (" << termination_name(res.history.reason) << ")\n";
    } else if (sv->parsed()) {
      run.command = "solve-esvm";
      json params = flags.to_json();
      params.update({{"samples", samples_path}, {"alpha", alpha}, {"beta", beta}, {"gap_tol", gap_tol}});
      if (!groups_path.empty()) params["groups"] = groups_path;
      if (random_groups) params["random_groups"] = random_groups;
      if (!test_path.empty()) params["test"] = test_path;
      run.manifest["parameters"] = params;
      auto [X, labels] = load_samples(samples_path);
      require(!groups_path.empty() || random_groups > 0, "solve-esvm: give --groups or --random-groups");
      GroupSet groups = groups_path.empty() ? random_grouping(X.rows(), random_groups, seed)
                                            : read_groups_json(groups_path);
      if (groups_path.empty()) write_groups_json(run.artifact("groups.json"), groups);
      const EsvmProblem p(X, labels, std::move(groups), alpha, beta);
      SolveConfig cfg = flags.config();
      cfg.seed = seed;
      const EsvmResult res = solve_fista_licp(p, cfg, {gap_tol, 10});
      write_vector_csv(run.artifact("w.csv"), res.w);
      write_history(run, res.history);
      json metrics = {{"train_accuracy", accuracy(predict(res.w, p.X()), p.labels())},
                      {"duality_gap", res.gap},
                      {"primal_objective", res.primal},
                      {"iterations", res.history.iterations},
                      {"termination", termination_name(res.history.reason)}};
      metrics["test_accuracy"] = nullptr;
      if (!test_path.empty()) {
        const auto [Xt, yt] = load_samples(test_path);
        require(Xt.rows() == p.features(), "test csv: feature count differs from training");
        metrics["test_accuracy"] = accuracy(predict(res.w, Xt), yt);
      }
      write_text_file(run.artifact("metrics.json"), metrics.dump(2) + "\n");
      run.manifest["termination"] = termination_name(res.history.reason);
      run.manifest["final_objective"] = res.primal;
      run.manifest["duality_gap"] = res.gap;
      std::cout << "primal " << format_double(res.primal) << " gap " << format_double(res.gap)
                << " after " << res.history.iterations << " iterations\n";
    } else if (px->parsed()) {
      run.command = "prox " + cone;
      run.manifest["parameters"] = {{"a", a_text}, {"b", b}, {"zeta", zeta}};
      const Vector a = parse_vector(a_text);
      const ConePoint p = cone == "l1" ? project_l1_cone(a, b, zeta) : project_linf_cone(a, b, zeta);
      const double kkt = cone == "l1" ? l1_cone_kkt_residual(a, b, zeta, p)
                                      : linf_cone_kkt_residual(a, b, zeta, p);
      std::cout << "x=" << format_vector(p.x) << "\ny=" << format_double(p.y)
                << "\nkkt_residual=" << format_double(kkt) << '\n';
      run.manifest["result"] = {{"x", p.x}, {"y", p.y}, {"kkt_residual", kkt}};
    } else if (gs->parsed()) {
      run.command = "grouping-sim";
      run.manifest["parameters"] = {{"n", n}, {"s", s_true}, {"m", m}, {"t", t_dev}, {"trials", trials}};
      const BalanceSimulation sim = simulate_balance(n, s_true, m, t_dev, trials, seed);
      const json report = {{"trials", sim.trials},
                           {"bound", sim.bound},
                           {"within_bound", sim.within_bound},
                           {"unbalanced", sim.unbalanced},
                           {"success_fraction", sim.success_fraction()},
                           {"unbalanced_fraction", sim.unbalanced_fraction()},
                           {"worst_ratio", sim.worst_ratio}};
      write_text_file(run.artifact("grouping_report.json"), report.dump(2) + "\n");
      run.manifest["report"] = report;
      std::cout << "success_fraction " << sim.success_fraction() << " (ratio <= "
                << format_double(sim.bound) << "), unbalanced_fraction "
                << sim.unbalanced_fraction() << '\n';
    } else if (vf->parsed()) {
      run.command = "verify";
      run.manifest["parameters"] = {{"only", only}};
      const auto checks = run_verify(std::set<std::string>(only.begin(), only.end()), seed);
      bool all = true;
      json table = json::array();
      for (const auto& c : checks) {
        all = all && c.pass;
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.module << ": " << c.name << " (" << c.detail
                  << ")\n";
        table.push_back({{"module", c.module}, {"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      }
      run.manifest["checks"] = table;
      std::cout << (all ? "all checks passed" : "some checks FAILED") << '\n';
      exit_code = all ? 0 : kVerifyFailed;
    }
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    run.write(kPrecondition, e.what());
    return kPrecondition;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    run.write(kNumerical, e.what());
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    run.write(kUsage, e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    run.write(kUsage, e.what());
    return kUsage;
  }
  run.write(exit_code);
  return exit_code;
}
