#include "miblp/bench.hpp"
#include "miblp/bnc.hpp"
#include "miblp/kopt.hpp"
#include "miblp/numeric.hpp"
#include "miblp/oracle.hpp"
#include "miblp/verify.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace miblp;

namespace {

// Exit codes
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kMissingFile = 2;
constexpr int kBadInput = 3;
constexpr int kIncomplete = 4;
constexpr int kChecksFailed = 5;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) {
    Rational r;
    if (!parse_rational(tok, r)) throw UsageError("not a number: " + tok);
    out.push_back(to_double(r));
  }
  return out;
}

IntVector parse_ints(const std::string& text) {
  IntVector out;
  for (const auto& tok : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("not an integer: " + tok);
    }
  }
  return out;
}

MiblpInstance load(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingFile("no such file: " + path);
  return load_instance(path);
}

std::string join(const std::vector<double>& v) {
  std::ostringstream out;
  out << std::setprecision(12);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

std::string join(const IntVector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string tuple(const IntPoint& p) {
  std::string s = join(p.x);
  if (!p.y.empty()) s += "," + join(p.y);
  return "(" + s + ")";
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

const std::map<std::string, DirectionMethod> kMethods{{"milp", DirectionMethod::ExactMilp},
                                                      {"milp-k", DirectionMethod::ExactMilpK},
                                                      {"local-search", DirectionMethod::LocalSearch}};
const std::map<std::string, ObjectiveKind> kObjectives{
    {"norm1", ObjectiveKind::Norm1}, {"idic", ObjectiveKind::IdicFriendly}, {"steepest", ObjectiveKind::Steepest}};
const std::map<std::string, OracleMode> kOracles{{"id", OracleMode::ImprovingDirection},
                                                 {"legacy", OracleMode::Legacy}};
const std::map<std::string, BranchStrategy> kBranches{{"fractional", BranchStrategy::Fractional},
                                                      {"linking", BranchStrategy::LinkingPriority}};

template <class T>
std::vector<std::string> keys(const std::map<std::string, T>& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

struct OracleFlags {
  std::string method = "milp";
  std::optional<int> k;
  std::string objective = "norm1";
  std::optional<int> depth_lb;
  std::optional<std::string> depth_ub;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--direction-method", method, "How improving directions are found")
        ->check(CLI::IsMember(keys(kMethods)));
    cmd->add_option("--k", k, "Neighborhood radius for milp-k and local-search");
    cmd->add_option("--obj", objective, "Direction objective")->check(CLI::IsMember(keys(kObjectives)));
  }

  void add_depth(CLI::App* cmd) {
    cmd->add_option("--ls-depth-lb", depth_lb, "First tree depth using the heuristic");
    cmd->add_option("--ls-depth-ub", depth_ub, "Last tree depth using the heuristic (int or inf)");
  }

  OracleConfig build() const {
    OracleConfig cfg;
    cfg.method = kMethods.at(method);
    cfg.objective = kObjectives.at(objective);
    const bool k_method = cfg.method != DirectionMethod::ExactMilp;
    if (k && !k_method) throw UsageError("--k requires --direction-method milp-k or local-search");
    if ((depth_lb || depth_ub) && cfg.method != DirectionMethod::LocalSearch) {
      throw UsageError("--ls-depth-lb/--ls-depth-ub require --direction-method local-search");
    }
    if (k) cfg.k = *k;
    if (depth_lb) cfg.depth_lb = *depth_lb;
    if (depth_ub && *depth_ub != "inf") {
      try {
        std::size_t used = 0;
        cfg.depth_ub = std::stoi(*depth_ub, &used);
        if (used != depth_ub->size()) throw std::invalid_argument(*depth_ub);
      } catch (const std::exception&) {
        throw UsageError("--ls-depth-ub expects an integer or inf");
      }
    }
    try {
      cfg.check();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

struct SolveArgs {
  std::string file;
  std::string oracle = "id";
  OracleFlags oracle_flags;
  std::string cuts = "idic";
  std::string branch = "fractional";
  std::optional<double> time_limit;
  std::uint64_t seed = 0;
  std::string trace;
};

int run_solve(const SolveArgs& a) {
  SolverConfig cfg;
  cfg.oracle_mode = kOracles.at(a.oracle);
  cfg.oracle = a.oracle_flags.build();
  cfg.branching = kBranches.at(a.branch);
  cfg.use_idic = false;
  cfg.use_isic = false;
  for (const auto& c : split(a.cuts, ',')) {
    if (c == "idic") {
      cfg.use_idic = true;
    } else if (c == "isic") {
      cfg.use_isic = true;
    } else if (c != "none") {
      throw UsageError("--cuts takes a list of idic, isic or none");
    }
  }
  if (a.time_limit) cfg.time_limit = *a.time_limit;
  cfg.seed = a.seed;

  const MiblpInstance inst = load(a.file);
  std::ofstream trace;
  if (!a.trace.empty()) {
    trace.open(a.trace);
    if (!trace) throw UsageError("cannot open trace file " + a.trace);
    cfg.trace = &trace;
  }
  const SolveResult r = solve(inst, cfg);

  std::cout << "status     " << to_string(r.status) << "\n";
  if (r.has_incumbent) {
    std::cout << "incumbent  x=(" << join(r.incumbent.x) << ") y=(" << join(r.incumbent.y) << ")\n";
  } else {
    std::cout << "incumbent  none\n";
  }
  std::cout << "value      " << fmt(r.value) << "\n"
            << "bound      " << fmt(r.bound) << "\n"
            << "gap        " << fmt(r.gap) << "\n"
            << "nodes      " << r.stats.nodes << "\n"
            << "cuts       idic=" << r.stats.idic_cuts << " isic=" << r.stats.isic_cuts << "\n"
            << "ifd time   " << fmt(r.stats.oracle.ifd_seconds) << " s over " << r.stats.oracle.ifd_calls
            << " calls\n"
            << "wall time  " << fmt(r.stats.seconds) << " s\n";
  // timings stay out of the record so it is reproducible
  std::cout << "RESULT status=" << to_string(r.status) << " value=" << fmt(r.value) << " bound=" << fmt(r.bound)
            << " gap=" << fmt(r.gap) << " nodes=" << r.stats.nodes << " idic=" << r.stats.idic_cuts
            << " isic=" << r.stats.isic_cuts << " x=" << (r.has_incumbent ? join(r.incumbent.x) : "none")
            << " y=" << (r.has_incumbent ? join(r.incumbent.y) : "none") << "\n";
  return r.status == SolveStatus::LimitReached ? kIncomplete : kOk;
}

struct OracleArgs {
  std::string file;
  std::string x;
  std::string y;
  OracleFlags flags;
};

int run_oracle(const OracleArgs& a) {
  const OracleConfig cfg = a.flags.build();
  const MiblpInstance inst = load(a.file);
  const NumericInstance num(inst);
  Point p{parse_doubles(a.x), parse_doubles(a.y)};
  if (static_cast<int>(p.x.size()) != num.n1 || static_cast<int>(p.y.size()) != num.n2) {
    throw UsageError("point dimensions do not match the instance");
  }
  const bool p_ok = in_P(num, p);
  const bool s_ok = in_S(num, p);
  if (!p_ok) std::cout << "note       point is outside P\n";

  OracleOutcome out;
  switch (cfg.method) {
    case DirectionMethod::ExactMilp:
      out = solve_direction_milp(num, p, std::nullopt, cfg.objective, cfg.limits);
      break;
    case DirectionMethod::ExactMilpK:
      out = solve_direction_milp(num, p, cfg.k, cfg.objective, cfg.limits);
      break;
    case DirectionMethod::LocalSearch:
      out = local_search_neighbors(num, cfg.k, p, cfg.objective);
      break;
  }
  std::cout << "method     " << to_string(cfg.method) << "\n"
            << "outcome    " << to_string(out.kind) << "\n";
  if (out.found()) {
    std::cout << "w          (" << join(out.direction.w) << ")\n"
              << "norm1      " << fmt(out.direction.norm1) << "\n"
              << "d2w        " << fmt(out.direction.improvement) << "\n";
  }
  std::cout << "in_P       " << (p_ok ? "yes" : "no") << "\n"
            << "in_S       " << (s_ok ? "yes" : "no") << "\n";
  if (s_ok) {
    const bool feasible = certify_bilevel_feasible(num, p, cfg.limits);
    std::cout << "certified  " << (feasible ? "bilevel feasible" : "bilevel infeasible") << "\n";
  }
  return kOk;
}

int run_kopt(const std::string& file, int k, const std::string& slice) {
  if (k < 0) throw UsageError("--k must be nonnegative");
  const MiblpInstance inst = load(file);
  const KoptContext ctx(inst);
  if (!slice.empty()) {
    if (slice.rfind("x=", 0) != 0) throw UsageError("--slice expects x=<v1,v2,...>");
    const IntVector x = parse_ints(slice.substr(2));
    if (static_cast<int>(x.size()) != inst.n1) throw UsageError("slice dimension does not match n1");
    export_slice_csv(ctx, x, std::cout);
    return kOk;
  }
  const auto S = enumerate_S(inst);
  const auto F = enumerate_F(inst);
  const std::set<IntPoint> f_set(F.begin(), F.end());
  const auto Fk = enumerate_Fk(ctx, k);
  std::cout << "k_bar " << ctx.k_bar() << "\n"
            << "|S| " << S.size() << "\n"
            << "|F| " << F.size() << "\n"
            << "|F(" << k << ")| " << Fk.size() << "\n";
  for (const IntPoint& p : Fk) {
    std::cout << tuple(p) << (f_set.count(p) ? " in F" : " in F(" + std::to_string(k) + ")\\F") << "\n";
  }
  return kOk;
}

int run_verify(const std::string& file) {
  const MiblpInstance inst = load(file);
  const VerifyReport r = verify_instance(inst, {});
  std::cout << "points in S              " << r.points_in_S << "\n"
            << "points in F              " << r.points_in_F << "\n"
            << "k_bar                    " << r.k_bar << "\n"
            << "certify mismatches       " << r.certify_mismatches << "\n"
            << "legacy mismatches        " << r.legacy_mismatches << "\n"
            << "k-ID mismatches          " << r.k_id_mismatches << "\n"
            << "F(k) mismatches          " << r.fk_mismatches << "\n"
            << "local search mismatches  " << r.local_search_mismatches << "\n"
            << "unsound directions       " << r.unsound_directions << "\n"
            << "hierarchy violations     " << r.hierarchy_violations << "\n"
            << "solver mismatches        " << r.solver_mismatches << "\n"
            << "cuts checked             " << r.cuts_checked << "\n"
            << "invalid cuts             " << r.cut_validity_violations << "\n"
            << "non-separating cuts      " << r.cut_separation_failures << "\n"
            << "k-IDIC interior points   " << r.k_idic_interior_violations << "\n"
            << "k-IDIC cut violations    " << r.k_idic_cut_violations << "\n";
  for (const auto& m : r.messages) std::cout << "note: " << m << "\n";
  if (r.total_mismatches() == 0) {
    std::cout << "all checks passed\n";
    return kOk;
  }
  std::cout << "checks FAILED\n";
  return kChecksFailed;
}

struct GenArgs {
  GeneratorParams params;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> suite;
  std::string output;
};

int run_gen(const GenArgs& a) {
  const MiblpInstance inst =
      a.suite ? suite_instance(*a.suite) : generate_random_instance(a.seed, a.params);
  if (a.output.empty()) {
    write_instance(std::cout, inst);
    return kOk;
  }
  std::ofstream out(a.output);
  if (!out) throw UsageError("cannot write " + a.output);
  write_instance(out, inst);
  return kOk;
}

void write_profiles(const std::vector<RunRecord>& records, const std::vector<std::string>& measures,
                    const std::string& baseline, const ProfileFilters& filters, double time_limit,
                    const std::string& dir) {
  std::set<std::string> configs;
  for (const auto& r : records) configs.insert(r.config);
  std::vector<std::string> files;
  auto report = [](const ProfileTable& t) {
    std::cout << t.name << " over " << t.instances.size() << " instances\n";
    for (const Curve& c : t.curves) {
      std::cout << "  " << std::left << std::setw(28) << c.config << " at 1: " << fmt(c.at(1.0));
      if (t.name.rfind("baseline_", 0) == 0) {
        std::cout << "  better " << fmt(c.better_fraction) << "  worse " << fmt(c.worse_fraction);
      }
      std::cout << "\n";
    }
  };
  for (const auto& name : measures) {
    const Measure m = measure_from_string(name);
    if (configs.size() >= 2) {
      ProfileTable t = performance_profile(records, m, filters);
      report(t);
      for (auto& f : write_profile_data(t, dir)) files.push_back(f);
    }
    if (!baseline.empty()) {
      if (!configs.count(baseline)) throw UsageError("baseline " + baseline + " not among the results");
      ProfileTable t = baseline_profile(records, m, baseline, filters);
      report(t);
      for (auto& f : write_profile_data(t, dir)) files.push_back(f);
    }
  }
  for (auto& f : write_profile_data(cumulative_profile(records, time_limit), dir)) files.push_back(f);
  std::cout << "wrote " << files.size() << " profile files to " << dir << "\n";
}

struct BenchArgs {
  std::vector<std::string> files;
  int generate = 0;
  std::uint64_t first_seed = 1;
  std::string configs;
  double time_limit = 10.0;
  int threads = 0;
  std::string out = "bench_out";
};

int run_bench(const BenchArgs& a) {
  std::vector<NamedInstance> instances;
  if (a.generate > 0) instances = bench_suite(a.generate, a.first_seed);
  for (const auto& f : a.files) {
    instances.push_back({std::filesystem::path(f).stem().string(), load(f)});
  }
  if (instances.empty()) throw UsageError("bench needs instance files or --generate N");

  std::vector<std::string> names = a.configs.empty() ? default_bench_configurations() : split(a.configs, ',');
  std::vector<NamedConfig> configs;
  for (const auto& n : names) {
    try {
      configs.push_back(configuration_by_name(n));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  std::filesystem::create_directories(a.out);
  const std::string csv = (std::filesystem::path(a.out) / "results.csv").string();
  std::filesystem::remove(csv);
  MatrixLimits limits;
  limits.time_limit = a.time_limit;
  limits.threads = a.threads;
  limits.csv_path = csv;
  const auto records = run_matrix(instances, configs, limits);

  std::map<std::string, int> solved;
  for (const auto& r : records) solved[r.config] += r.solved() ? 1 : 0;
  for (const auto& c : configs) {
    std::cout << std::left << std::setw(28) << c.name << " solved " << solved[c.name] << "/" << instances.size()
              << "\n";
  }
  std::cout << "results in " << csv << "\n";
  const bool has_baseline = std::find(names.begin(), names.end(), "baseline") != names.end();
  write_profiles(records, {"time", "nodes", "ifd_time", "avg_ifd_time"}, has_baseline ? "baseline" : "",
                 ProfileFilters{}, a.time_limit, a.out);
  return kOk;
}

struct ProfileArgs {
  std::string results;
  std::vector<std::string> measures;
  std::string baseline;
  double min_time = 0.05;
  bool keep_unsolved = false;
  double time_limit = 10.0;
  std::string out = "profiles";
};

int run_profile(const ProfileArgs& a) {
  if (!std::filesystem::exists(a.results)) throw MissingFile("no such file: " + a.results);
  std::ifstream in(a.results);
  const auto records = read_records_csv(in);
  std::filesystem::create_directories(a.out);
  ProfileFilters filters;
  filters.min_time = a.min_time;
  filters.drop_unsolved_by_all = !a.keep_unsolved;
  std::vector<std::string> measures = a.measures;
  if (measures.empty()) measures = {"time", "nodes", "ifd_time", "avg_ifd_time"};
  for (const auto& m : measures) {
    try {
      measure_from_string(m);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  write_profiles(records, measures, a.baseline, filters, a.time_limit, a.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branch-and-cut solver for mixed-integer bilevel linear programs"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance");
  solve_cmd->add_option("file", solve_args.file, "Instance file")->required();
  solve_cmd->add_option("--oracle", solve_args.oracle, "Feasibility oracle")->check(CLI::IsMember(keys(kOracles)));
  solve_args.oracle_flags.add_to(solve_cmd);
  solve_args.oracle_flags.add_depth(solve_cmd);
  solve_cmd->add_option("--cuts", solve_args.cuts, "Comma list of idic, isic (or none)");
  solve_cmd->add_option("--branch", solve_args.branch, "Branching rule")->check(CLI::IsMember(keys(kBranches)));
  solve_cmd->add_option("--time-limit", solve_args.time_limit, "Seconds")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", solve_args.seed, "Seed");
  solve_cmd->add_option("--trace", solve_args.trace, "Write one line per node to this file");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Query the improving-direction oracle at a point");
  oracle_cmd->add_option("file", oracle_args.file, "Instance file")->required();
  oracle_cmd->add_option("--x", oracle_args.x, "Leader values, comma separated")->required();
  oracle_cmd->add_option("--y", oracle_args.y, "Follower values, comma separated")->required();
  oracle_args.flags.add_to(oracle_cmd);

  std::string kopt_file;
  int kopt_k = 0;
  std::string kopt_slice;
  auto* kopt_cmd = app.add_subcommand("kopt", "List F(k) or export a slice of follower levels");
  kopt_cmd->add_option("file", kopt_file, "Instance file")->required();
  kopt_cmd->add_option("--k", kopt_k, "Radius")->required();
  kopt_cmd->add_option("--slice", kopt_slice, "x=<v1,...>: CSV of every y in the follower box");

  std::string verify_file;
  auto* verify_cmd = app.add_subcommand("verify", "Cross-check every component against enumeration");
  verify_cmd->add_option("file", verify_file, "Instance file")->required();

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "Write a random pure-integer instance");
  gen_cmd->add_option("--n1", gen_args.params.n1)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--n2", gen_args.params.n2)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--m1", gen_args.params.m1)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--m2", gen_args.params.m2)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--coeff-lo", gen_args.params.coeff_lo);
  gen_cmd->add_option("--coeff-hi", gen_args.params.coeff_hi);
  gen_cmd->add_option("--bound", gen_args.params.bound)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen_args.seed);
  auto* suite_opt = gen_cmd->add_option("--suite", gen_args.suite, "Member of the verification suite");
  for (const char* flag : {"--n1", "--n2", "--m1", "--m2", "--coeff-lo", "--coeff-hi", "--bound", "--seed"}) {
    suite_opt->excludes(gen_cmd->get_option(flag));
  }
  gen_cmd->add_option("-o,--output", gen_args.output, "Output file (default stdout)");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Run a configuration matrix and write profiles");
  bench_cmd->add_option("files", bench_args.files, "Instance files");
  bench_cmd->add_option("--generate", bench_args.generate, "Number of generated instances")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--first-seed", bench_args.first_seed);
  bench_cmd->add_option("--configs", bench_args.configs, "Comma list of configuration names");
  bench_cmd->add_option("--time-limit", bench_args.time_limit, "Seconds per run")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--threads", bench_args.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--out", bench_args.out, "Output directory");

  ProfileArgs profile_args;
  auto* profile_cmd = app.add_subcommand("profile", "Compute profiles from a results CSV");
  profile_cmd->add_option("--results", profile_args.results, "results.csv from bench")->required();
  profile_cmd->add_option("--measure", profile_args.measures, "time, nodes, ifd_time, avg_ifd_time");
  profile_cmd->add_option("--baseline", profile_args.baseline, "Configuration used as the baseline");
  profile_cmd->add_option("--min-time", profile_args.min_time, "Drop instances every configuration solves faster");
  profile_cmd->add_flag("--keep-unsolved", profile_args.keep_unsolved, "Keep instances no configuration solved");
  profile_cmd->add_option("--time-limit", profile_args.time_limit, "Right end of the cumulative time curves");
  profile_cmd->add_option("--out", profile_args.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve_cmd) return run_solve(solve_args);
    if (*oracle_cmd) return run_oracle(oracle_args);
    if (*kopt_cmd) return run_kopt(kopt_file, kopt_k, kopt_slice);
    if (*verify_cmd) return run_verify(verify_file);
    if (*gen_cmd) return run_gen(gen_args);
    if (*bench_cmd) return run_bench(bench_args);
    if (*profile_cmd) return run_profile(profile_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const MissingFile& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMissingFile;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kBadInput;
  } catch (const EnumerationTooLarge& e) {
    std::cerr << "enumeration budget exceeded: " << e.what() << "\n";
    return kIncomplete;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kUsage;
}
