#include "miblp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace miblp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const char* kCsvHeader = "instance,config,status,wall_seconds,cpu_seconds,nodes,ifd_seconds,avg_ifd_seconds,gap,value";

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

double parse_double(const std::string& text) {
  if (text == "inf") return kInf;
  if (text == "-inf") return -kInf;
  std::size_t used = 0;
  double v = std::stod(text, &used);
  if (used != text.size()) throw std::runtime_error("malformed number '" + text + "'");
  return v;
}

// Step CDF over the sample; +inf entries never contribute a point.
Curve step_cdf(const std::string& config, std::vector<double> values) {
  Curve curve;
  curve.config = config;
  const double total = static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) break;
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    curve.points.emplace_back(values[i], static_cast<double>(i + 1) / total);
  }
  return curve;
}

double ratio(double value, double reference) {
  if (reference <= 0.0) return value <= 0.0 ? 1.0 : kInf;
  return value / reference;
}

struct Grid {
  std::vector<std::string> instances;
  std::vector<std::string> configs;
  std::map<std::pair<std::string, std::string>, const RunRecord*> cell;

  const RunRecord* get(const std::string& inst, const std::string& cfg) const {
    auto it = cell.find({inst, cfg});
    return it == cell.end() ? nullptr : it->second;
  }
};

Grid make_grid(const std::vector<RunRecord>& records) {
  Grid grid;
  for (const RunRecord& r : records) {
    if (std::find(grid.instances.begin(), grid.instances.end(), r.instance) == grid.instances.end()) {
      grid.instances.push_back(r.instance);
    }
    if (std::find(grid.configs.begin(), grid.configs.end(), r.config) == grid.configs.end()) {
      grid.configs.push_back(r.config);
    }
    grid.cell[{r.instance, r.config}] = &r;
  }
  std::sort(grid.instances.begin(), grid.instances.end());
  std::sort(grid.configs.begin(), grid.configs.end());
  return grid;
}

std::vector<std::string> filtered_instances(const Grid& grid, const ProfileFilters& filters) {
  std::vector<std::string> kept;
  for (const std::string& inst : grid.instances) {
    bool any_solved = false;
    bool any_slow = false;
    for (const std::string& cfg : grid.configs) {
      const RunRecord* r = grid.get(inst, cfg);
      if (!r) continue;
      any_solved = any_solved || r->solved();
      any_slow = any_slow || r->wall_seconds >= filters.min_time;
    }
    if (filters.drop_unsolved_by_all && !any_solved) continue;
    if (!any_slow) continue;
    kept.push_back(inst);
  }
  return kept;
}

void check_measure(const Grid& grid, Measure measure) {
  for (const auto& [key, record] : grid.cell) {
    if (std::isnan(measure_of(*record, measure))) {
      throw std::invalid_argument(std::string("profile: measure ") + to_string(measure) + " absent for " + key.first);
    }
  }
}

}  // namespace

std::vector<NamedConfig> standard_configurations() {
  std::vector<NamedConfig> out;

  NamedConfig baseline{"baseline", {}};
  baseline.config.oracle_mode = OracleMode::Legacy;
  out.push_back(baseline);

  NamedConfig milp{"idBC-MILP", {}};
  milp.config.oracle.method = DirectionMethod::ExactMilp;
  out.push_back(milp);

  NamedConfig milp_k{"idBC-MILP-k_2", {}};
  milp_k.config.oracle.method = DirectionMethod::ExactMilpK;
  milp_k.config.oracle.k = 2;
  out.push_back(milp_k);

  NamedConfig ls{"idBC-LS-k_2", {}};
  ls.config.oracle.method = DirectionMethod::LocalSearch;
  ls.config.oracle.k = 2;
  out.push_back(ls);

  NamedConfig ls_window{"idBC-LS-k_2-dBnd_10_Inf", {}};
  ls_window.config.oracle.method = DirectionMethod::LocalSearch;
  ls_window.config.oracle.k = 2;
  ls_window.config.oracle.depth_lb = 10;
  out.push_back(ls_window);
  return out;
}

NamedConfig configuration_by_name(const std::string& name) {
  for (NamedConfig& c : standard_configurations()) {
    if (c.name == name) return c;
  }
  throw std::invalid_argument("unknown configuration '" + name + "'");
}

std::vector<std::string> default_bench_configurations() {
  return {"baseline", "idBC-MILP", "idBC-LS-k_2", "idBC-LS-k_2-dBnd_10_Inf"};
}

std::vector<NamedInstance> bench_suite(int count, std::uint64_t first_seed) {
  std::vector<NamedInstance> out;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(seed ^ 0xB5AD4ECEDA1CE2A9ULL);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    GeneratorParams p;
    p.n1 = pick(1, 3);
    p.n2 = pick(1, 3);
    p.m1 = pick(0, 1);
    p.m2 = pick(2, 4);
    p.coeff_lo = -8;
    p.coeff_hi = 8;
    p.bound = 8;
    std::ostringstream id;
    id << "gen_" << std::setw(4) << std::setfill('0') << seed;
    out.push_back({id.str(), generate_random_instance(seed, p)});
  }
  return out;
}

std::vector<RunRecord> run_matrix(const std::vector<NamedInstance>& instances, const std::vector<NamedConfig>& configs,
                                  const MatrixLimits& limits) {
  const std::size_t total = instances.size() * configs.size();
  std::vector<RunRecord> records(total);
  if (total == 0) return records;

  std::ofstream csv;
  if (!limits.csv_path.empty()) {
    bool fresh = !std::filesystem::exists(limits.csv_path) || std::filesystem::file_size(limits.csv_path) == 0;
    csv.open(limits.csv_path, std::ios::app);
    if (!csv) throw std::runtime_error("cannot open '" + limits.csv_path + "' for appending");
    if (fresh) write_csv_header(csv);
    csv.flush();
  }

  std::mutex writer;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const NamedInstance& inst = instances[task / configs.size()];
      const NamedConfig& cfg = configs[task % configs.size()];
      RunRecord rec;
      rec.instance = inst.id;
      rec.config = cfg.name;
      SolverConfig sc = cfg.config;
      sc.time_limit = limits.time_limit;
      const double cpu0 = thread_cpu_seconds();
      const auto wall0 = std::chrono::steady_clock::now();
      try {
        SolveResult r = solve(inst.instance, sc);
        rec.status = to_string(r.status);
        rec.nodes = r.stats.nodes;
        rec.ifd_seconds = r.stats.oracle.ifd_seconds;
        rec.avg_ifd_seconds = r.stats.average_ifd_seconds();
        rec.gap = r.status == SolveStatus::LimitReached ? r.gap : 0.0;
        rec.value = r.value;
      } catch (const std::exception&) {
        rec.status = "Error";
      }
      rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
      rec.cpu_seconds = std::max(0.0, thread_cpu_seconds() - cpu0);
      std::lock_guard<std::mutex> lock(writer);
      records[task] = rec;
      if (csv.is_open()) {
        write_csv_record(csv, rec);
        csv.flush();
      }
    }
  };

  unsigned threads = limits.threads > 0 ? static_cast<unsigned>(limits.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return records;
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_record(std::ostream& out, const RunRecord& r) {
  out << r.instance << ',' << r.config << ',' << r.status << ',' << std::setprecision(17) << r.wall_seconds << ','
      << r.cpu_seconds << ',' << r.nodes << ',' << r.ifd_seconds << ',' << r.avg_ifd_seconds << ',' << r.gap << ','
      << r.value << '\n';
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::vector<RunRecord> out;
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("results csv: missing or unknown header");
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 10) throw std::runtime_error("results csv line " + std::to_string(number) + ": expected 10 fields");
    try {
      RunRecord r;
      r.instance = fields[0];
      r.config = fields[1];
      r.status = fields[2];
      r.wall_seconds = parse_double(fields[3]);
      r.cpu_seconds = parse_double(fields[4]);
      r.nodes = std::stol(fields[5]);
      r.ifd_seconds = parse_double(fields[6]);
      r.avg_ifd_seconds = parse_double(fields[7]);
      r.gap = parse_double(fields[8]);
      r.value = parse_double(fields[9]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("results csv line " + std::to_string(number) + ": malformed number");
    }
  }
  return out;
}

const char* to_string(Measure measure) {
  switch (measure) {
    case Measure::Time: return "time";
    case Measure::Nodes: return "nodes";
    case Measure::IfdTime: return "ifd_time";
    case Measure::AvgIfdTime: return "avg_ifd_time";
  }
  return "?";
}

Measure measure_from_string(const std::string& name) {
  for (Measure m : {Measure::Time, Measure::Nodes, Measure::IfdTime, Measure::AvgIfdTime}) {
    if (name == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown measure '" + name + "'");
}

double measure_of(const RunRecord& r, Measure measure) {
  switch (measure) {
    case Measure::Time: return r.wall_seconds;
    case Measure::Nodes: return static_cast<double>(r.nodes);
    case Measure::IfdTime: return r.ifd_seconds;
    case Measure::AvgIfdTime: return r.avg_ifd_seconds;
  }
  return std::nan("");
}

double Curve::at(double value) const {
  double f = 0.0;
  for (const auto& [x, y] : points) {
    if (x > value) break;
    f = y;
  }
  return f;
}

const Curve& ProfileTable::curve(const std::string& config) const {
  for (const Curve& c : curves) {
    if (c.config == config) return c;
  }
  throw std::invalid_argument("profile " + name + ": no curve for '" + config + "'");
}

ProfileTable performance_profile(const std::vector<RunRecord>& records, Measure measure,
                                 const ProfileFilters& filters) {
  Grid grid = make_grid(records);
  if (grid.configs.size() < 2) throw std::invalid_argument("performance profile needs at least two configurations");
  check_measure(grid, measure);
  ProfileTable table;
  table.name = std::string("performance_") + to_string(measure);
  table.instances = filtered_instances(grid, filters);

  std::map<std::string, std::vector<double>> ratios;
  for (const std::string& inst : table.instances) {
    double best = kInf;
    for (const std::string& cfg : grid.configs) {
      const RunRecord* r = grid.get(inst, cfg);
      if (r && r->solved()) best = std::min(best, measure_of(*r, measure));
    }
    for (const std::string& cfg : grid.configs) {
      const RunRecord* r = grid.get(inst, cfg);
      ratios[cfg].push_back(r && r->solved() && std::isfinite(best) ? ratio(measure_of(*r, measure), best) : kInf);
    }
  }
  for (const std::string& cfg : grid.configs) table.curves.push_back(step_cdf(cfg, ratios[cfg]));
  return table;
}

ProfileTable baseline_profile(const std::vector<RunRecord>& records, Measure measure, const std::string& baseline,
                              const ProfileFilters& filters) {
  Grid grid = make_grid(records);
  if (grid.configs.size() < 2) throw std::invalid_argument("baseline profile needs at least two configurations");
  if (std::find(grid.configs.begin(), grid.configs.end(), baseline) == grid.configs.end()) {
    throw std::invalid_argument("baseline configuration '" + baseline + "' has no records");
  }
  check_measure(grid, measure);
  ProfileTable table;
  table.name = std::string("baseline_") + to_string(measure);
  table.instances = filtered_instances(grid, filters);

  for (const std::string& cfg : grid.configs) {
    std::vector<double> values;
    int better = 0;
    int worse = 0;
    for (const std::string& inst : table.instances) {
      const RunRecord* base = grid.get(inst, baseline);
      const RunRecord* r = grid.get(inst, cfg);
      const bool base_ok = base && base->solved();
      const bool cfg_ok = r && r->solved();
      double v;
      if (!base_ok && !cfg_ok) {
        v = 1.0;
      } else if (cfg_ok && !base_ok) {
        v = 0.0;
      } else if (!cfg_ok) {
        v = kInf;
      } else {
        v = ratio(measure_of(*r, measure), measure_of(*base, measure));
      }
      if (v < 1.0) ++better;
      if (v > 1.0) ++worse;
      values.push_back(v);
    }
    Curve curve = step_cdf(cfg, values);
    if (!values.empty()) {
      curve.better_fraction = static_cast<double>(better) / static_cast<double>(values.size());
      curve.worse_fraction = static_cast<double>(worse) / static_cast<double>(values.size());
    }
    table.curves.push_back(std::move(curve));
  }
  return table;
}

CumulativeProfile cumulative_profile(const std::vector<RunRecord>& records, double time_limit) {
  Grid grid = make_grid(records);
  CumulativeProfile out;
  for (const std::string& cfg : grid.configs) {
    std::vector<double> times;
    std::vector<double> gaps;
    for (const std::string& inst : grid.instances) {
      const RunRecord* r = grid.get(inst, cfg);
      if (!r) continue;
      times.push_back(r->solved() ? std::min(r->wall_seconds, time_limit) : kInf);
      gaps.push_back(r->solved() ? 0.0 : r->gap);
    }
    Curve time_curve = step_cdf(cfg, times);
    const double solved_fraction = time_curve.points.empty() ? 0.0 : time_curve.points.back().second;
    if (time_curve.points.empty() || time_curve.points.back().first < time_limit) {
      time_curve.points.emplace_back(time_limit, solved_fraction);
    }
    Curve gap_curve = step_cdf(cfg, gaps);
    if (gap_curve.points.empty() || gap_curve.points.front().first > 0.0) {
      gap_curve.points.insert(gap_curve.points.begin(), {0.0, solved_fraction});
    }
    out.time_curves.push_back(std::move(time_curve));
    out.gap_curves.push_back(std::move(gap_curve));
  }
  return out;
}

namespace {

std::string write_curve(const std::string& dir, const std::string& name, const Curve& curve) {
  std::filesystem::create_directories(dir);
  std::string path = (std::filesystem::path(dir) / ("profile_" + name + "_" + curve.config + ".dat")).string();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "# " << name << ' ' << curve.config << '\n';
  out << std::setprecision(17);
  for (const auto& [x, y] : curve.points) out << x << ' ' << y << '\n';
  return path;
}

}  // namespace

std::vector<std::string> write_profile_data(const ProfileTable& table, const std::string& dir) {
  std::vector<std::string> paths;
  for (const Curve& c : table.curves) paths.push_back(write_curve(dir, table.name, c));
  return paths;
}

std::vector<std::string> write_profile_data(const CumulativeProfile& profile, const std::string& dir) {
  std::vector<std::string> paths;
  for (const Curve& c : profile.time_curves) paths.push_back(write_curve(dir, "cumulative_time", c));
  for (const Curve& c : profile.gap_curves) paths.push_back(write_curve(dir, "cumulative_gap", c));
  return paths;
}

}  // namespace miblp
