#pragma once

#include "miblp/bnc.hpp"
#include "miblp/instance.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace miblp {

struct RunRecord {
  std::string instance;
  std::string config;
  /// "Optimal", "Infeasible", "LimitReached" or "Error".
  std::string status;
  double wall_seconds = 0.0;
  double cpu_seconds = 0.0;
  long nodes = 0;
  double ifd_seconds = 0.0;
  double avg_ifd_seconds = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  double value = std::numeric_limits<double>::infinity();

  bool solved() const { return status == "Optimal" || status == "Infeasible"; }
};

struct NamedConfig {
  std::string name;
  SolverConfig config;
};

struct NamedInstance {
  std::string id;
  MiblpInstance instance;
};

/// All configurations known by name: baseline, idBC-MILP, idBC-MILP-k_2,
/// idBC-LS-k_2, idBC-LS-k_2-dBnd_10_Inf.
std::vector<NamedConfig> standard_configurations();
/// Throws std::invalid_argument for an unknown name.
NamedConfig configuration_by_name(const std::string& name);
/// The four configurations run by default.
std::vector<std::string> default_bench_configurations();

/// Generated instances for the benchmark, deterministic in the seed.
std::vector<NamedInstance> bench_suite(int count, std::uint64_t first_seed = 1);

struct MatrixLimits {
  double time_limit = 10.0;
  int threads = 0;  // 0 = hardware concurrency
  /// Records are appended here as they finish when nonempty.
  std::string csv_path;
};

/// Solves every (instance, configuration) pair; failures become "Error"
/// records. Result order is instance-major in input order.
std::vector<RunRecord> run_matrix(const std::vector<NamedInstance>& instances, const std::vector<NamedConfig>& configs,
                                  const MatrixLimits& limits);

void write_csv_header(std::ostream& out);
void write_csv_record(std::ostream& out, const RunRecord& record);
/// Throws std::runtime_error on malformed input.
std::vector<RunRecord> read_records_csv(std::istream& in);

enum class Measure { Time, Nodes, IfdTime, AvgIfdTime };

const char* to_string(Measure measure);
/// Throws std::invalid_argument for an unknown measure name.
Measure measure_from_string(const std::string& name);
double measure_of(const RunRecord& record, Measure measure);

struct ProfileFilters {
  bool drop_unsolved_by_all = true;
  /// Instances where every configuration is faster than this are dropped.
  double min_time = 0.05;
};

/// Step CDF: points (value, fraction of instances <= value), sorted by value.
struct Curve {
  std::string config;
  std::vector<std::pair<double, double>> points;
  /// Baseline profiles only.
  double better_fraction = 0.0;
  double worse_fraction = 0.0;

  double at(double value) const;
};

struct ProfileTable {
  std::string name;
  std::vector<std::string> instances;
  std::vector<Curve> curves;

  const Curve& curve(const std::string& config) const;
};

/// Ratio to the virtual best per instance; unsolved runs are right-censored
/// at +inf. Requires at least two configurations.
ProfileTable performance_profile(const std::vector<RunRecord>& records, Measure measure,
                                 const ProfileFilters& filters = {});

/// Ratio to the baseline per instance: both unsolved gives 1, only the
/// baseline unsolved gives 0, only the configuration unsolved gives +inf.
ProfileTable baseline_profile(const std::vector<RunRecord>& records, Measure measure, const std::string& baseline,
                              const ProfileFilters& filters = {});

struct CumulativeProfile {
  /// Fraction solved within t, ending at the time limit.
  std::vector<Curve> time_curves;
  /// Fraction with final gap <= g, starting at g = 0.
  std::vector<Curve> gap_curves;
};

CumulativeProfile cumulative_profile(const std::vector<RunRecord>& records, double time_limit);

/// Writes profile_<table>_<config>.dat (two columns) per curve into dir and
/// returns the paths.
std::vector<std::string> write_profile_data(const ProfileTable& table, const std::string& dir);
std::vector<std::string> write_profile_data(const CumulativeProfile& profile, const std::string& dir);

}  // namespace miblp
