#pragma once

#include "miblp/bnc.hpp"
#include "miblp/kopt.hpp"

#include <string>
#include <vector>

namespace miblp {

/// Mismatch counters of the enumeration agreement suite on one instance.
struct VerifyReport {
  long points_in_S = 0;
  long points_in_F = 0;
  int k_bar = 0;

  long certify_mismatches = 0;     // certify_bilevel_feasible vs membership in F
  long legacy_mismatches = 0;      // legacy_feasibility_check vs membership in F
  long k_id_mismatches = 0;        // (k-ID) feasibility vs min_ifd_norm <= k
  long fk_mismatches = 0;          // min_ifd_norm <= k vs not in F(k)
  long local_search_mismatches = 0;  // local search at k_bar vs (ID) feasibility
  long unsound_directions = 0;     // local-search directions failing exact checks
  long hierarchy_violations = 0;   // F(k+1) not a subset of F(k), F(0) != S, F(k_bar) != F
  long solver_mismatches = 0;      // solver optimum vs enumeration optimum
  long cut_validity_violations = 0;  // F points violating a recorded cut by more than 1e-9
  long cut_separation_failures = 0;  // cuts violated by their vertex by less than 1e-7
  long k_idic_interior_violations = 0;  // F(k) points strictly inside C_ID(w), |w|_1 <= k
  long k_idic_cut_violations = 0;  // F(k) points violating a root k-IDIC
  long cuts_checked = 0;

  double seconds_oracle_equivalence = 0.0;
  double seconds_other = 0.0;
  std::vector<std::string> messages;

  long total_mismatches() const;
};

struct VerifyOptions {
  bool oracle_equivalence = true;
  bool hierarchy = true;
  bool local_search = true;
  bool solver_and_cuts = true;
  /// Radii for the (k-ID) agreement check; k_bar is always added.
  std::vector<int> radii{1, 2, 3};
};

/// Configurations used for the solver agreement and cut checks: every oracle
/// mode, direction method, cut family and branching strategy appears.
struct VerifyConfig {
  std::string name;
  SolverConfig config;
};

std::vector<VerifyConfig> verification_configs();

VerifyReport verify_instance(const MiblpInstance& inst, const VerifyOptions& options = {});

}  // namespace miblp
