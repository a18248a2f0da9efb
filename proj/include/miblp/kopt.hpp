#pragma once

#include "miblp/bruteforce.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <vector>

namespace miblp {

/// Sum over integer follower variables of floor(max) - ceil(min) over P plus
/// ceil(max - min) over continuous ones. Throws std::runtime_error when P is
/// unbounded in a follower direction; 0 when P is empty.
int compute_k_bar(const MiblpInstance& inst);

class KoptContext {
 public:
  explicit KoptContext(const MiblpInstance& inst, long long budget = kEnumerationBudget);

  const MiblpInstance& instance() const { return inst_; }
  const ExactModel& model() const { return model_; }
  int k_bar() const { return k_bar_; }

  /// Level of every y in L(x): the smallest |w|_1 of an improving move inside
  /// L(x), or nullopt when y is optimal. Cached per x.
  const std::map<IntVector, std::optional<std::int64_t>>& levels(const IntVector& x) const;

 private:
  MiblpInstance inst_;
  ExactModel model_;
  int k_bar_ = 0;
  mutable std::map<IntVector, std::map<IntVector, std::optional<std::int64_t>>> cache_;
};

/// R(x; k): y in S(x) with no strictly better point of L(x) within 1-norm k.
std::vector<IntVector> reaction_set_k(const KoptContext& ctx, const IntVector& x, int k);

/// F(k) = {(x, y) in S : y in R(x; k)}.
std::vector<IntPoint> enumerate_Fk(const KoptContext& ctx, int k);

/// Smallest 1-norm of an improving feasible direction; nullopt iff the point is
/// in F. Throws std::invalid_argument for points outside S.
std::optional<std::int64_t> min_ifd_norm(const KoptContext& ctx, const IntPoint& point);

/// Every improving feasible direction of minimal 1-norm, lexicographic.
std::vector<IntVector> minimal_directions(const KoptContext& ctx, const IntPoint& point);

/// Header "y1,...,yn2,in_S,level"; level is empty outside S and "none" on F.
void export_slice_csv(const KoptContext& ctx, const IntVector& x, std::ostream& out);

}  // namespace miblp
