#include "miblp/instance.hpp"

#include "miblp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace miblp {

namespace {

constexpr double kBigBound = 1e7;

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream ss(text);
    Line line{number, {}};
    std::string tok;
    while (ss >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

class Parser {
 public:
  explicit Parser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  MiblpInstance parse() {
    MiblpInstance inst;

    const Line& header = expect("MIBLP");
    if (header.tokens.size() != 2 || header.tokens[1] != "1") {
      throw ParseError(header.number, "malformed header: expected 'MIBLP 1'");
    }

    const Line& vars = expect("VARS");
    if (vars.tokens.size() != 5) throw ParseError(vars.number, "malformed header: VARS expects n1 r1 n2 r2");
    inst.n1 = count(vars, 1);
    inst.r1 = count(vars, 2);
    inst.n2 = count(vars, 3);
    inst.r2 = count(vars, 4);
    if (inst.r1 > inst.n1 || inst.r2 > inst.n2) {
      throw ParseError(vars.number, "dimension mismatch: integer count exceeds variable count");
    }
    const int n = inst.n1 + inst.n2;

    const Line& obj_upper = expect("OBJ_UPPER");
    RationalVector upper_obj = numbers(obj_upper, 1, n);
    inst.c.assign(upper_obj.begin(), upper_obj.begin() + inst.n1);
    inst.d1.assign(upper_obj.begin() + inst.n1, upper_obj.end());

    const Line& obj_lower = expect("OBJ_LOWER");
    inst.d2 = numbers(obj_lower, 1, inst.n2);

    const Line& bounds = expect("BOUNDS");
    if (static_cast<int>(bounds.tokens.size()) != 1 + 2 * n) {
      throw ParseError(bounds.number, "dimension mismatch: BOUNDS expects " + std::to_string(2 * n) + " values");
    }
    for (int j = 0; j < n; ++j) {
      inst.lower.push_back(number(bounds, 1 + 2 * j));
      const std::string& hi = bounds.tokens[2 + 2 * j];
      if (hi == "inf" || hi == "+inf") {
        inst.upper.emplace_back(std::nullopt);
      } else {
        inst.upper.emplace_back(number(bounds, 2 + 2 * j));
      }
    }

    auto upper_rows = block("UPPER", n, /*allow_empty=*/true);
    auto lower_rows = block("LOWER", n, /*allow_empty=*/false);

    if (pos_ < lines_.size()) {
      throw ParseError(lines_[pos_].number, "unexpected content after LOWER block");
    }

    auto split = [&](const std::vector<RawRow>& rows, RationalMatrix& a, RationalMatrix& g, RationalVector& b) {
      for (const RawRow& row : normalize_rows(rows)) {
        a.emplace_back(row.coefficients.begin(), row.coefficients.begin() + inst.n1);
        g.emplace_back(row.coefficients.begin() + inst.n1, row.coefficients.end());
        b.push_back(row.rhs);
      }
    };
    split(upper_rows, inst.A1, inst.G1, inst.b1);
    split(lower_rows, inst.A2, inst.G2, inst.b2);
    inst.check_dimensions();
    return inst;
  }

 private:
  const Line& expect(const std::string& keyword) {
    if (pos_ >= lines_.size()) {
      int last = lines_.empty() ? 0 : lines_.back().number;
      throw ParseError(last, "missing section " + keyword);
    }
    const Line& line = lines_[pos_];
    if (line.tokens.front() != keyword) {
      if (keyword == "MIBLP") throw ParseError(line.number, "malformed header: expected 'MIBLP 1'");
      throw ParseError(line.number, "missing section " + keyword + " (found '" + line.tokens.front() + "')");
    }
    ++pos_;
    return line;
  }

  static int count(const Line& line, std::size_t idx) {
    const std::string& tok = line.tokens[idx];
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      throw ParseError(line.number, "non-numeric token '" + tok + "' where a count was expected");
    }
    return std::stoi(tok);
  }

  static Rational number(const Line& line, std::size_t idx) {
    Rational value;
    if (!parse_rational(line.tokens[idx], value)) {
      throw ParseError(line.number, "non-numeric token '" + line.tokens[idx] + "'");
    }
    return value;
  }

  static RationalVector numbers(const Line& line, std::size_t first, int expected) {
    if (static_cast<int>(line.tokens.size()) - static_cast<int>(first) != expected) {
      throw ParseError(line.number, "dimension mismatch: " + line.tokens.front() + " expects " +
                                        std::to_string(expected) + " values, found " +
                                        std::to_string(line.tokens.size() - first));
    }
    RationalVector out;
    for (std::size_t i = first; i < line.tokens.size(); ++i) out.push_back(number(line, i));
    return out;
  }

  std::vector<RawRow> block(const std::string& keyword, int n, bool allow_empty) {
    const Line& head = expect(keyword);
    if (head.tokens.size() != 2) throw ParseError(head.number, "malformed header: " + keyword + " expects a row count");
    int m = count(head, 1);
    if (m == 0 && !allow_empty) throw ParseError(head.number, "missing section " + keyword + ": no follower rows");
    std::vector<RawRow> rows;
    for (int i = 0; i < m; ++i) {
      if (pos_ >= lines_.size()) throw ParseError(head.number, "dimension mismatch: " + keyword + " declares " +
                                                               std::to_string(m) + " rows, found " + std::to_string(i));
      const Line& line = lines_[pos_];
      if (static_cast<int>(line.tokens.size()) != n + 2) {
        throw ParseError(line.number, "dimension mismatch: constraint row expects " + std::to_string(n) +
                                          " coefficients, a sense and a right-hand side");
      }
      ++pos_;
      RawRow row;
      for (int j = 0; j < n; ++j) row.coefficients.push_back(number(line, j));
      const std::string& sense = line.tokens[n];
      if (sense == ">=") {
        row.sense = RowSense::GreaterEqual;
      } else if (sense == "<=") {
        row.sense = RowSense::LessEqual;
      } else if (sense == "=") {
        row.sense = RowSense::Equal;
      } else {
        throw ParseError(line.number, "unknown sense token '" + sense + "'");
      }
      row.rhs = number(line, n + 1);
      rows.push_back(std::move(row));
    }
    return rows;
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

// LP over the (x, y) space with the given rows; infinite upper bounds are
// replaced by kBigBound and reported as unbounded when the optimum reaches it.
LpProblem make_lp(const MiblpInstance& inst, bool leader_rows) {
  const int n = inst.num_vars();
  LpProblem lp(n);
  for (int j = 0; j < n; ++j) {
    lp.lower[j] = inst.lower_d(j);
    lp.upper[j] = inst.upper[j] ? to_double(*inst.upper[j]) : kBigBound;
  }
  auto add_block = [&](const RationalMatrix& a, const RationalMatrix& g, const RationalVector& b) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      Eigen::VectorXd row(n);
      for (int j = 0; j < inst.n1; ++j) row[j] = to_double(a[i][j]);
      for (int j = 0; j < inst.n2; ++j) row[inst.n1 + j] = to_double(g[i][j]);
      lp.add_row(row, to_double(b[i]));
    }
  };
  if (leader_rows) add_block(inst.A1, inst.G1, inst.b1);
  add_block(inst.A2, inst.G2, inst.b2);
  return lp;
}

struct Extrema {
  bool feasible = false;
  bool bounded = true;
  std::vector<double> lo, hi;
};

Extrema variable_extrema(const MiblpInstance& inst, bool leader_rows) {
  const int n = inst.num_vars();
  Extrema out;
  LpProblem lp = make_lp(inst, leader_rows);
  out.lo.assign(n, 0.0);
  out.hi.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (double sign : {1.0, -1.0}) {
      lp.objective.setZero();
      lp.objective[j] = sign;
      LpSolution sol = solve_lp(lp);
      if (sol.status == LpStatus::Infeasible) {
        out.feasible = false;
        return out;
      }
      if (sol.status != LpStatus::Optimal) {
        out.bounded = false;
        continue;
      }
      out.feasible = true;
      double value = sign * sol.objective;
      if (sign > 0) {
        out.lo[j] = value;
      } else {
        out.hi[j] = value;
        if (!inst.upper[j] && value >= kBigBound * (1 - 1e-9)) out.bounded = false;
      }
    }
  }
  return out;
}

}  // namespace

bool MiblpInstance::has_finite_bounds() const {
  return std::all_of(upper.begin(), upper.end(), [](const auto& u) { return u.has_value(); });
}

bool MiblpInstance::is_linking(int j) const {
  return std::any_of(A2.begin(), A2.end(), [j](const RationalVector& row) { return row[j] != 0; });
}

double MiblpInstance::upper_d(int var) const {
  return upper[var] ? to_double(*upper[var]) : std::numeric_limits<double>::infinity();
}

void MiblpInstance::check_dimensions() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("instance dimension mismatch: " + what); };
  if (n1 < 0 || n2 < 0 || r1 < 0 || r2 < 0 || r1 > n1 || r2 > n2) fail("counts");
  if (static_cast<int>(c.size()) != n1 || static_cast<int>(d1.size()) != n2 || static_cast<int>(d2.size()) != n2) {
    fail("objective length");
  }
  if (static_cast<int>(lower.size()) != n1 + n2 || static_cast<int>(upper.size()) != n1 + n2) fail("bounds length");
  if (A1.size() != b1.size() || G1.size() != b1.size()) fail("upper block rows");
  if (A2.size() != b2.size() || G2.size() != b2.size()) fail("lower block rows");
  for (const auto& r : A1) if (static_cast<int>(r.size()) != n1) fail("A1 columns");
  for (const auto& r : G1) if (static_cast<int>(r.size()) != n2) fail("G1 columns");
  for (const auto& r : A2) if (static_cast<int>(r.size()) != n1) fail("A2 columns");
  for (const auto& r : G2) if (static_cast<int>(r.size()) != n2) fail("G2 columns");
}

std::vector<double> Point::stacked() const {
  std::vector<double> out(x);
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::vector<RawRow> normalize_rows(const std::vector<RawRow>& rows) {
  std::vector<RawRow> out;
  auto negated = [](const RawRow& row) {
    RawRow neg;
    neg.sense = RowSense::GreaterEqual;
    for (const auto& a : row.coefficients) neg.coefficients.push_back(-a);
    neg.rhs = -row.rhs;
    return neg;
  };
  for (const RawRow& row : rows) {
    RawRow ge = row;
    ge.sense = RowSense::GreaterEqual;
    switch (row.sense) {
      case RowSense::GreaterEqual:
        out.push_back(ge);
        break;
      case RowSense::LessEqual:
        out.push_back(negated(row));
        break;
      case RowSense::Equal:
        out.push_back(ge);
        out.push_back(negated(row));
        break;
    }
  }
  return out;
}

bool satisfies(const RawRow& row, const RationalVector& point) {
  Rational lhs = 0;
  for (std::size_t j = 0; j < row.coefficients.size(); ++j) lhs += row.coefficients[j] * point[j];
  switch (row.sense) {
    case RowSense::GreaterEqual: return lhs >= row.rhs;
    case RowSense::LessEqual: return lhs <= row.rhs;
    case RowSense::Equal: return lhs == row.rhs;
  }
  return false;
}

MiblpInstance parse_instance(std::istream& in) { return Parser(tokenize(in)).parse(); }

MiblpInstance parse_instance_string(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

MiblpInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
  return parse_instance(in);
}

void write_instance(std::ostream& out, const MiblpInstance& inst) {
  auto join = [&](const RationalVector& v) {
    for (const auto& a : v) out << ' ' << to_string(a);
  };
  out << "MIBLP 1\n";
  out << "VARS " << inst.n1 << ' ' << inst.r1 << ' ' << inst.n2 << ' ' << inst.r2 << '\n';
  out << "OBJ_UPPER";
  join(inst.c);
  join(inst.d1);
  out << "\nOBJ_LOWER";
  join(inst.d2);
  out << "\nBOUNDS";
  for (int j = 0; j < inst.num_vars(); ++j) {
    out << ' ' << to_string(inst.lower[j]) << ' ' << (inst.upper[j] ? to_string(*inst.upper[j]) : "inf");
  }
  out << '\n';
  auto rows = [&](const char* name, const RationalMatrix& a, const RationalMatrix& g, const RationalVector& b) {
    out << name << ' ' << b.size() << '\n';
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t j = 0; j < a[i].size(); ++j) out << (j ? " " : "") << to_string(a[i][j]);
      for (const auto& v : g[i]) out << ' ' << to_string(v);
      out << " >= " << to_string(b[i]) << '\n';
    }
  };
  rows("UPPER", inst.A1, inst.G1, inst.b1);
  rows("LOWER", inst.A2, inst.G2, inst.b2);
}

std::string write_instance_string(const MiblpInstance& inst) {
  std::ostringstream out;
  write_instance(out, inst);
  return out.str();
}

bool integrality_guaranteed(const MiblpInstance& inst) {
  auto integral = [](const RationalVector& v) { return std::all_of(v.begin(), v.end(), is_integer); };
  if (!(integral(inst.b2) && integral(inst.d2) && std::all_of(inst.A2.begin(), inst.A2.end(), integral) &&
        std::all_of(inst.G2.begin(), inst.G2.end(), integral))) {
    return false;
  }
  for (int j = inst.r2; j < inst.n2; ++j) {
    if (inst.d2[j] != 0) return false;
    for (const auto& row : inst.G2) {
      if (row[j] != 0) return false;
    }
  }
  return true;
}

ValidationReport validate_assumptions(const MiblpInstance& inst) {
  ValidationReport report;

  Extrema ext = variable_extrema(inst, /*leader_rows=*/true);
  report.lp_feasible = ext.feasible;
  report.bounded = !ext.feasible || ext.bounded;
  if (ext.feasible && ext.bounded) {
    report.var_min = ext.lo;
    report.var_max = ext.hi;
  }
  if (!ext.feasible) report.messages.emplace_back("LP relaxation is empty (trivially bounded)");
  if (!report.bounded) report.messages.emplace_back("Assumption 1 fails: P is unbounded");

  report.linking_integer = true;
  for (int j = inst.r1; j < inst.n1; ++j) {
    if (inst.is_linking(j)) {
      report.linking_integer = false;
      report.messages.push_back("Assumption 2 fails: continuous leader variable x" + std::to_string(j) +
                                " appears in the follower constraints");
    }
  }

  report.data_integral = integrality_guaranteed(inst);
  if (!report.data_integral) report.messages.emplace_back("Assumption 3 fails: follower data not integral on S (non-integer A2, G2, b2, d2 or continuous follower terms)");
  return report;
}

MiblpInstance finalize_bounds(MiblpInstance inst) {
  if (inst.has_finite_bounds()) return inst;

  Extrema over_p = variable_extrema(inst, /*leader_rows=*/true);
  auto integer_floor = [](double v) { return Rational(static_cast<long long>(std::floor(v + 1e-7))); };
  auto loose_ceil = [](double v) { return Rational(static_cast<long long>(std::ceil(v - 1e-7))); };

  for (int j = 0; j < inst.n1; ++j) {
    if (inst.upper[j]) continue;
    if (!over_p.feasible) {
      inst.upper[j] = inst.lower[j];
      continue;
    }
    if (!over_p.bounded || over_p.hi[j] >= kBigBound * (1 - 1e-9)) {
      throw std::runtime_error("leader variable x" + std::to_string(j) + " is unbounded over P");
    }
    inst.upper[j] = inst.leader_is_integer(j) ? integer_floor(over_p.hi[j]) : loose_ceil(over_p.hi[j]);
    if (*inst.upper[j] < inst.lower[j]) inst.upper[j] = inst.lower[j];
  }

  Extrema follower = variable_extrema(inst, /*leader_rows=*/false);
  for (int j = 0; j < inst.n2; ++j) {
    const int var = inst.n1 + j;
    if (inst.upper[var]) continue;
    if (!follower.feasible) {
      inst.upper[var] = inst.lower[var];
      continue;
    }
    if (!follower.bounded || follower.hi[var] >= kBigBound * (1 - 1e-9)) {
      throw std::runtime_error("follower variable y" + std::to_string(j) + " is unbounded over the follower region");
    }
    inst.upper[var] = inst.follower_is_integer(j) ? integer_floor(follower.hi[var]) : loose_ceil(follower.hi[var]);
    if (*inst.upper[var] < inst.lower[var]) inst.upper[var] = inst.lower[var];
  }
  return inst;
}

MiblpInstance load_instance(const std::string& path) { return finalize_bounds(read_instance_file(path)); }

MiblpInstance generate_random_instance(std::uint64_t seed, const GeneratorParams& params) {
  if (params.n1 < 1 || params.n2 < 1 || params.m1 < 0 || params.m2 < 1 || params.bound < 1 ||
      params.coeff_lo > params.coeff_hi) {
    throw std::invalid_argument("generate_random_instance: invalid parameters");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(params.coeff_lo, params.coeff_hi);
  const int n = params.n1 + params.n2;
  const long long bound = params.bound;

  auto draw_vector = [&](int len) {
    RationalVector v;
    for (int j = 0; j < len; ++j) v.emplace_back(coef(rng));
    return v;
  };
  // right-hand side drawn from the lower half of the row's range over the box
  auto draw_rhs = [&](const RationalVector& a) {
    long long lo = 0, hi = 0;
    for (const auto& v : a) {
      long long term = v.convert_to<long long>() * bound;
      lo += std::min(0LL, term);
      hi += std::max(0LL, term);
    }
    long long mid = lo + (hi - lo) / 2;
    std::uniform_int_distribution<long long> pick(lo, mid);
    return Rational(pick(rng));
  };

  for (int attempt = 0; attempt < 100; ++attempt) {
    MiblpInstance inst;
    inst.n1 = params.n1;
    inst.r1 = params.n1;
    inst.n2 = params.n2;
    inst.r2 = params.n2;
    inst.c = draw_vector(params.n1);
    inst.d1 = draw_vector(params.n2);
    inst.d2 = draw_vector(params.n2);
    inst.lower.assign(n, Rational(0));
    inst.upper.assign(n, Rational(params.bound));

    for (int i = 0; i < params.m1; ++i) {
      RationalVector a = draw_vector(params.n1);
      inst.b1.push_back(draw_rhs(a));
      inst.A1.push_back(std::move(a));
      inst.G1.emplace_back(params.n2, Rational(0));
    }
    int satisfied_at_zero = 0;
    for (int i = 0; i < params.m2; ++i) {
      RationalVector a = draw_vector(params.n1);
      RationalVector g = draw_vector(params.n2);
      RationalVector both(a);
      both.insert(both.end(), g.begin(), g.end());
      Rational rhs = draw_rhs(both);
      if (rhs <= 0) ++satisfied_at_zero;
      inst.A2.push_back(std::move(a));
      inst.G2.push_back(std::move(g));
      inst.b2.push_back(rhs);
    }
    if (2 * satisfied_at_zero >= params.m2) return inst;
  }
  throw GenerationFailure("generate_random_instance: resampling exhausted after 100 attempts");
}

GeneratorParams suite_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 17);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  GeneratorParams p;
  p.n1 = pick(1, 3);
  p.n2 = pick(1, 4);
  p.m1 = pick(0, 1);
  p.m2 = pick(1, 4);
  p.coeff_lo = -5;
  p.coeff_hi = 5;
  p.bound = 1;
  const int n = p.n1 + p.n2;
  for (int b = 5; b >= 1; --b) {
    if (std::pow(b + 1.0, n) <= 5000.0) {
      p.bound = b;
      break;
    }
  }
  return p;
}

MiblpInstance suite_instance(std::uint64_t seed) { return generate_random_instance(seed, suite_params(seed)); }

}  // namespace miblp
