#include "tnplan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tnplan {

int LinearProgram::add_variable(std::string name, double lower, double upper) {
  if (lower > upper) throw LpError("variable hint with lower > upper: " + name);
  variables_.push_back({std::move(name), lower, upper});
  return num_variables() - 1;
}

void LinearProgram::add_constraint(LinearCondition row, std::string label) {
  for (const auto& t : row.terms)
    if (t.var < 0 || t.var >= num_variables()) throw LpError("constraint references undeclared LP variable");
  rows_.push_back(std::move(row));
  labels_.push_back(std::move(label));
}

void LinearProgram::set_hint(int var, double lower, double upper) {
  if (lower > upper) throw LpError("hint with lower > upper on " + variables_.at(var).name);
  variables_.at(var).lower = lower;
  variables_.at(var).upper = upper;
}

void LinearProgram::set_objective(ObjectiveSense sense, int var) {
  if (var < 0 || var >= num_variables()) throw LpError("objective references undeclared LP variable");
  sense_ = sense;
  objective_ = var;
}

int LinearProgram::find_variable(const std::string& name) const {
  for (int i = 0; i < num_variables(); ++i)
    if (variables_[i].name == name) return i;
  return -1;
}

bool LinearProgram::satisfied_by(const std::vector<double>& point, double tol) const {
  if (static_cast<int>(point.size()) != num_variables()) return false;
  for (const auto& row : rows_) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.weight * point[t.var];
    double slack_tol = tol * (1.0 + std::abs(row.constant));
    switch (row.cmp) {
      case Cmp::Less: if (lhs > row.constant - kStrictMargin + slack_tol) return false; break;
      case Cmp::LessEq: if (lhs > row.constant + slack_tol) return false; break;
      case Cmp::Eq: if (std::abs(lhs - row.constant) > slack_tol) return false; break;
      case Cmp::GreaterEq: if (lhs < row.constant - slack_tol) return false; break;
      case Cmp::Greater: if (lhs < row.constant + kStrictMargin - slack_tol) return false; break;
    }
  }
  for (int i = 0; i < num_variables(); ++i) {
    if (point[i] < variables_[i].lower - tol * (1.0 + std::abs(variables_[i].lower))) return false;
    if (point[i] > variables_[i].upper + tol * (1.0 + std::abs(variables_[i].upper))) return false;
  }
  return true;
}

namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr double kDropTolerance = 1e-12;

using Sparse = std::vector<std::pair<int, double>>;  // sorted by column

struct Row {
  Sparse terms;
  Cmp cmp;
  double rhs;
};

double coefficient(const Sparse& s, int var) {
  auto it = std::lower_bound(s.begin(), s.end(), std::make_pair(var, -kInf));
  return it != s.end() && it->first == var ? it->second : 0.0;
}

// s + f * t, dropping `skip` and near-zero coefficients.
Sparse axpy(const Sparse& s, double f, const Sparse& t, int skip) {
  Sparse out;
  out.reserve(s.size() + t.size());
  std::size_t i = 0, j = 0;
  while (i < s.size() || j < t.size()) {
    int col;
    double v;
    if (j == t.size() || (i < s.size() && s[i].first < t[j].first)) {
      col = s[i].first;
      v = s[i++].second;
    } else if (i == s.size() || t[j].first < s[i].first) {
      col = t[j].first;
      v = f * t[j++].second;
    } else {
      col = s[i].first;
      v = s[i++].second + f * t[j++].second;
    }
    if (col != skip && std::abs(v) > kDropTolerance) out.emplace_back(col, v);
  }
  return out;
}

// Equality rows are solved for one of their variables and substituted away,
// so the tableau only carries the remaining columns. Each eliminated
// variable keeps its definition constant + sum(coef * remaining variable).
struct Presolved {
  bool infeasible = false;
  std::vector<Row> rows;     // over compact columns
  int columns = 0;
  std::vector<int> column_of;                        // per LP variable, -1 if eliminated
  std::vector<std::pair<double, Sparse>> definition; // per LP variable, over compact columns
  std::vector<char> eliminated;
};

Presolved presolve(const LinearProgram& lp) {
  const int nv = lp.num_variables();
  std::vector<Row> rows;
  for (const auto& c : lp.constraints()) {
    Row r{{}, c.cmp, c.constant};
    for (const auto& t : c.terms) r.terms.emplace_back(t.var, t.weight);
    std::sort(r.terms.begin(), r.terms.end());
    Sparse merged;
    for (const auto& [col, w] : r.terms) {
      if (!merged.empty() && merged.back().first == col) merged.back().second += w;
      else merged.emplace_back(col, w);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const auto& t) { return t.second == 0.0; }),
                 merged.end());
    r.terms = std::move(merged);
    if (r.cmp == Cmp::Less) { r.cmp = Cmp::LessEq; r.rhs -= kStrictMargin; }
    if (r.cmp == Cmp::Greater) { r.cmp = Cmp::GreaterEq; r.rhs += kStrictMargin; }
    rows.push_back(std::move(r));
  }
  for (int v = 0; v < nv; ++v) {
    const auto& var = lp.variables()[v];
    if (std::isfinite(var.lower)) rows.push_back({{{v, 1.0}}, Cmp::GreaterEq, var.lower});
    if (std::isfinite(var.upper)) rows.push_back({{{v, 1.0}}, Cmp::LessEq, var.upper});
  }

  Presolved out;
  out.eliminated.assign(nv, 0);
  out.definition.assign(nv, {0.0, {}});
  std::vector<std::vector<int>> rows_with(nv);  // may hold stale entries
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    for (const auto& t : rows[i].terms) rows_with[t.first].push_back(i);
  std::vector<std::vector<int>> defs_with(nv);
  std::vector<char> dropped(rows.size(), 0);

  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    if (rows[i].cmp != Cmp::Eq || rows[i].terms.empty()) continue;
    int pivot = -1;
    double best = 0.0;
    for (const auto& [col, w] : rows[i].terms)
      if (std::abs(w) >= best) {
        best = std::abs(w);
        pivot = col;
      }
    if (best <= kPivotTolerance) continue;
    const double a = coefficient(rows[i].terms, pivot);
    // x_pivot = rhs / a - sum(w / a * x)
    Sparse expr;
    for (const auto& [col, w] : rows[i].terms)
      if (col != pivot) expr.emplace_back(col, -w / a);
    const double constant = rows[i].rhs / a;
    dropped[i] = 1;
    for (int r : rows_with[pivot]) {
      if (dropped[r]) continue;
      const double f = coefficient(rows[r].terms, pivot);
      if (f == 0.0) continue;
      rows[r].terms = axpy(rows[r].terms, f, expr, pivot);
      rows[r].rhs -= f * constant;
      for (const auto& t : expr) rows_with[t.first].push_back(r);
    }
    for (int d : defs_with[pivot]) {
      auto& [c0, terms] = out.definition[d];
      const double f = coefficient(terms, pivot);
      if (f == 0.0) continue;
      terms = axpy(terms, f, expr, pivot);
      c0 += f * constant;
      for (const auto& t : expr) defs_with[t.first].push_back(d);
    }
    out.eliminated[pivot] = 1;
    out.definition[pivot] = {constant, expr};
    for (const auto& t : expr) defs_with[t.first].push_back(pivot);
  }

  out.column_of.assign(nv, -1);
  for (int v = 0; v < nv; ++v)
    if (!out.eliminated[v]) out.column_of[v] = out.columns++;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    if (dropped[i]) continue;
    Row& r = rows[i];
    if (r.terms.empty()) {
      const double tol = kLpTolerance * (1.0 + std::abs(r.rhs));
      const bool ok = r.cmp == Cmp::Eq ? std::abs(r.rhs) <= tol : r.cmp == Cmp::LessEq ? r.rhs >= -tol : r.rhs <= tol;
      if (!ok) out.infeasible = true;
      continue;
    }
    for (auto& t : r.terms) t.first = out.column_of[t.first];
    out.rows.push_back(std::move(r));
  }
  for (int v = 0; v < nv; ++v)
    for (auto& t : out.definition[v].second) t.first = out.column_of[t.first];
  return out;
}

// Dense tableau over x = p - n splits, slacks and artificials; minimizes.
class Simplex {
 public:
  Simplex(std::vector<Row> rows, int columns) : num_vars_(columns) {
    for (auto& r : rows) {
      if (r.rhs < 0) {
        for (auto& t : r.terms) t.second = -t.second;
        r.rhs = -r.rhs;
        r.cmp = flipped(r.cmp);
      }
    }

    m_ = static_cast<int>(rows.size());
    int slacks = 0, artificials = 0;
    for (const auto& r : rows) {
      if (r.cmp != Cmp::Eq) ++slacks;
      if (r.cmp != Cmp::LessEq) ++artificials;
    }
    first_slack_ = 2 * num_vars_;
    first_artificial_ = first_slack_ + slacks;
    n_ = first_artificial_ + artificials;
    width_ = n_ + 1;
    tab_.assign(static_cast<std::size_t>(m_ + 1) * width_, 0.0);
    basis_.assign(m_, -1);

    int s = first_slack_, a = first_artificial_;
    for (int i = 0; i < m_; ++i) {
      const auto& r = rows[i];
      for (const auto& [col, w] : r.terms) {
        at(i, 2 * col) += w;
        at(i, 2 * col + 1) -= w;
      }
      at(i, n_) = r.rhs;
      if (r.cmp == Cmp::LessEq) {
        at(i, s) = 1.0;
        basis_[i] = s++;
      } else {
        if (r.cmp == Cmp::GreaterEq) at(i, s++) = -1.0;
        at(i, a) = 1.0;
        basis_[i] = a++;
      }
    }
  }

  // Returns false when infeasible.
  bool phase_one() {
    std::vector<double> cost(n_, 0.0);
    for (int j = first_artificial_; j < n_; ++j) cost[j] = 1.0;
    load_objective(cost);
    int unbounded_col = -1;
    run(/*allow_artificial=*/true, unbounded_col);
    double infeasibility = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= first_artificial_) infeasibility += at(i, n_);
    if (infeasibility > kLpTolerance) return false;
    // Drive zero-valued artificials out of the basis where possible.
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < first_artificial_) continue;
      for (int j = 0; j < first_artificial_; ++j) {
        if (std::abs(at(i, j)) > kPivotTolerance) {
          pivot(i, j);
          break;
        }
      }
    }
    return true;
  }

  // Minimizes sum(coef * x_col); returns false when unbounded.
  bool phase_two(const Sparse& objective) {
    std::vector<double> cost(n_, 0.0);
    for (const auto& [col, w] : objective) {
      cost[2 * col] += w;
      cost[2 * col + 1] -= w;
    }
    load_objective(cost);
    int unbounded_col = -1;
    return run(/*allow_artificial=*/false, unbounded_col);
  }

  std::vector<double> point() const {
    std::vector<double> cols(n_, 0.0);
    for (int i = 0; i < m_; ++i) cols[basis_[i]] = at(i, n_);
    std::vector<double> x(num_vars_);
    for (int v = 0; v < num_vars_; ++v) x[v] = cols[2 * v] - cols[2 * v + 1];
    return x;
  }

 private:
  double& at(int r, int c) { return tab_[static_cast<std::size_t>(r) * width_ + c]; }
  double at(int r, int c) const { return tab_[static_cast<std::size_t>(r) * width_ + c]; }

  void load_objective(const std::vector<double>& cost) {
    for (int j = 0; j <= n_; ++j) at(m_, j) = j < n_ ? cost[j] : 0.0;
    for (int i = 0; i < m_; ++i) {
      double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j <= n_; ++j) at(m_, j) -= cb * at(i, j);
    }
  }

  void pivot(int r, int e) {
    double p = at(r, e);
    double* prow = &tab_[static_cast<std::size_t>(r) * width_];
    // Only the nonzero entries of the pivot row matter for the updates.
    nonzero_.clear();
    for (int j = 0; j <= n_; ++j) {
      if (prow[j] == 0.0) continue;
      prow[j] /= p;
      nonzero_.push_back(j);
    }
    prow[e] = 1.0;
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* row = &tab_[static_cast<std::size_t>(i) * width_];
      const double f = row[e];
      if (f == 0.0) continue;
      for (int j : nonzero_) row[j] -= f * prow[j];
      row[e] = 0.0;
    }
    basis_[r] = e;
  }

  // Bland's rule. Returns false (and the column) when unbounded.
  bool run(bool allow_artificial, int& unbounded_col) {
    const int limit = allow_artificial ? n_ : first_artificial_;
    for (;;) {
      if (++iterations_ > kLpIterationCap) throw LpError("simplex iteration cap exceeded");
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        if (at(m_, j) < -kPivotTolerance) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = kInf;
      for (int i = 0; i < m_; ++i) {
        double a = at(i, enter);
        if (a <= kPivotTolerance) continue;
        double ratio = at(i, n_) / a;
        if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) {
        unbounded_col = enter;
        return false;
      }
      pivot(leave, enter);
    }
  }

  int num_vars_;
  int m_ = 0, n_ = 0, width_ = 0;
  int first_slack_ = 0, first_artificial_ = 0;
  std::vector<double> tab_;
  std::vector<int> basis_;
  std::vector<int> nonzero_;
  int iterations_ = 0;
};

std::vector<double> full_point(const Presolved& pre, const std::vector<double>& compact) {
  const int nv = static_cast<int>(pre.column_of.size());
  std::vector<double> x(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    if (!pre.eliminated[v]) {
      x[v] = compact[pre.column_of[v]];
      continue;
    }
    double value = pre.definition[v].first;
    for (const auto& [col, w] : pre.definition[v].second) value += w * compact[col];
    x[v] = value;
  }
  return x;
}

}  // namespace

LpOutcome solve_feasibility(const LinearProgram& lp) {
  Presolved pre = presolve(lp);
  LpOutcome out;
  if (pre.infeasible) return out;
  Simplex simplex(std::move(pre.rows), pre.columns);
  if (!simplex.phase_one()) return out;
  out.status = LpStatus::Feasible;
  out.point = full_point(pre, simplex.point());
  return out;
}

LpOutcome optimize(const LinearProgram& lp) {
  if (lp.sense() == ObjectiveSense::None || lp.objective() < 0)
    throw LpError("optimize called without an objective");
  Presolved pre = presolve(lp);
  LpOutcome out;
  if (pre.infeasible) return out;
  const int target = lp.objective();
  Sparse objective = pre.eliminated[target] ? pre.definition[target].second
                                            : Sparse{{pre.column_of[target], 1.0}};
  Simplex simplex(std::move(pre.rows), pre.columns);
  if (!simplex.phase_one()) return out;
  const bool maximize = lp.sense() == ObjectiveSense::Maximize;
  if (maximize)
    for (auto& t : objective) t.second = -t.second;
  if (!simplex.phase_two(objective)) {
    out.status = LpStatus::Unbounded;
    out.direction = maximize ? 1 : -1;
    out.value = maximize ? kInf : -kInf;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.point = full_point(pre, simplex.point());
  out.value = out.point[target];
  return out;
}

std::string to_lp_format(const LinearProgram& lp) {
  std::ostringstream os;
  os.precision(12);
  const auto& vars = lp.variables();
  switch (lp.sense()) {
    case ObjectiveSense::Maximize: os << "Maximize\n obj: " << vars[lp.objective()].name << "\n"; break;
    case ObjectiveSense::Minimize: os << "Minimize\n obj: " << vars[lp.objective()].name << "\n"; break;
    case ObjectiveSense::None: os << "Minimize\n obj: 0\n"; break;
  }
  os << "Subject To\n";
  for (std::size_t r = 0; r < lp.constraints().size(); ++r) {
    const auto& row = lp.constraints()[r];
    os << " " << (lp.labels()[r].empty() ? "c" + std::to_string(r) : lp.labels()[r]) << ":";
    for (const auto& t : row.terms) os << (t.weight < 0 ? " - " : " + ") << std::abs(t.weight) << " " << vars[t.var].name;
    os << " " << to_string(row.cmp) << " " << row.constant << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : vars) {
    os << " ";
    if (std::isfinite(v.lower)) os << v.lower; else os << "-inf";
    os << " <= " << v.name << " <= ";
    if (std::isfinite(v.upper)) os << v.upper; else os << "+inf";
    os << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace tnplan
