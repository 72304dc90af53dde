#pragma once

// Exact Fourier-Motzkin feasibility oracle over rationals, for small systems.

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <set>
#include <vector>

namespace tnplan::oracle {

using Rational = boost::multiprecision::cpp_rational;

// sum(coeffs[k] * x_k) <= rhs
struct FmRow {
  std::vector<Rational> coeffs;
  Rational rhs;
};

inline FmRow normalized(FmRow r) {
  Rational scale = 0;
  for (const auto& c : r.coeffs) { Rational m = abs(c); if (m > scale) scale = m; }
  if (scale != 0) {
    for (auto& c : r.coeffs) c /= scale;
    r.rhs /= scale;
  }
  return r;
}

inline bool fm_feasible(std::vector<FmRow> rows, int num_vars) {
  auto key = [](const FmRow& r) {
    std::vector<Rational> k = r.coeffs;
    k.push_back(r.rhs);
    return k;
  };
  for (int v = 0; v < num_vars; ++v) {
    std::vector<FmRow> pos, neg, next;
    for (auto& r : rows) {
      if (r.coeffs[v] > 0) pos.push_back(r);
      else if (r.coeffs[v] < 0) neg.push_back(r);
      else next.push_back(r);
    }
    for (const auto& p : pos) {
      for (const auto& n : neg) {
        Rational a = p.coeffs[v], b = -n.coeffs[v];
        FmRow combined;
        combined.coeffs.resize(num_vars);
        for (int k = 0; k < num_vars; ++k) combined.coeffs[k] = p.coeffs[k] * b + n.coeffs[k] * a;
        combined.coeffs[v] = 0;
        combined.rhs = p.rhs * b + n.rhs * a;
        next.push_back(normalized(std::move(combined)));
      }
    }
    std::set<std::vector<Rational>> seen;
    rows.clear();
    for (auto& r : next) {
      bool zero = std::all_of(r.coeffs.begin(), r.coeffs.end(), [](const Rational& c) { return c == 0; });
      if (zero) {
        if (r.rhs < 0) return false;
        continue;
      }
      if (seen.insert(key(r)).second) rows.push_back(std::move(r));
    }
  }
  for (const auto& r : rows)
    if (r.rhs < 0) return false;
  return true;
}

}  // namespace tnplan::oracle
