#include "lp/multiindex.hpp"

#include <cmath>

namespace lp {

namespace {

double ifact(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double ibinom(int n, int m) { return ifact(n) / (ifact(m) * ifact(n - m)); }

}  // namespace

double MultiIndex::factorial() const { return ifact(k[0]) * ifact(k[1]); }

MultiIndex MultiIndex::minus(const MultiIndex& o) const {
  require(contains(o), errc::order_out_of_range, "multiindex subtraction requires l <= k");
  return {k[0] - o.k[0], k[1] - o.k[1]};
}

std::string MultiIndex::str() const {
  if (k[1] == 0) return std::to_string(k[0]);
  return "(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + ")";
}

double binom(const MultiIndex& k, const MultiIndex& l) {
  require(k.contains(l), errc::order_out_of_range, "binomial requires l <= k componentwise");
  return ibinom(k.k[0], l.k[0]) * ibinom(k.k[1], l.k[1]);
}

double multinom(const MultiIndex& k, const std::vector<MultiIndex>& parts) {
  double denom = 1.0;
  for (const auto& p : parts) denom *= p.factorial();
  return k.factorial() / denom;
}

double pow_multi(const std::array<double, 2>& h, const MultiIndex& k, int dim) {
  double r = 1.0;
  for (int a = 0; a < dim; ++a)
    for (int i = 0; i < k.k[a]; ++i) r *= h[a];
  return r;
}

std::vector<MultiIndex> multiindices_upto(int max_order, int dim) {
  std::vector<MultiIndex> out;
  if (max_order < 0) return out;
  for (int total = 0; total <= max_order; ++total) {
    if (dim == 1) {
      out.push_back(MultiIndex{total});
    } else {
      for (int k0 = total; k0 >= 0; --k0) out.push_back(MultiIndex{k0, total - k0});
    }
  }
  return out;
}

std::vector<MultiIndex> multiindices_below(double theta, int dim) {
  if (theta <= 0) return {};
  // |k| < theta, so the largest admissible order is ceil(theta) - 1
  int max_order = static_cast<int>(std::ceil(theta)) - 1;
  if (static_cast<double>(max_order) >= theta) --max_order;  // integer theta
  return multiindices_upto(max_order, dim);
}

namespace {

void splits_1d(int k, int r, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (r == 1) {
    cur.push_back(k);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int first = 0; first <= k; ++first) {
    cur.push_back(first);
    splits_1d(k - first, r - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<std::vector<MultiIndex>> index_splits(const MultiIndex& k, int r, int dim) {
  std::vector<std::vector<int>> s0, s1;
  std::vector<int> cur;
  splits_1d(k.k[0], r, cur, s0);
  if (dim == 2) {
    splits_1d(k.k[1], r, cur, s1);
  } else {
    s1.push_back(std::vector<int>(r, 0));
  }
  std::vector<std::vector<MultiIndex>> out;
  out.reserve(s0.size() * s1.size());
  for (const auto& a : s0)
    for (const auto& b : s1) {
      std::vector<MultiIndex> parts(r);
      for (int i = 0; i < r; ++i) parts[i] = MultiIndex{a[i], b[i]};
      out.push_back(std::move(parts));
    }
  return out;
}

}  // namespace lp
