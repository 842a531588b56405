#include "lp/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace lp {

namespace {

void axpy(GridFn& acc, double c, const GridFn& x) {
  for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += c * x.v[i];
}

// acc += c * a .* b
void mul_axpy(GridFn& acc, double c, const GridFn& a, const GridFn& b) {
  for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += c * a.v[i] * b.v[i];
}

}  // namespace

GridFn to_gridfn(const Field& f) { return GridFn{f.dim(), f.n(), f.samples()}; }

CalcContext::CalcContext(const DyadicPartition& part, Word word,
                         std::vector<BlockSequence> comps, int shift)
    : part_(&part), word_(std::move(word)), comps_(std::move(comps)), shift_(shift),
      j_cap_(part.j_cap()) {
  require(shift_ >= 0, errc::order_out_of_range, "shift must be nonnegative");
  require(static_cast<int>(comps_.size()) == word_.size(), errc::unbound_component,
          "word length does not match the number of bound sequences");
  for (int i = 0; i < word_.size(); ++i) {
    const auto& seq = comps_[static_cast<std::size_t>(i)];
    require(seq.size() == j_cap_, errc::grid_mismatch,
            "component " + std::to_string(i + 1) + " has the wrong number of blocks");
    for (const auto& b : seq.blocks) part_->check_field(b);
    // truncation guard: the discarded tail of each sequence must be
    // negligible at this grid's deepest scale
    double ref = 0.0;
    for (int j = 0; j < seq.size(); ++j) ref = std::max(ref, seq.block_norm(j));
    double tail = seq.block_norm(seq.size() - 1);
    require(tail <= ref * std::exp2(-0.5 * part_->j_max() * word_.alpha(i)) + 1e-300,
            errc::unresolved_bandwidth,
            "component " + std::to_string(i + 1) + " still carries mass at the last block");
  }
}

void CalcContext::build_level(int s, int len) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (blocks_.count(key(s, len, 0, 0))) return;
  }
  int dim = part_->dim();
  int n = part_->n();
  std::vector<Field> level;
  level.reserve(static_cast<std::size_t>(j_cap_));
  if (len == 1) {
    for (int j = 0; j < j_cap_; ++j)
      level.push_back(comps_[static_cast<std::size_t>(s)][j]);
  } else {
    // blocks of ((f_s,...),f_{s+len-1}): prefix of the left word below
    // j - shift times the right component's block j
    const BlockSequence& right = comps_[static_cast<std::size_t>(s + len - 1)];
    for (int j = 0; j < j_cap_; ++j)
      level.push_back(Field::product(f_prefix(s, len - 1, j - shift_), right[j]));
  }
  std::vector<Field> pref;
  pref.reserve(static_cast<std::size_t>(j_cap_) + 1);
  Field acc = Field::zero(dim, n);
  pref.push_back(acc);
  for (int j = 0; j < j_cap_; ++j) {
    acc = acc + level[static_cast<std::size_t>(j)];
    pref.push_back(acc);
  }
  std::lock_guard<std::mutex> lock(mu_);
  for (int j = 0; j < j_cap_; ++j) {
    blocks_.emplace(key(s, len, 0, j), std::move(level[static_cast<std::size_t>(j)]));
    prefixes_.emplace(key(s, len, 0, j), pref[static_cast<std::size_t>(j)]);
  }
  prefixes_.emplace(key(s, len, 0, j_cap_), pref[static_cast<std::size_t>(j_cap_)]);
  sums_.emplace(key(s, len, 0, 0), pref[static_cast<std::size_t>(j_cap_)]);
}

const Field& CalcContext::f_block(int s, int len, int j) const {
  require(s >= 0 && len >= 1 && s + len <= word_.size(), errc::unbound_component,
          "subword out of range");
  require(j >= 0 && j < j_cap_, errc::order_out_of_range, "block index out of range");
  build_level(s, len);
  std::lock_guard<std::mutex> lock(mu_);
  return blocks_.at(key(s, len, 0, j));
}

const Field& CalcContext::f_prefix(int s, int len, int j) const {
  require(s >= 0 && len >= 1 && s + len <= word_.size(), errc::unbound_component,
          "subword out of range");
  build_level(s, len);
  int jc = std::clamp(j, 0, j_cap_);
  std::lock_guard<std::mutex> lock(mu_);
  return prefixes_.at(key(s, len, 0, jc));
}

const Field& CalcContext::f_sum(int s, int len) const { return f_prefix(s, len, j_cap_); }

const GridFn& CalcContext::d_kj(int s, int len, const MultiIndex& k, int j) const {
  Key id = key(s, len, k.packed(), j);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = dkj_.find(id);
    if (it != dkj_.end()) return it->second;
  }
  GridFn out = to_gridfn(spectral_derivative(f_block(s, len, j), k, *part_));
  for (int m = 1; m <= len - 1; ++m) {
    double a_pre = alpha(s, m);
    double a_suf = alpha(s + m, len - m);
    for (const auto& k1 : multiindices_upto(k.order(), part_->dim())) {
      if (!k.contains(k1)) continue;
      if (!(k1.order() < a_pre)) continue;
      MultiIndex k2 = k.minus(k1);
      if (!(k2.order() >= a_suf)) continue;
      mul_axpy(out, -binom(k, k1), d_k(s, m, k1), d_kj(s + m, len - m, k2, j));
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  return dkj_.emplace(id, std::move(out)).first->second;
}

const GridFn& CalcContext::d_k(int s, int len, const MultiIndex& k) const {
  double a = alpha(s, len);
  require(k.order() < a, errc::order_out_of_range,
          "summed correction only exists for |k| < " + std::to_string(a));
  Key id = key(s, len, k.packed(), 0);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = dk_.find(id);
    if (it != dk_.end()) return it->second;
  }
  GridFn out{part_->dim(), part_->n(),
             std::vector<double>(f_block(s, len, 0).size(), 0.0)};
  for (int j = 0; j < j_cap_; ++j) axpy(out, 1.0, d_kj(s, len, k, j));
  std::lock_guard<std::mutex> lock(mu_);
  return dk_.emplace(id, std::move(out)).first->second;
}

const GridFn& CalcContext::c_kj(int s, int len, const MultiIndex& k, int j) const {
  Key id = key(s, len, k.packed(), j);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = ckj_.find(id);
    if (it != ckj_.end()) return it->second;
  }
  GridFn out = to_gridfn(spectral_derivative(f_prefix(s, len, j), k, *part_));
  if (k.order() < alpha(s, len)) axpy(out, -1.0, d_k(s, len, k));
  for (int m = 1; m <= len - 1; ++m) {
    double a_pre = alpha(s, m);
    for (const auto& k1 : multiindices_upto(k.order(), part_->dim())) {
      if (!k.contains(k1)) continue;
      if (!(k1.order() < a_pre)) continue;
      MultiIndex k2 = k.minus(k1);
      mul_axpy(out, -binom(k, k1), d_k(s, m, k1), c_kj(s + m, len - m, k2, j));
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  return ckj_.emplace(id, std::move(out)).first->second;
}

double CalcContext::t_poly(int s, int len, const GridIndex& x, const GridIndex& y,
                           std::optional<double> theta) const {
  double th = theta.value_or(alpha(s, len));
  Displacement d = displacement(part_->dim(), part_->n(), x, y);
  double v = 0.0;
  for (const auto& k : multiindices_below(th, part_->dim()))
    v += pow_multi(d.h, k, part_->dim()) / k.factorial() * d_k(s, len, k).at(x);
  return v;
}

double CalcContext::omega(int s, int len, const GridIndex& x, const GridIndex& y) const {
  double v = f_sum(s, len).at(y) - t_poly(s, len, x, y);
  for (int m = 1; m <= len - 1; ++m)
    v -= t_poly(s, m, x, y) * omega(s + m, len - m, x, y);
  return v;
}

double CalcContext::omega_theta_j(int s, int len, double theta, int j, const GridIndex& x,
                                  const GridIndex& y) const {
  Displacement d = displacement(part_->dim(), part_->n(), x, y);
  double v = f_block(s, len, j).at(y);
  for (const auto& k : multiindices_below(theta, part_->dim()))
    v -= pow_multi(d.h, k, part_->dim()) / k.factorial() * d_kj(s, len, k, j).at(x);
  for (int m = 1; m <= len - 1; ++m)
    v -= t_poly(s, m, x, y) *
         omega_theta_j(s + m, len - m, alpha(s + m, len - m), j, x, y);
  return v;
}

double CalcContext::omega_theta_prefix(int s, int len, double theta, int j_excl,
                                       const GridIndex& x, const GridIndex& y) const {
  double v = 0.0;
  for (int i = 0; i < std::min(j_excl, j_cap_); ++i) v += omega_theta_j(s, len, theta, i, x, y);
  return v;
}

// ---- concrete objects ----

Field d2_correction(const Field& f, const Field& g, const MultiIndex& k, double alpha, double beta,
                    const DyadicPartition& part) {
  require(k.order() < alpha + beta, errc::order_out_of_range,
          "correction coefficient needs |k| < alpha + beta");
  Field out = spectral_derivative(paraproduct(f, g, part), k, part);
  for (const auto& k1 : multiindices_upto(k.order(), part.dim())) {
    if (!k.contains(k1)) continue;
    if (!(k1.order() < alpha)) continue;
    MultiIndex k2 = k.minus(k1);
    if (!(k2.order() >= beta)) continue;
    Field term = Field::product(spectral_derivative(f, k1, part), spectral_derivative(g, k2, part));
    out = out - term.scaled(binom(k, k1));
  }
  return out;
}

Omega2::Omega2(const Field& f, const Field& g, double alpha, double beta,
               const DyadicPartition& part)
    : part_(&part), alpha_(alpha), beta_(beta), f_(f) {
  check_regularity(alpha);
  check_regularity(beta);
  check_regularity(alpha + beta);
  require(f.band() + g.band() < part.n() / 2.0, errc::aliasing,
          "paraproduct band does not fit the grid");
  pp_ = paraproduct(f, g, part);
  dk_orders_ = multiindices_below(alpha + beta, part.dim());
  for (const auto& k : dk_orders_) dk_fields_.push_back(d2_correction(f, g, k, alpha, beta, part));
  f_orders_ = multiindices_below(alpha, part.dim());
  for (const auto& k : f_orders_) f_derivs_.push_back(spectral_derivative(f, k, part));
  jet_g_ = std::make_unique<ClassicalJet>(g, beta, part);
}

const Field& Omega2::d2(const MultiIndex& k) const {
  for (std::size_t i = 0; i < dk_orders_.size(); ++i)
    if (dk_orders_[i] == k) return dk_fields_[i];
  fail(errc::order_out_of_range, "no correction coefficient for this order");
}

double Omega2::value(const GridIndex& x, const GridIndex& y) const {
  Displacement d = displacement(pp_.dim(), pp_.n(), x, y);
  double v = pp_.at(y);
  for (std::size_t i = 0; i < dk_orders_.size(); ++i)
    v -= pow_multi(d.h, dk_orders_[i], pp_.dim()) / dk_orders_[i].factorial() *
         dk_fields_[i].at(x);
  double rem_g = jet_g_->remainder(x, y);
  for (std::size_t i = 0; i < f_orders_.size(); ++i)
    v -= pow_multi(d.h, f_orders_[i], pp_.dim()) / f_orders_[i].factorial() *
         f_derivs_[i].at(x) * rem_g;
  return v;
}

double Omega2::low_reg_value(const GridIndex& x, const GridIndex& y) const {
  require(alpha_ + beta_ < 1.0, errc::order_out_of_range,
          "low-regularity form needs alpha + beta < 1");
  const Field& g = jet_g_->field();
  return pp_.at(y) - pp_.at(x) - f_.at(x) * (g.at(y) - g.at(x));
}

double omega2(const Field& f, const Field& g, double alpha, double beta, const GridIndex& x,
              const GridIndex& y, const DyadicPartition& part) {
  return Omega2(f, g, alpha, beta, part).value(x, y);
}

BlockSequence moment_seq(const Field& g, const MultiIndex& k, double beta,
                         const DyadicPartition& part) {
  BlockSequence seq;
  seq.alpha = beta + k.order();
  seq.ball = part.rho_outer() / 2.0;
  seq.provenance = "moment_seq";
  seq.blocks.reserve(static_cast<std::size_t>(part.j_cap()));
  for (int j = 0; j < part.j_cap(); ++j) seq.blocks.push_back(moment_block(g, j - 1, k, part));
  return seq;
}

BlockSequence r_seq(const Field& f, const Field& g, double alpha, double beta,
                    const DyadicPartition& part) {
  check_regularity(alpha);
  check_regularity(beta);
  check_regularity(alpha + beta);
  Field pp = paraproduct(f, g, part);
  require(pp.n() == part.n(), errc::aliasing, "paraproduct band does not fit the grid");

  auto f_orders = multiindices_below(alpha, part.dim());
  std::vector<Field> derivs, prefixes;
  for (const auto& k : f_orders) {
    derivs.push_back(spectral_derivative(f, k, part));
    prefixes.push_back(Field::zero(part.dim(), part.n()));
  }
  BlockSequence seq;
  seq.alpha = alpha + beta;
  seq.ball = 2.0;
  seq.provenance = "r_seq";
  for (int j = 0; j < part.j_cap(); ++j) {
    Field rj = lp_block(pp, j - 1, part);
    for (std::size_t i = 0; i < f_orders.size(); ++i) {
      // prefixes[i] = Delta_{<j-2} d^k f
      rj = rj - Field::product(prefixes[i], moment_block(g, j - 1, f_orders[i], part));
      if (j - 2 >= -1) prefixes[i] = prefixes[i] + lp_block(derivs[i], j - 2, part);
    }
    seq.blocks.push_back(std::move(rj));
  }
  return seq;
}

Omega3::Omega3(const Field& f, const Field& g, const Field& h, double alpha, double beta,
               double gamma, const DyadicPartition& part)
    : part_(&part), alpha_(alpha), beta_(beta), gamma_(gamma) {
  for (double a : {alpha, beta, gamma, alpha + beta, beta + gamma, alpha + beta + gamma})
    check_regularity(a);
  pp_ = paraproduct(f, g, part);
  require(pp_.n() == part.n(), errc::aliasing, "inner paraproduct band does not fit the grid");
  pph_ = paraproduct(pp_, h, part);
  require(pph_.n() == part.n(), errc::aliasing, "outer paraproduct band does not fit the grid");

  f_orders_ = multiindices_below(alpha, part.dim());
  for (const auto& k : f_orders_) f_derivs_.push_back(spectral_derivative(f, k, part));

  BlockSequence seq4 = lp_decompose(h, part, gamma);
  for (std::size_t i = 0; i < f_orders_.size(); ++i) {
    const MultiIndex& k = f_orders_[i];
    std::vector<BlockSequence> comps{lp_decompose(f_derivs_[i], part, alpha - k.order()),
                                     moment_seq(g, k, beta, part), seq4};
    ctx_k_.push_back(std::make_unique<CalcContext>(
        part, Word({alpha - k.order(), beta + k.order(), gamma}), std::move(comps), 1));
  }
  ctx_34_ = std::make_unique<CalcContext>(
      part, Word({alpha + beta, gamma}),
      std::vector<BlockSequence>{r_seq(f, g, alpha, beta, part), seq4}, 1);

  d3_orders_ = multiindices_below(alpha + beta + gamma, part.dim());
  for (const auto& l : d3_orders_) {
    GridFn acc = ctx_34_->d_k(0, 2, l);
    for (const auto& ctx : ctx_k_) axpy(acc, 1.0, ctx->d_k(0, 3, l));
    d3_fields_.push_back(std::move(acc));
  }

  d2_orders_ = multiindices_below(alpha + beta, part.dim());
  for (const auto& l : d2_orders_) d2_fields_.push_back(d2_correction(f, g, l, alpha, beta, part));

  omega_gh_ = std::make_unique<Omega2>(g, h, beta, gamma, part);
  for (const auto& l : f_orders_) {
    if (l.is_zero()) {
      mpl_jets_.push_back(nullptr);
    } else {
      mpl_jets_.push_back(std::make_unique<ClassicalJet>(mpl(g, h, l, part),
                                                         beta + gamma + l.order(), part));
    }
  }
  jet_h_ = std::make_unique<ClassicalJet>(h, gamma, part);
}

const GridFn& Omega3::d3(const MultiIndex& l) const {
  for (std::size_t i = 0; i < d3_orders_.size(); ++i)
    if (d3_orders_[i] == l) return d3_fields_[i];
  fail(errc::order_out_of_range, "no correction coefficient for this order");
}

double Omega3::value(const GridIndex& x, const GridIndex& y) const {
  int dim = part_->dim();
  Displacement d = displacement(dim, part_->n(), x, y);
  double v = pph_.at(y);
  for (std::size_t i = 0; i < d3_orders_.size(); ++i)
    v -= pow_multi(d.h, d3_orders_[i], dim) / d3_orders_[i].factorial() * d3_fields_[i].at(x);

  // moment index l pairs with polynomial index k under |k + l| < alpha
  for (std::size_t il = 0; il < f_orders_.size(); ++il) {
    const MultiIndex& l = f_orders_[il];
    double om = l.is_zero() ? omega_gh_->value(x, y) : mpl_jets_[il]->remainder(x, y);
    for (const auto& k : multiindices_below(alpha_ - l.order(), dim)) {
      MultiIndex kl = k + l;
      double df = 0.0;
      for (std::size_t i = 0; i < f_orders_.size(); ++i)
        if (f_orders_[i] == kl) { df = f_derivs_[i].at(x); break; }
      v -= pow_multi(d.h, k, dim) / k.factorial() * df * om;
    }
  }

  double rem_h = jet_h_->remainder(x, y);
  for (std::size_t i = 0; i < d2_orders_.size(); ++i)
    v -= pow_multi(d.h, d2_orders_[i], dim) / d2_orders_[i].factorial() * d2_fields_[i].at(x) *
         rem_h;
  return v;
}

double Omega3::reorg_reference(const GridIndex& x, const GridIndex& y) const {
  double v = ctx_34_->omega(0, 2, x, y);
  for (const auto& ctx : ctx_k_) v += ctx->omega(0, 3, x, y);
  return v;
}

}  // namespace lp
