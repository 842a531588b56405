#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lp/errors.hpp"

namespace lp {

// An ordered list of component regularities. Every contiguous partial sum
// must stay clear of the integers (tolerance 1e-9); the correction-function
// recursion changes form at integer thresholds, so ties are construction
// errors rather than runtime surprises.
class Word {
 public:
  explicit Word(std::vector<double> alphas, std::string label = "")
      : alphas_(std::move(alphas)), label_(std::move(label)) {
    require(!alphas_.empty(), errc::unbound_component, "a word needs at least one component");
    for (std::size_t s = 0; s < alphas_.size(); ++s) {
      double sum = 0.0;
      for (std::size_t e = s; e < alphas_.size(); ++e) {
        require(alphas_[e] > 0.0, errc::nonpositive_regularity,
                "component regularities must be positive");
        sum += alphas_[e];
        require(std::abs(sum - std::round(sum)) > 1e-9, errc::integer_regularity,
                "partial regularity sum " + std::to_string(sum) + " is an integer");
      }
    }
    if (label_.empty()) {
      for (std::size_t i = 0; i < alphas_.size(); ++i) label_ += static_cast<char>('1' + i);
    }
  }

  int size() const { return static_cast<int>(alphas_.size()); }
  double alpha(int i) const { return alphas_[static_cast<std::size_t>(i)]; }

  // regularity of the contiguous subword [s, s+len)
  double alpha_sum(int s, int len) const {
    double sum = 0.0;
    for (int i = s; i < s + len; ++i) sum += alphas_[static_cast<std::size_t>(i)];
    return sum;
  }

  const std::string& label() const { return label_; }
  const std::vector<double>& alphas() const { return alphas_; }

 private:
  std::vector<double> alphas_;
  std::string label_;
};

}  // namespace lp
