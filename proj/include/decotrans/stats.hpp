#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "decotrans/log_real.hpp"

namespace decotrans {

/// Streaming mean/variance (Welford) with the standard pairwise merge.
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  void merge(const RunningStat& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    std::int64_t n = n_ + o.n_;
    double d = o.mean_ - mean_;
    double mean = mean_ + d * static_cast<double>(o.n_) / static_cast<double>(n);
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) /
                       static_cast<double>(n);
    mean_ = mean;
    n_ = n;
  }

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {
    if (n_ < 2) return 0.0;
    return m2_ / static_cast<double>(n_ - 1);
  }
  double stderr_of_mean() const {
    if (n_ < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n_));
  }

 private:
  friend class ScaledRunningStat;

  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Welford statistics of samples that may span hundreds of orders of
/// magnitude. Internally keeps moments of x_i * exp(-scale) and rescales
/// whenever a larger sample arrives, so localized-regime resistances never
/// saturate to inf.
class ScaledRunningStat {
 public:
  void add(LogReal x) {
    align(x.log());
    double v = x.is_zero() ? 0.0 : std::exp(x.log() - scale_);
    stat_.add(v);
  }

  void merge(const ScaledRunningStat& o) {
    if (o.stat_.count() == 0) return;
    ScaledRunningStat other = o;
    if (scale_ < other.scale_) {
      align(other.scale_);
    } else {
      other.align(scale_);
    }
    stat_.merge(other.stat_);
  }

  std::int64_t count() const { return stat_.count(); }

  LogReal mean() const {
    if (stat_.count() == 0 || stat_.mean() <= 0.0) return LogReal();
    return LogReal::from_log(scale_ + std::log(stat_.mean()));
  }
  LogReal stderr_of_mean() const {
    double se = stat_.stderr_of_mean();
    if (se <= 0.0) return LogReal();
    return LogReal::from_log(scale_ + std::log(se));
  }

 private:
  void align(double new_scale) {
    if (std::isinf(new_scale) && new_scale < 0) return;
    if (stat_.count() == 0 || new_scale > scale_) {
      if (stat_.count() > 0) {
        // Re-express the accumulated moments at the larger scale.
        double r = std::exp(scale_ - new_scale);
        RunningStat rescaled;
        rescaled = rescale(stat_, r);
        stat_ = rescaled;
      }
      scale_ = new_scale;
    }
  }

  static RunningStat rescale(const RunningStat& s, double r) {
    RunningStat out;
    // mean and M2 transform as mean*r and M2*r^2; reproduce via merge-free
    // reconstruction to keep RunningStat's internals private.
    out.n_ = s.n_;
    out.mean_ = s.mean_ * r;
    out.m2_ = s.m2_ * r * r;
    return out;
  }

  double scale_ = -std::numeric_limits<double>::infinity();
  RunningStat stat_;
};

}  // namespace decotrans
