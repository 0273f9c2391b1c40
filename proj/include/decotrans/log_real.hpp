#pragma once

#include <cmath>
#include <limits>

namespace decotrans {

/// Nonnegative real number stored as its natural logarithm, so that
/// exponentially large resistances (localized regime) never overflow.
class LogReal {
 public:
  LogReal() : log_(-std::numeric_limits<double>::infinity()) {}

  static LogReal from_value(double v) {
    LogReal x;
    x.log_ = v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
    return x;
  }
  static LogReal from_log(double l) {
    LogReal x;
    x.log_ = l;
    return x;
  }

  double log() const { return log_; }
  double log10() const { return log_ / std::log(10.0); }
  /// May return +inf when the value exceeds double range.
  double value() const { return std::exp(log_); }
  bool is_zero() const { return std::isinf(log_) && log_ < 0; }

  LogReal& operator+=(LogReal o) {
    if (o.is_zero()) return *this;
    if (is_zero()) {
      log_ = o.log_;
      return *this;
    }
    double hi = log_ > o.log_ ? log_ : o.log_;
    double lo = log_ > o.log_ ? o.log_ : log_;
    log_ = hi + std::log1p(std::exp(lo - hi));
    return *this;
  }
  friend LogReal operator+(LogReal a, LogReal b) { return a += b; }

  LogReal& operator*=(LogReal o) {
    log_ += o.log_;
    return *this;
  }
  friend LogReal operator*(LogReal a, LogReal b) { return a *= b; }

  friend LogReal operator/(LogReal a, double d) {
    return LogReal::from_log(a.log_ - std::log(d));
  }

  friend bool operator<(LogReal a, LogReal b) { return a.log_ < b.log_; }
  friend bool operator>(LogReal a, LogReal b) { return a.log_ > b.log_; }

 private:
  double log_;
};

}  // namespace decotrans
