#include "regsets/intervals.hpp"

#include <algorithm>
#include <cmath>

namespace regsets {

// ---------------------------------------------------------------------------
// BigUint

BigUint::BigUint(std::uint64_t v) {
  if (v != 0) limbs_.push_back(v);
}

void BigUint::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint BigUint::from_pow(std::uint64_t base, unsigned exp) {
  BigUint out(1);
  BigUint b(base);
  while (exp > 0) {
    if (exp & 1u) out = out * b;
    b = b * b;
    exp >>= 1u;
  }
  return out;
}

BigUint BigUint::operator+(const BigUint& o) const {
  BigUint out;
  out.limbs_.resize(std::max(limbs_.size(), o.limbs_.size()) + 1, 0);
  unsigned __int128 carry = 0;
  for (std::size_t i = 0; i < out.limbs_.size(); ++i) {
    unsigned __int128 acc = carry;
    if (i < limbs_.size()) acc += limbs_[i];
    if (i < o.limbs_.size()) acc += o.limbs_[i];
    out.limbs_[i] = static_cast<std::uint64_t>(acc);
    carry = acc >> 64;
  }
  out.trim();
  return out;
}

BigUint BigUint::operator-(const BigUint& o) const {
  require(compare(o) >= 0, ErrorCode::InvalidParams, "BigUint underflow");
  BigUint out;
  out.limbs_.resize(limbs_.size(), 0);
  std::int64_t borrow = 0;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    unsigned __int128 lhs = limbs_[i];
    unsigned __int128 rhs = (i < o.limbs_.size() ? o.limbs_[i] : 0);
    rhs += static_cast<unsigned __int128>(borrow);
    if (lhs >= rhs) {
      out.limbs_[i] = static_cast<std::uint64_t>(lhs - rhs);
      borrow = 0;
    } else {
      out.limbs_[i] = static_cast<std::uint64_t>((static_cast<unsigned __int128>(1) << 64) + lhs - rhs);
      borrow = 1;
    }
  }
  out.trim();
  return out;
}

BigUint BigUint::operator*(const BigUint& o) const {
  BigUint out;
  if (limbs_.empty() || o.limbs_.empty()) return out;
  out.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    unsigned __int128 carry = 0;
    for (std::size_t j = 0; j < o.limbs_.size(); ++j) {
      unsigned __int128 acc = static_cast<unsigned __int128>(limbs_[i]) * o.limbs_[j] +
                              out.limbs_[i + j] + carry;
      out.limbs_[i + j] = static_cast<std::uint64_t>(acc);
      carry = acc >> 64;
    }
    std::size_t k = i + o.limbs_.size();
    while (carry != 0) {
      unsigned __int128 acc = static_cast<unsigned __int128>(out.limbs_[k]) + carry;
      out.limbs_[k] = static_cast<std::uint64_t>(acc);
      carry = acc >> 64;
      ++k;
    }
  }
  out.trim();
  return out;
}

int BigUint::compare(const BigUint& o) const {
  if (limbs_.size() != o.limbs_.size()) return limbs_.size() < o.limbs_.size() ? -1 : 1;
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
  }
  return 0;
}

double BigUint::to_double() const {
  double out = 0.0;
  for (std::size_t i = limbs_.size(); i-- > 0;) out = out * 18446744073709551616.0 + static_cast<double>(limbs_[i]);
  return out;
}

std::string BigUint::to_string() const {
  if (limbs_.empty()) return "0";
  // Repeated division by 10^18 over the limb vector.
  std::vector<std::uint64_t> work(limbs_);
  std::string out;
  const std::uint64_t chunk = 1000000000000000000ULL;
  while (!work.empty()) {
    unsigned __int128 rem = 0;
    for (std::size_t i = work.size(); i-- > 0;) {
      unsigned __int128 acc = (rem << 64) | work[i];
      work[i] = static_cast<std::uint64_t>(acc / chunk);
      rem = acc % chunk;
    }
    while (!work.empty() && work.back() == 0) work.pop_back();
    std::string part = std::to_string(static_cast<std::uint64_t>(rem));
    if (!work.empty()) part = std::string(18 - part.size(), '0') + part;
    out = part + out;
  }
  return out;
}

// ---------------------------------------------------------------------------
// BigRational

// Rationals keep denominators as structured products; normalization is
// skipped and magnitudes stay modest for the depths in scope.
BigRational BigRational::of(std::uint64_t n, std::uint64_t d) {
  require(d != 0, ErrorCode::InvalidParams, "zero denominator");
  return {BigUint(n), BigUint(d)};
}

BigRational BigRational::operator+(const BigRational& o) const {
  return {num * o.den + o.num * den, den * o.den};
}

BigRational BigRational::operator-(const BigRational& o) const {
  return {num * o.den - o.num * den, den * o.den};
}

BigRational BigRational::operator*(const BigRational& o) const {
  return {num * o.num, den * o.den};
}

int BigRational::compare(const BigRational& o) const {
  return (num * o.den).compare(o.num * den);
}

double BigRational::to_double() const {
  const double n = num.to_double();
  const double d = den.to_double();
  if (std::isfinite(n) && std::isfinite(d) && d > 0.0) return n / d;
  fail(ErrorCode::PrecisionLoss, "rational magnitude exceeds double range");
}

// ---------------------------------------------------------------------------
// Interval families

std::vector<Interval> interval_family(double a, double b, double lambda, double t_frac) {
  require(a < b, ErrorCode::InvalidParams, "need a < b");
  require(lambda > 0.0 && lambda < 0.5, ErrorCode::InvalidParams, "need 0 < lambda < 1/2");
  require(t_frac > 0.0 && t_frac < 1.0, ErrorCode::InvalidParams, "need 0 < t_frac < 1");

  int l = 1;
  double covered = lambda;  // 1 - (1 - lambda)^l
  while (covered <= t_frac) {
    ++l;
    covered = 1.0 - std::pow(1.0 - lambda, l);
    require(l <= 64, ErrorCode::InvalidSchedule, "sub-level count exploded");
  }

  // Gap intervals J_{k,i} of level k; intervals I are their mid-pieces.
  std::vector<Interval> out;
  std::vector<std::pair<double, double>> gaps{{0.0, 1.0}};
  for (int k = 1; k <= l; ++k) {
    std::vector<std::pair<double, double>> next_gaps;
    for (const auto& [lo, hi] : gaps) {
      const double len = hi - lo;
      const double mid_len = lambda * len;
      const double i_lo = lo + (len - mid_len) / 2.0;
      const double i_hi = i_lo + mid_len;
      Interval iv;
      iv.a = a + (b - a) * i_lo;
      iv.b = a + (b - a) * i_hi;
      iv.level = 1;
      iv.klass = k;
      out.push_back(iv);
      next_gaps.push_back({lo, i_lo});
      next_gaps.push_back({i_hi, hi});
    }
    gaps.swap(next_gaps);
  }
  return out;
}

std::vector<double> default_lambda_schedule(int depth) {
  std::vector<double> out;
  for (int k = 1; k <= depth; ++k) out.push_back(1.0 / static_cast<double>(k + 2));
  return out;
}

std::vector<double> default_t_schedule(int depth) {
  std::vector<double> out;
  for (int k = 1; k <= depth; ++k) out.push_back(std::exp(-std::pow(2.0, -k)));
  return out;
}

namespace {

int sublevel_count(double lambda, double t_frac) {
  int l = 1;
  while (1.0 - std::pow(1.0 - lambda, l) <= t_frac) {
    ++l;
    require(l <= 64, ErrorCode::InvalidSchedule, "sub-level count exploded");
  }
  return l;
}

// Exact 1 - (1 - lambda)^l for lambda = 1/den.
BigRational level_total(std::uint64_t den, int l) {
  // 1 - ((den-1)/den)^l = (den^l - (den-1)^l) / den^l
  BigUint den_l = BigUint::from_pow(den, static_cast<unsigned>(l));
  BigUint num = den_l - BigUint::from_pow(den - 1, static_cast<unsigned>(l));
  return {num, den_l};
}

}  // namespace

BigRational IntervalFamily::total_fraction(int m) const {
  require(m >= 1 && m <= depth(), ErrorCode::InvalidParams, "level out of range");
  BigRational total = BigRational::of(1, 1);
  for (int j = 0; j < m; ++j) total = total * levels[static_cast<std::size_t>(j)].total;
  return total;
}

IntervalFamily build_counterexample(const std::vector<double>& lambda_seq,
                                    const std::vector<double>& t_seq, int depth,
                                    const CounterexampleOptions& opts) {
  require(depth >= 1, ErrorCode::InvalidParams, "depth must be >= 1");
  require(static_cast<int>(lambda_seq.size()) >= depth && static_cast<int>(t_seq.size()) >= depth,
          ErrorCode::InvalidSchedule, "schedules shorter than the requested depth");
  double surrogate = 0.0;
  for (int k = 0; k < depth; ++k) {
    const double lambda = lambda_seq[static_cast<std::size_t>(k)];
    const double t = t_seq[static_cast<std::size_t>(k)];
    require(lambda > 0.0 && lambda < 0.5, ErrorCode::InvalidSchedule, "lambda_k outside (0, 1/2)");
    require(t > 0.0 && t < 1.0, ErrorCode::InvalidSchedule, "t_k outside (0, 1)");
    if (k > 0)
      require(lambda < lambda_seq[static_cast<std::size_t>(k - 1)], ErrorCode::InvalidSchedule,
              "lambda_k must decrease");
    surrogate += 1.0 - t;
  }
  require(surrogate < 20.0, ErrorCode::InvalidSchedule,
          "sum of (1 - t_k) too large for a positive product");

  IntervalFamily family;
  family.a = 0.0;
  family.b = 1.0;

  for (int k = 0; k < depth; ++k) {
    FamilyLevel level;
    level.lambda = lambda_seq[static_cast<std::size_t>(k)];
    level.t_target = t_seq[static_cast<std::size_t>(k)];
    level.sublevels = sublevel_count(level.lambda, level.t_target);
    // Exact totals need a rational lambda; the default schedule is 1/(k+2).
    const double inv = 1.0 / level.lambda;
    const double rounded = std::round(inv);
    if (std::fabs(inv - rounded) < 1e-9 && rounded >= 3.0 && rounded <= 1e15) {
      level.lambda_den = static_cast<std::uint64_t>(rounded);
      level.total = level_total(level.lambda_den, level.sublevels);
    } else {
      level.lambda_den = 0;
      // Falls back to a float total; exactness claims are gated on lambda_den.
      const double v = 1.0 - std::pow(1.0 - level.lambda, level.sublevels);
      level.total = {BigUint(static_cast<std::uint64_t>(v * 9e15)), BigUint(9000000000000000ULL)};
    }
    family.levels.push_back(std::move(level));
  }

  // Explicit deepest-level intervals while the count stays within budget.
  std::vector<Interval> current{{0.0, 1.0, 0, 0}};
  family.explicit_complete = true;
  for (int k = 0; k < depth && family.explicit_complete; ++k) {
    const auto& level = family.levels[static_cast<std::size_t>(k)];
    const double per_parent = std::pow(2.0, level.sublevels) - 1.0;
    if (static_cast<double>(current.size()) * per_parent > static_cast<double>(opts.explicit_budget)) {
      family.explicit_complete = false;
      break;
    }
    std::vector<Interval> next;
    for (const auto& iv : current) {
      auto children = interval_family(iv.a, iv.b, level.lambda, level.t_target);
      for (auto& ch : children) {
        ch.level = k + 1;
        next.push_back(ch);
      }
    }
    current.swap(next);
  }
  if (family.explicit_complete) family.explicit_intervals = std::move(current);
  return family;
}

WitnessReport nonregularity_witness(const IntervalFamily& family, double s, double C) {
  require(s > 0.0, ErrorCode::InvalidParams, "need s > 0");
  require(C >= 1.0, ErrorCode::InvalidParams, "need C >= 1");
  WitnessReport report;
  report.threshold = std::pow(C, -1.0 / s) / 4.0;

  int found = 0;
  for (int m = 1; m <= family.depth(); ++m) {
    if (family.levels[static_cast<std::size_t>(m - 1)].lambda < report.threshold) {
      found = m;
      break;
    }
  }
  if (found == 0) {
    report.status = WitnessStatus::Inconclusive;
    report.message =
        "no level reaches lambda_m < C^{-1/s}/4 within this depth; deepen the family to certify";
    return report;
  }

  report.level = found;
  report.lambda_m = family.levels[static_cast<std::size_t>(found - 1)].lambda;

  // Cascade soundness: within one parent, deeper classes are strictly shorter
  // (class length factor lambda (1-lambda)^{k-1} 2^{1-k} strictly decreases),
  // so processing intervals shortest-first always sees an ambient gap J with
  // I mid-placed, I cap F = J cap F and |I| = lambda_m |J|.
  report.grading_verified = true;
  for (const auto& level : family.levels) {
    const double ratio = (1.0 - level.lambda) / 2.0;
    if (!(ratio < 1.0)) report.grading_verified = false;
  }
  double classes = 1.0;
  for (int j = 0; j < found; ++j)
    classes *= static_cast<double>(family.levels[static_cast<std::size_t>(j)].sublevels);
  report.classes = classes < 1e18 ? static_cast<std::uint64_t>(classes) : UINT64_MAX;

  report.status = WitnessStatus::EmptyRegularSubset;
  report.message =
      "level " + std::to_string(found) + " has lambda = " + std::to_string(report.lambda_m) +
      " < C^{-1/s}/4 = " + std::to_string(report.threshold) +
      "; the mid-interval bound 4^{-s} d(J)^s <= C (lambda d(J))^s fails, emptying every class "
      "shortest-first";
  return report;
}

WeightedNet family_net(const IntervalFamily& family) {
  require(family.explicit_complete && !family.explicit_intervals.empty(), ErrorCode::InvalidParams,
          "family has no complete explicit interval list");
  std::vector<double> xs, ws;
  double min_len = 1e300;
  for (const auto& iv : family.explicit_intervals) {
    const double len = iv.b - iv.a;
    min_len = std::min(min_len, len);
    xs.push_back(iv.a);
    ws.push_back(len / 3.0);
    xs.push_back((iv.a + iv.b) / 2.0);
    ws.push_back(len / 3.0);
    xs.push_back(iv.b);
    ws.push_back(len / 3.0);
  }
  return WeightedNet(1, std::move(xs), std::move(ws), min_len / 2.0);
}

}  // namespace regsets
