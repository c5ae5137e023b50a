// qnb/oracle.hpp - ground truth by exhaustive enumeration and seeded simulation
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qnb/dist.hpp"
#include "qnb/error.hpp"
#include "qnb/parallel.hpp"
#include "qnb/runcount.hpp"

namespace qnb {

inline constexpr int kMaxEnumerationLength = 22;

/// prod over trials of theta q^f (success) or 1 - theta q^f (failure),
/// f = failures before the trial.
inline double sequence_probability(const BinarySeq& seq, const ModelParams& params) {
  params.validate();
  double p = 1.0;
  double success = params.theta;  // theta q^f
  for (auto b : seq.bits()) {
    if (b) {
      p *= success;
    } else {
      p *= 1.0 - success;
      success *= params.q;
    }
  }
  return p;
}

namespace detail {

inline void check_enumeration_length(int n) {
  if (n < 0) throw parameter_error("enumeration length must be >= 0");
  if (n > kMaxEnumerationLength) throw size_guard_error("enumeration refused: length above 22 (2^n sequences)");
}

// Splits 0..2^n-1 into equal blocks; each block sums in mask order and the
// blocks are merged in order, so totals are bit-stable for any thread count.
template <class Visit>
std::vector<std::vector<double>> enumerate_blocks(int n, std::size_t width, Visit&& visit) {
  const std::uint64_t total = std::uint64_t{1} << n;
  const std::uint64_t block = std::max<std::uint64_t>(1, std::min<std::uint64_t>(total, 4096));
  const std::size_t blocks = static_cast<std::size_t>((total + block - 1) / block);
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(width, 0.0));
  parallel_for(blocks, [&](std::size_t b) {
    const std::uint64_t lo = b * block;
    const std::uint64_t hi = std::min(total, lo + block);
    for (std::uint64_t mask = lo; mask < hi; ++mask) visit(mask, partial[b]);
  });
  return partial;
}

inline std::vector<double> merge_blocks(const std::vector<std::vector<double>>& partial, std::size_t width) {
  std::vector<double> out(width, 0.0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < width; ++i) out[i] += p[i];
  return out;
}

}  // namespace detail

/// P(W = n) for n <= n_max as the total probability of the length-n
/// sequences whose waiting time is exactly n.
inline PmfTable enumerate_waiting_pmf(const RunSpec& spec, const ModelParams& params, int n_max) {
  spec.validate();
  params.validate();
  detail::check_enumeration_length(n_max);
  PmfTable table;
  table.spec = spec;
  table.params = params;
  table.support_min = support_min(spec);
  double mass = 0.0;
  for (int n = table.support_min; n <= n_max; ++n) {
    auto partial = detail::enumerate_blocks(n, 1, [&](std::uint64_t mask, std::vector<double>& acc) {
      RunCounter counter(spec.k, spec.scheme);
      double p = 1.0;
      double success = params.theta;
      for (int j = 0; j < n; ++j) {
        const bool one = (mask >> j) & 1U;
        counter.push(one);
        if (one) {
          p *= success;
        } else {
          p *= 1.0 - success;
          success *= params.q;
        }
        if (counter.count() == spec.r) {
          if (j == n - 1) acc[0] += p;
          return;
        }
      }
    });
    const double pn = detail::merge_blocks(partial, 1)[0];
    table.probs.push_back(pn);
    mass += pn;
  }
  table.tail_bound = 1.0 - mass;
  table.truncated = table.tail_bound > 1e-12;
  return table;
}

/// Distribution of count_runs over all 2^n sequences; index x = count.
/// Trailing counts that no sequence attains are dropped.
inline std::vector<double> enumerate_count_pmf(Scheme scheme, int n, int k, const ModelParams& params) {
  scheme.validate(k);
  params.validate();
  detail::check_enumeration_length(n);
  const auto width = static_cast<std::size_t>(n + 2);  // counts 0..n, last slot: max count seen
  auto partial = detail::enumerate_blocks(n, width, [&](std::uint64_t mask, std::vector<double>& acc) {
    const BinarySeq seq = BinarySeq::from_mask(mask, n);
    const int c = count_runs(seq, k, scheme);
    acc[static_cast<std::size_t>(c)] += sequence_probability(seq, params);
    acc[width - 1] = std::max(acc[width - 1], static_cast<double>(c));
  });
  int max_count = 0;
  for (const auto& p : partial) max_count = std::max(max_count, static_cast<int>(p[width - 1]));
  for (auto& p : partial) p[width - 1] = 0.0;
  auto out = detail::merge_blocks(partial, width);
  out.resize(static_cast<std::size_t>(max_count + 1));
  return out;
}

/// Draws q-geometric trials. Algorithm (pinned for reproducibility):
/// std::mt19937_64 seeded by std::seed_seq{seed lo, seed hi, stream lo,
/// stream hi, substream lo, substream hi} (32-bit words); a uniform is the
/// top 53 bits of one output times 2^-53; trial j is a success iff
/// u < theta q^f with f failures so far.
class TrialSampler {
 public:
  TrialSampler(ModelParams params, std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0)
      : params_((params.validate(), params)), seed_(seed), stream_(stream), substream_(substream) {
    std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(substream), hi(substream)};
    engine_.seed(seq);
  }

  const ModelParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Independent sampler for block `index` of this stream.
  TrialSampler substream(std::uint64_t index) const { return TrialSampler(params_, seed_, stream_, index); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// One trial given `failures` earlier failures.
  bool trial(int failures) { return uniform() < params_.theta * std::pow(params_.q, failures); }

 private:
  static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
  static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

  ModelParams params_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t substream_;
  std::mt19937_64 engine_;
};

inline BinarySeq sample_sequence(TrialSampler& sampler, int n) {
  if (n < 0) throw parameter_error("n must be >= 0");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  int failures = 0;
  for (auto& b : bits) {
    b = sampler.trial(failures) ? 1 : 0;
    if (!b) ++failures;
  }
  return BinarySeq(std::move(bits));
}

inline constexpr long kMonteCarloBlock = 8192;

/// Empirical waiting-time PMF over `replications` paths, each censored at
/// n_cap. Censored paths go to tail_bound. Block b of kMonteCarloBlock
/// replications uses sampler.substream(b), so the histogram is identical for
/// any thread count.
inline PmfTable monte_carlo_waiting_pmf(const RunSpec& spec, const TrialSampler& sampler, long replications,
                                        int n_cap) {
  spec.validate();
  if (replications < 1000) throw parameter_error("replications must be >= 1000");
  const int sm = support_min(spec);
  if (n_cap < sm) throw parameter_error("n_cap must be >= support_min");
  const auto bins = static_cast<std::size_t>(n_cap - sm + 1);
  const std::size_t blocks = static_cast<std::size_t>((replications + kMonteCarloBlock - 1) / kMonteCarloBlock);
  std::vector<std::vector<long>> hist(blocks, std::vector<long>(bins + 1, 0));  // last slot: censored
  parallel_for(blocks, [&](std::size_t b) {
    TrialSampler local = sampler.substream(b);
    const long begin = static_cast<long>(b) * kMonteCarloBlock;
    const long end = std::min(replications, begin + kMonteCarloBlock);
    for (long rep = begin; rep < end; ++rep) {
      RunCounter counter(spec.k, spec.scheme);
      int failures = 0;
      int hit = 0;
      for (int n = 1; n <= n_cap; ++n) {
        const bool one = local.trial(failures);
        if (!one) ++failures;
        counter.push(one);
        if (counter.count() == spec.r) {
          hit = n;
          break;
        }
      }
      if (hit == 0) ++hist[b][bins];
      else ++hist[b][static_cast<std::size_t>(hit - sm)];
    }
  });
  std::vector<long> total(bins + 1, 0);
  for (const auto& h : hist)
    for (std::size_t i = 0; i <= bins; ++i) total[i] += h[i];

  PmfTable table;
  table.spec = spec;
  table.params = sampler.params();
  table.support_min = sm;
  table.probs.resize(bins);
  std::vector<double> se(bins);
  const double R = static_cast<double>(replications);
  for (std::size_t i = 0; i < bins; ++i) {
    const double p = static_cast<double>(total[i]) / R;
    table.probs[i] = p;
    se[i] = std::sqrt(p * (1.0 - p) / R);
  }
  table.std_errors = std::move(se);
  table.tail_bound = static_cast<double>(total[bins]) / R;
  table.truncated = total[bins] > 0;
  return table;
}

}  // namespace qnb
