#pragma once

// Counter-based random streams: sample (master_seed, stream, index) is the
// same no matter which worker draws it or in which order.

#include <cstdint>
#include <vector>

namespace kinuq::uq {

struct RandomSample {
  std::vector<double> z;  // i.i.d. Uniform[-1, 1]
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t index = 0;
};

// Reserved stream ids. Repetition j of an experiment offsets the stream by
// j * kStreamsPerRepetition.
namespace streams {
inline constexpr std::uint64_t kMlmcLevel0 = 0;  // level l uses kMlmcLevel0 + l
inline constexpr std::uint64_t kMonteCarlo = 100;
inline constexpr std::uint64_t kCandidates = 200;
inline constexpr std::uint64_t kHeldOut = 300;
inline constexpr std::uint64_t kStreamsPerRepetition = 1000;
}  // namespace streams

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t stream,
                          std::uint64_t index) noexcept;

RandomSample draw_sample(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index,
                         std::size_t dim);
std::vector<RandomSample> draw_samples(std::size_t n, std::size_t dim, std::uint64_t master_seed,
                                       std::uint64_t stream = 0);

}  // namespace kinuq::uq
