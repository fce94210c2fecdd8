#include "kinuq/uq/sampling.hpp"

#include <random>

namespace kinuq::uq {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t stream,
                          std::uint64_t index) noexcept {
  return splitmix64(splitmix64(splitmix64(master_seed) ^ stream) ^ index);
}

RandomSample draw_sample(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index,
                         std::size_t dim) {
  std::mt19937_64 gen(sample_seed(master_seed, stream, index));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RandomSample s;
  s.master_seed = master_seed;
  s.stream = stream;
  s.index = index;
  s.z.resize(dim);
  for (double& z : s.z) z = u(gen);
  return s;
}

std::vector<RandomSample> draw_samples(std::size_t n, std::size_t dim, std::uint64_t master_seed,
                                       std::uint64_t stream) {
  std::vector<RandomSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw_sample(master_seed, stream, i, dim));
  return out;
}

}  // namespace kinuq::uq
