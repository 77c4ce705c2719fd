#include "losskit/random.hpp"

#include "losskit/error.hpp"

#include <stdexcept>

namespace losskit {

Stream::Stream(Seed seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.master), static_cast<std::uint32_t>(seed.master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x6c6f7373u};
  engine_.seed(seq);
}

double Stream::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

std::uint64_t Stream::binomial(std::uint64_t trials, double p) {
  if (trials == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<std::uint64_t> dist(trials, p);
  return dist(engine_);
}

OutcomeSource OutcomeSource::forced(std::vector<int> bits) {
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("forced outcomes must be 0 or 1");
  }
  OutcomeSource s;
  s.bits_ = std::move(bits);
  return s;
}

OutcomeSource OutcomeSource::sampled(Stream& stream) {
  OutcomeSource s;
  s.stream_ = &stream;
  return s;
}

int OutcomeSource::draw(double p0) {
  if (stream_ != nullptr) {
    ++next_;
    return stream_->uniform() < p0 ? 0 : 1;
  }
  if (next_ >= bits_.size()) throw std::invalid_argument("forced outcome list exhausted");
  return bits_[next_++];
}

}  // namespace losskit
