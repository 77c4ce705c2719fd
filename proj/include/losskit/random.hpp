#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace losskit {

struct Seed {
  std::uint64_t master = 0;
};

// Independent random stream for one unit of work (a shot, a row, a setting).
// The stream depends only on (master seed, index), so results do not depend
// on evaluation order.
class Stream {
 public:
  Stream(Seed seed, std::uint64_t index);

  double uniform();
  std::uint64_t binomial(std::uint64_t trials, double p);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Where measurement outcomes come from: a fixed list (branch enumeration) or
// Born-rule sampling from a stream.
class OutcomeSource {
 public:
  static OutcomeSource forced(std::vector<int> bits);
  static OutcomeSource sampled(Stream& stream);

  // Returns the next outcome given the probability of outcome 0.
  int draw(double p0);
  bool is_forced() const { return stream_ == nullptr; }
  std::size_t consumed() const { return next_; }

 private:
  OutcomeSource() = default;

  std::vector<int> bits_;
  Stream* stream_ = nullptr;
  std::size_t next_ = 0;
};

}  // namespace losskit
